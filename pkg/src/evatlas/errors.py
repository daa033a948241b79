"""Exception hierarchy for the evatlas pipeline.

Every error carries a stable machine-readable ``code`` (the class name) so the
CLI and HTTP layer can emit structured errors without string matching.
"""


class EvatlasError(Exception):
    """Base class for all evatlas errors."""

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        return {"error": self.code, "detail": str(self)}


# --- ingest ---------------------------------------------------------------

class MalformedCsv(EvatlasError):
    pass


class MissingRequiredColumn(EvatlasError):
    pass


class EmptyCorpus(EvatlasError):
    pass


# --- topic engine ---------------------------------------------------------

class PromptTooLarge(EvatlasError):
    pass


class MalformedModelResponse(EvatlasError):
    pass


class EmptyText(EvatlasError):
    pass


class LlmBackendFailure(EvatlasError):
    pass


# --- stability ------------------------------------------------------------

class DomainMismatch(EvatlasError):
    pass


class TooFewRuns(EvatlasError):
    pass


# --- atlas / layout -------------------------------------------------------

class InconsistentInputs(EvatlasError):
    pass


class UnknownStudy(EvatlasError):
    pass


class CanvasTooSmall(EvatlasError):
    pass


# --- query ----------------------------------------------------------------

class UnknownFacet(EvatlasError):
    pass


class UnknownValue(EvatlasError):
    pass


class UnknownTopic(EvatlasError):
    pass


class SameFacet(EvatlasError):
    pass


# --- store / bundles --------------------------------------------------------

class UnknownCorpus(EvatlasError):
    pass


class UnknownRun(EvatlasError):
    pass


class StaleCorpus(EvatlasError):
    pass


class UnsupportedBundleVersion(EvatlasError):
    pass


class MalformedBundle(EvatlasError):
    pass
