"""Shared text processing: tokenization, stopwords, and cosine helpers.

The tokenizer is intentionally rigid (lowercase, split on non-alphanumerics,
fixed stopword list) because downstream clustering and assignment must be
bit-reproducible across runs and machines.
"""

from __future__ import annotations

import math
import re

# Fixed English stopword list shipped with the artifact. Editing it changes
# every lexical run digest, so treat it as frozen data.
STOPWORDS = frozenset("""
a about above after again against all am an and any are aren as at be because
been before being below between both but by can cannot could couldn did didn
do does doesn doing don down during each few for from further had hadn has
hasn have haven having he her here hers herself him himself his how i if in
into is isn it its itself just ll let me might mightn more most mustn my
myself no nor not now o of off on once only or other our ours ourselves out
over own re s same shan she should shouldn so some such t than that the their
theirs them themselves then there these they this those through to too under
until up ve very was wasn we were weren what when where which while who whom
why will with won would wouldn you your yours yourself yourselves also among
based between can co could e eg et etc g ie may one three two upon using via
within without
""".split())

_TOKEN_RE = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on non-alphanumerics.

    Drops stopwords, single characters, and purely numeric tokens; keeps
    duplicates (callers that need term sets wrap in set()).
    """
    tokens = []
    for tok in _TOKEN_RE.split(text.lower()):
        if len(tok) < 2 or tok in STOPWORDS or tok.isdigit():
            continue
        tokens.append(tok)
    return tokens


def set_cosine(a: set[str], b: set[str]) -> float:
    """Cosine similarity of two token sets (binary term vectors)."""
    if not a or not b:
        return 0.0
    inter = len(a & b)
    if inter == 0:
        return 0.0
    return inter / math.sqrt(len(a) * len(b))
