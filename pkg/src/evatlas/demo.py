"""Bundled synthetic demo corpus: 120 coded studies on pedagogical agents in K-12.

Rows are generated from eight latent themes with mostly disjoint vocabulary so
the lexical topic backend has clean structure to find, and coded facets mirror
a typical scoping-review form (learning topic, agent type, grade level, agent
role, study purpose, setting) with publication years spanning 2003-2023 in
three era-shaped waves.

The generator is deterministic; the frozen copy at data/demo_corpus.csv must
stay byte-identical to generate_demo_csv() (a test enforces this).
"""

from __future__ import annotations

import csv
import io
import random
from importlib import resources

_SEED = 20030

THEMES = [
    {
        "name": "virtual reality",
        "title": "Immersive virtual reality agents for {topic} learning",
        "vocab": [
            "virtual", "reality", "immersive", "headset", "simulation", "presence",
            "environment", "embodied", "augmented", "stereoscopic", "navigation", "fidelity",
        ],
    },
    {
        "name": "agent design",
        "title": "Visual design and realism of animated agents in {topic}",
        "vocab": [
            "appearance", "realism", "avatar", "animated", "rendering", "visual",
            "voice", "gesture", "persona", "stylized", "photorealistic", "character",
        ],
    },
    {
        "name": "scaffolding",
        "title": "Adaptive scaffolding by tutoring agents for {topic}",
        "vocab": [
            "scaffolding", "hints", "adaptive", "feedback", "guidance", "metacognitive",
            "prompts", "tutoring", "mastery", "remediation", "worked", "fading",
        ],
    },
    {
        "name": "motivation",
        "title": "Motivational effects of encouraging agents in {topic}",
        "vocab": [
            "motivation", "engagement", "efficacy", "affect", "emotional", "interest",
            "persistence", "enjoyment", "attitudes", "encouragement", "praise", "arousal",
        ],
    },
    {
        "name": "learning outcomes",
        "title": "Effects of agent support on {topic} achievement",
        "vocab": [
            "outcomes", "achievement", "retention", "transfer", "posttest", "gains",
            "scores", "comprehension", "recall", "pretest", "delayed", "measures",
        ],
    },
    {
        "name": "individual differences",
        "title": "Learner characteristics moderating agent benefits in {topic}",
        "vocab": [
            "gender", "differences", "cognitive", "styles", "aptitude", "moderators",
            "traits", "variability", "profiles", "spatial", "working", "memory",
        ],
    },
    {
        "name": "learning by teaching",
        "title": "Teachable agents and learning by teaching in {topic}",
        "vocab": [
            "teachable", "teaching", "tutee", "protege", "peer", "explaining",
            "reciprocal", "ownership", "causal", "maps", "pupil", "mentoring",
        ],
    },
    {
        "name": "social perception",
        "title": "Social perception of agents supporting {topic} skills",
        "vocab": [
            "social", "perception", "autism", "spectrum", "interaction", "nonverbal",
            "inclusive", "accessibility", "communication", "rapport", "empathy", "cues",
        ],
    },
]

LEARNING_TOPICS = ["science", "mathematics", "social skills", "language", "programming", "history"]
AGENT_TYPES = ["Pedagogical", "Conversational", "Multiple roles"]
GRADE_LEVELS = ["primary", "lower secondary", "upper secondary"]
AGENT_ROLES = ["coaching/scaffolding", "information source"]
STUDY_PURPOSES = ["experiment", "feasibility/usability"]
SETTINGS = ["classroom", "laboratory", "online"]

# (year range, study purpose bias, setting bias) per publication wave
_ERAS = [
    ((2003, 2010), "experiment", "laboratory"),
    ((2011, 2018), "experiment", "laboratory"),
    ((2019, 2023), "feasibility/usability", "classroom"),
]

_SURNAMES = [
    "Alvarez", "Becker", "Chen", "Dimitrov", "Engel", "Fujita", "Garcia", "Hansen",
    "Ivanova", "Jensen", "Kumar", "Lindqvist", "Moreau", "Nakamura", "Okafor", "Park",
    "Quinn", "Rossi", "Silva", "Tanaka", "Ustinova", "Varga", "Wang", "Yilmaz",
]


def _abstract(rng: random.Random, vocab: list[str], topic: str, grade: str) -> str:
    w = lambda k: " ".join(rng.sample(vocab, k))
    sentences = [
        f"We examined a pedagogical agent emphasizing {w(3)} for {topic} with {grade} students.",
        f"The agent provided {w(2)} during classroom learning activities and we measured {w(2)}.",
        f"Results indicated that {w(2)} related to {w(2)} among participating students.",
        f"Findings inform the design of agents leveraging {w(2)} in school practice.",
    ]
    return " ".join(sentences[: rng.randint(3, 4)])


def generate_demo_csv() -> str:
    """Deterministic CSV text for the 120-study demo corpus."""
    rng = random.Random(_SEED)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["title", "authors", "year", "abstract",
         "Learning Topic", "Agent Type", "Grade Level", "Agent Role", "Study Purpose", "Setting"]
    )

    # guarantee every year 2003-2023 appears at least once
    years = list(range(2003, 2024))
    year_pool = years + [rng.choice(range(lo, hi + 1)) for (lo, hi), _, _ in _ERAS for _ in range(33)]
    year_pool = year_pool[:120]
    rng.shuffle(year_pool)

    for i in range(120):
        theme = THEMES[i % len(THEMES)]
        year = year_pool[i]
        era = next(e for e in _ERAS if e[0][0] <= year <= e[0][1])

        n_topics = 1 if rng.random() < 0.6 else 2
        topics = rng.sample(LEARNING_TOPICS, n_topics)
        agent_type = rng.choice(AGENT_TYPES)
        # built-in evidence gap: multi-role agents never study language learning
        if agent_type == "Multiple roles":
            topics = [t for t in topics if t != "language"] or ["science"]
        grade = rng.choice(GRADE_LEVELS)
        purpose = era[1] if rng.random() < 0.7 else rng.choice(STUDY_PURPOSES)
        setting = era[2] if rng.random() < 0.6 else rng.choice(SETTINGS)

        authors = ", ".join(
            f"{rng.choice('ABCDEFGHJKLMN')}. {s}" for s in rng.sample(_SURNAMES, rng.randint(1, 3))
        )
        title = theme["title"].format(topic=topics[0]) + f" ({i + 1})"
        abstract = _abstract(rng, theme["vocab"], topics[0], grade)

        row = [title, authors, str(year), abstract, "; ".join(topics), agent_type, grade]
        # ~10% of rows leave agent role / setting uncoded (blank cell = absent)
        row.append("" if rng.random() < 0.1 else rng.choice(AGENT_ROLES))
        row.append(purpose)
        row.append("" if rng.random() < 0.1 else setting)
        writer.writerow(row)
    return out.getvalue()


def demo_csv_text() -> str:
    """The frozen demo corpus CSV shipped as package data."""
    return resources.files("evatlas.data").joinpath("demo_corpus.csv").read_text(encoding="utf-8")
