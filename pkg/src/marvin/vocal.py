"""Offline vocal command pipeline.

Cascade over scripted utterance streams: an always-on keyword gate, energy
endpointing that closes a capture after sustained silence, and semantic
intent retrieval over a phrase catalogue using idf-weighted character
n-gram cosine similarity. No audio, no network: frames carry a token and an
energy level, which is exactly the part of the chain under test.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import yaml

from .config import VocalConfig
from .messages import ActionKind, ActionRequest, Source

__all__ = [
    "STANDARD_KEYWORDS", "NOISE_CLASS",
    "UtteranceFrame", "IntentCatalogue", "PipelinePhase", "PipelineState",
    "keyword_step", "endpoint", "match_intent", "MatchResult",
    "VocalPipeline", "PhaseError",
]

# The 35-word small-vocabulary keyword set the spotter is trained on, plus
# one silence/noise class. The platform name is one of the 35.
STANDARD_KEYWORDS: tuple[str, ...] = (
    "backward", "bed", "bird", "cat", "dog", "down", "eight", "five",
    "follow", "forward", "four", "go", "happy", "house", "learn", "left",
    "marvin", "nine", "no", "off", "on", "one", "right", "seven", "sheila",
    "six", "stop", "three", "tree", "two", "up", "visual", "wow", "yes",
    "zero",
)
NOISE_CLASS = "_noise_"

_NGRAM_RANGE = (3, 5)
_WORD_RE = re.compile(r"[^a-z0-9 ]+")


class PhaseError(RuntimeError):
    """Operation called in the wrong pipeline phase."""


@dataclass(frozen=True)
class UtteranceFrame:
    stamp: float
    energy: float
    token: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.energy <= 1.0:
            raise ValueError(f"energy must be in [0, 1], got {self.energy}")


def _normalize(text: str) -> str:
    return _WORD_RE.sub(" ", text.lower()).strip()


def _ngrams(text: str) -> Counter:
    padded = f" {_normalize(text)} "
    grams: Counter = Counter()
    for n in range(_NGRAM_RANGE[0], _NGRAM_RANGE[1] + 1):
        for i in range(len(padded) - n + 1):
            grams[padded[i:i + n]] += 1
    return grams


class IntentCatalogue:
    """Task -> example phrases, with precomputed idf-weighted gram vectors."""

    def __init__(self, entries: dict[str, list[str]],
                 trigger_word: str = "marvin",
                 extra_names: tuple[str, ...] = ()):
        if not entries:
            raise ValueError("catalogue must not be empty")
        for task, phrases in entries.items():
            if not phrases:
                raise ValueError(f"task {task!r} has no phrases")
        self.entries = {task: [_normalize(p) for p in phrases]
                        for task, phrases in sorted(entries.items())}
        self.keywords = STANDARD_KEYWORDS + (NOISE_CLASS,)
        self._configured_names: set[str] = set(extra_names)
        self.trigger_word = "marvin"
        self.set_trigger(trigger_word)

        documents = [p for phrases in self.entries.values() for p in phrases]
        n_docs = len(documents)
        doc_freq: Counter = Counter()
        for doc in documents:
            doc_freq.update(set(_ngrams(doc)))
        self._idf = {g: math.log((1 + n_docs) / (1 + df)) + 1.0
                     for g, df in doc_freq.items()}
        self._default_idf = math.log(1 + n_docs) + 1.0  # unseen gram weight
        self._vectors = {
            task: [self._vectorize(p) for p in phrases]
            for task, phrases in self.entries.items()
        }

    def set_trigger(self, word: str) -> None:
        word = word.lower().strip()
        if word not in self.keywords and word not in self._configured_names:
            self._configured_names.add(word)
        self.trigger_word = word

    def _vectorize(self, text: str) -> dict[str, float]:
        weighted = {g: count * self._idf.get(g, self._default_idf)
                    for g, count in _ngrams(text).items()}
        norm = math.sqrt(sum(v * v for v in weighted.values()))
        if norm == 0.0:
            return {}
        return {g: v / norm for g, v in weighted.items()}

    def similarity(self, text: str, task: str) -> float:
        query = self._vectorize(text)
        best = 0.0
        for vec in self._vectors[task]:
            dot = sum(w * vec[g] for g, w in query.items() if g in vec)
            best = max(best, dot)
        return best

    @classmethod
    def load(cls, path: str | Path, **kwargs) -> "IntentCatalogue":
        data = yaml.safe_load(Path(path).read_text())
        if not isinstance(data, dict):
            raise ValueError(f"catalogue file {path} must map tasks to phrase lists")
        return cls({str(k): [str(p) for p in v] for k, v in data.items()}, **kwargs)


@dataclass(frozen=True)
class MatchResult:
    task: str | None        # ActionKind value, or None for NotUnderstood
    score: float
    poi: str | None = None

    @property
    def understood(self) -> bool:
        return self.task is not None

    def to_action(self, source: Source = Source.VOCAL) -> ActionRequest | None:
        if self.task is None:
            return None
        return ActionRequest(ActionKind(self.task), source, poi=self.poi)


def _extract_poi(text: str, poi_names: tuple[str, ...]) -> str | None:
    norm = f" {_normalize(text)} "
    best = None
    for name in sorted(poi_names, key=len, reverse=True):
        if f" {_normalize(name)} " in norm:
            best = name.lower()
            break
    return best


def match_intent(text: str, catalogue: IntentCatalogue,
                 poi_names: tuple[str, ...] = (),
                 threshold: float = 0.35) -> MatchResult:
    """Best catalogue task for a transcript, or NotUnderstood.

    Deterministic: task scores are maxima over phrase cosines, ties break
    on the lexicographically smaller task name. Tasks that need a place
    argument are only accepted when a known POI appears in the text.
    """
    if not _normalize(text):
        return MatchResult(None, 0.0)
    scored = sorted(
        ((task, catalogue.similarity(text, task)) for task in catalogue.entries),
        key=lambda kv: (-kv[1], kv[0]))
    task, score = scored[0]
    if score < threshold:
        return MatchResult(None, score)
    poi = _extract_poi(text, poi_names)
    if task in (ActionKind.NAVIGATE_TO.value, ActionKind.NIGHT_ASSIST.value) and poi is None:
        return MatchResult(None, score)
    return MatchResult(task, score, poi=poi)


class PipelinePhase(Enum):
    IDLE = "Idle"
    CAPTURING = "Capturing"


@dataclass(frozen=True)
class PipelineState:
    phase: PipelinePhase = PipelinePhase.IDLE
    buffer: tuple[str, ...] = ()
    silence_run: float = 0.0
    capture_start: float = 0.0
    last_stamp: float = 0.0


def keyword_step(state: PipelineState, frame: UtteranceFrame,
                 trigger_word: str) -> tuple[PipelineState, bool]:
    """Idle-phase gate: flip to Capturing on the (case-insensitive) trigger."""
    if state.phase is not PipelinePhase.IDLE:
        raise PhaseError("keyword_step requires Idle phase")
    if frame.token is not None and frame.token.lower() == trigger_word.lower():
        return PipelineState(PipelinePhase.CAPTURING, (), 0.0,
                             frame.stamp, frame.stamp), True
    return state, False


@dataclass(frozen=True)
class EndpointResult:
    state: PipelineState
    utterance: str | None = None   # set when the capture closed
    truncated: bool = False


def endpoint(state: PipelineState, frame: UtteranceFrame,
             cfg: VocalConfig) -> EndpointResult:
    """Capturing-phase accumulation with silence-hold endpointing."""
    if state.phase is not PipelinePhase.CAPTURING:
        raise PhaseError("endpoint requires Capturing phase")
    dt = max(0.0, frame.stamp - state.last_stamp)
    if frame.energy >= cfg.silence_threshold:
        buffer = state.buffer + (frame.token,) if frame.token else state.buffer
        silence_run = 0.0
    else:
        buffer = state.buffer
        silence_run = state.silence_run + dt
    new = replace(state, buffer=buffer, silence_run=silence_run,
                  last_stamp=frame.stamp)
    if frame.stamp - state.capture_start > cfg.max_utterance:
        return EndpointResult(PipelineState(), " ".join(new.buffer), truncated=True)
    if silence_run >= cfg.hold_duration:
        return EndpointResult(PipelineState(), " ".join(new.buffer))
    return EndpointResult(new)


@dataclass(frozen=True)
class PipelineOutput:
    triggered: bool = False
    utterance: str | None = None
    truncated: bool = False
    match: MatchResult | None = None
    response: str | None = None


class VocalPipeline:
    """Drives the cascade over a frame stream and renders text responses."""

    def __init__(self, catalogue: IntentCatalogue,
                 cfg: VocalConfig | None = None,
                 poi_names: tuple[str, ...] = ()):
        self.catalogue = catalogue
        self.cfg = cfg or VocalConfig()
        self.poi_names = tuple(poi_names)
        self.state = PipelineState()
        if self.cfg.trigger_word:
            self.catalogue.set_trigger(self.cfg.trigger_word)

    def set_trigger(self, word: str) -> None:
        self.catalogue.set_trigger(word)

    def process_frame(self, frame: UtteranceFrame) -> PipelineOutput:
        if self.state.phase is PipelinePhase.IDLE:
            self.state, triggered = keyword_step(
                self.state, frame, self.catalogue.trigger_word)
            if triggered:
                return PipelineOutput(triggered=True)
            return PipelineOutput()
        result = endpoint(self.state, frame, self.cfg)
        self.state = result.state
        if result.utterance is None:
            return PipelineOutput()
        match = match_intent(result.utterance, self.catalogue,
                             self.poi_names, self.cfg.similarity_threshold)
        return PipelineOutput(utterance=result.utterance,
                              truncated=result.truncated,
                              match=match,
                              response=self.render_response(match))

    def render_response(self, match: MatchResult) -> str:
        if not match.understood:
            return "Sorry, I did not understand that."
        kind = ActionKind(match.task)
        if kind is ActionKind.HELP_REQUEST:
            return ("It sounds like you need help. Should I call for help? "
                    "Say yes to confirm or no to cancel.")
        if match.poi:
            return f"Okay, {kind.value} to {match.poi}."
        return f"Okay, {kind.value}."
