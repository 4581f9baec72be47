"""Complete deterministic automata, words and state sets.

States are integers ``0 .. num_states - 1`` and letters are indices into the
ordered alphabet. A word is a tuple of letter indices; the empty tuple is the
empty word. Strings are accepted wherever a word is expected and are split
into single-character symbols.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DomainError, InvalidAutomaton

DEFAULT_ALPHABET = ("a", "b")

Word = tuple  # tuple[int, ...]


def validate(obj) -> list[str]:
    """Return every invariant violation of an automaton description.

    ``obj`` may be an :class:`Automaton` or the raw JSON dictionary of the
    file format. An empty list means the description is well formed.
    """
    if isinstance(obj, Automaton):
        return _table_problems(obj.num_states, obj.alphabet, obj.delta)
    problems: list[str] = []
    if not isinstance(obj, Mapping):
        return ["automaton description must be a JSON object"]
    n = obj.get("num_states")
    alphabet = obj.get("alphabet", list(DEFAULT_ALPHABET))
    raw = obj.get("delta")
    if not isinstance(n, int) or isinstance(n, bool):
        return ["num_states must be an integer"]
    if not isinstance(alphabet, list) or not all(isinstance(x, str) for x in alphabet):
        return ["alphabet must be a list of strings"]
    if not isinstance(raw, Mapping):
        return ["delta must map letters to target lists"]
    for key in raw:
        if key not in alphabet:
            problems.append(f"delta row {key!r} is not an alphabet letter")
    problems += _header_problems(n, alphabet)
    for x in alphabet:
        row = raw.get(x)
        if row is None:
            problems.append(f"incomplete transition table: missing row for letter {x!r}")
        elif not isinstance(row, list):
            problems.append(f"delta row {x!r} must be a list")
        else:
            problems += _row_problems(n, x, row)
    return problems


def _header_problems(n, alphabet) -> list[str]:
    problems = []
    if n < 1:
        problems.append(f"num_states must be positive, got {n}")
    if len(set(alphabet)) != len(alphabet):
        problems.append("alphabet symbols must be distinct")
    if any(not x for x in alphabet):
        problems.append("alphabet symbols must be non-empty")
    return problems


def _row_problems(n, x, row) -> list[str]:
    problems = []
    if len(row) < n:
        problems.append(
            f"incomplete transition table: letter {x!r} has {len(row)} of {n} entries"
        )
    elif len(row) > n:
        problems.append(f"letter {x!r} has {len(row)} entries for {n} states")
    for s, t in enumerate(row):
        if not isinstance(t, int) or isinstance(t, bool):
            problems.append(f"delta[{x!r}][{s}] = {t!r} is not an integer")
        elif not 0 <= t < n:
            problems.append(f"target out of range: delta[{x!r}][{s}] = {t}")
    return problems


def _table_problems(n, alphabet, delta) -> list[str]:
    problems = _header_problems(n, alphabet)
    if len(delta) != len(alphabet):
        problems.append(
            f"incomplete transition table: {len(delta)} rows for {len(alphabet)} letters"
        )
    for x, row in zip(alphabet, delta):
        problems += _row_problems(n, x, row)
    return problems


@dataclass(frozen=True)
class Automaton:
    """A complete DFA ``<Q, Sigma, delta>``.

    ``delta[x][s]`` is the image of state ``s`` under letter index ``x``.
    ``labels`` and ``meta`` are presentation data only and do not take part
    in equality.
    """

    num_states: int
    delta: tuple
    alphabet: tuple = DEFAULT_ALPHABET
    labels: tuple | None = field(default=None, compare=False)
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "delta", tuple(tuple(row) for row in self.delta))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        problems = _table_problems(self.num_states, self.alphabet, self.delta)
        if self.labels is not None and len(self.labels) != self.num_states:
            problems.append("labels must name every state")
        if problems:
            raise InvalidAutomaton(problems)

    @property
    def states(self) -> range:
        return range(self.num_states)

    @property
    def letters(self) -> range:
        return range(len(self.alphabet))

    def label(self, s: int) -> str:
        return self.labels[s] if self.labels is not None else str(s)

    def full_set(self) -> StateSet:
        return StateSet((1 << self.num_states) - 1, self.num_states)

    def state_set(self, members: Iterable[int]) -> StateSet:
        return StateSet.of(members, self.num_states)

    def word(self, w) -> Word:
        """Normalise ``w`` (string of symbols or index sequence) to a word."""
        if isinstance(w, str):
            try:
                return tuple(self.alphabet.index(c) for c in w)
            except ValueError:
                raise DomainError(f"word {w!r} uses symbols outside {self.alphabet}") from None
        w = tuple(w)
        for x in w:
            if not (isinstance(x, int) and 0 <= x < len(self.alphabet)):
                raise DomainError(f"letter index {x!r} out of range")
        return w

    def format_word(self, w: Sequence[int]) -> str:
        return "".join(self.alphabet[x] for x in w)

    def image_mask(self, mask: int, x: int) -> int:
        row = self.delta[x]
        out = 0
        while mask:
            low = mask & -mask
            out |= 1 << row[low.bit_length() - 1]
            mask ^= low
        return out


@dataclass(frozen=True)
class StateSet:
    """A subset of ``range(width)`` stored as a canonical bit mask."""

    mask: int
    width: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.width:
            raise DomainError(f"mask {self.mask:#x} has members outside range({self.width})")

    @classmethod
    def of(cls, members: Iterable[int], width: int) -> StateSet:
        mask = 0
        for s in members:
            if not 0 <= s < width:
                raise DomainError(f"state {s} out of range({width})")
            mask |= 1 << s
        return cls(mask, width)

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, s) -> bool:
        return isinstance(s, int) and 0 <= s < self.width and bool(self.mask >> s & 1)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self)) + "}"


def _check_state(A: Automaton, s) -> None:
    if not (isinstance(s, int) and 0 <= s < A.num_states):
        raise DomainError(f"state {s!r} out of range({A.num_states})")


def apply_letter(A: Automaton, s: int, x: int) -> int:
    _check_state(A, s)
    if not (isinstance(x, int) and 0 <= x < len(A.alphabet)):
        raise DomainError(f"letter index {x!r} out of range")
    return A.delta[x][s]


def apply_word(A: Automaton, S, w) -> StateSet:
    """Image of the state set ``S`` under the word ``w``, read left to right."""
    if not isinstance(S, StateSet):
        S = A.state_set(S)
    elif S.width != A.num_states:
        raise DomainError("state set width does not match the automaton")
    mask = S.mask
    for x in A.word(w):
        mask = A.image_mask(mask, x)
    return StateSet(mask, A.num_states)


def run_word(A: Automaton, s: int, w) -> int:
    """Image of a single state under ``w``."""
    _check_state(A, s)
    for x in A.word(w):
        s = A.delta[x][s]
    return s


# -- serialisation -----------------------------------------------------------

def to_dict(A: Automaton) -> dict:
    doc = {
        "num_states": A.num_states,
        "alphabet": list(A.alphabet),
        "delta": {x: list(A.delta[i]) for i, x in enumerate(A.alphabet)},
    }
    if A.meta or A.labels is not None:
        meta = dict(A.meta)
        meta["state_labels"] = [A.label(s) for s in A.states]
        doc["meta"] = meta
    return doc


def from_dict(doc) -> Automaton:
    problems = validate(doc)
    if problems:
        raise InvalidAutomaton(problems)
    alphabet = doc.get("alphabet", list(DEFAULT_ALPHABET))
    meta = dict(doc.get("meta", {}))
    labels = meta.pop("state_labels", None)
    return Automaton(
        num_states=doc["num_states"],
        alphabet=tuple(alphabet),
        delta=tuple(doc["delta"][x] for x in alphabet),
        labels=labels,
        meta=meta,
    )


def dumps(A: Automaton) -> str:
    return json.dumps(to_dict(A), ensure_ascii=False) + "\n"


def save(A: Automaton, path) -> None:
    Path(path).write_text(dumps(A), encoding="utf-8")


def load(path) -> Automaton:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidAutomaton([f"not valid JSON: {exc}"]) from None
    return from_dict(doc)


def to_dot(A: Automaton, name: str = "automaton") -> str:
    """Graphviz rendering; parallel edges share one comma-joined label."""
    lines = [f"digraph {json.dumps(name)} {{", "  rankdir=LR;"]
    for s in A.states:
        lines.append(f"  {s} [label={json.dumps(A.label(s))}];")
    for s in A.states:
        merged: dict[int, list[str]] = {}
        for x in A.letters:
            merged.setdefault(A.delta[x][s], []).append(A.alphabet[x])
        for t, syms in merged.items():
            lines.append(f"  {s} -> {t} [label={json.dumps(','.join(syms))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
