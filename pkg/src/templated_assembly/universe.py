"""Target strings, templated objects and the membership tests over them.

Objects are plain ``str`` values over the target alphabet plus the wildcard
``*``.  A star-free object is a *literal*; an object with at least one star and
at least one letter is a *template*.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

WILDCARD = "*"

OVERLAPPING = "overlapping"
NON_OVERLAPPING = "non_overlapping"


class AssemblyError(ValueError):
    """Base class for input errors raised by this package."""


class EmptyInput(AssemblyError):
    pass


class WildcardInTarget(AssemblyError):
    pass


class TemplateNotLiteral(AssemblyError):
    pass


class NotATemplate(AssemblyError):
    pass


class EmptySelection(AssemblyError):
    pass


class PositionNotWildcard(AssemblyError):
    pass


class SuffixAutomaton:
    """Suffix automaton over a string; answers containment in O(|x|)."""

    def __init__(self, text: str):
        self.next: list[dict[str, int]] = [{}]
        self.link = [-1]
        self.length = [0]
        last = 0
        for ch in text:
            cur = self._new(self.length[last] + 1)
            p = last
            while p != -1 and ch not in self.next[p]:
                self.next[p][ch] = cur
                p = self.link[p]
            if p == -1:
                self.link[cur] = 0
            else:
                q = self.next[p][ch]
                if self.length[p] + 1 == self.length[q]:
                    self.link[cur] = q
                else:
                    clone = self._new(self.length[p] + 1)
                    self.next[clone] = dict(self.next[q])
                    self.link[clone] = self.link[q]
                    while p != -1 and self.next[p].get(ch) == q:
                        self.next[p][ch] = clone
                        p = self.link[p]
                    self.link[q] = self.link[cur] = clone
            last = cur

    def _new(self, length: int) -> int:
        self.next.append({})
        self.link.append(-1)
        self.length.append(length)
        return len(self.length) - 1

    def __contains__(self, x: str) -> bool:
        state = 0
        for ch in x:
            state = self.next[state].get(ch, -1)
            if state == -1:
                return False
        return True


@dataclass(frozen=True)
class TargetString:
    """The word to be assembled, with its alphabet and substring index.

    Build instances with :func:`build_target`, which validates the input.
    """

    text: str
    alphabet: frozenset = field(init=False)
    substring_index: SuffixAutomaton = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.text))
        object.__setattr__(self, "substring_index", SuffixAutomaton(self.text))

    def __len__(self) -> int:
        return len(self.text)

    def __contains__(self, x: str) -> bool:
        return x in self.substring_index

    def occurrences(self, x: str) -> list[int]:
        """All (possibly overlapping) start positions of ``x``."""
        out = []
        i = self.text.find(x)
        while i != -1:
            out.append(i)
            i = self.text.find(x, i + 1)
        return out


def build_target(s: str) -> TargetString:
    if not s:
        raise EmptyInput("target string is empty")
    if WILDCARD in s:
        raise WildcardInTarget(f"wildcard {WILDCARD!r} may not occur in a target")
    return TargetString(s)


def as_target(w) -> TargetString:
    return w if isinstance(w, TargetString) else build_target(w)


def kind(x: str) -> str:
    return "template" if WILDCARD in x else "literal"


def star_count(x: str) -> int:
    return x.count(WILDCARD)


def wildcard_positions(T: str) -> tuple[int, ...]:
    """0-based indices of the wildcards in ``T`` (empty for literals)."""
    return tuple(p for p, ch in enumerate(T) if ch == WILDCARD)


def is_substring(x: str, w) -> bool:
    if WILDCARD in x:
        raise TemplateNotLiteral(f"{x!r} contains a wildcard")
    return bool(x) and x in as_target(w)


def gap_match(T: str, text: str) -> bool:
    """True iff ``T`` matches a contiguous piece of ``text``.

    Literal symbols match exactly and every wildcard absorbs a nonempty block.
    Runs a set-of-states simulation over ``text``; state ``j`` means ``T[:j]``
    has been matched, and a state just past a wildcard may keep absorbing.
    """
    m = len(T)
    if m == 0:
        return False
    states: set[int] = set()
    for ch in text:
        states.add(0)
        nxt = set()
        for j in states:
            if j < m and (T[j] == WILDCARD or T[j] == ch):
                nxt.add(j + 1)
            if j > 0 and T[j - 1] == WILDCARD:
                nxt.add(j)
        if m in nxt:
            return True
        states = nxt
    return False


@lru_cache(maxsize=1 << 18)
def _is_template_cached(T: str, text: str) -> bool:
    return gap_match(T, text)


def is_template(T: str, w) -> bool:
    if not T or WILDCARD not in T or T.count(WILDCARD) == len(T):
        return False
    w = as_target(w)
    if len(T) > len(w):
        return False
    # every literal run must itself be a substring of w
    for run in T.split(WILDCARD):
        if run and run not in w:
            return False
    return _is_template_cached(T, w.text)


def is_object(x: str, w) -> bool:
    if not x:
        return False
    if WILDCARD in x:
        return is_template(x, w)
    return x in as_target(w)


def instantiate(T: str, S: Iterable[int], u: str) -> str:
    """Replace the wildcards of ``T`` at 0-based positions ``S`` by ``u``.

    Pure rewriting: the result is not checked for membership in the universe.
    """
    if WILDCARD not in T:
        raise NotATemplate(f"{T!r} has no wildcard")
    S = set(S)
    if not S:
        raise EmptySelection("selection of wildcard positions is empty")
    if not u:
        raise AssemblyError("filler is empty")
    for p in S:
        if not 0 <= p < len(T) or T[p] != WILDCARD:
            raise PositionNotWildcard(f"position {p} of {T!r} is not a wildcard")
    return "".join(u if p in S else ch for p, ch in enumerate(T))


def fill_all(T: str, u: str) -> str:
    """Fully parallel substitution: every wildcard of ``T`` becomes ``u``."""
    return instantiate(T, wildcard_positions(T), u)


def _positions(x: str, text: str, step: int) -> list[int]:
    out = []
    i = text.find(x)
    while i != -1:
        out.append(i)
        i = text.find(x, i + step)
    return out


def count_occurrences(x: str, w, mode: str = NON_OVERLAPPING) -> int:
    """Count occurrences of literal ``x`` in ``w``.

    ``non_overlapping`` uses greedy leftmost matching.
    """
    if WILDCARD in x:
        raise TemplateNotLiteral(f"{x!r} contains a wildcard")
    if not x:
        raise EmptyInput("cannot count the empty string")
    text = w.text if isinstance(w, TargetString) else w
    if mode == OVERLAPPING:
        return len(_positions(x, text, 1))
    if mode == NON_OVERLAPPING:
        return len(_positions(x, text, len(x)))
    raise ValueError(f"unknown counting mode {mode!r}")


def enumerate_monomers(w) -> frozenset:
    """Zero-cost building blocks: every letter of ``w`` and the wildcard."""
    return frozenset(as_target(w).alphabet) | {WILDCARD}
