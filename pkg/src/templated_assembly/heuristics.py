"""Template mining, gain scoring and the greedy macro-grammar heuristic.

A candidate pairs a skeleton ``T`` with a family of fillers ``U``; every
filler ``u`` yields the fully instantiated string ``x_u = T[* -> u]``.  Its
gain under a cost proxy ``c`` is::

    sum(occ(x_u) * c(x_u)) - (c(T) + sum(c(u)) + sum(occ(x_u)))

Occurrences of the whole family are counted jointly: the selected
occurrences never overlap one another, so every counted occurrence can be
realised in the working representation by a single instantiation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

from .plan import TEMPLATED, AssemblyPlan, PlanBuilder
from .search import SearchConfig, factor_into, min_closure_plan
from .universe import (
    WILDCARD,
    AssemblyError,
    TargetString,
    as_target,
    fill_all,
    is_template,
    wildcard_positions,
)

WORKING = "working"
TARGET = "target"

MIN_PAIR_LENGTH = 4


class InvalidFiller(AssemblyError):
    pass


def cost_proxy_default(y: str) -> int:
    """``|y| - 1``, wildcards counted as ordinary symbols."""
    if not y:
        raise AssemblyError("cost proxy is undefined on the empty string")
    return len(y) - 1


COST_PROXIES: dict[str, Callable[[str], int]] = {
    "length_minus_one": cost_proxy_default,
}


def get_cost_proxy(c) -> Callable[[str], int]:
    if c is None:
        return cost_proxy_default
    if callable(c):
        return c
    try:
        return COST_PROXIES[c]
    except KeyError:
        raise ValueError(f"unknown cost proxy {c!r}; known: {sorted(COST_PROXIES)}") from None


@dataclass(frozen=True)
class TemplateCandidate:
    skeleton: str
    fillers: tuple[str, ...]
    instances: tuple[tuple[str, str, int], ...]  # (u, x_u, occ(x_u))
    gain: int


@dataclass(frozen=True)
class GainReport:
    candidate: TemplateCandidate
    benefit: int
    outlay: int

    @property
    def gain(self) -> int:
        return self.benefit - self.outlay

    def row(self) -> dict:
        return {
            "skeleton": self.candidate.skeleton,
            "fillers": list(self.candidate.fillers),
            "occurrences": [occ for _, _, occ in self.candidate.instances],
            "benefit": self.benefit,
            "outlay": self.outlay,
            "gain": self.gain,
        }


# -- anti-unification ---------------------------------------------------------


def anti_unify(x: str, y: str) -> Optional[str]:
    """Block-level least general generalisation of two literals.

    Common symbols are kept as anchors, in order, and each maximal region
    where ``x`` and ``y`` differ becomes one wildcard; a wildcard always stands
    for a nonempty block on both sides.  Among generalisations the one with
    the most literal symbols wins, then the fewest wildcards, then the
    lexicographically smallest.  Returns None when ``x == y`` or when no
    literal anchor survives.
    """
    if WILDCARD in x or WILDCARD in y:
        raise AssemblyError("anti_unify expects literal strings")
    if not x or not y:
        raise AssemblyError("anti_unify expects nonempty strings")
    if x == y:
        return None
    result = _anti_unify(x, y)
    if result is None or WILDCARD not in result or result.count(WILDCARD) == len(result):
        return None
    return result


@lru_cache(maxsize=1 << 16)
def _anti_unify(x: str, y: str) -> Optional[str]:
    n, m = len(x), len(y)
    # modes: 0 outside a wildcard, 1 inside one that absorbed >=1 of both,
    # 2 absorbed only x so far, 3 absorbed only y so far
    NEG = None
    best = [[[NEG] * 4 for _ in range(m + 1)] for _ in range(n + 1)]
    for mode in (0, 1):
        best[n][m][mode] = (0, 0, "")

    def better(a, b):
        if b is None:
            return a
        if a is None:
            return b
        # more literals, fewer stars, smaller string
        ka = (-a[0], a[1], a[2])
        kb = (-b[0], b[1], b[2])
        return a if ka <= kb else b

    def lit(ch, sub):
        return None if sub is None else (sub[0] + 1, sub[1], ch + sub[2])

    def star(sub):
        return None if sub is None else (sub[0], sub[1] + 1, WILDCARD + sub[2])

    for i in range(n, -1, -1):
        for j in range(m, -1, -1):
            if i == n and j == m:
                continue
            match = i < n and j < m and x[i] == y[j]
            cell = best[i][j]
            # mode 2: must still absorb some y
            c2 = None
            if i < n:
                c2 = better(c2, best[i + 1][j][2])
            if j < m:
                c2 = better(c2, best[i][j + 1][1])
            cell[2] = c2
            c3 = None
            if j < m:
                c3 = better(c3, best[i][j + 1][3])
            if i < n:
                c3 = better(c3, best[i + 1][j][1])
            cell[3] = c3
            c1 = None
            if i < n:
                c1 = better(c1, best[i + 1][j][1])
            if j < m:
                c1 = better(c1, best[i][j + 1][1])
            if match:
                c1 = better(c1, lit(x[i], best[i + 1][j + 1][0]))
            cell[1] = c1
            c0 = None
            if match:
                c0 = better(c0, lit(x[i], best[i + 1][j + 1][0]))
            if i < n:
                c0 = better(c0, star(best[i + 1][j][2]))
            if j < m:
                c0 = better(c0, star(best[i][j + 1][3]))
            if i < n and j < m:
                c0 = better(c0, star(best[i + 1][j + 1][1]))
            cell[0] = c0
    top = best[0][0][0]
    return None if top is None else top[2]


# -- occurrences in the working representation -------------------------------


def _raw_runs(n: int, covered: Sequence[bool]) -> list[tuple[int, int]]:
    runs, i = [], 0
    while i < n:
        if covered[i]:
            i += 1
            continue
        j = i
        while j < n and not covered[j]:
            j += 1
        runs.append((i, j))
        i = j
    return runs


def _starts_in_runs(x: str, text: str, runs) -> list[int]:
    out = []
    for a, b in runs:
        i = text.find(x, a)
        while i != -1 and i + len(x) <= b:
            out.append(i)
            i = text.find(x, i + 1)
    return out


def joint_occurrences(instances: Iterable[tuple[str, str]], text: str, runs) -> dict[str, list[int]]:
    """Pick pairwise disjoint occurrences for a family of instantiated strings.

    Fillers are served in order of how often their instance occurs on its own
    (most frequent first, then shorter filler, then lexicographic); each takes
    its leftmost occurrences that do not collide with earlier picks.
    Returns ``{u: [start, ...]}``.
    """
    instances = list(instances)
    solo = {}
    for u, x in instances:
        starts = _starts_in_runs(x, text, runs)
        picked, end = [], -1
        for s in starts:
            if s >= end:
                picked.append(s)
                end = s + len(x)
        solo[u] = (x, starts, len(picked))
    order = sorted(instances, key=lambda ux: (-solo[ux[0]][2], len(ux[0]), ux[0]))
    taken = [False] * len(text)
    chosen: dict[str, list[int]] = {}
    for u, x in order:
        got = []
        for s in solo[u][1]:
            if not any(taken[s:s + len(x)]):
                for p in range(s, s + len(x)):
                    taken[p] = True
                got.append(s)
        chosen[u] = got
    return chosen


def _report(T: str, occ: dict[str, int], xs: dict[str, str], c) -> GainReport:
    fillers = tuple(sorted(occ, key=lambda u: (len(u), u)))
    benefit = sum(occ[u] * c(xs[u]) for u in fillers)
    outlay = c(T) + sum(c(u) for u in fillers) + sum(occ[u] for u in fillers)
    cand = TemplateCandidate(T, fillers, tuple((u, xs[u], occ[u]) for u in fillers), benefit - outlay)
    return GainReport(cand, benefit, outlay)


def gain_report(T: str, U: Iterable[str], w, c=None, *, covered=None) -> GainReport:
    w = as_target(w)
    c = get_cost_proxy(c)
    if not is_template(T, w):
        raise AssemblyError(f"{T!r} is not a block-compressed template of the target")
    U = list(dict.fromkeys(U))
    if not U:
        raise InvalidFiller("filler family is empty")
    xs = {}
    for u in U:
        if not u or WILDCARD in u:
            raise InvalidFiller(f"filler {u!r} must be a nonempty literal")
        x = fill_all(T, u)
        if x not in w:
            raise InvalidFiller(f"T[* -> {u}] = {x!r} is not a substring of the target")
        xs[u] = x
    runs = _raw_runs(len(w), covered or [False] * len(w))
    chosen = joint_occurrences(xs.items(), w.text, runs)
    return _report(T, {u: len(chosen[u]) for u in U}, xs, c)


def gain(T: str, U: Iterable[str], w, c=None) -> int:
    """Integer gain of committing skeleton ``T`` with filler family ``U``."""
    return gain_report(T, U, w, c).gain


# -- mining -------------------------------------------------------------------


def _admissible_fillers(T: str, w: TargetString, runs) -> dict[str, str]:
    """Literal fillers u whose full instantiation occurs inside the raw runs."""
    k = T.count(WILDCARD)
    fixed = len(T) - k
    out = {}
    seen = set()
    for a, b in runs:
        for i in range(a, b):
            for j in range(i + 1, b + 1):
                u = w.text[i:j]
                if u in seen:
                    continue
                seen.add(u)
                if fixed + k * len(u) > len(w):
                    break
                x = fill_all(T, u)
                if x in w and _starts_in_runs(x, w.text, runs):
                    out[u] = x
    return out


def _best_family(T: str, w: TargetString, runs, c) -> Optional[GainReport]:
    xs = _admissible_fillers(T, w, runs)
    while xs:
        chosen = joint_occurrences(xs.items(), w.text, runs)
        contrib = {u: len(chosen[u]) * (c(xs[u]) - 1) - c(u) for u in xs}
        worst = min(xs, key=lambda u: (contrib[u], -len(u), u))
        if contrib[worst] > 0:
            return _report(T, {u: len(chosen[u]) for u in xs}, xs, c)
        del xs[worst]
    return None


def _mining_pairs(w: TargetString, runs, max_len: int):
    subs = set()
    for a, b in runs:
        for i in range(a, b):
            for j in range(i + MIN_PAIR_LENGTH, min(b, i + max_len) + 1):
                subs.add(w.text[i:j])
    by_head: dict[str, list[str]] = {}
    for s in sorted(subs):
        by_head.setdefault(s[0] + s[-1], []).append(s)
    for group in by_head.values():
        for i, x in enumerate(group):
            for y in group[i + 1:]:
                yield x, y


def mine_templates(w, cfg: SearchConfig = SearchConfig(), c=None, *, covered=None) -> list[GainReport]:
    """Mine skeletons by anti-unifying repeated-looking substrings.

    Pairs of distinct substrings (length at least 4, at most the template
    length bound) that share their first and last symbols are generalised;
    every admissible skeleton is scored with its best filler family.  Output
    is sorted by gain, then shorter skeleton, then lexicographically.
    ``covered`` marks target positions already consumed by the working
    representation.
    """
    w = as_target(w)
    c = get_cost_proxy(c)
    covered = covered or [False] * len(w)
    runs = _raw_runs(len(w), covered)
    max_len = cfg.max_len(w)
    skeletons = set()
    for x, y in _mining_pairs(w, runs, max_len):
        T = anti_unify(x, y)
        if T is None or len(T) > max_len or T.count(WILDCARD) > cfg.template_max_stars:
            continue
        if not cfg.allow_adjacent_stars and WILDCARD * 2 in T:
            continue
        skeletons.add(T)
    reports = []
    for T in sorted(skeletons):
        if not is_template(T, w):
            continue
        rep = _best_family(T, w, runs, c)
        if rep is not None:
            reports.append(rep)
    reports.sort(key=lambda r: (-r.gain, len(r.candidate.skeleton), r.candidate.skeleton))
    return reports


# -- greedy heuristic ---------------------------------------------------------


def greedy_heuristic(w, cfg: SearchConfig = SearchConfig(), c=None, *,
                     occurrence_scope: str = WORKING, residual_nodes: int = 50_000,
                     log: Optional[list] = None) -> AssemblyPlan:
    """Greedy macro-grammar plan: an upper bound on the templated index.

    Repeatedly commits the highest positive-gain candidate: the skeleton and
    each filler are built once (cheapest joins given everything built so far),
    each instance ``x_u`` is produced by one full-parallel instantiation, and
    its chosen occurrences become opaque tokens of the working representation.
    When no candidate has positive gain the target is assembled from what is
    available by a join-only search, falling back to longest-repeat factoring
    if that search runs out of nodes.

    ``occurrence_scope="target"`` recounts occurrences against the whole
    target at each round instead of the unconsumed remainder.  ``log``, if
    given, receives one :class:`GainReport` per commit.
    """
    w = as_target(w)
    c = get_cost_proxy(c)
    if occurrence_scope not in (WORKING, TARGET):
        raise ValueError(f"unknown occurrence scope {occurrence_scope!r}")
    b = PlanBuilder(w, TEMPLATED)
    covered = [False] * len(w)
    for _ in range(len(w)):
        if all(covered):
            break
        scope = covered if occurrence_scope == WORKING else None
        reports = [r for r in mine_templates(w, cfg, c, covered=scope) if r.gain > 0]
        committed = False
        for rep in reports:
            runs = _raw_runs(len(w), covered)
            xs = {u: x for u, x, _ in rep.candidate.instances}
            chosen = joint_occurrences(xs.items(), w.text, runs)
            if not any(chosen.values()):
                continue
            _commit(w, b, rep.candidate.skeleton, xs, chosen, covered)
            if log is not None:
                log.append(rep)
            committed = True
            break
        if not committed:
            break
    if w.text not in b:
        if len(w) == 1:
            b.monomer(w.text)
        elif not min_closure_plan(w, [w.text], b, node_budget=residual_nodes):
            factor_into(w.text, b)
    return b.build_plan()


def _commit(w, b: PlanBuilder, T: str, xs: dict, chosen: dict, covered: list) -> None:
    fillers = [u for u in sorted(xs, key=lambda u: (len(u), u)) if chosen[u]]
    if not min_closure_plan(w, [T] + [u for u in fillers if len(u) > 1], b):
        _factor_template(T, b)
        for u in fillers:
            factor_into(u, b)
    for u in fillers:
        b.instantiate(T, wildcard_positions(T), u)
        for s in chosen[u]:
            for p in range(s, s + len(xs[u])):
                covered[p] = True


def _factor_template(T: str, b: PlanBuilder) -> None:
    """Grow ``T`` one symbol at a time around its first literal.

    Every intermediate is a contiguous piece of ``T`` holding a literal, hence
    a substring or a template of the target.
    """
    first = next(i for i, ch in enumerate(T) if ch != WILDCARD)
    acc = T[first]
    b.monomer(acc)
    for ch in reversed(T[:first]):
        b.concat(ch, acc)
        acc = ch + acc
    for ch in T[first + 1:]:
        b.concat(acc, ch)
        acc += ch
