"""Exact and bounded search for the canonical and templated assembly indices.

The solvers search top-down.  A plan of minimal cost never builds the same
object twice, so its cost equals the number of distinct composite objects it
contains, and each of those objects has exactly one derivation (a split into
two parts, or a template plus filler).  The search keeps a *pending* set of
objects that still need a derivation and always expands the largest one
under :func:`~templated_assembly.plan.object_order`.  Parts of a derivation
are strictly smaller than the object they build, so an expanded object can
never reappear as a part.  The remaining cost therefore depends only on the
pending set, which is what the transposition table is keyed on.

:func:`brute_force_oracle` is an independent bottom-up breadth-first
enumeration used to cross-check the solvers.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import combinations
from typing import Optional

from .plan import (
    CANONICAL,
    TEMPLATED,
    AssemblyPlan,
    Monomer,
    PlanBuilder,
    object_order,
    plan_from_derivations,
    serialize_plan,
    verify_plan,
)
from .universe import WILDCARD, TargetString, as_target, is_object, is_template

PROVED = "proved"
UPPER_BOUND_ONLY = "upper_bound_only"

# node budget for the templated phase of tai_search when no budget is given
DEFAULT_TAI_NODES = 20_000


class BudgetExceeded(Exception):
    """Raised internally when a node or time budget runs out."""


@dataclass(frozen=True)
class SearchConfig:
    max_cost: Optional[int] = None
    template_max_len: Optional[int] = None
    template_max_stars: int = 4
    allow_adjacent_stars: bool = True
    allow_template_fillers: bool = False
    deterministic: bool = True
    parallelism: int = 1
    time_budget: Optional[float] = None
    node_budget: Optional[int] = None

    def __post_init__(self):
        if self.template_max_stars < 1:
            raise ValueError("template_max_stars must be >= 1")
        if self.template_max_len is not None and self.template_max_len < 2:
            raise ValueError("template_max_len must be >= 2")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    def max_len(self, w: TargetString) -> int:
        return len(w) if self.template_max_len is None else self.template_max_len

    def unrestricted(self, w: TargetString) -> bool:
        """Whether the template bounds admit every template of ``w``."""
        return (
            self.max_len(w) >= len(w)
            and self.template_max_stars >= len(w) - 1
            and self.allow_adjacent_stars
            and self.allow_template_fillers
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SearchResult:
    value: int
    witness: AssemblyPlan
    optimal: str
    nodes_expanded: int = 0
    elapsed: float = 0.0

    @property
    def proved(self) -> bool:
        return self.optimal == PROVED

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "optimal": self.optimal,
            "nodes_expanded": self.nodes_expanded,
            "elapsed_ms": round(self.elapsed * 1000.0, 3),
            "certificate": serialize_plan(self.witness),
        }


def _bigrams(s: str) -> frozenset:
    return frozenset(s[i:i + 2] for i in range(len(s) - 1))


def asi_lower_bound(w) -> int:
    """Doubling bound: a join at most doubles the longest object."""
    n = len(as_target(w))
    return max(0, math.ceil(math.log2(n))) if n > 1 else 0


def distinct_bigram_bound(w) -> int:
    """Every distinct adjacent pair of w is the junction of some join."""
    return len(_bigrams(as_target(w).text))


class _Closure:
    """Minimum number of new objects needed to derive a set of targets.

    ``free`` objects are already available at no cost.  In canonical mode only
    splits are tried; in templated mode instantiation preimages are tried as
    well, restricted by the template bounds of ``cfg``.
    """

    def __init__(self, w: TargetString, templated: bool, cfg: SearchConfig,
                 free=frozenset(), node_budget=None, deadline=None, instantiation=None):
        self.w = w
        self.templated = templated
        # templates may be admitted as objects while only joins are tried
        self.instantiation = templated if instantiation is None else instantiation
        self.cfg = cfg
        self.free = frozenset(free)
        self.max_len = cfg.max_len(w)
        self.node_budget = node_budget
        self.deadline = deadline
        self.nodes = 0
        self.failed: dict[frozenset, int] = {}
        self._decomp: dict[str, list] = {}
        self._bg: dict[str, frozenset] = {}
        self._free_bigrams = frozenset().union(*(_bigrams(f) for f in self.free)) if self.free else frozenset()

    # -- objects ----------------------------------------------------------

    def _atomic(self, x: str) -> bool:
        if x in self.free:
            return True
        return len(x) == 1 and (x in self.w.alphabet or (self.templated and x == WILDCARD))

    def _admissible(self, x: str) -> bool:
        """Can ``x`` appear as a composite object under the search bounds?"""
        if WILDCARD not in x:
            return x in self.w
        if not self.templated:
            return False
        if len(x) > self.max_len or x.count(WILDCARD) > self.cfg.template_max_stars:
            return False
        if not self.cfg.allow_adjacent_stars and WILDCARD * 2 in x:
            return False
        return is_template(x, self.w)

    def _part(self, x: str) -> Optional[tuple]:
        """() if ``x`` is free or a monomer, (x,) if it must be built, None if barred."""
        if self._atomic(x):
            return ()
        if len(x) == 1 or not self._admissible(x):
            return None
        return (x,)

    def decompositions(self, s: str) -> list:
        cached = self._decomp.get(s)
        if cached is not None:
            return cached
        out = []
        for i in range(1, len(s)):
            x, y = s[:i], s[i:]
            px, py = self._part(x), self._part(y)
            if px is None or py is None:
                continue
            out.append((frozenset(px + py), ("c", x, y)))
        if self.instantiation:
            out.extend(self._preimages(s))
        self._decomp[s] = out
        return out

    def _preimages(self, s: str) -> list:
        out = []
        room = self.cfg.template_max_stars - s.count(WILDCARD)
        if room < 1:
            return out
        fillers = {s[i:j] for i in range(len(s)) for j in range(i + 1, len(s))}
        fillers.update(s[i:] for i in range(1, len(s)))
        for u in sorted(fillers, key=lambda f: (-len(f), f)):
            if u == WILDCARD:
                continue
            if WILDCARD in u and not self.cfg.allow_template_fillers:
                continue
            pu = self._part(u)
            if pu is None:
                continue
            starts = []
            i = s.find(u)
            while i != -1:
                starts.append(i)
                i = s.find(u, i + 1)
            for r in range(1, min(room, len(starts)) + 1):
                for chosen in combinations(starts, r):
                    if any(b - a < len(u) for a, b in zip(chosen, chosen[1:])):
                        continue
                    pieces, positions, prev = [], [], 0
                    for a in chosen:
                        pieces.append(s[prev:a])
                        positions.append(sum(map(len, pieces)) + len(positions))
                        prev = a + len(u)
                    pieces.append(s[prev:])
                    T = WILDCARD.join(pieces)
                    pt = self._part(T)
                    if pt is None or len(T) < 2:
                        continue
                    out.append((frozenset(pt + pu), ("t", T, tuple(positions), u)))
        return out

    # -- bounds -----------------------------------------------------------

    def lower_bound(self, pending: frozenset) -> int:
        if not self.instantiation and pending:
            bg = set()
            for u in pending:
                b = self._bg.get(u)
                if b is None:
                    b = self._bg[u] = _bigrams(u)
                bg |= b
            bg -= self._free_bigrams
            return max(len(pending), len(bg))
        return len(pending)

    # -- search -----------------------------------------------------------

    def _tick(self):
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise BudgetExceeded("node budget exhausted")
        if self.deadline is not None and self.nodes & 255 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded("time budget exhausted")

    def children(self, pending: frozenset):
        s = max(pending, key=object_order)
        rest = pending - {s}
        kids = []
        for n, (parts, deriv) in enumerate(self.decompositions(s)):
            nxt = rest | parts
            kids.append((self.lower_bound(nxt), len(parts - rest), n, nxt, s, deriv))
        kids.sort(key=lambda k: k[:3])
        return kids

    def solve(self, pending: frozenset, budget: int) -> Optional[dict]:
        """A derivation map of at most ``budget`` new objects, or None."""
        if not pending:
            return {}
        if self.lower_bound(pending) > budget or self.failed.get(pending, -1) >= budget:
            return None
        self._tick()
        for lb, _, _, nxt, s, deriv in self.children(pending):
            if lb > budget - 1:
                break
            sub = self.solve(nxt, budget - 1)
            if sub is not None:
                sub[s] = deriv
                return sub
        self.failed[pending] = max(budget, self.failed.get(pending, -1))
        return None


def _solve_child(args):
    w, templated, cfg, free, pending, budget, node_budget, deadline, inst = args
    c = _Closure(w, templated, cfg, free, node_budget, deadline, inst)
    try:
        return c.solve(pending, budget), c.nodes, False
    except BudgetExceeded:
        return None, c.nodes, True


def _minimize(w: TargetString, templated: bool, cfg: SearchConfig, targets, upper: Optional[int],
              free=frozenset(), node_budget=None, deadline=None, instantiation=None):
    """Iterative deepening on cost.

    Returns ``(cost, derivations, complete, nodes)``; ``derivations`` is None
    when nothing cheaper than ``upper`` exists (or the budget ran out first),
    and ``complete`` says whether every cost below the answer was refuted.
    """
    closure = _Closure(w, templated, cfg, free, node_budget, deadline, instantiation)
    pending = frozenset(t for t in targets if not closure._atomic(t))
    if not pending:
        return 0, {}, True, 0
    limit = upper - 1 if upper is not None else None
    if cfg.max_cost is not None:
        limit = cfg.max_cost if limit is None else min(limit, cfg.max_cost)
    k = closure.lower_bound(pending)
    nodes = 0
    try:
        while limit is None or k <= limit:
            if cfg.parallelism > 1:
                found, spent, exhausted = _parallel_level(closure, pending, k, cfg, node_budget, deadline)
                nodes += spent
                if exhausted:
                    raise BudgetExceeded("budget exhausted in a worker")
            else:
                found = closure.solve(pending, k)
            if found is not None:
                return k, found, True, nodes + closure.nodes
            k += 1
    except BudgetExceeded:
        return None, None, False, nodes + closure.nodes
    return None, None, upper is not None and (cfg.max_cost is None or cfg.max_cost >= upper - 1), nodes + closure.nodes


def _parallel_level(closure: _Closure, pending, k, cfg, node_budget, deadline):
    """Try every root child in a worker pool; the first success in child order wins."""
    kids = [kid for kid in closure.children(pending) if kid[0] <= k - 1]
    jobs = [(closure.w, closure.templated, replace(cfg, parallelism=1), closure.free, nxt, k - 1,
             node_budget, deadline, closure.instantiation) for _, _, _, nxt, _, _ in kids]
    spent, exhausted = 0, False
    with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
        results = list(pool.map(_solve_child, jobs))
    for (found, n, ex), kid in zip(results, kids):
        spent += n
        exhausted = exhausted or ex
    for (found, _, _), kid in zip(results, kids):
        if found is not None:
            found[kid[4]] = kid[5]
            return found, spent, False
    return None, spent, exhausted


def _deadline(cfg: SearchConfig, start: float) -> Optional[float]:
    return None if cfg.time_budget is None else start + cfg.time_budget


def _checked(result: SearchResult) -> SearchResult:
    report = verify_plan(result.witness)
    if not report.valid or report.cost != result.value:
        raise AssertionError(f"solver produced an invalid witness: {report}")
    return result


def _trivial_plan(w: TargetString, mode: str) -> AssemblyPlan:
    return AssemblyPlan(w, (Monomer(w.text),), mode)


def asi_exact(w, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Canonical assembly index by iterative deepening over pending sets.

    The greedy factoring plan seeds the upper bound.  If the budget runs out
    the best plan found so far is returned flagged ``upper_bound_only``.
    """
    w = as_target(w)
    start = time.monotonic()
    if len(w) == 1:
        return _checked(SearchResult(0, _trivial_plan(w, CANONICAL), PROVED, 0, time.monotonic() - start))
    seed = greedy_concat_upper(w)
    cost, derivs, complete, nodes = _minimize(
        w, False, cfg, [w.text], seed.cost, node_budget=cfg.node_budget, deadline=_deadline(cfg, start))
    if derivs is not None:
        plan = plan_from_derivations(w, derivs, CANONICAL)
        result = SearchResult(cost, plan, PROVED, nodes, time.monotonic() - start)
    else:
        flag = PROVED if complete else UPPER_BOUND_ONLY
        result = SearchResult(seed.cost, seed, flag, nodes, time.monotonic() - start)
    return _checked(result)


def tai_search(w, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Templated assembly index within the template bounds of ``cfg``.

    Seeds with the canonical optimum and the greedy macro-grammar plan, then
    tries to beat the best seed by bounded iterative deepening over templated
    derivations.  The result is flagged ``proved`` only when every cheaper
    cost was refuted over the full, unbounded template universe.
    """
    from .heuristics import greedy_heuristic

    w = as_target(w)
    start = time.monotonic()
    if len(w) == 1:
        return _checked(SearchResult(0, _trivial_plan(w, TEMPLATED), PROVED, 0, time.monotonic() - start))
    deadline = _deadline(cfg, start)
    node_budget = cfg.node_budget
    if node_budget is None and cfg.time_budget is None:
        node_budget = DEFAULT_TAI_NODES

    canonical = asi_exact(w, replace(cfg, max_cost=None))
    seeds = [_as_templated(canonical.witness), greedy_heuristic(w, cfg)]
    best = min(seeds, key=lambda p: (p.cost, serialize_plan(p)))
    nodes = canonical.nodes_expanded

    cost, derivs, complete, spent = _minimize(
        w, True, cfg, [w.text], best.cost, node_budget=node_budget, deadline=deadline)
    nodes += spent
    if derivs is not None:
        best = plan_from_derivations(w, derivs, TEMPLATED)
    value = best.cost

    proved = value <= 1
    if complete and not proved:
        if cfg.unrestricted(w):
            proved = True
        else:
            wide = replace(cfg, template_max_len=len(w), template_max_stars=max(1, len(w) - 1),
                           allow_adjacent_stars=True, allow_template_fillers=True, max_cost=None)
            c2 = _Closure(w, True, wide, node_budget=node_budget, deadline=deadline)
            try:
                found = c2.solve(frozenset([w.text]), value - 1)
                nodes += c2.nodes
                if found is None:
                    proved = True
                else:
                    best = plan_from_derivations(w, found, TEMPLATED)
                    value = best.cost
            except BudgetExceeded:
                nodes += c2.nodes
    flag = PROVED if proved else UPPER_BOUND_ONLY
    return _checked(SearchResult(value, best, flag, nodes, time.monotonic() - start))


def _as_templated(plan: AssemblyPlan) -> AssemblyPlan:
    return AssemblyPlan(plan.target, plan.steps, TEMPLATED)


def min_closure_plan(w, targets, builder: PlanBuilder, cfg: SearchConfig = SearchConfig(),
                     node_budget: int = 50_000) -> bool:
    """Extend ``builder`` with a cheapest join-only derivation of ``targets``.

    Targets may be templates; objects already in the builder are free.
    Returns False (leaving the builder untouched) when the node budget runs out.
    """
    w = as_target(w)
    free = frozenset(builder.index)
    cfg = replace(cfg, max_cost=None, parallelism=1, template_max_len=None,
                  template_max_stars=max(cfg.template_max_stars, len(w)), allow_adjacent_stars=True)
    cost, derivs, _, _ = _minimize(w, True, cfg, targets, None, free=free,
                                   node_budget=node_budget, instantiation=False)
    if derivs is None:
        return False
    plan_from_derivations(w, derivs, builder.mode, builder=builder)
    return True


# -- greedy canonical upper bound ---------------------------------------------


def _longest_reusable(s: str, available) -> Optional[str]:
    for length in range(len(s) - 1, 1, -1):
        best = None
        for i in range(len(s) - length + 1):
            r = s[i:i + length]
            if r in available or s.count(r) >= 2 and _disjoint_count(s, r) >= 2:
                if best is None or r < best:
                    best = r
        if best is not None:
            return best
    return None


def _disjoint_count(s: str, r: str) -> int:
    n, i = 0, s.find(r)
    while i != -1:
        n += 1
        i = s.find(r, i + len(r))
    return n


def factor_into(s: str, builder: PlanBuilder) -> None:
    """Build literal ``s`` into ``builder`` by longest-repeat factoring.

    The longest piece that is already built or repeats in ``s`` is built
    first; ``s`` is then cut at its occurrences and the pieces are joined left
    to right, so every intermediate is a prefix of ``s``.
    """
    if len(s) == 1:
        builder.monomer(s)
        return
    if s in builder:
        return
    r = _longest_reusable(s, builder.index)
    if r is None:
        factor_into(s[:-1], builder)
        builder.concat(s[:-1], s[-1])
        return
    factor_into(r, builder)
    pieces, i = [], 0
    j = s.find(r)
    while j != -1:
        if j > i:
            pieces.append(s[i:j])
        pieces.append(r)
        i = j + len(r)
        j = s.find(r, i)
    if i < len(s):
        pieces.append(s[i:])
    for p in pieces:
        factor_into(p, builder)
    acc = pieces[0]
    for p in pieces[1:]:
        builder.concat(acc, p)
        acc += p


def greedy_concat_upper(w) -> AssemblyPlan:
    """A valid canonical plan from longest-repeat factoring (an ASI upper bound)."""
    w = as_target(w)
    b = PlanBuilder(w, CANONICAL)
    factor_into(w.text, b)
    return b.build_plan()


# -- independent oracle -------------------------------------------------------


def brute_force_oracle(w, mode: str = CANONICAL, cost_limit: int = 8) -> Optional[int]:
    """Minimal plan cost by breadth-first enumeration of reachable object sets.

    Each level applies every legal rule to every set of the previous level;
    the only pruning is deduplication of sets.  The templated universe is
    unbounded.  Returns None when the index exceeds ``cost_limit``.
    """
    w = as_target(w)
    templated = mode == TEMPLATED
    start = frozenset(w.alphabet | ({WILDCARD} if templated else set()))
    if w.text in start:
        return 0
    level = {start}
    for cost in range(1, cost_limit + 1):
        nxt = set()
        for objs in level:
            for new in _one_step(objs, w, templated):
                if new == w.text:
                    return cost
                nxt.add(objs | {new})
        level = nxt
    return None


def _one_step(objs: frozenset, w: TargetString, templated: bool):
    made = set()
    for x in objs:
        for y in objs:
            xy = x + y
            if xy not in objs and xy not in made and is_object(xy, w):
                made.add(xy)
    if templated:
        for T in objs:
            if WILDCARD not in T or not is_template(T, w):
                continue
            stars = [p for p, ch in enumerate(T) if ch == WILDCARD]
            for u in objs:
                if u == WILDCARD:
                    continue
                for r in range(1, len(stars) + 1):
                    for sel in combinations(stars, r):
                        chosen = set(sel)
                        x = "".join(u if p in chosen else ch for p, ch in enumerate(T))
                        if x not in objs and x not in made and is_object(x, w):
                            made.add(x)
    return made
