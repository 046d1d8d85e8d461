"""Acceptance table: reference values, certificates and a seeded oracle sample."""

from __future__ import annotations

import random
import time

from .heuristics import gain, greedy_heuristic
from .plan import CANONICAL, parse_plan, verify_plan
from .reference_cases import CLAIMED_ASI, CLAIMED_GAINS, CLAIMED_TAI_UPPER, REFERENCE_PLANS, TARGETS
from .search import SearchConfig, asi_exact, brute_force_oracle

ORACLE_LIMIT = 8


def random_corpus(seed: int, samples: int, max_len: int = 10, alphabets=("ab", "abc")) -> list[str]:
    """Distinct seeded random strings, alternating alphabets, lengths 1..max_len."""
    rng = random.Random(seed)
    seen: list[str] = []
    bag = set()
    attempts = 0
    while len(seen) < samples and attempts < samples * 50:
        attempts += 1
        alphabet = alphabets[len(seen) % len(alphabets)]
        w = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, max_len)))
        if w not in bag:
            bag.add(w)
            seen.append(w)
    return seen


def _row(criterion: str, case: str, expected, observed, passed: bool, elapsed: float) -> dict:
    return {"criterion": criterion, "case": case, "expected": str(expected), "observed": str(observed),
            "passed": bool(passed), "elapsed_ms": round(elapsed * 1000.0, 1)}


def oracle_rows(seed: int, samples: int) -> list[dict]:
    t0 = time.perf_counter()
    mismatches = []
    corpus = random_corpus(seed, samples)
    for w in corpus:
        exact = asi_exact(w).value
        oracle = brute_force_oracle(w, CANONICAL, ORACLE_LIMIT)
        if oracle is not None and oracle != exact:
            mismatches.append(w)
    return [_row("oracle", f"{len(corpus)} strings, seed {seed}", 0, len(mismatches), not mismatches,
                 time.perf_counter() - t0)]


def run_bench(quick: bool = False, seed: int = 7, samples: int = 200) -> list[dict]:
    """Rows of ``criterion, case, expected, observed, passed``; ``quick`` keeps only the oracle sample."""
    rows: list[dict] = []
    if not quick:
        for w in TARGETS:
            t0 = time.perf_counter()
            res = asi_exact(w)
            rows.append(_row("asi", w, f"{CLAIMED_ASI[w]} proved", f"{res.value} {res.optimal}",
                             res.value == CLAIMED_ASI[w] and res.proved, time.perf_counter() - t0))
        for w in TARGETS:
            t0 = time.perf_counter()
            plan = greedy_heuristic(w, SearchConfig())
            rep = verify_plan(plan)
            ok = rep.valid and rep.cost <= CLAIMED_TAI_UPPER[w]
            rows.append(_row("tai", w, f"<= {CLAIMED_TAI_UPPER[w]}", rep.cost, ok, time.perf_counter() - t0))
        for T, U, w, claimed in CLAIMED_GAINS:
            t0 = time.perf_counter()
            g = gain(T, U, w)
            rows.append(_row("gain", f"{T} {','.join(U)}", claimed, g, g == claimed, time.perf_counter() - t0))
        for name, cert, cost in REFERENCE_PLANS:
            t0 = time.perf_counter()
            rep = verify_plan(parse_plan(cert))
            rows.append(_row("certificate", name, cost, rep.cost if rep.valid else "invalid",
                             rep.valid and rep.cost == cost, time.perf_counter() - t0))
    rows.extend(oracle_rows(seed, samples))
    return rows
