import random

import pytest

from templated_assembly import (
    CANONICAL,
    TEMPLATED,
    SearchConfig,
    asi_exact,
    asi_lower_bound,
    brute_force_oracle,
    greedy_concat_upper,
    parse_plan,
    serialize_plan,
    tai_search,
    verify_plan,
)
from templated_assembly.plan import PlanBuilder
from templated_assembly.reference_cases import SCAFFOLD, SITES, SITES_EXTENDED
from templated_assembly.search import distinct_bigram_bound

# An 11-join canonical plan for SCAFFOLD, built by hand; every product is a substring.
SCAFFOLD_ELEVEN = (
    ("1", "1"), ("0", "11"), ("2", "11"), ("0", "011"), ("2", "211"),
    ("0011", "0011"), ("00110011", "0011"), ("0", "001100110011"),
    ("2211", "0001100110011"), ("2211", "22110001100110011"), ("11", "221122110001100110011"),
)


def test_hand_built_eleven_step_canonical_plan():
    b = PlanBuilder(SCAFFOLD, CANONICAL)
    for x, y in SCAFFOLD_ELEVEN:
        b.concat(x, y)
    report = verify_plan(b.build_plan())
    assert report.valid, report.failure
    assert report.cost == 11


@pytest.mark.parametrize("w, expected", [("a", 0), ("ab", 1), ("abab", 2), ("aaaa", 2), ("abcd", 3)])
def test_asi_small(w, expected):
    res = asi_exact(w)
    assert res.value == expected and res.proved


@pytest.mark.parametrize("w, expected", [(SCAFFOLD, 11), (SITES, 12), (SITES_EXTENDED, 13)])
def test_asi_reference_targets(w, expected):
    res = asi_exact(w)
    assert res.proved
    assert res.value == expected
    report = verify_plan(res.witness)
    assert report.valid and report.cost == res.value
    assert res.witness.mode == CANONICAL


def test_asi_no_cheaper_plan_by_refutation():
    # capped one below the optimum: nothing cheaper exists, so the seed plan is optimal
    res = asi_exact("abcab", SearchConfig(max_cost=2))
    assert res.value == 3 and res.proved
    assert asi_exact("abcab").value == 3


@pytest.mark.parametrize("n, expected", [(23, 5), (1, 0), (16, 4), (2, 1), (17, 5)])
def test_lower_bound(n, expected):
    assert asi_lower_bound("a" * n) == expected


def test_bigram_bound_is_below_asi():
    rng = random.Random(3)
    for _ in range(40):
        w = "".join(rng.choice("abc") for _ in range(rng.randint(2, 9)))
        assert distinct_bigram_bound(w) <= asi_exact(w).value


@pytest.mark.parametrize("w, mode, limit, expected", [
    ("abab", CANONICAL, 3, 2), ("a", CANONICAL, 0, 0), ("aaaa", CANONICAL, 3, 2),
    ("abcd", CANONICAL, 2, None), ("cccabbb", TEMPLATED, 6, 5), ("cccabbb", CANONICAL, 6, 6),
])
def test_brute_force_oracle(w, mode, limit, expected):
    assert brute_force_oracle(w, mode, limit) == expected


def test_tai_small_separations():
    # templates strictly help on these strings; values agree with the exhaustive oracle
    for w in ("cccabbb", "bcccbaaa", "aaaababbb"):
        res = tai_search(w)
        assert res.value == brute_force_oracle(w, TEMPLATED, 8)
        assert res.value == asi_exact(w).value - 1
        assert verify_plan(res.witness).valid


def test_tai_trivial():
    res = tai_search("ab")
    assert res.value == 1 and res.proved
    assert tai_search("a").value == 0


@pytest.mark.parametrize("w, bound", [(SCAFFOLD, 11), (SITES, 12), (SITES_EXTENDED, 13)])
def test_tai_reference_bounds(w, bound):
    res = tai_search(w, SearchConfig(node_budget=2_000))
    assert res.value <= bound
    report = verify_plan(parse_plan(serialize_plan(res.witness)))
    assert report.valid and report.cost == res.value


def test_tai_unrestricted_small_is_proved():
    res = tai_search("abcab")
    assert res.proved
    assert res.value == brute_force_oracle("abcab", TEMPLATED, 6)


def test_budget_exhaustion_is_flagged():
    res = asi_exact(SITES_EXTENDED, SearchConfig(node_budget=50))
    assert not res.proved
    assert verify_plan(res.witness).valid


def test_result_dict():
    d = asi_exact("abab").to_dict()
    assert list(d) == ["value", "optimal", "nodes_expanded", "elapsed_ms", "certificate"]
    assert verify_plan(parse_plan(d["certificate"])).cost == 2


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(template_max_stars=0)
    with pytest.raises(ValueError):
        SearchConfig(parallelism=0)


def test_greedy_concat_upper():
    assert greedy_concat_upper("abab").cost == 2
    assert greedy_concat_upper("a").cost == 0
    plan = greedy_concat_upper(SCAFFOLD)
    assert verify_plan(plan).valid
    assert 11 <= plan.cost <= 14


def test_deterministic_witness():
    a = asi_exact(SITES)
    b = asi_exact(SITES)
    assert serialize_plan(a.witness) == serialize_plan(b.witness)
