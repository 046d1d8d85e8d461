import pytest

from templated_assembly.plan import (
    CANONICAL,
    TEMPLATED,
    AssemblyPlan,
    CertificateSyntaxError,
    Concat,
    ForwardReference,
    Instantiate,
    Monomer,
    PlanBuilder,
    canonical_restriction,
    parse_plan,
    plan_cost,
    serialize_plan,
    verify_plan,
)
from templated_assembly.reference_cases import (
    REFERENCE_PLANS,
    SCAFFOLD,
    SCAFFOLD_CANONICAL,
    SCAFFOLD_TEMPLATED,
    SITES_TEMPLATED,
)
from templated_assembly.universe import build_target


@pytest.mark.parametrize("name, cert, cost", REFERENCE_PLANS)
def test_reference_plans_verify(name, cert, cost):
    report = verify_plan(parse_plan(cert))
    assert report.valid, (name, report.failure)
    assert report.cost == cost
    assert report.target_produced


def test_plan_cost_counts_composite_steps():
    assert plan_cost(parse_plan(SCAFFOLD_CANONICAL)) == 12
    assert plan_cost(parse_plan(SITES_TEMPLATED)) == 12
    only_monomers = AssemblyPlan(build_target("ab"), (Monomer("a"), Monomer("b")), CANONICAL)
    assert plan_cost(only_monomers) == 0


def test_canonical_restriction():
    assert canonical_restriction(parse_plan(SCAFFOLD_CANONICAL))
    assert not canonical_restriction(parse_plan(SCAFFOLD_TEMPLATED))
    assert canonical_restriction(AssemblyPlan(build_target("a"), (), TEMPLATED))


def test_corrupted_operand_fails_at_that_step():
    lines = SCAFFOLD_TEMPLATED.splitlines()
    # step 14 "c 11 13": point its left operand at "00" instead
    idx = next(i for i, ln in enumerate(lines) if ln.startswith("c 11 13"))
    lines[idx] = lines[idx].replace("c 11 13", "c 10 13", 1)
    report = verify_plan(parse_plan("\n".join(lines)))
    assert not report.valid
    assert report.failure[0] == 14


def test_wrong_product_is_reported():
    plan = AssemblyPlan(build_target("1212"), (Monomer("1"), Monomer("2"), Concat(1, 1), Concat(3, 2)), CANONICAL)
    report = verify_plan(plan)
    assert not report.valid
    assert report.failure[1] == "ProductNotObject"
    b = PlanBuilder("1212", CANONICAL)
    b.concat("1", "2")
    report = verify_plan(b.build_plan())
    assert not report.valid and not report.target_produced
    assert report.failure[1] == "TargetNotProduced"


@pytest.mark.parametrize("steps, mode, reason", [
    ((Monomer("a"), Concat(1, 5)), CANONICAL, "DanglingReference"),
    ((Monomer("*"), Monomer("a")), CANONICAL, "WildcardInCanonicalPlan"),
    ((Monomer("z"),), CANONICAL, "MonomerNotInAlphabet"),
    ((Monomer("a"), Monomer("b"), Instantiate(1, (1,), 2)), CANONICAL, "InstantiateInCanonicalPlan"),
    ((Monomer("a"), Monomer("b"), Instantiate(1, (1,), 2)), TEMPLATED, "OperandNotTemplate"),
    ((Monomer("a"), Monomer("*"), Concat(1, 2), Monomer("b"), Instantiate(3, (2,), 4)), TEMPLATED,
     "BadSelection"),
])
def test_failure_reasons(steps, mode, reason):
    report = verify_plan(AssemblyPlan(build_target("abab"), steps, mode))
    assert not report.valid
    assert report.failure[1] == reason


def test_step_budget():
    steps = (Monomer("a"),) * 9
    report = verify_plan(AssemblyPlan(build_target("aa"), steps, CANONICAL))
    assert report.failure[1] == "StepBudget"


def test_report_dict_shape():
    d = verify_plan(parse_plan(SCAFFOLD_TEMPLATED)).to_dict(with_trace=True)
    assert list(d)[:4] == ["valid", "cost", "target_produced", "failure"]
    assert d["trace"][-1] == SCAFFOLD


def test_parse_minimal_certificate():
    plan = parse_plan("m 1\nm 1\nc 1 2\n", target="11")
    assert plan.cost == 1
    assert verify_plan(plan).valid


def test_parse_errors():
    with pytest.raises(ForwardReference):
        parse_plan("target 112\nmode canonical\nm 1\nm 2\nc 9 1\n")
    with pytest.raises(CertificateSyntaxError) as exc:
        parse_plan("target 11\nmode canonical\nq 1 2\n")
    assert exc.value.line == 3
    with pytest.raises(CertificateSyntaxError):
        parse_plan("m 1\n")
    with pytest.raises(CertificateSyntaxError):
        parse_plan("target 11\nmode sideways\n")
    with pytest.raises(CertificateSyntaxError):
        parse_plan(SCAFFOLD_CANONICAL, target="11")


def test_serialize_round_trip():
    plan = parse_plan(SCAFFOLD_TEMPLATED)
    text = serialize_plan(plan)
    assert parse_plan(text) == plan
    assert parse_plan(serialize_plan(plan, comments=True)) == plan
    composite = [ln for ln in text.splitlines() if ln[:2] in ("c ", "t ")]
    assert len(composite) == 11


def test_serialize_single_letter():
    plan = AssemblyPlan(build_target("a"), (Monomer("a"),), CANONICAL)
    assert serialize_plan(plan).splitlines()[2:] == ["m a"]


def test_builder_reuses_objects():
    b = PlanBuilder("abab", CANONICAL)
    b.concat("a", "b")
    b.concat("ab", "ab")
    b.concat("a", "b")
    plan = b.build_plan()
    assert plan.cost == 2 and verify_plan(plan).valid


def test_extend_shifts_references():
    left = PlanBuilder("abab", CANONICAL)
    left.concat("a", "b")
    right = AssemblyPlan(build_target("abab"), (Monomer("a"), Monomer("b"), Concat(1, 2), Concat(3, 3)), CANONICAL)
    joined = left.build_plan().extend(right)
    assert joined.products()[-1] == "abab"
    assert verify_plan(joined).valid
