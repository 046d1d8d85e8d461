"""Assembly plan certificates and their verifier.

A plan is a topologically ordered list of steps.  Step references are 1-based
step numbers, exactly as written in the certificate text format::

    target 11221122110001100110011
    mode templated
    m 1            # step 1
    m *            # step 2
    c 1 1          # step 3: "11"
    t 7 {1,2} 9    # instantiate wildcards 1 and 2 of step 7 with step 9

Wildcard selections are 1-based ordinals over the template's stars (1 is the
leftmost star), never string positions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .universe import (
    WILDCARD,
    AssemblyError,
    TargetString,
    as_target,
    instantiate,
    is_object,
    is_template,
    wildcard_positions,
)

CANONICAL = "canonical"
TEMPLATED = "templated"
MODES = (CANONICAL, TEMPLATED)


@dataclass(frozen=True)
class Monomer:
    symbol: str


@dataclass(frozen=True)
class Concat:
    left: int
    right: int


@dataclass(frozen=True)
class Instantiate:
    template: int
    selection: tuple[int, ...]
    filler: int


PlanStep = Union[Monomer, Concat, Instantiate]


def _refs(step: PlanStep) -> tuple[int, ...]:
    if isinstance(step, Concat):
        return (step.left, step.right)
    if isinstance(step, Instantiate):
        return (step.template, step.filler)
    return ()


@dataclass(frozen=True)
class AssemblyPlan:
    target: TargetString
    steps: tuple[PlanStep, ...]
    mode: str = TEMPLATED

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown plan mode {self.mode!r}")
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def cost(self) -> int:
        return plan_cost(self)

    def products(self) -> list[Optional[str]]:
        """Objects produced by each step, by pure rewriting (no validity checks).

        Entries are ``None`` where a step cannot be evaluated.
        """
        out: list[Optional[str]] = []
        for i, step in enumerate(self.steps, start=1):
            out.append(_evaluate(step, out, i))
        return out

    def extend(self, other: "AssemblyPlan") -> "AssemblyPlan":
        """Append ``other``'s steps, shifting its references past ours."""
        shift = len(self.steps)
        moved = []
        for step in other.steps:
            if isinstance(step, Concat):
                step = Concat(step.left + shift, step.right + shift)
            elif isinstance(step, Instantiate):
                step = Instantiate(step.template + shift, step.selection, step.filler + shift)
            moved.append(step)
        mode = TEMPLATED if TEMPLATED in (self.mode, other.mode) else CANONICAL
        return AssemblyPlan(self.target, self.steps + tuple(moved), mode)


def _evaluate(step: PlanStep, done: list, index: int) -> Optional[str]:
    def get(ref):
        if 1 <= ref < index:
            return done[ref - 1]
        return None

    if isinstance(step, Monomer):
        return step.symbol
    if isinstance(step, Concat):
        x, y = get(step.left), get(step.right)
        return None if x is None or y is None else x + y
    T, u = get(step.template), get(step.filler)
    if T is None or u is None:
        return None
    stars = wildcard_positions(T)
    if not step.selection or any(not 1 <= o <= len(stars) for o in step.selection):
        return None
    return instantiate(T, [stars[o - 1] for o in step.selection], u)


def plan_cost(plan: AssemblyPlan) -> int:
    return sum(1 for s in plan.steps if not isinstance(s, Monomer))


def canonical_restriction(plan: AssemblyPlan) -> bool:
    """True iff the plan is concatenation-only over star-free monomers."""
    for step in plan.steps:
        if isinstance(step, Instantiate):
            return False
        if isinstance(step, Monomer) and step.symbol == WILDCARD:
            return False
    return True


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    cost: int
    target_produced: bool
    failure: Optional[tuple[int, str]] = None
    trace: tuple = field(default=(), compare=False)

    def to_dict(self, with_trace: bool = False) -> dict:
        out = {
            "valid": self.valid,
            "cost": self.cost,
            "target_produced": self.target_produced,
            "failure": None
            if self.failure is None
            else {"step": self.failure[0], "reason": self.failure[1]},
        }
        if with_trace:
            out["trace"] = list(self.trace)
        return out


def verify_plan(plan: AssemblyPlan, max_steps: Optional[int] = None) -> VerificationReport:
    """Simulate every step and check the no-trash condition on each product.

    Monomers are checked against the target alphabet (the wildcard only in
    templated mode); composite products must lie in Sub(w) or the template
    universe of w.  Failures are reported, never raised.  ``max_steps``
    defaults to ``4 * len(target)``.
    """
    w = plan.target
    templated = plan.mode == TEMPLATED
    cap = 4 * len(w) if max_steps is None else max_steps
    cost = plan_cost(plan)
    produced: list[Optional[str]] = []
    found = False

    def fail(index, reason):
        return VerificationReport(False, cost, found, (index, reason), tuple(produced))

    if len(plan.steps) > cap:
        return fail(cap + 1, "StepBudget")

    for i, step in enumerate(plan.steps, start=1):
        refs = _refs(step)
        if any(not 1 <= r < i for r in refs):
            return fail(i, "DanglingReference")
        if isinstance(step, Monomer):
            sym = step.symbol
            if sym == WILDCARD:
                if not templated:
                    return fail(i, "WildcardInCanonicalPlan")
            elif len(sym) != 1 or sym not in w.alphabet:
                return fail(i, "MonomerNotInAlphabet")
            x = sym
        elif isinstance(step, Concat):
            x = produced[step.left - 1] + produced[step.right - 1]
            if not is_object(x, w):
                return fail(i, "ProductNotObject")
        else:
            if not templated:
                return fail(i, "InstantiateInCanonicalPlan")
            T, u = produced[step.template - 1], produced[step.filler - 1]
            if not is_template(T, w):
                return fail(i, "OperandNotTemplate")
            if not is_object(u, w):
                return fail(i, "FillerNotObject")
            stars = wildcard_positions(T)
            sel = step.selection
            if not sel or len(set(sel)) != len(sel) or any(not 1 <= o <= len(stars) for o in sel):
                return fail(i, "BadSelection")
            x = instantiate(T, [stars[o - 1] for o in sel], u)
            if not is_object(x, w):
                return fail(i, "ProductNotObject")
        produced.append(x)
        if x == w.text:
            found = True

    if not found:
        return VerificationReport(False, cost, False, (len(plan.steps), "TargetNotProduced"), tuple(produced))
    return VerificationReport(True, cost, True, None, tuple(produced))


# -- certificate text format -------------------------------------------------


class CertificateError(AssemblyError):
    pass


class CertificateSyntaxError(CertificateError):
    def __init__(self, line: int, column: int, reason: str):
        super().__init__(f"line {line}, column {column}: {reason}")
        self.line, self.column, self.reason = line, column, reason


class ForwardReference(CertificateError):
    def __init__(self, line: int, reason: str = "reference to a later step"):
        super().__init__(f"line {line}: {reason}")
        self.line = line


_STEP_RE = re.compile(
    r"^(?:m\s+(?P<sym>\S)"
    r"|c\s+(?P<left>\d+)\s+(?P<right>\d+)"
    r"|t\s+(?P<tpl>\d+)\s+\{(?P<sel>[^}]*)\}\s+(?P<fill>\d+))\s*$"
)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_plan(text: str, target: Optional[Union[str, TargetString]] = None) -> AssemblyPlan:
    """Parse certificate text into a structurally well-formed plan.

    Only syntax and reference ordering are checked; semantic validity is the
    verifier's job.  When ``target`` is given the ``target``/``mode`` header
    lines may be omitted (mode then defaults to templated).
    """
    header: dict[str, tuple[int, str]] = {}
    steps: list[PlanStep] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        line = line.strip()
        if len(header) < 2 and not steps and not (target is not None and _STEP_RE.match(line)):
            keyword, _, value = line.partition(" ")
            expected = "target" if not header else "mode"
            if keyword != expected:
                raise CertificateSyntaxError(lineno, indent + 1, f"expected '{expected} ...'")
            value = value.strip()
            if not value or " " in value:
                raise CertificateSyntaxError(lineno, indent + len(keyword) + 2, f"bad {keyword} value")
            if keyword == "mode" and value not in MODES:
                raise CertificateSyntaxError(lineno, indent + 6, f"unknown mode {value!r}")
            header[keyword] = (lineno, value)
            continue
        m = _STEP_RE.match(line)
        if m is None:
            raise CertificateSyntaxError(lineno, indent + 1, f"cannot parse step {line!r}")
        index = len(steps) + 1
        if m.group("sym") is not None:
            step: PlanStep = Monomer(m.group("sym"))
        elif m.group("left") is not None:
            step = Concat(int(m.group("left")), int(m.group("right")))
        else:
            sel_text = m.group("sel").strip()
            try:
                sel = tuple(int(tok) for tok in sel_text.split(",")) if sel_text else ()
            except ValueError:
                raise CertificateSyntaxError(lineno, indent + 1, "bad wildcard selection") from None
            if not sel or any(o < 1 for o in sel):
                raise CertificateSyntaxError(lineno, indent + 1, "selection must list ordinals >= 1")
            step = Instantiate(int(m.group("tpl")), sel, int(m.group("fill")))
        for ref in _refs(step):
            if ref < 1:
                raise CertificateSyntaxError(lineno, indent + 1, "step references are 1-based")
            if ref >= index:
                raise ForwardReference(lineno, f"step {index} references step {ref}")
        steps.append(step)
    if "target" not in header:
        if target is None:
            raise CertificateSyntaxError(1, 1, "missing 'target' line")
        header["target"] = (1, as_target(target).text)
    if "mode" not in header:
        if target is None:
            raise CertificateSyntaxError(header["target"][0] + 1, 1, "missing 'mode' line")
        header["mode"] = (1, TEMPLATED)
    tline, ttext = header["target"]
    try:
        w = as_target(ttext)
    except AssemblyError as exc:
        raise CertificateSyntaxError(tline, 8, str(exc)) from None
    if target is not None and as_target(target).text != w.text:
        raise CertificateSyntaxError(tline, 8, "certificate target differs from the expected target")
    return AssemblyPlan(w, tuple(steps), header["mode"][1])


def serialize_plan(plan: AssemblyPlan, comments: bool = False) -> str:
    """Render ``plan`` in the certificate grammar.

    With ``comments`` each line is annotated with the object it produces.
    """
    lines = [f"target {plan.target.text}", f"mode {plan.mode}"]
    products = plan.products() if comments else None
    for i, step in enumerate(plan.steps):
        if isinstance(step, Monomer):
            body = f"m {step.symbol}"
        elif isinstance(step, Concat):
            body = f"c {step.left} {step.right}"
        else:
            body = f"t {step.template} {{{','.join(map(str, step.selection))}}} {step.filler}"
        if comments:
            body = f"{body:<16}# {i + 1}: {products[i]}"
        lines.append(body)
    return "\n".join(lines) + "\n"


# -- building plans from derivations -----------------------------------------


class PlanBuilder:
    """Incrementally emit steps, reusing any object already produced."""

    def __init__(self, target, mode: str = TEMPLATED):
        self.target = as_target(target)
        self.mode = mode
        self.steps: list[PlanStep] = []
        self.index: dict[str, int] = {}

    def __contains__(self, obj: str) -> bool:
        return obj in self.index

    def _push(self, step: PlanStep, obj: str) -> int:
        self.steps.append(step)
        self.index[obj] = len(self.steps)
        return len(self.steps)

    def monomer(self, symbol: str) -> int:
        if symbol in self.index:
            return self.index[symbol]
        return self._push(Monomer(symbol), symbol)

    def ref(self, obj: str) -> int:
        if obj in self.index:
            return self.index[obj]
        if len(obj) == 1:
            return self.monomer(obj)
        raise KeyError(f"object {obj!r} has not been built")

    def concat(self, x: str, y: str) -> int:
        obj = x + y
        if obj in self.index:
            return self.index[obj]
        i, j = self.ref(x), self.ref(y)
        return self._push(Concat(i, j), obj)

    def instantiate(self, T: str, positions: Iterable[int], u: str) -> int:
        positions = sorted(positions)
        obj = instantiate(T, positions, u)
        if obj in self.index:
            return self.index[obj]
        stars = wildcard_positions(T)
        ordinals = tuple(stars.index(p) + 1 for p in positions)
        i, j = self.ref(T), self.ref(u)
        return self._push(Instantiate(i, ordinals, j), obj)

    def apply(self, obj: str, derivation: tuple) -> int:
        if derivation[0] == "c":
            return self.concat(derivation[1], derivation[2])
        _, T, positions, u = derivation
        return self.instantiate(T, positions, u)

    def build_plan(self) -> AssemblyPlan:
        return AssemblyPlan(self.target, tuple(self.steps), self.mode)


def object_order(obj: str) -> tuple:
    """Bottom-up order in which derived objects can always be emitted.

    Every derivation part is strictly smaller: concatenation parts are shorter,
    and an instantiation's template is shorter or equally long with more stars.
    """
    return (len(obj), len(obj) - obj.count(WILDCARD), obj)


def plan_from_derivations(target, derivations: dict, mode: str = TEMPLATED,
                          builder: Optional[PlanBuilder] = None) -> AssemblyPlan:
    """Turn ``{object: derivation}`` into a plan, monomers first.

    Derivations are ``("c", x, y)`` or ``("t", T, positions, u)``.
    """
    b = builder if builder is not None else PlanBuilder(target, mode)
    symbols = set()
    for d in derivations.values():
        parts = (d[1], d[2]) if d[0] == "c" else (d[1], d[3])
        symbols.update(p for p in parts if len(p) == 1)
    for sym in sorted(symbols):
        if sym not in b:
            b.monomer(sym)
    for obj in sorted(derivations, key=object_order):
        if obj not in b:
            b.apply(obj, derivations[obj])
    if b.target.text not in b and len(b.target) == 1:
        b.monomer(b.target.text)
    return b.build_plan()
