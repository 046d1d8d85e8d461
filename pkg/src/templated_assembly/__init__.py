"""Canonical and templated assembly indices of strings."""

from .heuristics import (
    GainReport,
    InvalidFiller,
    TemplateCandidate,
    anti_unify,
    cost_proxy_default,
    gain,
    gain_report,
    greedy_heuristic,
    mine_templates,
)
from .plan import (
    CANONICAL,
    TEMPLATED,
    AssemblyPlan,
    Concat,
    Instantiate,
    Monomer,
    VerificationReport,
    canonical_restriction,
    parse_plan,
    plan_cost,
    serialize_plan,
    verify_plan,
)
from .search import (
    PROVED,
    UPPER_BOUND_ONLY,
    SearchConfig,
    SearchResult,
    asi_exact,
    asi_lower_bound,
    brute_force_oracle,
    greedy_concat_upper,
    tai_search,
)
from .universe import (
    WILDCARD,
    TargetString,
    build_target,
    count_occurrences,
    enumerate_monomers,
    instantiate,
    is_object,
    is_substring,
    is_template,
    wildcard_positions,
)

__version__ = "0.1.0"
