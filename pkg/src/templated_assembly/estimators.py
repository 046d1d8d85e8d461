"""scikit-learn style wrappers: strings in, numeric feature columns out.

Each sample is one target string.  ``X`` may be a list of strings or an
array of shape ``(n,)`` or ``(n, 1)``.
"""

from __future__ import annotations

from collections import Counter
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .heuristics import _best_family, _raw_runs, get_cost_proxy, greedy_heuristic, mine_templates
from .search import SearchConfig, asi_exact, greedy_concat_upper, tai_search
from .universe import AssemblyError, build_target, is_template

MODES = ("canonical", "templated", "heuristic")


def check_targets(X) -> list[str]:
    """Validate ``X`` and return it as a list of target strings."""
    if isinstance(X, str):
        raise ValueError("expected a sequence of strings, got a single string; wrap it in a list")
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected one column of strings, got shape {arr.shape}")
        arr = arr[:, 0]
    elif arr.ndim != 1:
        raise ValueError(f"expected a 1-d sequence of strings, got {arr.ndim} dimensions")
    if arr.shape[0] == 0:
        raise ValueError("X has no samples")
    out = []
    for i, v in enumerate(arr):
        if not isinstance(v, str):
            raise TypeError(f"sample {i} is {type(v).__name__}, not str")
        try:
            build_target(v)
        except AssemblyError as exc:
            raise ValueError(f"sample {i}: {exc}") from None
        out.append(v)
    return out


class _StringTransformer(TransformerMixin, BaseEstimator):
    def _config(self) -> SearchConfig:
        return SearchConfig(
            template_max_len=self.template_max_len,
            template_max_stars=self.template_max_stars,
            parallelism=self.n_jobs,
            time_budget=self.time_budget,
            node_budget=self.node_budget,
        )

    def fit(self, X, y=None):
        check_targets(X)
        self._config()
        self.n_features_in_ = 1
        return self

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_features_in_")
        return np.asarray(self._columns, dtype=object)

    def _more_tags(self):
        return {"X_types": ["string"], "stateless": True}


class AssemblyIndexTransformer(_StringTransformer):
    """Map each string to ``[index, proved]``.

    ``mode`` is ``"canonical"`` (exact ASI), ``"templated"`` (bounded TAI
    search) or ``"heuristic"`` (greedy templated upper bound, never proved).
    Strings longer than ``max_exact_length`` fall back to heuristic bounds.
    """

    _columns = ("index", "proved")

    def __init__(self, mode: str = "canonical", max_exact_length: int = 64,
                 template_max_len: Optional[int] = None, template_max_stars: int = 4,
                 node_budget: Optional[int] = None, time_budget: Optional[float] = None, n_jobs: int = 1):
        self.mode = mode
        self.max_exact_length = max_exact_length
        self.template_max_len = template_max_len
        self.template_max_stars = template_max_stars
        self.node_budget = node_budget
        self.time_budget = time_budget
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        return super().fit(X, y)

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        cfg = self._config()
        rows = []
        for w in check_targets(X):
            heuristic = self.mode == "heuristic" or len(w) > self.max_exact_length
            if heuristic:
                plan = greedy_concat_upper(w) if self.mode == "canonical" else greedy_heuristic(w, cfg)
                rows.append((plan.cost, 0.0))
                continue
            res = asi_exact(w, cfg) if self.mode == "canonical" else tai_search(w, cfg)
            rows.append((res.value, float(res.proved)))
        return np.asarray(rows, dtype=float)


class ModularityGapTransformer(_StringTransformer):
    """Map each string to ``[asi, tai_upper, gap]`` with ``gap = asi - tai_upper``."""

    _columns = ("asi", "tai_upper", "gap")

    def __init__(self, heuristic_only: bool = False, max_exact_length: int = 64,
                 template_max_len: Optional[int] = None, template_max_stars: int = 4,
                 node_budget: Optional[int] = None, time_budget: Optional[float] = None, n_jobs: int = 1):
        self.heuristic_only = heuristic_only
        self.max_exact_length = max_exact_length
        self.template_max_len = template_max_len
        self.template_max_stars = template_max_stars
        self.node_budget = node_budget
        self.time_budget = time_budget
        self.n_jobs = n_jobs

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        cfg = self._config()
        rows = []
        for w in check_targets(X):
            exact = len(w) <= self.max_exact_length
            asi = asi_exact(w, cfg).value if exact else greedy_concat_upper(w).cost
            if self.heuristic_only or not exact:
                tai = greedy_heuristic(w, cfg).cost
            else:
                tai = tai_search(w, cfg).value
            # both bounds are upper bounds; the templated one can never exceed the canonical
            tai = min(tai, asi)
            rows.append((asi, tai, asi - tai))
        return np.asarray(rows, dtype=float)


class TemplateMiner(_StringTransformer):
    """Learn the skeletons with the largest total gain over a corpus.

    ``fit`` mines every string and keeps the ``n_templates`` skeletons with
    the highest summed positive gain.  ``transform`` scores each string
    against those skeletons (best filler family, 0 when none pays off).
    """

    def __init__(self, n_templates: int = 10, cost_proxy: str = "length_minus_one",
                 template_max_len: Optional[int] = None, template_max_stars: int = 4):
        self.n_templates = n_templates
        self.cost_proxy = cost_proxy
        self.template_max_len = template_max_len
        self.template_max_stars = template_max_stars

    def _config(self) -> SearchConfig:
        return SearchConfig(template_max_len=self.template_max_len, template_max_stars=self.template_max_stars)

    def fit(self, X, y=None):
        if not isinstance(self.n_templates, int) or self.n_templates < 1:
            raise ValueError("n_templates must be a positive integer")
        targets = check_targets(X)
        c = get_cost_proxy(self.cost_proxy)
        cfg = self._config()
        total: Counter = Counter()
        for w in targets:
            for rep in mine_templates(w, cfg, c):
                if rep.gain > 0:
                    total[rep.candidate.skeleton] += rep.gain
        ranked = sorted(total.items(), key=lambda kv: (-kv[1], len(kv[0]), kv[0]))
        self.templates_ = tuple(T for T, _ in ranked[:self.n_templates])
        self.total_gain_ = np.asarray([g for _, g in ranked[:self.n_templates]], dtype=float)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "templates_")
        c = get_cost_proxy(self.cost_proxy)
        rows = []
        for w in check_targets(X):
            t = build_target(w)
            runs = _raw_runs(len(t), [False] * len(t))
            row = []
            for T in self.templates_:
                rep = _best_family(T, t, runs, c) if is_template(T, t) else None
                row.append(max(rep.gain, 0) if rep is not None else 0)
            rows.append(row)
        return np.asarray(rows, dtype=float).reshape(len(rows), len(self.templates_))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "templates_")
        return np.asarray([f"gain[{T}]" for T in self.templates_], dtype=object)
