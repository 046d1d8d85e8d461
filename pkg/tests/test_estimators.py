import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from templated_assembly.estimators import (
    AssemblyIndexTransformer,
    ModularityGapTransformer,
    TemplateMiner,
    check_targets,
)
from templated_assembly.reference_cases import SCAFFOLD, SITES, SITES_EXTENDED


def test_check_targets_shapes():
    assert check_targets(["ab", "c"]) == ["ab", "c"]
    assert check_targets(np.array([["ab"], ["c"]], dtype=object)) == ["ab", "c"]
    with pytest.raises(ValueError):
        check_targets("ab")
    with pytest.raises(ValueError):
        check_targets([])
    with pytest.raises(ValueError):
        check_targets([""])
    with pytest.raises(ValueError):
        check_targets(np.array([["a", "b"]], dtype=object))
    with pytest.raises(TypeError):
        check_targets([3])


def test_assembly_index_transformer():
    X = ["abab", "abcd", "cccabbb"]
    est = AssemblyIndexTransformer()
    out = est.fit_transform(X)
    assert out.shape == (3, 2)
    assert out[:, 0].tolist() == [2, 3, 6]
    assert out[:, 1].tolist() == [1, 1, 1]
    assert est.get_feature_names_out().tolist() == ["index", "proved"]
    assert AssemblyIndexTransformer(mode="templated").fit_transform(X)[:, 0].tolist() == [2, 3, 5]
    heur = AssemblyIndexTransformer(mode="heuristic").fit_transform(X)
    assert (heur[:, 1] == 0).all()


def test_params_round_trip():
    est = AssemblyIndexTransformer(mode="templated", node_budget=100)
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    est.set_params(mode="canonical")
    assert est.mode == "canonical"
    with pytest.raises(ValueError):
        AssemblyIndexTransformer(mode="other").fit(["ab"])


def test_unfitted_transform_raises():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        AssemblyIndexTransformer().transform(["ab"])


def test_gap_transformer_in_pipeline():
    pipe = make_pipeline(ModularityGapTransformer(), FunctionTransformer(lambda a: a[:, 2:]))
    out = pipe.fit_transform(["cccabbb", "abab"])
    assert out.ravel().tolist() == [1, 0]


def test_template_miner():
    miner = TemplateMiner(n_templates=3).fit([SCAFFOLD, SITES])
    assert "1*11" in miner.templates_ and "11*11*11" in miner.templates_
    feats = miner.transform([SITES_EXTENDED, "abcd"])
    assert feats.shape == (2, 3)
    assert feats[1].tolist() == [0, 0, 0]
    assert feats[0, miner.templates_.index("1*11")] == 9
    assert len(miner.get_feature_names_out()) == 3
    with pytest.raises(ValueError):
        TemplateMiner(n_templates=0).fit(["ab"])
