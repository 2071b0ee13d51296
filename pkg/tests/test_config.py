"""Strict config parsing: every failure names the offending field."""

from __future__ import annotations

import json

import pytest

from splitdrift import ConfigError, load_config, parse_config


def drift_config(**overrides):
    base = {
        "experiment": "drift",
        "model": {"kind": "grid", "ndim": 2, "n": 8, "half_width": 6.0,
                  "potential": "quartic_cross"},
        "scheme": {"name": "strang"},
        "dt": 0.05,
        "steps": 20,
        "initial_state": {"kind": "gaussian", "center": [1.0, 1.0],
                          "width": 0.7},
    }
    base.update(overrides)
    return base


def test_valid_drift_config_normalizes():
    cfg = parse_config(drift_config())
    assert cfg.experiment == "drift"
    assert cfg.dt == 0.05
    assert cfg.steps == 20
    assert cfg.sample_every == 1  # default
    assert cfg.seed == 0
    assert cfg.tolerances == {}
    assert cfg.stem() == "drift"


def test_unknown_top_level_key_is_named():
    with pytest.raises(ConfigError, match="stepz"):
        parse_config(drift_config(stepz=5))


def test_missing_required_field_is_named():
    bad = drift_config()
    del bad["steps"]
    with pytest.raises(ConfigError, match="steps"):
        parse_config(bad)


def test_negative_dt_is_named():
    with pytest.raises(ConfigError, match="'dt'"):
        parse_config(drift_config(dt=-0.1))


def test_boolean_is_not_a_number():
    with pytest.raises(ConfigError, match="'dt'"):
        parse_config(drift_config(dt=True))


def test_non_integer_steps_rejected():
    with pytest.raises(ConfigError, match="'steps'"):
        parse_config(drift_config(steps=2.5))


def test_unknown_experiment_rejected():
    with pytest.raises(ConfigError, match="experiment"):
        parse_config({"experiment": "frobnicate"})


def test_unknown_scheme_name_rejected():
    with pytest.raises(ConfigError, match="scheme.name"):
        parse_config(drift_config(scheme={"name": "rk4"}))


def test_scheme_params_only_where_they_apply():
    with pytest.raises(ConfigError, match="substeps"):
        parse_config(drift_config(scheme={"name": "strang", "substeps": 4}))
    with pytest.raises(ConfigError, match="num_parts"):
        parse_config(drift_config(scheme={"name": "strang", "num_parts": 3}))
    cfg = parse_config(drift_config(
        scheme={"name": "euler-path-integral", "substeps": 16}))
    assert cfg.scheme["substeps"] == 16


def test_gaussian_state_requires_grid_model():
    bad = drift_config(model={"kind": "toy", "name": "pauli_xz"})
    with pytest.raises(ConfigError, match="gaussian"):
        parse_config(bad)


def test_gaussian_center_length_must_match_ndim():
    bad = drift_config()
    bad["initial_state"]["center"] = [1.0]
    with pytest.raises(ConfigError, match="center"):
        parse_config(bad)


def test_basis_state_requires_index():
    bad = drift_config(initial_state={"kind": "basis"})
    with pytest.raises(ConfigError, match="index"):
        parse_config(bad)


def test_grid_model_field_validation():
    with pytest.raises(ConfigError, match="ndim"):
        parse_config(drift_config(model={"kind": "grid", "ndim": 3, "n": 8,
                                         "half_width": 6.0,
                                         "potential": "zero"}))
    with pytest.raises(ConfigError, match="potential"):
        parse_config(drift_config(model={"kind": "grid", "ndim": 2, "n": 8,
                                         "half_width": 6.0,
                                         "potential": "cubic"}))


def test_diagonal_toy_model_needs_parts():
    bad = {"experiment": "shadow",
           "model": {"kind": "toy", "name": "diagonal"},
           "scheme": {"name": "trotter"}, "dt": 0.1}
    with pytest.raises(ConfigError, match="parts"):
        parse_config(bad)


def test_dt_ladder_needs_four_values():
    bad = {"experiment": "order",
           "model": {"kind": "toy", "name": "pauli_xz"},
           "scheme": {"name": "trotter"},
           "dt_ladder": [0.1, 0.05, 0.025],
           "initial_state": {"kind": "random"}}
    with pytest.raises(ConfigError, match="dt_ladder"):
        parse_config(bad)


def test_epsilons_need_three_values():
    with pytest.raises(ConfigError, match="epsilons"):
        parse_config({"experiment": "bch-check", "order": 2,
                      "epsilons": [0.1, 0.05]})


def test_truncation_capped_at_four():
    base = {"experiment": "shadow",
            "model": {"kind": "toy", "name": "pauli_xz"},
            "scheme": {"name": "strang"}, "dt": 0.1}
    with pytest.raises(ConfigError, match="truncation"):
        parse_config({**base, "truncation": 5})


def test_bch_order_capped_at_four():
    with pytest.raises(ConfigError, match="order"):
        parse_config({"experiment": "bch-check", "order": 5})


def test_shadow_rejects_non_unitary_scheme():
    bad = {"experiment": "shadow",
           "model": {"kind": "toy", "name": "pauli_xz"},
           "scheme": {"name": "euler-path-integral"}, "dt": 0.1}
    with pytest.raises(ConfigError, match="unitary"):
        parse_config(bad)


def test_bound_needs_norm_or_extraction_route():
    with pytest.raises(ConfigError, match="hs_norm"):
        parse_config({"experiment": "bound", "order": 2})
    cfg = parse_config({"experiment": "bound", "order": 2, "hs_norm": 16.0})
    assert cfg.hs_norm == 16.0


def test_classical_state_validation():
    base = {"experiment": "classical", "dt": 0.001, "steps": 100,
            "initial_state": {"q": [1.0, 1.0], "p": [0.0, 0.0]}}
    cfg = parse_config(base)
    assert cfg.initial_state["q"] == [1.0, 1.0]
    bad = dict(base, initial_state={"q": [1.0], "p": [0.0, 0.0]})
    with pytest.raises(ConfigError, match="'initial_state.q'"):
        parse_config(bad)
    bad = dict(base, initial_state={"q": [1.0, 1.0], "p": [0.0, 0.0],
                                    "momentum": [1, 2]})
    with pytest.raises(ConfigError, match="momentum"):
        parse_config(bad)
    with_t = dict(base, initial_state={"q": [1.0, 1.0], "p": [0.0, 0.0],
                                       "t": 2.5})
    assert parse_config(with_t).initial_state["t"] == 2.5


def test_observable_validation():
    base = {"experiment": "commutant",
            "model": {"kind": "toy", "name": "pauli_xz"}}
    with pytest.raises(ConfigError, match="axis"):
        parse_config({**base, "observable": {"kind": "pauli", "axis": "w"}})
    with pytest.raises(ConfigError, match="index"):
        parse_config({**base, "observable": {"kind": "part", "index": -1}})
    cfg = parse_config({**base, "observable": {"kind": "h_power",
                                               "power": 2}})
    assert cfg.observable == {"kind": "h_power", "power": 2}


def test_tolerances_are_restricted_and_positive():
    with pytest.raises(ConfigError, match="fudge"):
        parse_config(drift_config(tolerances={"fudge": 1.0}))
    with pytest.raises(ConfigError, match="commutant_tol"):
        parse_config(drift_config(tolerances={"commutant_tol": 0.0}))
    cfg = parse_config(drift_config(tolerances={"boundary_tol": 1e-6}))
    assert cfg.tolerances == {"boundary_tol": 1e-6}


def test_output_stem_validation():
    with pytest.raises(ConfigError, match="stem"):
        parse_config(drift_config(output={"stem": "a/b"}))
    with pytest.raises(ConfigError, match="format"):
        parse_config(drift_config(output={"stem": "run1", "format": "xlsx"}))
    cfg = parse_config(drift_config(output={"stem": "run1", "format": "csv"}))
    assert cfg.stem() == "run1"


def test_sidecar_payload_is_unwrapped():
    sidecar = {"config": drift_config(), "version": "0.1.0",
               "summary": {"whatever": 1}, "artifacts": [],
               "wall_seconds": 0.5, "rng": "x"}
    cfg = parse_config(sidecar)
    assert cfg.experiment == "drift"


def test_to_dict_round_trips():
    for raw in (
        drift_config(output={"stem": "run1"}, seed=7),
        {"experiment": "bound", "order": 3, "hs_norm": 16.0},
        {"experiment": "bch-check", "order": 2, "trials": 3},
        {"experiment": "classical", "dt": 0.001, "steps": 10,
         "initial_state": {"q": [1.0, 1.0], "p": [0.0, 0.0]}},
    ):
        cfg = parse_config(raw)
        echoed = json.loads(json.dumps(cfg.to_dict()))
        assert parse_config(echoed) == cfg


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="valid JSON"):
        load_config(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(drift_config()))
    assert load_config(good).experiment == "drift"
