"""Strict JSON experiment configurations.

One JSON object describes one experiment run.  Parsing is strict: unknown
keys are rejected and every validation error names the offending field,
so a typo'd key or a negative dt fails loudly instead of silently running
a different experiment.  A result sidecar (the JSON written next to the
CSV) embeds the full normalized config under "config" and is accepted
back as input, which is the reproducibility loop: sidecar in, identical
CSV out.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .models import POTENTIALS
from .schemes import scheme_registry

EXPERIMENTS = ("drift", "order", "shadow", "commutant", "classical",
               "bch-check", "bound")

TOY_MODELS = ("pauli_xz", "random_hermitian", "diagonal")
STATE_KINDS = ("gaussian", "basis", "random")
OBSERVABLE_KINDS = ("part", "h_power", "pauli", "random")
TOLERANCE_KEYS = ("commutant_tol", "degeneracy_rtol", "boundary_tol")

#: per-experiment (required, optional) top-level keys beyond
#: "experiment", "seed" and "output"
_SCHEMA = {
    "drift": ({"model", "scheme", "dt", "steps", "initial_state"},
              {"sample_every", "tolerances"}),
    "order": ({"model", "scheme", "dt_ladder", "initial_state"},
              {"horizon", "metric"}),
    "shadow": ({"model", "scheme", "dt"}, {"truncation"}),
    "commutant": ({"model", "observable"}, {"tolerances"}),
    "classical": ({"initial_state", "dt", "steps"}, {"sample_every"}),
    "bch-check": ({"order"}, {"epsilons", "dim", "trials"}),
    "bound": ({"order"}, {"hs_norm", "model", "scheme", "dt"}),
}


def _expect_mapping(value, name: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"field '{name}' must be an object, got "
                          f"{type(value).__name__}")
    return value


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{name}' must be a number, got {value!r}")
    return float(value)


def _positive(value, name: str) -> float:
    out = _number(value, name)
    if out <= 0:
        raise ConfigError(f"field '{name}' must be positive, got {value!r}")
    return out


def _integer(value, name: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field '{name}' must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"field '{name}' must be >= {minimum}, got {value}")
    return value


def _choice(value, name: str, choices) -> str:
    if value not in choices:
        raise ConfigError(f"field '{name}' must be one of "
                          f"{', '.join(choices)}; got {value!r}")
    return value


def _number_list(value, name: str, length: int | None = None,
                 positive: bool = False) -> tuple:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"field '{name}' must be a list of numbers")
    out = tuple(_positive(v, f"{name}[{i}]") if positive
                else _number(v, f"{name}[{i}]") for i, v in enumerate(value))
    if length is not None and len(out) != length:
        raise ConfigError(f"field '{name}' must have {length} entries, "
                          f"got {len(out)}")
    return out


def _check_keys(obj: dict, name: str, required: set, optional: set):
    missing = required - obj.keys()
    if missing:
        raise ConfigError(
            f"{name}: missing required field(s) "
            f"{', '.join(repr(k) for k in sorted(missing))}")
    unknown = obj.keys() - required - optional
    if unknown:
        raise ConfigError(
            f"{name}: unknown field(s) "
            f"{', '.join(repr(k) for k in sorted(unknown))}")


def _validate_model(spec, name: str = "model") -> dict:
    spec = _expect_mapping(spec, name)
    kind = _choice(spec.get("kind"), f"{name}.kind", ("grid", "toy"))
    if kind == "grid":
        _check_keys(spec, name, {"kind", "ndim", "n", "half_width",
                                 "potential"}, {"potential_params"})
        out = {
            "kind": "grid",
            "ndim": _integer(spec["ndim"], f"{name}.ndim", 1),
            "n": _integer(spec["n"], f"{name}.n", 2),
            "half_width": _positive(spec["half_width"], f"{name}.half_width"),
            "potential": _choice(spec["potential"], f"{name}.potential",
                                 tuple(sorted(POTENTIALS))),
        }
        if out["ndim"] not in (1, 2):
            raise ConfigError(f"field '{name}.ndim' must be 1 or 2")
        if "potential_params" in spec:
            params = _expect_mapping(spec["potential_params"],
                                     f"{name}.potential_params")
            out["potential_params"] = {
                k: _number(v, f"{name}.potential_params.{k}")
                for k, v in params.items()}
        return out
    _check_keys(spec, name, {"kind", "name"}, {"dim", "parts"})
    out = {"kind": "toy",
           "name": _choice(spec["name"], f"{name}.name", TOY_MODELS)}
    if "dim" in spec:
        out["dim"] = _integer(spec["dim"], f"{name}.dim", 2)
    if "parts" in spec:
        parts = spec["parts"]
        if not isinstance(parts, list) or not parts:
            raise ConfigError(f"field '{name}.parts' must be a non-empty "
                              "list of diagonal-entry lists")
        out["parts"] = [list(_number_list(p, f"{name}.parts[{i}]"))
                        for i, p in enumerate(parts)]
    return out


def _validate_scheme(spec, name: str = "scheme") -> dict:
    spec = _expect_mapping(spec, name)
    _check_keys(spec, name, {"name"}, {"substeps", "num_parts"})
    known = tuple(sorted(scheme_registry()))
    out = {"name": _choice(spec["name"], f"{name}.name", known)}
    if "substeps" in spec:
        if out["name"] != "euler-path-integral":
            raise ConfigError(f"field '{name}.substeps' only applies to "
                              "euler-path-integral")
        out["substeps"] = _integer(spec["substeps"], f"{name}.substeps", 1)
    if "num_parts" in spec:
        if out["name"] != "trotter":
            raise ConfigError(f"field '{name}.num_parts' only applies to "
                              "trotter")
        out["num_parts"] = _integer(spec["num_parts"], f"{name}.num_parts", 2)
    return out


def _validate_quantum_state(spec, model: dict,
                            name: str = "initial_state") -> dict:
    spec = _expect_mapping(spec, name)
    kind = _choice(spec.get("kind"), f"{name}.kind", STATE_KINDS)
    if kind == "gaussian":
        if model["kind"] != "grid":
            raise ConfigError(f"field '{name}': gaussian packets need a "
                              "grid model")
        ndim = model["ndim"]
        _check_keys(spec, name, {"kind", "center", "width"}, {"momentum"})
        out = {"kind": "gaussian",
               "center": list(_number_list(spec["center"], f"{name}.center",
                                           length=ndim)),
               "width": _positive(spec["width"], f"{name}.width")}
        if "momentum" in spec:
            out["momentum"] = list(_number_list(
                spec["momentum"], f"{name}.momentum", length=ndim))
        return out
    if kind == "basis":
        _check_keys(spec, name, {"kind", "index"}, set())
        return {"kind": "basis",
                "index": _integer(spec["index"], f"{name}.index", 0)}
    _check_keys(spec, name, {"kind"}, set())
    return {"kind": "random"}


def _validate_classical_state(spec, name: str = "initial_state") -> dict:
    spec = _expect_mapping(spec, name)
    _check_keys(spec, name, {"q", "p"}, {"t"})
    out = {"q": list(_number_list(spec["q"], f"{name}.q", length=2)),
           "p": list(_number_list(spec["p"], f"{name}.p", length=2))}
    if "t" in spec:
        out["t"] = _number(spec["t"], f"{name}.t")
    return out


def _validate_observable(spec, name: str = "observable") -> dict:
    spec = _expect_mapping(spec, name)
    kind = _choice(spec.get("kind"), f"{name}.kind", OBSERVABLE_KINDS)
    if kind == "part":
        _check_keys(spec, name, {"kind", "index"}, set())
        return {"kind": "part",
                "index": _integer(spec["index"], f"{name}.index", 0)}
    if kind == "h_power":
        _check_keys(spec, name, {"kind", "power"}, set())
        return {"kind": "h_power",
                "power": _integer(spec["power"], f"{name}.power", 0)}
    if kind == "pauli":
        _check_keys(spec, name, {"kind", "axis"}, set())
        return {"kind": "pauli",
                "axis": _choice(spec["axis"], f"{name}.axis", ("x", "y", "z"))}
    _check_keys(spec, name, {"kind"}, set())
    return {"kind": "random"}


def _validate_tolerances(spec, name: str = "tolerances") -> dict:
    spec = _expect_mapping(spec, name)
    _check_keys(spec, name, set(), set(TOLERANCE_KEYS))
    return {k: _positive(v, f"{name}.{k}") for k, v in spec.items()}


def _validate_output(spec, name: str = "output") -> dict:
    spec = _expect_mapping(spec, name)
    _check_keys(spec, name, {"stem"}, {"format"})
    stem = spec["stem"]
    if not isinstance(stem, str) or not stem or "/" in stem or "\\" in stem:
        raise ConfigError(f"field '{name}.stem' must be a plain file stem")
    out = {"stem": stem}
    if "format" in spec:
        out["format"] = _choice(spec["format"], f"{name}.format", ("csv",))
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Normalized, fully validated description of one experiment run."""

    experiment: str
    seed: int = 0
    model: dict | None = None
    scheme: dict | None = None
    dt: float | None = None
    dt_ladder: tuple | None = None
    steps: int | None = None
    sample_every: int = 1
    horizon: float = 1.0
    metric: str = "state"
    truncation: int = 4
    initial_state: dict | None = None
    observable: dict | None = None
    epsilons: tuple = (0.2, 0.1, 0.05, 0.025)
    order: int | None = None
    dim: int = 4
    trials: int = 1
    hs_norm: float | None = None
    tolerances: dict = field(default_factory=dict)
    output: dict | None = None

    def stem(self) -> str:
        """File stem for the CSV/JSON/PNG artifact trio."""
        if self.output is not None:
            return self.output["stem"]
        return self.experiment

    def to_dict(self) -> dict:
        """Canonical JSON form; parses back to an identical config."""
        out = {"experiment": self.experiment, "seed": self.seed}
        required, optional = _SCHEMA[self.experiment]
        for key in sorted(required | optional | {"output"}):
            value = getattr(self, key.replace("-", "_"))
            if value is None:
                continue
            if isinstance(value, tuple):
                value = list(value)
            out[key] = value
        return out


def parse_config(data) -> ExperimentConfig:
    """Validate a raw JSON object; every failure is a ConfigError naming
    the field.  A sidecar object (with a "config" sub-object) is unwrapped
    first."""
    data = _expect_mapping(data, "config")
    if "experiment" not in data and isinstance(data.get("config"), dict):
        data = data["config"]
    experiment = _choice(data.get("experiment"), "experiment", EXPERIMENTS)
    required, optional = _SCHEMA[experiment]
    _check_keys(data, f"{experiment} config", {"experiment"} | required,
                optional | {"seed", "output"})

    kw = {"experiment": experiment}
    if "seed" in data:
        kw["seed"] = _integer(data["seed"], "seed", 0)
    if "output" in data:
        kw["output"] = _validate_output(data["output"])
    if "model" in data:
        kw["model"] = _validate_model(data["model"])
    if "scheme" in data:
        kw["scheme"] = _validate_scheme(data["scheme"])
    if "dt" in data:
        kw["dt"] = _positive(data["dt"], "dt")
    if "dt_ladder" in data:
        ladder = _number_list(data["dt_ladder"], "dt_ladder", positive=True)
        if len(ladder) < 4:
            raise ConfigError(
                f"field 'dt_ladder' needs at least 4 values, got {len(ladder)}")
        kw["dt_ladder"] = ladder
    if "steps" in data:
        kw["steps"] = _integer(data["steps"], "steps", 1)
    if "sample_every" in data:
        kw["sample_every"] = _integer(data["sample_every"], "sample_every", 1)
    if "horizon" in data:
        kw["horizon"] = _positive(data["horizon"], "horizon")
    if "metric" in data:
        kw["metric"] = _choice(data["metric"], "metric", ("state", "energy"))
    if "truncation" in data:
        kw["truncation"] = _integer(data["truncation"], "truncation", 1)
        if kw["truncation"] > 4:
            raise ConfigError("field 'truncation' must be <= 4")
    if "initial_state" in data:
        if experiment == "classical":
            kw["initial_state"] = _validate_classical_state(
                data["initial_state"])
        else:
            kw["initial_state"] = _validate_quantum_state(
                data["initial_state"], kw["model"])
    if "observable" in data:
        kw["observable"] = _validate_observable(data["observable"])
    if "epsilons" in data:
        eps = _number_list(data["epsilons"], "epsilons", positive=True)
        if len(eps) < 3:
            raise ConfigError(
                f"field 'epsilons' needs at least 3 values, got {len(eps)}")
        kw["epsilons"] = eps
    if "order" in data:
        kw["order"] = _integer(data["order"], "order", 1)
        if experiment == "bch-check" and kw["order"] > 4:
            raise ConfigError("field 'order' must be <= 4 for bch-check")
    if "dim" in data:
        kw["dim"] = _integer(data["dim"], "dim", 2)
    if "trials" in data:
        kw["trials"] = _integer(data["trials"], "trials", 1)
    if "hs_norm" in data:
        kw["hs_norm"] = _positive(data["hs_norm"], "hs_norm")
    if "tolerances" in data:
        kw["tolerances"] = _validate_tolerances(data["tolerances"])

    if experiment in ("shadow", "bound") and "scheme" in kw:
        if kw["scheme"]["name"] == "euler-path-integral":
            raise ConfigError(
                "field 'scheme.name': shadow analysis needs a unitary "
                "scheme; euler-path-integral is not")
    if experiment == "bound" and kw.get("hs_norm") is None:
        if not all(k in kw for k in ("model", "scheme", "dt")):
            raise ConfigError(
                "field 'hs_norm': bound needs either an explicit hs_norm "
                "or model+scheme+dt to extract it from")
        if kw["order"] > 4:
            raise ConfigError(
                "field 'order': correction extraction supports orders 1..4; "
                "pass hs_norm explicitly for higher orders")
    if kw.get("model", {}).get("name") == "random_hermitian" \
            and "dim" not in kw.get("model", {}):
        kw["model"]["dim"] = 4
    if kw.get("model", {}).get("name") == "diagonal" \
            and "parts" not in kw.get("model", {}):
        raise ConfigError("field 'model.parts': the diagonal toy model "
                          "needs explicit diagonal entries")
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    """Read and validate a config (or result-sidecar) JSON file."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") \
            from exc
    return parse_config(data)
