# spec_files.py
# Functional spec files. A spec is a YAML (or JSON) mapping with a "type" key:
#   hermite | laguerre (alpha) | jacobi (alpha, beta) | moments (values: [...])
#   griffin (M, t, c, or r0, r1, s1, s2) | christoffel (base: <spec>, pi: [c0, ..., cN])
# Generated functionals are normalized to moment 0 = 1 unless "raw: true".
# Author: The Coherent Pairs Team

import os
from typing import Dict

import yaml

from . import audit
from .errors import ConfigError
from .functional import (MomentFunctional, hermite_functional, jacobi_functional,
                         laguerre_functional)
from .polynomial import Polynomial

SPEC_TYPES = ("hermite", "laguerre", "jacobi", "moments", "griffin", "christoffel")


def load_spec(path: str) -> Dict:
    if not os.path.exists(path):
        raise ConfigError(f"functional spec not found: {path}")
    try:
        with open(path, "r") as f:
            spec = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read functional spec {path}: {e}") from e
    if not isinstance(spec, dict) or spec.get("type") not in SPEC_TYPES:
        raise ConfigError(f"{path}: expected a mapping with type in {', '.join(SPEC_TYPES)}")
    return spec


def _require(spec: Dict, *keys):
    missing = [key for key in keys if key not in spec]
    if missing:
        raise ConfigError(f"{spec['type']} spec is missing {', '.join(missing)}")


def _scalar(value) -> str:
    # YAML turns 0.5 into a float; rationals are written as strings like "1/2".
    return value if isinstance(value, str) else str(value)


def build_functional(spec: Dict, degree: int, field) -> MomentFunctional:
    """Functional for a spec with moments at least up to degree (fewer only for explicit moment lists)."""
    kind = spec.get("type")
    if kind == "hermite":
        functional = hermite_functional(degree, field)
    elif kind == "laguerre":
        functional = laguerre_functional(field.coerce(_scalar(spec.get("alpha", 0))), degree, field)
    elif kind == "jacobi":
        functional = jacobi_functional(
            field.coerce(_scalar(spec.get("alpha", 0))), field.coerce(_scalar(spec.get("beta", 0))),
            degree, field,
        )
    elif kind == "moments":
        key = "values" if "values" in spec or "moments" not in spec else "moments"
        _require(spec, key)
        functional = MomentFunctional([field.coerce(_scalar(w)) for w in spec[key]], field)
        if functional.max_degree < degree:
            audit.log_warning(f"moment spec carries {functional.max_degree + 1} moments, {degree + 1} requested")
    elif kind == "griffin":
        functional = _griffin_functional(spec, degree, field)
    elif kind == "christoffel":
        _require(spec, "base", "pi")
        pi = Polynomial([field.coerce(_scalar(c)) for c in spec["pi"]], field)
        if pi.is_zero():
            raise ConfigError("christoffel spec needs a nonzero pi")
        base = build_functional(spec["base"], degree + pi.degree, field)
        functional = base.left_multiply(pi)
    else:
        raise ConfigError(f"unknown functional spec type {kind!r}")
    if spec.get("raw") or kind in ("hermite", "laguerre", "jacobi"):
        return functional
    return functional.normalized()


def _griffin_functional(spec: Dict, degree: int, field) -> MomentFunctional:
    """
    The weight M|x|^c e^{-x^2+tx} (x < 0), |x|^c e^{-x^2+tx} (x >= 0) from "M", "t", "c";
    or, from "r0", "r1", "s1", "s2", the functional whose OPS has that structure relation.
    """
    # Imported here: the quadrature layer is only needed for this spec type.
    from .griffin_logic import GriffinInput, WeightSpec, compute_M, griffin_params, moments_by_quadrature

    if field.is_exact:
        raise ConfigError("griffin functionals are computed by quadrature; use --backend float")
    if any(key in spec for key in ("M", "t", "c")):
        _require(spec, "M", "t", "c")
        weight = WeightSpec(*(field.coerce(_scalar(spec[key])) for key in ("M", "t", "c")))
        return moments_by_quadrature(weight, degree, field)
    _require(spec, "r0", "r1", "s1", "s2")
    inp = GriffinInput.parse(*(_scalar(spec[key]) for key in ("r0", "r1", "s1", "s2")))
    params = griffin_params(inp, field)
    sqrt_a = field.coerce(params.sqrt_a)
    t, c = field.coerce(params.t), field.coerce(params.c)
    M = compute_M(sqrt_a * field.coerce(inp.r0), t, c, field)
    weight = moments_by_quadrature(WeightSpec(M, t, c), degree, field)
    return weight.dilate(field.one / sqrt_a)
