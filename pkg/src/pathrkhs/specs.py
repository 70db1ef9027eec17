"""JSON kernel specifications and fixed-precision JSON output.

A kernel is described by an object with a ``"kind"`` field:

=========== ==============================================================
kind        fields (defaults in parentheses)
=========== ==============================================================
wiener      none
bridge      none
ou          ``variant`` (1), ``a`` (1), ``sigma`` (1)
fbm         ``alpha``
rl          ``alpha``, ``quad_tol`` (1e-10)
matern      ``alpha``, ``sigma`` (1), ``dim`` (1), ``bounds`` (unit box),
            ``normalized`` (true)
circle      either ``coeffs`` (list ``c_0, c_1, ...``) or ``decay`` with
            ``c0`` (0), ``scale`` (1), ``n_terms`` (511)
tensor      either ``factors`` (list of 1-d specs) or ``factor`` and ``d``
perturbed   ``base``, ``functions``, ``signs``
=========== ==============================================================

Perturbation functions are ``{"kind": "exp", "scale": c, "rate": r}`` for
``c exp(r t)`` and ``{"kind": "monomial", "scale": c, "exponent": p}`` for
``c t^p``. Any kernel may carry a positive ``"scale"`` multiplier.
"""

import json
import math
from dataclasses import replace

import numpy as np

from .domain import Domain
from .errors import SchemaError
from . import kernels as K

FIELDS = {
    "wiener": set(),
    "bridge": set(),
    "ou": {"variant", "a", "sigma"},
    "fbm": {"alpha"},
    "rl": {"alpha", "quad_tol"},
    "matern": {"alpha", "sigma", "dim", "bounds", "normalized"},
    "circle": {"coeffs", "decay", "c0", "scale", "n_terms"},
    "tensor": {"factors", "factor", "d"},
    "perturbed": {"base", "functions", "signs"},
}


def _number(spec, key, default=None, kind="kernel"):
    value = spec.get(key, default)
    if value is None:
        raise SchemaError(f"{kind} spec is missing {key!r}", operation="kernel_from_json")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{key!r} must be a number, got {value!r}", operation="kernel_from_json")
    return value


def _function(fspec):
    if not isinstance(fspec, dict) or fspec.get("kind") not in ("exp", "monomial"):
        raise SchemaError(f"perturbation functions must be exp or monomial, got {fspec!r}",
                          operation="kernel_from_json")
    c = float(_number(fspec, "scale", 1.0, "function"))
    if fspec["kind"] == "exp":
        r = float(_number(fspec, "rate", kind="function"))
        return lambda t: c * np.exp(r * np.asarray(t))
    p = float(_number(fspec, "exponent", kind="function"))
    return lambda t: c * np.asarray(t) ** p


def kernel_from_json(spec):
    """Build a :class:`~pathrkhs.kernels.Kernel` from its JSON description."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SchemaError("kernel spec must be an object with a 'kind'", operation="kernel_from_json")
    kind = spec["kind"]
    if kind not in FIELDS:
        raise SchemaError(f"unknown kernel kind {kind!r}", operation="kernel_from_json")
    unknown = set(spec) - FIELDS[kind] - {"kind", "scale"}
    if unknown:
        raise SchemaError(f"unknown fields for {kind}: {sorted(unknown)}",
                          operation="kernel_from_json")
    kernel = _build(kind, spec)
    if "scale" in spec and not (kind == "circle" and "decay" in spec):
        kernel = kernel.scaled(_number(spec, "scale"))
    return kernel


def _build(kind, spec):
    if kind == "wiener":
        return K.make_wiener()
    if kind == "bridge":
        return K.make_brownian_bridge()
    if kind == "ou":
        return K.make_ou(int(_number(spec, "variant", 1)), _number(spec, "a", 1.0),
                         _number(spec, "sigma", 1.0))
    if kind == "fbm":
        return K.make_fbm(_number(spec, "alpha"))
    if kind == "rl":
        return K.make_riemann_liouville(_number(spec, "alpha"), _number(spec, "quad_tol", 1e-10))
    if kind == "matern":
        dim = int(_number(spec, "dim", 1))
        bounds = spec.get("bounds")
        if bounds is None:
            domain = Domain.unit_box(dim)
        else:
            if len(bounds) != dim:
                raise SchemaError("matern bounds must have one pair per dimension",
                                  operation="kernel_from_json")
            domain = Domain.box([tuple(b) for b in bounds])
        return K.make_matern(_number(spec, "alpha"), _number(spec, "sigma", 1.0), domain,
                             bool(spec.get("normalized", True)))
    if kind == "circle":
        if "coeffs" in spec:
            return K.make_circle_kernel(spec["coeffs"])
        return K.make_circle_kernel(decay=_number(spec, "decay"), c0=_number(spec, "c0", 0.0),
                                    scale=_number(spec, "scale", 1.0),
                                    n_terms=int(_number(spec, "n_terms", 511)))
    if kind == "tensor":
        if "factors" in spec:
            factors = [kernel_from_json(f) for f in spec["factors"]]
        else:
            if "factor" not in spec:
                raise SchemaError("tensor needs 'factors' or 'factor' and 'd'",
                                  operation="kernel_from_json")
            factors = [kernel_from_json(spec["factor"])] * int(_number(spec, "d"))
        return K.tensor(factors)
    base = kernel_from_json(spec.get("base"))
    fspecs = spec.get("functions", [])
    signs = spec.get("signs", [])
    if not isinstance(fspecs, list) or not isinstance(signs, list):
        raise SchemaError("'functions' and 'signs' must be lists", operation="kernel_from_json")
    # identical descriptions share one function object so +f/-f pairs cancel
    cache = {}
    functions = []
    for f in fspecs:
        key = repr(sorted(f.items())) if isinstance(f, dict) else repr(f)
        if key not in cache:
            cache[key] = _function(f)
        functions.append(cache[key])
    out = K.add_finite_rank(base, functions, signs)
    if out is base:
        return base
    return replace(out, spec={k: v for k, v in spec.items() if k != "scale"})


# ------------------------------------------------------------------ JSON output

def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(str(k), indent, level + 1)}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__} as JSON")


def dumps(obj, indent=2):
    """JSON text with every float written to 17 significant digits; non-finite floats become null."""
    return _encode(obj, indent, 0) + "\n"
