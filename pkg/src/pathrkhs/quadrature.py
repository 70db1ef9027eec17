"""Quadrature rules discretizing Lebesgue measure on intervals, boxes and the circle.

A :class:`QuadratureRule` is a finite measure ``nu = sum_j w_j delta_{x_j}``.
Rules remember how they were built so that they can be refined (``n -> 2n``
per axis), which the finite-rank and dominance diagnostics rely on.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .domain import CIRCLE, INTERVAL, Domain
from .errors import ParameterError, SizeError, UsageError

GAUSS_LEGENDRE = "gauss_legendre"
UNIFORM_MIDPOINT = "uniform_midpoint"
CIRCLE_UNIFORM = "circle_uniform"

MAX_NODES = 10**7


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    domain: Domain
    scheme: str
    n_per_axis: tuple
    factors: tuple = field(default=())

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        weights = np.array(self.weights, dtype=float)
        if nodes.shape[0] != weights.shape[0]:
            raise ParameterError("nodes and weights differ in length", module="quadrature")
        if np.any(weights <= 0):
            raise ParameterError("quadrature weights must be positive", module="quadrature")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self):
        return self.weights.shape[0]

    @property
    def dimension(self):
        return self.nodes.shape[1]

    def integrate(self, values):
        return float(np.dot(self.weights, values))

    def refine(self, factor=2):
        """The same scheme with ``factor`` times as many nodes per axis."""
        if self.factors:
            return tensor_rule([f.refine(factor) for f in self.factors])
        n = self.n_per_axis[0] * factor
        if self.scheme == GAUSS_LEGENDRE:
            a, b = self.domain.bounds[0]
            return gauss_legendre(n, a, b)
        if self.scheme == CIRCLE_UNIFORM:
            return circle_uniform(n)
        return uniform_midpoint(n, self.domain)

    def to_json(self):
        scheme = {GAUSS_LEGENDRE: "gl", UNIFORM_MIDPOINT: "uniform", CIRCLE_UNIFORM: "circle"}
        out = {"scheme": scheme.get(self.scheme, self.scheme), "n": int(self.n_per_axis[0])}
        if self.domain.kind != CIRCLE:
            out["bounds"] = [list(b) for b in self.domain.bounds]
        return out


def _check_size(total):
    if total > MAX_NODES:
        raise SizeError(f"{total} nodes exceed the limit of {MAX_NODES}", module="quadrature")


def gauss_legendre(n, a=0.0, b=1.0):
    """n-point Gauss-Legendre rule on ``[a, b]``, exact for degree ``<= 2n - 1``."""
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}", module="quadrature")
    if not a < b:
        raise ParameterError(f"need a < b, got [{a}, {b}]", module="quadrature")
    n = int(n)
    _check_size(n)
    x, w = special.roots_legendre(n)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    weights = half * w
    return QuadratureRule(nodes, weights, Domain.interval(a, b), GAUSS_LEGENDRE, (n,))


def circle_uniform(n):
    """Equal weights ``1/n`` at ``j/n``; circulant Gram matrices for stationary kernels."""
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}", module="quadrature")
    n = int(n)
    _check_size(n)
    nodes = np.arange(n) / n
    return QuadratureRule(nodes, np.full(n, 1.0 / n), Domain.circle(), CIRCLE_UNIFORM, (n,))


def uniform_midpoint(n, domain=None):
    """Midpoint rule with ``n`` cells per axis (``n**d`` nodes on a box).

    On the circle the nodes sit at ``j/n`` rather than at cell midpoints.
    """
    domain = Domain.interval() if domain is None else domain
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}", module="quadrature")
    n = int(n)
    if domain.kind == CIRCLE:
        return circle_uniform(n)
    _check_size(n**domain.dimension)
    axes = []
    for a, b in domain.bounds:
        h = (b - a) / n
        axes.append((a + h * (np.arange(n) + 0.5), np.full(n, h)))
    if domain.dimension == 1:
        x, w = axes[0]
        return QuadratureRule(x, w, domain, UNIFORM_MIDPOINT, (n,))
    nodes, weights = _product(axes)
    return QuadratureRule(nodes, weights, domain, UNIFORM_MIDPOINT, (n,) * domain.dimension)


def _product(axes):
    grids = np.meshgrid(*[x for x, _ in axes], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*[w for _, w in axes], indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return nodes, weights


def tensor_rule(rules):
    """Product rule of one-dimensional interval rules."""
    rules = list(rules)
    if not rules:
        raise ParameterError("tensor_rule needs at least one factor", module="quadrature")
    for r in rules:
        if r.domain.kind != INTERVAL:
            raise UsageError("tensor_rule factors must be interval rules", module="quadrature")
    if len(rules) == 1:
        return rules[0]
    _check_size(int(np.prod([r.size for r in rules])))
    nodes, weights = _product([(r.nodes[:, 0], r.weights) for r in rules])
    schemes = {r.scheme for r in rules}
    scheme = schemes.pop() if len(schemes) == 1 else "tensor"
    domain = Domain.box([r.domain.bounds[0] for r in rules])
    return QuadratureRule(nodes, weights, domain, scheme,
                          tuple(r.size for r in rules), factors=tuple(rules))


def default_rule(domain):
    """Rule used for verdicts when none is given: GL(1024) in 1-d, midpoint 64/axis otherwise."""
    if domain.kind == CIRCLE:
        return circle_uniform(1024)
    if domain.kind == INTERVAL:
        a, b = domain.bounds[0]
        return gauss_legendre(1024, a, b)
    return uniform_midpoint(64, domain)


def rule_from_json(spec, domain=None):
    """Build a rule from ``{"scheme": "gl"|"uniform"|"circle", "n": int, "bounds": [[a, b], ...]}``."""
    from .errors import SchemaError

    if not isinstance(spec, dict) or "scheme" not in spec or "n" not in spec:
        raise SchemaError("quadrature spec needs 'scheme' and 'n'", operation="rule_from_json")
    scheme = spec["scheme"]
    n = spec["n"]
    if "bounds" in spec:
        domain = Domain.box([tuple(b) for b in spec["bounds"]])
    if scheme == "circle":
        return circle_uniform(n)
    domain = Domain.interval() if domain is None else domain
    if scheme == "gl":
        if domain.kind == INTERVAL:
            a, b = domain.bounds[0]
            return gauss_legendre(n, a, b)
        return tensor_rule([gauss_legendre(n, a, b) for a, b in domain.bounds])
    if scheme == "uniform":
        return uniform_midpoint(n, domain)
    raise SchemaError(f"unknown quadrature scheme {scheme!r}", operation="rule_from_json")
