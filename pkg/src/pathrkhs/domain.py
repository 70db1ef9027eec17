"""Bounded domains: intervals, axis-aligned boxes and the unit circle."""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

INTERVAL = "interval"
BOX = "box"
CIRCLE = "circle"


@dataclass(frozen=True)
class Domain:
    """A bounded domain ``T``.

    ``bounds`` holds one ``(lo, hi)`` pair per axis. The circle is the
    group ``R / Z`` represented by the fundamental cell ``[0, 1)``.
    """

    kind: str
    bounds: tuple

    def __post_init__(self):
        if self.kind not in (INTERVAL, BOX, CIRCLE):
            raise ParameterError(f"unknown domain kind {self.kind!r}", module="kernels")
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        if not bounds:
            raise ParameterError("domain needs at least one axis", module="kernels")
        for a, b in bounds:
            if not a < b:
                raise ParameterError(f"empty axis [{a}, {b}]", module="kernels")
        if self.kind in (INTERVAL, CIRCLE) and len(bounds) != 1:
            raise ParameterError(f"{self.kind} domains are one-dimensional", module="kernels")
        if self.kind == CIRCLE and bounds != ((0.0, 1.0),):
            raise ParameterError("the circle has period 1", module="kernels")
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def interval(cls, a=0.0, b=1.0):
        return cls(INTERVAL, ((a, b),))

    @classmethod
    def box(cls, bounds):
        bounds = tuple(bounds)
        if len(bounds) == 1:
            return cls(INTERVAL, bounds)
        return cls(BOX, bounds)

    @classmethod
    def unit_box(cls, d):
        return cls.box([(0.0, 1.0)] * d)

    @classmethod
    def circle(cls):
        return cls(CIRCLE, ((0.0, 1.0),))

    @property
    def dimension(self):
        return len(self.bounds)

    @property
    def measure(self):
        """Lebesgue (Haar for the circle) measure of the domain."""
        return float(np.prod([b - a for a, b in self.bounds]))

    @property
    def lower(self):
        return np.array([a for a, _ in self.bounds])

    @property
    def upper(self):
        return np.array([b for _, b in self.bounds])

    def contains(self, points, atol=1e-12):
        """Boolean mask of which points (shape ``(..., d)``) lie in the closed domain."""
        pts = np.asarray(points, dtype=float)
        lo = self.lower - atol
        hi = self.upper + atol
        return np.all((pts >= lo) & (pts <= hi), axis=-1)

    def reference_grid(self):
        """Points used to monitor pointwise quantities (power-kernel diagonals, sup norms)."""
        if self.kind == CIRCLE:
            return (np.arange(64) / 64.0)[:, None]
        if self.kind == INTERVAL:
            a, b = self.bounds[0]
            return np.linspace(a, b, 65)[:, None]
        axes = [np.linspace(a, b, 17) for a, b in self.bounds]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def to_json(self):
        return {"kind": self.kind, "bounds": [list(b) for b in self.bounds]}
