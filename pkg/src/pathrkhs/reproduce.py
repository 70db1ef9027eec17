"""Fixed fixture table: each classical process with its known decision."""

from dataclasses import dataclass
import time

from .analysis import EXISTS, NOT_EXISTS, rkhs_path_verdict
from .specs import kernel_from_json

FIXTURES = (
    ("wiener", {"kind": "wiener"}, NOT_EXISTS),
    ("bridge", {"kind": "bridge"}, NOT_EXISTS),
    ("ou1", {"kind": "ou", "variant": 1}, NOT_EXISTS),
    ("ou2", {"kind": "ou", "variant": 2}, NOT_EXISTS),
    ("fbm(0.25)", {"kind": "fbm", "alpha": 0.25}, NOT_EXISTS),
    ("fbm(0.75)", {"kind": "fbm", "alpha": 0.75}, EXISTS),
    ("rl(0.25)", {"kind": "rl", "alpha": 0.25}, NOT_EXISTS),
    ("rl(0.75)", {"kind": "rl", "alpha": 0.75}, EXISTS),
    ("matern(0.25,d=1)", {"kind": "matern", "alpha": 0.25, "dim": 1}, NOT_EXISTS),
    ("matern(1.5,d=1)", {"kind": "matern", "alpha": 1.5, "dim": 1}, EXISTS),
    ("matern(0.5,d=2)", {"kind": "matern", "alpha": 0.5, "dim": 2}, NOT_EXISTS),
    ("matern(1.5,d=2)", {"kind": "matern", "alpha": 1.5, "dim": 2}, EXISTS),
    ("circle(n^-1.5)", {"kind": "circle", "decay": 1.5}, NOT_EXISTS),
    ("circle(n^-4)", {"kind": "circle", "decay": 4.0}, EXISTS),
    ("tensor matern(1.5) d=2", {"kind": "tensor", "factor": {"kind": "matern", "alpha": 1.5},
                                "d": 2}, EXISTS),
    ("tensor matern(1.5) d=5", {"kind": "tensor", "factor": {"kind": "matern", "alpha": 1.5},
                                "d": 5}, EXISTS),
)


@dataclass
class FixtureRow:
    name: str
    expected: str
    decision: str
    rho: float
    beta_window: tuple
    seconds: float

    @property
    def passed(self):
        return self.decision == self.expected

    def to_json(self):
        return {"fixture": self.name, "expected": self.expected, "decision": self.decision,
                "pass": self.passed, "rho": self.rho,
                "beta_window": None if self.beta_window is None else list(self.beta_window)}


def reproduce_paper_table(only=None):
    """Run the fixture list (or the named subset) and return one row per fixture.

    Rows come back in fixture order. ``INCONCLUSIVE`` never matches an expected
    decision, so it counts as a failure.
    """
    rows = []
    for name, spec, expected in FIXTURES:
        if only is not None and name not in only:
            continue
        start = time.perf_counter()
        verdict = rkhs_path_verdict(kernel_from_json(spec))
        rows.append(FixtureRow(name, expected, verdict.decision, verdict.rho_evidence.rho,
                               verdict.beta_window, time.perf_counter() - start))
    return rows


def format_table(rows):
    lines = [f"{'fixture':<24} {'expected':<11} {'decision':<13} {'rho':>7}  result"]
    for r in rows:
        lines.append(f"{r.name:<24} {r.expected:<11} {r.decision:<13} {r.rho:7.3f}  "
                     f"{'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines)
