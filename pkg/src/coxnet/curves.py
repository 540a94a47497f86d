"""Success-probability curves p(theta) with provenance."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

KINDS = ("analytic", "monte-carlo")
CSV_HEADER = ("theta", "value", "err_or_ci", "kind")
# slack for the [0,1] and monotonicity checks on quadrature output
VALUE_TOL = 1e-9


def fmt(x: float) -> str:
    """Shortest round-trip float formatting (deterministic across runs)."""
    return repr(float(x))


@dataclass(frozen=True, eq=False)
class SirCurve:
    """Values on a theta grid plus either an error budget or CI half-widths.

    `errors` holds the quadrature error budget for analytic curves and the
    CI half-width for Monte Carlo curves; `n` is the realization count.
    """

    thetas: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    kind: str = "analytic"
    n: int | None = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        va = np.asarray(self.values, dtype=float)
        er = np.broadcast_to(np.asarray(self.errors, dtype=float), va.shape).copy()
        if th.ndim != 1 or th.shape != va.shape:
            raise ParameterError("theta grid and values must be matching 1-D arrays")
        if th.size == 0:
            raise ParameterError("empty theta grid")
        if np.any(np.diff(th) <= 0) or np.any(th <= 0):
            raise ParameterError("theta grid must be positive and strictly increasing")
        if self.kind not in KINDS:
            raise ParameterError(f"curve kind must be one of {KINDS}")
        if np.any(~np.isfinite(va)) or np.any(va < -VALUE_TOL) or np.any(va > 1 + VALUE_TOL):
            raise ParameterError("success probabilities must lie in [0, 1]")
        if np.any(np.diff(va) > VALUE_TOL + np.maximum(er[1:], er[:-1])):
            raise ParameterError("success probability must be non-increasing in theta")
        for name, arr in (("thetas", th), ("values", np.clip(va, 0.0, 1.0)), ("errors", er)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.thetas.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for t, v, e in zip(self.thetas, self.values, self.errors):
            w.writerow((fmt(t), fmt(v), fmt(e), self.kind))
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str, label: str = "") -> "SirCurve":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != CSV_HEADER:
            raise ParameterError(f"curve CSV must start with header {','.join(CSV_HEADER)}")
        body = rows[1:]
        kinds = {r[3] for r in body}
        if len(kinds) != 1:
            raise ParameterError("curve CSV mixes kinds")
        arr = np.array([[float(x) for x in r[:3]] for r in body])
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], kind=kinds.pop(), label=label)

    @classmethod
    def read_csv(cls, path, label: str = "") -> "SirCurve":
        with open(path) as fh:
            return cls.from_csv(fh.read(), label=label)
