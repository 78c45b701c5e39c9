"""Core value types shared across the package.

Everything is binary64. Vectors are stored as read-only numpy arrays so the
objects can be shared freely between callers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# equality checks: |a - b| <= EQ_ABS + EQ_REL * scale
EQ_ABS = 1e-10
EQ_REL = 1e-10
# inequality checks tolerate violations up to this much
INEQ_TOL = 1e-9

STAR = "*"


def _frozen(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def close(a: float, b: float, abs_tol: float = EQ_ABS, rel_tol: float = EQ_REL) -> bool:
    return abs(a - b) <= abs_tol + rel_tol * max(abs(a), abs(b))


@dataclass(frozen=True)
class ClassParams:
    """Function class: ``mu``-strongly convex with ``L``-Lipschitz gradient,
    initial distance to a minimizer at most ``R_x``."""

    mu: float
    L: float
    R_x: float = 1.0

    def __post_init__(self):
        for name in ("mu", "L", "R_x"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if not self.mu < self.L:
            raise ValueError(f"mu must be strictly less than L (mu={self.mu}, L={self.L})")
        if self.R_x <= 0:
            raise ValueError(f"R_x must be positive, got {self.R_x}")

    @property
    def q(self) -> float:
        """Inverse condition number mu/L."""
        return self.mu / self.L

    def scaled(self, s: float) -> "ClassParams":
        return ClassParams(self.mu, self.L, self.R_x * s)


def make_class(mu: float, L: float, R_x: float = 1.0) -> ClassParams:
    return ClassParams(mu, L, R_x)


@dataclass(frozen=True)
class Triplet:
    """A point, a gradient at that point and a function value."""

    x: np.ndarray
    g: np.ndarray
    f: float

    def __post_init__(self):
        x = _frozen(self.x, "x")
        g = _frozen(self.g, "g")
        if x.shape != g.shape:
            raise ValueError(f"x and g dimensions differ: {x.shape} vs {g.shape}")
        f = float(self.f)
        if not math.isfinite(f):
            raise ValueError("f must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "f", f)

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    def padded(self, dim: int) -> "Triplet":
        extra = dim - self.dim
        if extra < 0:
            raise ValueError(f"cannot pad dimension {self.dim} down to {dim}")
        return Triplet(np.pad(self.x, (0, extra)), np.pad(self.g, (0, extra)), self.f)


@dataclass(frozen=True)
class TripletSet:
    """Triplets labelled ``0..N`` plus an optional starred entry.

    The starred entry, when present, always comes last in `labels` and in
    the stacked arrays `X`, `G`, `F`.
    """

    entries: tuple[Triplet, ...]
    star: Triplet | None = None

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("a triplet set needs at least one numbered entry")
        object.__setattr__(self, "entries", entries)
        dims = {t.dim for t in self.all()}
        if len(dims) != 1:
            raise ValueError(f"triplets have inconsistent dimensions {sorted(dims)}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        X = np.array([t.x for t in self.all()])
        G = np.array([t.g for t in self.all()])
        F = np.array([t.f for t in self.all()])
        for a in (X, G, F):
            a.setflags(write=False)
        object.__setattr__(self, "_X", X)
        object.__setattr__(self, "_G", G)
        object.__setattr__(self, "_F", F)

    @classmethod
    def from_arrays(cls, X, G, F, star: bool = False) -> "TripletSet":
        """Stack rows of ``X``, ``G``, ``F``; if `star`, the last row is the starred entry."""
        trips = [Triplet(x, g, f) for x, g, f in zip(np.asarray(X, float), np.asarray(G, float), np.asarray(F, float))]
        if star:
            return cls(tuple(trips[:-1]), trips[-1])
        return cls(tuple(trips))

    def all(self) -> list[Triplet]:
        return list(self.entries) + ([self.star] if self.star is not None else [])

    @property
    def dim(self) -> int:
        return self.entries[0].dim

    @property
    def N(self) -> int:
        """Largest numbered label."""
        return len(self.entries) - 1

    @property
    def labels(self) -> list:
        return list(range(len(self.entries))) + ([STAR] if self.star is not None else [])

    def index(self, label) -> int:
        """Row of `label` in the stacked arrays."""
        if label == STAR:
            if self.star is None:
                raise KeyError("no starred entry")
            return len(self.entries)
        label = int(label)
        if not 0 <= label < len(self.entries):
            raise KeyError(label)
        return label

    def __getitem__(self, label) -> Triplet:
        return self.all()[self.index(label)]

    def __len__(self) -> int:
        return len(self.entries) + (self.star is not None)

    @property
    def X(self) -> np.ndarray:
        return self._X

    @property
    def G(self) -> np.ndarray:
        return self._G

    @property
    def F(self) -> np.ndarray:
        return self._F

    def padded(self, dim: int) -> "TripletSet":
        return TripletSet(
            tuple(t.padded(dim) for t in self.entries),
            None if self.star is None else self.star.padded(dim),
        )


class ScheduleKind(str, enum.Enum):
    SIMPLE_MUZERO = "simple_muzero"
    EXACT_MUZERO = "exact_muzero"
    SIMPLE_SC = "simple_sc"
    EXACT_SC = "exact_sc"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Schedule:
    """Paired step sequences ``gamma_0..gamma_N`` and ``delta_0..delta_N``."""

    gamma: np.ndarray
    delta: np.ndarray
    params: ClassParams
    kind: ScheduleKind = ScheduleKind.CUSTOM

    def __post_init__(self):
        gamma = _frozen(self.gamma, "gamma")
        delta = _frozen(self.delta, "delta")
        if gamma.shape != delta.shape:
            raise ValueError("gamma and delta must have equal length")
        if gamma.size < 1:
            raise ValueError("a schedule needs at least one entry")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "kind", ScheduleKind(self.kind))

    @property
    def N(self) -> int:
        return self.gamma.size - 1


@dataclass(frozen=True)
class OracleResponse:
    """Value and gradient of the extension at a point, plus the simplex
    weights that certify them."""

    value: float
    gradient: np.ndarray
    alpha: np.ndarray


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float = 0.0
    detail: str = ""
    skipped: bool = False


@dataclass
class ValidationReport:
    """Per-condition outcomes. Failures are recorded, never raised."""

    title: str = ""
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, residual: float = 0.0, detail: str = "") -> Check:
        c = Check(name, bool(passed), float(residual), detail)
        self.checks.append(c)
        return c

    def skip(self, name: str, detail: str = "") -> Check:
        c = Check(name, True, 0.0, detail, skipped=True)
        self.checks.append(c)
        return c

    def extend(self, other: "ValidationReport") -> "ValidationReport":
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self) -> bool:
        return self.passed

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]

    def max_residual(self, names: Iterable[str] | None = None) -> float:
        sel = self.checks if names is None else [c for c in self.checks if c.name in set(names)]
        vals = [c.residual for c in sel if not c.skipped]
        return max(vals, default=0.0)

    def format(self) -> str:
        lines = [self.title] if self.title else []
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            status = "SKIP" if c.skipped else ("ok" if c.passed else "FAIL")
            line = f"{status:>4}  {c.name:<{width}}  residual={c.residual:.3e}"
            if c.detail:
                line += f"  {c.detail}"
            lines.append(line)
        return "\n".join(lines)


def as_vector(y: Sequence[float] | np.ndarray, dim: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (dim,):
        raise ValueError(f"expected a vector of dimension {dim}, got shape {y.shape}")
    return y
