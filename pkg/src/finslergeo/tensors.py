"""Dense small-tensor arithmetic with explicit index variance, plus two
independent differentiation engines: second-order Taylor jets (analytic
chain rule) and central finite differences.  The two engines are used as
mutual oracles throughout the geometry code.

Tensors are capped at rank 4 and dimension 8; everything is stored densely
so componentwise tests stay exhaustive and cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

MAX_RANK = 4
MAX_DIM = 8

COVARIANT = "d"
CONTRAVARIANT = "u"

# Default tolerance per check class.  Rationale: error budgets differ by
# provenance (pure algebra vs closed-form assembly vs finite differences vs
# doubly-stencilled curvature bundles).
TOLERANCE_CLASSES: dict[str, float] = {
    "exact": 1e-12,
    "algebraic": 1e-10,
    "closed_form": 1e-8,
    "finite_difference": 1e-6,
    "bundle": 1e-5,
}


class ShapeError(ValueError):
    """Tensor axes disagree in dimension or exceed the rank/dimension caps."""


class ContractionError(ValueError):
    """A contraction paired two indices of the same variance."""


class StencilError(RuntimeError):
    """A finite-difference stencil produced a non-finite evaluation."""


@dataclass(frozen=True)
class Tensor:
    """Dense tensor over one N-dimensional chart with per-axis variance tags.

    ``variance`` is a string of "u" (contravariant) / "d" (covariant), one
    character per axis.  Contraction and raising/lowering enforce the tags,
    so index-position mistakes fail loudly instead of producing silently
    wrong components.
    """

    components: np.ndarray
    variance: str = ""

    def __post_init__(self) -> None:
        arr = np.array(self.components, dtype=float)
        object.__setattr__(self, "components", arr)
        if arr.ndim != len(self.variance):
            raise ShapeError(
                f"variance {self.variance!r} has {len(self.variance)} tags "
                f"for a rank-{arr.ndim} tensor"
            )
        if arr.ndim > MAX_RANK:
            raise ShapeError(f"rank {arr.ndim} exceeds the cap {MAX_RANK}")
        if arr.ndim > 0:
            dims = set(arr.shape)
            if len(dims) != 1:
                raise ShapeError(f"axes must share one dimension, got {arr.shape}")
            if arr.shape[0] > MAX_DIM:
                raise ShapeError(f"dimension {arr.shape[0]} exceeds the cap {MAX_DIM}")
        bad = set(self.variance) - {COVARIANT, CONTRAVARIANT}
        if bad:
            raise ValueError(f"unknown variance tags {sorted(bad)}")

    @property
    def rank(self) -> int:
        return self.components.ndim

    @property
    def n_dim(self) -> int:
        return self.components.shape[0] if self.rank else 0

    def item(self) -> float:
        return float(self.components)


def product(t1: Tensor, t2: Tensor) -> Tensor:
    """Outer product; the combined rank must stay within the cap."""
    if t1.rank + t2.rank > MAX_RANK:
        raise ShapeError(f"product rank {t1.rank + t2.rank} exceeds the cap {MAX_RANK}")
    if t1.rank and t2.rank and t1.n_dim != t2.n_dim:
        raise ShapeError(f"dimension mismatch {t1.n_dim} vs {t2.n_dim}")
    comp = np.multiply.outer(t1.components, t2.components)
    return Tensor(comp, t1.variance + t2.variance)


def contract(t: Tensor, axis_a: int, axis_b: int) -> Tensor:
    """Trace over one covariant and one contravariant axis.

    The paired axes must have opposite variance and equal dimension; the
    result drops both axes (rank reduced by 2).
    """
    if t.rank < 2:
        raise ShapeError(f"cannot contract a rank-{t.rank} tensor")
    if axis_a == axis_b:
        raise ShapeError("contraction axes must be distinct")
    for ax in (axis_a, axis_b):
        if not 0 <= ax < t.rank:
            raise ShapeError(f"axis {ax} out of range for rank {t.rank}")
    if t.variance[axis_a] == t.variance[axis_b]:
        raise ContractionError(
            f"axes {axis_a} and {axis_b} are both "
            f"{'covariant' if t.variance[axis_a] == COVARIANT else 'contravariant'}"
        )
    if t.components.shape[axis_a] != t.components.shape[axis_b]:
        raise ShapeError("contraction axes differ in dimension")
    comp = np.trace(t.components, axis1=axis_a, axis2=axis_b)
    variance = "".join(ch for i, ch in enumerate(t.variance) if i not in (axis_a, axis_b))
    return Tensor(comp, variance)


def raise_index(t: Tensor, axis: int, metric_inverse: np.ndarray) -> Tensor:
    """Raise one covariant axis with the inverse metric a^ij."""
    if not 0 <= axis < t.rank:
        raise ShapeError(f"axis {axis} out of range for rank {t.rank}")
    if t.variance[axis] != COVARIANT:
        raise ContractionError(f"axis {axis} is already contravariant")
    g = np.asarray(metric_inverse, dtype=float)
    comp = np.moveaxis(np.tensordot(g, t.components, axes=(1, axis)), 0, axis)
    variance = t.variance[:axis] + CONTRAVARIANT + t.variance[axis + 1:]
    return Tensor(comp, variance)


def lower_index(t: Tensor, axis: int, metric: np.ndarray) -> Tensor:
    """Lower one contravariant axis with the metric a_ij."""
    if not 0 <= axis < t.rank:
        raise ShapeError(f"axis {axis} out of range for rank {t.rank}")
    if t.variance[axis] != CONTRAVARIANT:
        raise ContractionError(f"axis {axis} is already covariant")
    g = np.asarray(metric, dtype=float)
    comp = np.moveaxis(np.tensordot(g, t.components, axes=(1, axis)), 0, axis)
    variance = t.variance[:axis] + COVARIANT + t.variance[axis + 1:]
    return Tensor(comp, variance)


def transform_components(components: np.ndarray, variance: str, lin: np.ndarray) -> np.ndarray:
    """Push tensor components to the chart x_new = lin @ x_old.

    Contravariant axes transform with ``lin``, covariant axes with its
    inverse transpose; used by the chart-covariance tests.
    """
    comp = np.asarray(components, dtype=float)
    lin = np.asarray(lin, dtype=float)
    lin_inv = np.linalg.inv(lin)
    for axis, ch in enumerate(variance):
        if ch == CONTRAVARIANT:
            comp = np.moveaxis(np.tensordot(lin, comp, axes=(1, axis)), 0, axis)
        else:
            comp = np.moveaxis(np.tensordot(comp, lin_inv, axes=(axis, 0)), -1, axis)
    return comp


# ---------------------------------------------------------------------------
# Second-order Taylor jets (analytic differentiation engine)
# ---------------------------------------------------------------------------


def _as_jet(value) -> "Jet2":
    if isinstance(value, Jet2):
        return value
    return Jet2(float(value), 0.0, 0.0)


@dataclass(frozen=True)
class Jet2:
    """Value with first and second derivative with respect to one parameter.

    Arithmetic propagates (value, d1, d2) by the product/chain rules, which
    makes any composite expression an exact analytic derivative evaluator,
    independent of the finite-difference engine it is checked against.
    """

    value: float
    d1: float = 0.0
    d2: float = 0.0

    @staticmethod
    def variable(value: float) -> "Jet2":
        return Jet2(float(value), 1.0, 0.0)

    @staticmethod
    def constant(value: float) -> "Jet2":
        return Jet2(float(value), 0.0, 0.0)

    def __add__(self, other) -> "Jet2":
        o = _as_jet(other)
        return Jet2(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.d1, -self.d2)

    def __sub__(self, other) -> "Jet2":
        return self + (-_as_jet(other))

    def __rsub__(self, other) -> "Jet2":
        return _as_jet(other) + (-self)

    def __mul__(self, other) -> "Jet2":
        o = _as_jet(other)
        return Jet2(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.value
        return Jet2(1.0 / v, -self.d1 / v**2, 2.0 * self.d1**2 / v**3 - self.d2 / v**2)

    def __truediv__(self, other) -> "Jet2":
        return self * _as_jet(other).reciprocal()

    def __rtruediv__(self, other) -> "Jet2":
        return _as_jet(other) * self.reciprocal()

    def __pow__(self, exponent) -> "Jet2":
        p = float(exponent)
        if not p.is_integer() and self.value <= 0.0:
            raise ValueError(f"non-integer power of non-positive value {self.value}")
        v, d1, d2 = self.value, self.d1, self.d2
        f = v**p
        fp = p * v ** (p - 1)
        fpp = p * (p - 1) * v ** (p - 2)
        return Jet2(f, fp * d1, fpp * d1 * d1 + fp * d2)

    def sqrt(self) -> "Jet2":
        s = math.sqrt(self.value)
        return Jet2(s, self.d1 / (2.0 * s), self.d2 / (2.0 * s) - self.d1**2 / (4.0 * s**3))


# ---------------------------------------------------------------------------
# Finite-difference engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiffConfig:
    """Finite-difference settings plus the tolerance profile per check class.

    Steps are relative: the actual step along an axis is fd_step times a
    scale (by default max(1, |coordinate|)).
    """

    fd_step: float = 1e-5
    fd_order: int = 4
    tolerances: Mapping[str, float] = field(
        default_factory=lambda: dict(TOLERANCE_CLASSES)
    )

    def __post_init__(self) -> None:
        if not self.fd_step > 0.0:
            raise ValueError(f"fd_step must be > 0, got {self.fd_step}")
        if self.fd_order not in (2, 4):
            raise ValueError(f"fd_order must be 2 or 4, got {self.fd_order}")

    def tolerance(self, class_name: str, scale: float = 1.0) -> float:
        return self.tolerances[class_name] * scale


# First-derivative stencils as (offset, weight); value = sum w*f(x+off*h) / h.
_D1_STENCILS = {
    2: ((1, 0.5), (-1, -0.5)),
    4: ((2, -1.0 / 12.0), (1, 8.0 / 12.0), (-1, -8.0 / 12.0), (-2, 1.0 / 12.0)),
}

# Second-derivative stencils; value = sum w*f(x+off*h) / h^2.
_D2_STENCILS = {
    2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
    4: (
        (2, -1.0 / 12.0),
        (1, 16.0 / 12.0),
        (0, -30.0 / 12.0),
        (-1, 16.0 / 12.0),
        (-2, -1.0 / 12.0),
    ),
}


def _check_finite(value: np.ndarray, where: str) -> np.ndarray:
    if not np.all(np.isfinite(value)):
        raise StencilError(f"non-finite evaluation at stencil point ({where})")
    return value


def fd_partials(
    f: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    config: DiffConfig | None = None,
    scales: np.ndarray | float | None = None,
) -> np.ndarray:
    """Central-difference partial derivatives of an array-valued field.

    Returns out[k, ...] = d f / d x^k.  ``scales`` fixes the per-axis step
    scale (scalar or length-N array); default is max(1, |x_k|) per axis.
    """
    cfg = config or DiffConfig()
    x = np.asarray(x, dtype=float)
    n = x.size
    if scales is None:
        scale_arr = np.maximum(1.0, np.abs(x))
    else:
        scale_arr = np.broadcast_to(np.asarray(scales, dtype=float), (n,))
    stencil = _D1_STENCILS[cfg.fd_order]
    out = None
    for k in range(n):
        h = cfg.fd_step * scale_arr[k]
        acc = None
        for off, w in stencil:
            xp = x.copy()
            xp[k] += off * h
            fv = _check_finite(np.asarray(f(xp), dtype=float), f"axis {k}, offset {off}")
            acc = w * fv if acc is None else acc + w * fv
        if out is None:
            out = np.zeros((n,) + acc.shape)
        out[k] = acc / h
    return out


def fd_gradient(
    f: Callable[[np.ndarray], float],
    x: np.ndarray,
    config: DiffConfig | None = None,
    scales: np.ndarray | float | None = None,
) -> np.ndarray:
    """Central-difference gradient of a scalar field (a covector).

    Error is O(fd_step^2) at order 2 and O(fd_step^4) at order 4.
    """
    grad = fd_partials(lambda p: np.asarray(float(f(p))), x, config, scales)
    return grad.reshape(-1)


def fd_derivative(
    f: Callable[[float], float],
    r: float,
    config: DiffConfig | None = None,
    scale: float | None = None,
) -> float:
    """Central-difference first derivative of a scalar function of one scalar."""
    cfg = config or DiffConfig()
    h = cfg.fd_step * (scale if scale is not None else max(1.0, abs(r)))
    acc = 0.0
    for off, w in _D1_STENCILS[cfg.fd_order]:
        fv = float(f(r + off * h))
        if not math.isfinite(fv):
            raise StencilError(f"non-finite evaluation at r={r + off * h}")
        acc += w * fv
    return acc / h


def fd_second(
    f: Callable[[float], float],
    r: float,
    config: DiffConfig | None = None,
    scale: float | None = None,
) -> float:
    """Central-difference second derivative of a scalar function of one scalar."""
    cfg = config or DiffConfig()
    h = cfg.fd_step * (scale if scale is not None else max(1.0, abs(r)))
    acc = 0.0
    for off, w in _D2_STENCILS[cfg.fd_order]:
        fv = float(f(r + off * h))
        if not math.isfinite(fv):
            raise StencilError(f"non-finite evaluation at r={r + off * h}")
        acc += w * fv
    return acc / (h * h)


# ---------------------------------------------------------------------------
# Residual helpers shared by the verification suites
# ---------------------------------------------------------------------------


def max_abs(arr) -> float:
    a = np.asarray(arr)
    return float(np.max(np.abs(a))) if a.size else 0.0


def rel_frobenius(a, b) -> float:
    """Frobenius norm of (a - b), relative to the larger of the two norms."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = max(np.linalg.norm(a.ravel()), np.linalg.norm(b.ravel()))
    if denom == 0.0:
        return float(np.linalg.norm((a - b).ravel()))
    return float(np.linalg.norm((a - b).ravel()) / denom)
