"""Finsleroid spray geometry over the radial metric family.

For a fiber vector y at x, the deformation by the Finsleroid charge g
lives on the admissible cone where the transverse norm q and the factor
nu are positive:

    b   = b_i y^i                 (axis component)
    S^2 = a_ij y^i y^j
    q   = sqrt(S^2 - b^2)         (transverse norm)
    v_i = y_i - b b_i             (transverse covector)
    nu  = q + g (1 - c^2) b

The spray coefficients are  G^i = (g/nu) (ys) v^i + a^i_km y^k y^m  with
(ys) = y^j y^h nabla_j b_h, valid when nabla b is symmetric and g is
constant (both hold for this metric family).  Their y-derivatives have
exact closed forms; x-derivatives are taken by finite differences, and the
hh-curvature bundle K^2 R^i_k is assembled from

    2 dGbar^i/dx^k - Gbar^i_j Gbar^j_k - y^j dGbar^i_k/dx^j + 2 Gbar^j Gbar^i_kj

with Gbar = G/2.  The fundamental Finsler function itself is never needed:
only the combination K^2 R^i_k is exposed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .riemann import Frame, MetricState, build_metric, christoffel, nabla_b
from .profiles import ProfilePair
from .tensors import DiffConfig, Jet2, _D1_STENCILS, fd_gradient, fd_partials


class AdmissibilityError(ValueError):
    """The fiber vector lies outside the admissible cone."""


class DegenerateFiberError(AdmissibilityError):
    """q^2 <= 0: no real transverse norm (e.g. y parallel to the axis at c = 1,
    or an indefinite metric with no admissible fibers at all)."""


class OutsideConeError(AdmissibilityError):
    """nu <= 0: the fiber vector escapes the admissible cone."""


class ConeStencilError(RuntimeError):
    """A derivative stencil left the admissible cone even after shrinking."""


@dataclass(frozen=True)
class FinsleroidState:
    """All (x, y)-local Finsleroid quantities on the admissible cone.

    Field map (index placement in brackets):
      b        axis component b_i y^i
      s2       a_ij y^i y^j
      q2, q    transverse norm squared / its positive root
      v_low    v_i = y_i - b b_i;  v_up = y^i - b b^i
      nu       q + g (1 - c^2) b
      nu_low   y-gradient of nu: v_k / q + (1 - c^2) g b_k
      r_mix    transverse projector r^i_k = delta^i_k - b^i b_k  [upper, lower]
      r_low    a_km - b_k b_m
      eta      r_km - v_k v_m / q^2
      s_low    s_k = y^h nabla_k b_h;  ys = y^k s_k;  sigma = b^k s_k
      yc       y^h c_h
      e_fiber  (b/q^2) v_k - b_k, the covector whose y-derivative closes on eta
    """

    metric: MetricState
    y: np.ndarray
    charge: float
    relativistic: bool
    y_low: np.ndarray
    b: float
    s2: float
    q2: float
    q: float
    v_low: np.ndarray
    v_up: np.ndarray
    nu: float
    nu_low: np.ndarray
    r_mix: np.ndarray
    r_low: np.ndarray
    eta: np.ndarray
    s_low: np.ndarray
    ys: float
    sigma: float
    yc: float
    e_fiber: np.ndarray


def fiber_vectors(metric: MetricState, y: np.ndarray):
    """The q^2-level fiber data (no admissibility requirement): returns
    (y_low, b, S^2, q^2, v_low, v_up).  q^2 may be negative for indefinite
    metrics; callers needing the full state must go through kinematics."""
    y = np.asarray(y, dtype=float)
    y_low = metric.a_low @ y
    b = float(metric.b_low @ y)
    s2 = float(y @ y_low)
    q2 = s2 - b * b
    v_low = y_low - b * metric.b_low
    v_up = y - b * metric.b_up
    return y_low, b, s2, q2, v_low, v_up


def kinematics(
    metric: MetricState,
    y: np.ndarray,
    charge: float,
    relativistic: bool = False,
) -> FinsleroidState:
    """Assemble the Finsleroid state at (x, y), enforcing admissibility.

    ``relativistic=True`` flips the transverse norm to q^2 = b^2 - S^2 for
    exploratory runs on indefinite metrics; the printed identity suite is
    only claimed (and only asserted) for the positive-definite convention.
    """
    y = np.asarray(y, dtype=float)
    y_low, b, s2, q2, v_low, v_up = fiber_vectors(metric, y)
    if relativistic:
        q2 = b * b - s2
    if q2 <= 0.0:
        raise DegenerateFiberError(
            f"q^2 = {q2:.3e} <= 0: no transverse norm for this fiber vector"
        )
    q = float(np.sqrt(q2))
    c = metric.c
    one_minus_c2 = 1.0 - c * c
    nu = q + charge * one_minus_c2 * b
    if nu <= 0.0:
        raise OutsideConeError(f"nu = {nu:.3e} <= 0: fiber vector outside the cone")

    nu_low = v_low / q + one_minus_c2 * charge * metric.b_low
    n = metric.frame.n_dim
    r_mix = np.eye(n) - np.outer(metric.b_up, metric.b_low)
    r_low = metric.a_low - np.outer(metric.b_low, metric.b_low)
    eta = r_low - np.outer(v_low, v_low) / q2
    nb = nabla_b(metric)
    s_low = nb @ y
    ys = float(y @ s_low)
    sigma = float(metric.b_up @ s_low)
    yc = float(metric.dc_low @ y)
    e_fiber = (b / q2) * v_low - metric.b_low
    return FinsleroidState(
        metric=metric,
        y=y,
        charge=float(charge),
        relativistic=relativistic,
        y_low=y_low,
        b=b,
        s2=s2,
        q2=q2,
        q=q,
        v_low=v_low,
        v_up=v_up,
        nu=nu,
        nu_low=nu_low,
        r_mix=r_mix,
        r_low=r_low,
        eta=eta,
        s_low=s_low,
        ys=ys,
        sigma=sigma,
        yc=yc,
        e_fiber=e_fiber,
    )


# ---------------------------------------------------------------------------
# Spray coefficients and their y-derivatives
# ---------------------------------------------------------------------------


def riemann_spray(metric: MetricState, y: np.ndarray) -> np.ndarray:
    """The geodesic spray of the underlying metric: a^i_km y^k y^m."""
    gamma = christoffel(metric)
    return np.einsum("ikm,k,m->i", gamma, y, y)


def spray(state: FinsleroidState) -> np.ndarray:
    """G^i = (g/nu) (ys) v^i + a^i_km y^k y^m."""
    base = riemann_spray(state.metric, state.y)
    return (state.charge / state.nu) * state.ys * state.v_up + base


def spray_coefficients(
    metric: MetricState,
    y: np.ndarray,
    charge: float,
    relativistic: bool = False,
) -> np.ndarray:
    """Spray at (x, y); at charge 0 this is exactly the geodesic spray and
    needs no admissible cone."""
    if charge == 0.0:
        return riemann_spray(metric, np.asarray(y, dtype=float))
    return spray(kinematics(metric, y, charge, relativistic))


def spray_y_derivative(state: FinsleroidState) -> np.ndarray:
    """Closed first y-derivative, axes [i, k]:

    G^i_k = -(g/nu^2) (ys) nu_k v^i + 2 (g/nu) s_k v^i + (g/nu) (ys) r^i_k
            + 2 a^i_km y^m
    """
    gamma = christoffel(state.metric)
    g, nu, ys = state.charge, state.nu, state.ys
    return (
        -(g / nu**2) * ys * np.outer(state.v_up, state.nu_low)
        + 2.0 * (g / nu) * np.outer(state.v_up, state.s_low)
        + (g / nu) * ys * state.r_mix
        + 2.0 * np.einsum("ikm,m->ik", gamma, state.y)
    )


def spray_y_second(state: FinsleroidState) -> np.ndarray:
    """Closed second y-derivative, axes [i, k, m]:

    G^i_km = (2g/nu^3)(ys) nu_k nu_m v^i - (g/(nu^2 q))(ys) eta_km v^i
             + 2 (g/nu) (nabla_m b_k) v^i
             - 2 (g/nu^2) (nu_m s_k + nu_k s_m) v^i
             + 2 (g/nu) (s_k r^i_m + s_m r^i_k)
             - (g/nu^2) (ys) (nu_m r^i_k + nu_k r^i_m)
             + 2 a^i_km

    Exact under the symmetry of nabla b and constant charge (confirmed
    against the numeric second derivative in the tests).
    """
    gamma = christoffel(state.metric)
    nb = nabla_b(state.metric)
    g, nu, q, ys = state.charge, state.nu, state.q, state.ys
    v, s, nu_low, r_mix, eta = state.v_up, state.s_low, state.nu_low, state.r_mix, state.eta
    return (
        2.0 * (g / nu**3) * ys * np.einsum("i,k,m->ikm", v, nu_low, nu_low)
        - (g / (nu**2 * q)) * ys * np.einsum("i,km->ikm", v, eta)
        + 2.0 * (g / nu) * np.einsum("i,mk->ikm", v, nb)
        - 2.0 * (g / nu**2) * (
            np.einsum("i,m,k->ikm", v, nu_low, s) + np.einsum("i,k,m->ikm", v, nu_low, s)
        )
        + 2.0 * (g / nu) * (
            np.einsum("k,im->ikm", s, r_mix) + np.einsum("m,ik->ikm", s, r_mix)
        )
        - (g / nu**2) * ys * (
            np.einsum("m,ik->ikm", nu_low, r_mix) + np.einsum("k,im->ikm", nu_low, r_mix)
        )
        + 2.0 * gamma
    )


def _spray_closed_first(metric: MetricState, y: np.ndarray, charge: float) -> np.ndarray:
    if charge == 0.0:
        return 2.0 * np.einsum("ikm,m->ik", christoffel(metric), np.asarray(y, float))
    return spray_y_derivative(kinematics(metric, y, charge))


def _spray_closed_second(metric: MetricState, y: np.ndarray, charge: float) -> np.ndarray:
    if charge == 0.0:
        return 2.0 * christoffel(metric)
    return spray_y_second(kinematics(metric, y, charge))


def _fd_in_y(func, metric, y, charge, config: DiffConfig, retry: bool = True):
    """Central differences in y with |y|-scaled steps, shrinking once if a
    stencil point leaves the admissible cone."""
    y = np.asarray(y, dtype=float)
    n = y.size
    scale = float(np.linalg.norm(y))
    stencil = _D1_STENCILS[config.fd_order]
    for step in (config.fd_step, 0.1 * config.fd_step) if retry else (config.fd_step,):
        h = step * scale
        try:
            out = None
            for k in range(n):
                acc = None
                for off, w in stencil:
                    yp = y.copy()
                    yp[k] += off * h
                    fv = np.asarray(func(metric, yp, charge), dtype=float)
                    acc = w * fv if acc is None else acc + w * fv
                if out is None:
                    out = np.zeros((n,) + acc.shape)
                out[k] = acc / h
            return out
        except AdmissibilityError:
            continue
    raise ConeStencilError(
        "y-stencil left the admissible cone even after shrinking the step"
    )


@dataclass(frozen=True)
class SprayDerivatives:
    """First and second y-derivatives of the spray: closed forms, numeric
    differentiations, and their disagreements."""

    first_closed: np.ndarray
    first_numeric: np.ndarray
    second_closed: np.ndarray
    second_numeric: np.ndarray
    first_gap: float
    second_gap: float


def spray_derivatives(
    metric: MetricState,
    y: np.ndarray,
    charge: float,
    config: DiffConfig | None = None,
) -> SprayDerivatives:
    """Both derivative routes at (x, y).

    The first numeric derivative differentiates the spray itself; the
    second differentiates the independently verified closed first
    derivative (one stencil level each keeps the error budget at the
    closed-form class).
    """
    cfg = config or DiffConfig()
    first_closed = _spray_closed_first(metric, y, charge)
    second_closed = _spray_closed_second(metric, y, charge)
    first_numeric_raw = _fd_in_y(spray_coefficients, metric, y, charge, cfg)
    # fd_partials layout is [k, i]; derivative index goes last for G^i_k.
    first_numeric = np.transpose(first_numeric_raw, (1, 0))
    second_numeric_raw = _fd_in_y(_spray_closed_first, metric, y, charge, cfg)
    second_numeric = np.transpose(second_numeric_raw, (1, 2, 0))
    return SprayDerivatives(
        first_closed=first_closed,
        first_numeric=first_numeric,
        second_closed=second_closed,
        second_numeric=second_numeric,
        first_gap=float(np.max(np.abs(first_closed - first_numeric))),
        second_gap=float(np.max(np.abs(second_closed - second_numeric))),
    )


# ---------------------------------------------------------------------------
# hh-curvature bundle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SprayBundle:
    """The spray, its y-derivatives, and the hh-curvature combination
    K^2 R^i_k (axes [i, k]).  Index lowering on the bundle, where wanted,
    uses the Riemannian metric a_ij (the Finsler metric tensor is out of
    scope), which is also how the reports document it."""

    x: np.ndarray
    y: np.ndarray
    charge: float
    spray: np.ndarray
    first: np.ndarray
    second: np.ndarray
    curvature: np.ndarray


def _fd_in_x(field, frame, profiles, x, config: DiffConfig):
    """Central differences in x with r-scaled steps and one shrink retry on
    admissibility failures."""
    x = np.asarray(x, dtype=float)
    n = x.size
    scale = frame.radius(x)
    stencil = _D1_STENCILS[config.fd_order]
    for step in (config.fd_step, 0.1 * config.fd_step):
        h = step * scale
        try:
            out = None
            for k in range(n):
                acc = None
                for off, w in stencil:
                    xp = x.copy()
                    xp[k] += off * h
                    fv = np.asarray(field(build_metric(frame, profiles, xp)), dtype=float)
                    acc = w * fv if acc is None else acc + w * fv
                if out is None:
                    out = np.zeros((n,) + acc.shape)
                out[k] = acc / h
            return out
        except AdmissibilityError:
            continue
    raise ConeStencilError(
        "x-stencil left the admissible cone even after shrinking the step"
    )


def hh_curvature(
    frame: Frame,
    profiles: ProfilePair,
    x: np.ndarray,
    y: np.ndarray,
    charge: float,
    config: DiffConfig | None = None,
) -> SprayBundle:
    """Assemble K^2 R^i_k at (x, y) from x-stencils of the closed spray data.

    With Gbar = G/2 and y held fixed across the x-stencil:

        K^2 R^i_k = 2 dGbar^i/dx^k - Gbar^i_j Gbar^j_k
                    - y^j dGbar^i_k/dx^j + 2 Gbar^j Gbar^i_kj
    """
    cfg = config or DiffConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    metric = build_metric(frame, profiles, x)

    g_spray = spray_coefficients(metric, y, charge)
    g_first = _spray_closed_first(metric, y, charge)
    g_second = _spray_closed_second(metric, y, charge)

    d_spray = _fd_in_x(lambda ms: spray_coefficients(ms, y, charge), frame, profiles, x, cfg)
    d_first = _fd_in_x(lambda ms: _spray_closed_first(ms, y, charge), frame, profiles, x, cfg)

    gbar = 0.5 * g_spray
    gbar_first = 0.5 * g_first
    gbar_second = 0.5 * g_second
    d_gbar = 0.5 * d_spray          # [k, i] = d Gbar^i / d x^k
    d_gbar_first = 0.5 * d_first    # [j, i, k] = d Gbar^i_k / d x^j

    curvature = (
        2.0 * d_gbar.T
        - gbar_first @ gbar_first
        - np.einsum("j,jik->ik", y, d_gbar_first)
        + 2.0 * np.einsum("j,ikj->ik", gbar, gbar_second)
    )
    return SprayBundle(
        x=x,
        y=y,
        charge=float(charge),
        spray=g_spray,
        first=g_first,
        second=g_second,
        curvature=curvature,
    )


# ---------------------------------------------------------------------------
# Identity residuals (two-sided evaluations, analytic-jet derivatives)
# ---------------------------------------------------------------------------


def _fiber_jets(state: FinsleroidState, axis: int):
    """Second-order jets of the fiber scalars along y + t e_axis.

    Jet arithmetic gives the exact directional derivative of every quantity
    built from b(t), S^2(t), q(t), so derivative identities can be checked
    to algebraic precision without finite differences.
    """
    ms = state.metric
    a = ms.a_low
    b_ax = float(ms.b_low[axis])
    bj = Jet2(state.b, b_ax, 0.0)
    s2j = Jet2(state.s2, 2.0 * float(state.y_low[axis]), 2.0 * float(a[axis, axis]))
    q2j = s2j - bj * bj
    qj = q2j.sqrt()
    gc = state.charge * (1.0 - ms.c**2)
    nuj = qj + gc * bj
    v_j = [
        Jet2(float(state.v_low[k]), float(a[axis, k]) - b_ax * float(ms.b_low[k]), 0.0)
        for k in range(ms.frame.n_dim)
    ]
    nu_k_j = [v_j[k] / qj + gc * float(ms.b_low[k]) for k in range(ms.frame.n_dim)]
    ratio_j = [nu_k_j[k] / nuj for k in range(ms.frame.n_dim)]
    e_j = [bj / q2j * v_j[k] - float(ms.b_low[k]) for k in range(ms.frame.n_dim)]
    return nuj, nu_k_j, ratio_j, e_j


def kinematic_identity_residuals(state: FinsleroidState) -> dict[str, float]:
    """Two-sided residuals of the printed kinematic identities.

    Derivative identities evaluate their left sides with directional jets
    (exact chain rule), so every residual measures pure algebra:

      nu_gradient          nu_k = v_k/q + (1-c^2) g b_k  vs  d(nu)/dy^k
      nu_ratio_derivative  d(nu_k/nu)/dy^m = -nu_k nu_m/nu^2 + eta_km/(nu q)
      e_fiber_derivative   d(e_k)/dy^j = (b/q^2) eta_kj - v_k e_j / q^2
      v_dot_s              v^m s_m = (ys) - b sigma
      v_projected          v^j r^i_j = v^i - (1-c^2) b b^i
      projector_square     r^j_m r^i_j = r^i_m - (1-c^2) b^i b_m
      v_norm               v_j v^j = q^2 - (1-c^2) b^2
      nu_dot_v             nu_j v^j = nu - (1-c^2)(b^2 + g c^2 b q)/q
      b_dot_v              b_j v^j = (1-c^2) b
    """
    ms = state.metric
    n = ms.frame.n_dim
    c2 = ms.c**2
    one_minus_c2 = 1.0 - c2
    g = state.charge

    res: dict[str, float] = {}

    # Jet-based derivative identities, one directional pass per axis.
    nu_grad = np.zeros(n)
    ratio_d = np.zeros((n, n))  # [m, k] = d(nu_k/nu)/dy^m
    e_d = np.zeros((n, n))      # [j, k] = d(e_k)/dy^j
    for axis in range(n):
        nuj, _, ratio_j, e_j = _fiber_jets(state, axis)
        nu_grad[axis] = nuj.d1
        ratio_d[axis] = [rj.d1 for rj in ratio_j]
        e_d[axis] = [ej.d1 for ej in e_j]

    res["nu_gradient"] = float(np.max(np.abs(state.nu_low - nu_grad)))

    ratio_rhs = (
        -np.outer(state.nu_low, state.nu_low) / state.nu**2
        + state.eta / (state.nu * state.q)
    )  # [k, m]; symmetric in (k, m)
    res["nu_ratio_derivative"] = float(np.max(np.abs(ratio_d - ratio_rhs.T)))

    e_rhs = (state.b / state.q2) * state.eta - np.outer(state.v_low, state.e_fiber) / state.q2
    # e_rhs[k, j] = d(e_k)/dy^j; compare against e_d[j, k].
    res["e_fiber_derivative"] = float(np.max(np.abs(e_d - e_rhs.T)))

    v_up, v_low = state.v_up, state.v_low
    res["v_dot_s"] = abs(float(v_up @ state.s_low) - (state.ys - state.b * state.sigma))
    res["v_projected"] = float(
        np.max(np.abs(state.r_mix @ v_up - (v_up - one_minus_c2 * state.b * ms.b_up)))
    )
    proj_sq = np.einsum("ij,jm->im", state.r_mix, state.r_mix)
    res["projector_square"] = float(
        np.max(np.abs(proj_sq - (state.r_mix - one_minus_c2 * np.outer(ms.b_up, ms.b_low))))
    )
    res["v_norm"] = abs(float(v_low @ v_up) - (state.q2 - one_minus_c2 * state.b**2))
    res["nu_dot_v"] = abs(
        float(state.nu_low @ v_up)
        - (state.nu - one_minus_c2 * (state.b**2 + g * c2 * state.b * state.q) / state.q)
    )
    res["b_dot_v"] = abs(float(ms.b_low @ v_up) - one_minus_c2 * state.b)
    return res


def transverse_slope_residuals(
    frame: Frame,
    profiles: ProfilePair,
    x: np.ndarray,
    y: np.ndarray,
    charge: float,
    config: DiffConfig | None = None,
) -> dict[str, float]:
    """Diagnostic for the x-slope of the transverse norm.

    The printed shorthand dq/dx^k = -(b/q) b_{j,k} y^j drops the metric
    derivative term (1/2q) (d_k a_ij) y^i y^j; both gaps are reported so
    the dropped contribution is visible.  Exact (all zeros) only for
    constant profiles.
    """
    cfg = config or DiffConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    metric = build_metric(frame, profiles, x)
    state = kinematics(metric, y, charge)

    def q_field(pt: np.ndarray) -> float:
        ms = build_metric(frame, profiles, pt)
        _, _, _, q2, _, _ = fiber_vectors(ms, y)
        if q2 <= 0.0:
            raise DegenerateFiberError(f"q^2 = {q2:.3e} on the stencil")
        return float(np.sqrt(q2))

    dq = fd_gradient(q_field, x, cfg, scales=metric.r)

    def b_cov_field(pt: np.ndarray) -> np.ndarray:
        return build_metric(frame, profiles, pt).b_low

    db = fd_partials(b_cov_field, x, cfg, scales=metric.r)  # [k, j] = d_k b_j
    coord_rhs = -(state.b / state.q) * (db @ y)
    s_rhs = -(state.b / state.q) * state.s_low
    return {
        "coordinate_form": float(np.max(np.abs(dq - coord_rhs))),
        "covariant_form": float(np.max(np.abs(dq - s_rhs))),
    }
