"""Spherically symmetric Riemannian geometry on a split background.

The chart carries a unit axis covector e_i and a rank-(N-1) transverse
block u_ij with e_ij = e_i e_j + eps u_ij.  The metric family is

    a_ij = b_i b_j / c(r)^2 + m(r) u_ij,        b_i = e_i,

with r = sqrt(u_ij x^i x^j).  Every derived object (covariant derivatives
of b and c, Christoffel symbols, Riemann and Ricci curvature) has a closed
form assembled here, each paired with a finite-difference oracle built from
nothing but the definition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .profiles import ProfilePair, RicciCoefficients, ricci_coefficients
from .tensors import DiffConfig, fd_partials

_FRAME_TOL = 1e-9


class FrameError(ValueError):
    """The supplied frame data violates the background split identities."""


class RadialSingularityError(ValueError):
    """The radial coordinate vanishes; the metric family is singular there."""


@dataclass(frozen=True)
class Frame:
    """Background split e_ij = e_i e_j + eps u_ij in a concrete chart.

    ``epsilon`` is +1 for the positive-definite background and -1 for the
    relativistic one; it enters only through the raised transverse block.
    Derived arrays (background inverse, raised/mixed u, raised e) are
    precomputed and validated at construction.
    """

    n_dim: int
    epsilon: int
    e_low: np.ndarray
    u_low: np.ndarray

    def __post_init__(self) -> None:
        if self.epsilon not in (1, -1):
            raise FrameError(f"epsilon must be +1 or -1, got {self.epsilon}")
        if not 2 <= self.n_dim <= 8:
            raise FrameError(f"dimension must be in [2, 8], got {self.n_dim}")
        e = np.array(self.e_low, dtype=float).reshape(self.n_dim)
        u = np.array(self.u_low, dtype=float).reshape(self.n_dim, self.n_dim)
        object.__setattr__(self, "e_low", e)
        object.__setattr__(self, "u_low", u)

        bg = np.outer(e, e) + self.epsilon * u
        try:
            bg_inv = np.linalg.inv(bg)
        except np.linalg.LinAlgError as exc:
            raise FrameError("background split e_i e_j + eps u_ij is not invertible") from exc
        e_up = bg_inv @ e
        u_up = bg_inv @ u @ bg_inv
        u_mix = u @ u_up  # u_i^j with axes [lower i, upper j]
        object.__setattr__(self, "_bg", bg)
        object.__setattr__(self, "_bg_inv", bg_inv)
        object.__setattr__(self, "_e_up", e_up)
        object.__setattr__(self, "_u_up", u_up)
        object.__setattr__(self, "_u_mix", u_mix)

        eye = np.eye(self.n_dim)
        checks = {
            "e_i e^i = 1": abs(e @ e_up - 1.0),
            "e^i u_ij = 0": float(np.max(np.abs(e_up @ u))),
            "u^ij u_jn = delta - e^i e_n": float(
                np.max(np.abs(u_up @ u - (eye - np.outer(e_up, e))))
            ),
        }
        worst = max(checks.values())
        if worst > _FRAME_TOL:
            bad = ", ".join(f"{k} (residual {v:.2e})" for k, v in checks.items() if v > _FRAME_TOL)
            raise FrameError(f"frame identities violated: {bad}")
        if np.linalg.matrix_rank(u, tol=1e-10) != self.n_dim - 1:
            raise FrameError("transverse block must have rank N-1")
        if np.min(np.linalg.eigvalsh(u)) < -_FRAME_TOL:
            raise FrameError("transverse block must be positive semidefinite")

    @property
    def background(self) -> np.ndarray:
        return self._bg

    @property
    def background_inv(self) -> np.ndarray:
        return self._bg_inv

    @property
    def e_up(self) -> np.ndarray:
        return self._e_up

    @property
    def u_up(self) -> np.ndarray:
        return self._u_up

    @property
    def u_mix(self) -> np.ndarray:
        """u_i^j with axes [lower, upper]; equals delta_i^j - e_i e^j."""
        return self._u_mix

    @staticmethod
    def standard(n_dim: int, epsilon: int = -1) -> "Frame":
        """Axis along coordinate 0: e = (1, 0, ...), u = diag(0, 1, ..., 1)."""
        e = np.zeros(n_dim)
        e[0] = 1.0
        u = np.eye(n_dim)
        u[0, 0] = 0.0
        return Frame(n_dim, epsilon, e, u)

    def transformed(self, lin: np.ndarray) -> "Frame":
        """The same frame expressed in the chart x_new = lin @ x_old."""
        lin = np.asarray(lin, dtype=float)
        lin_inv = np.linalg.inv(lin)
        return Frame(
            self.n_dim,
            self.epsilon,
            self.e_low @ lin_inv,
            lin_inv.T @ self.u_low @ lin_inv,
        )

    def radius(self, x: np.ndarray) -> float:
        r2 = float(x @ self.u_low @ x)
        if r2 <= 0.0:
            raise RadialSingularityError(
                "radius vanishes (point on the axis); the metric family is singular at r = 0"
            )
        return float(np.sqrt(r2))


@dataclass(frozen=True)
class MetricState:
    """All point-local metric data at x: radius, radial covector, metric and
    inverse, axis covector/vector, and the profile jets at r.

    Raised radial components use the background transverse block
    (n^i = u^ij n_j); the axis vector is metric-raised (b^i = a^ij b_j = c^2 e^i).
    States are immutable snapshots, safe to share across threads.
    """

    frame: Frame
    profiles: ProfilePair
    x: np.ndarray
    r: float
    n_low: np.ndarray
    n_up: np.ndarray
    b_low: np.ndarray
    b_up: np.ndarray
    a_low: np.ndarray
    a_up: np.ndarray
    c: float
    c1: float
    c2: float
    m: float
    m1: float
    m2: float

    @property
    def dc_low(self) -> np.ndarray:
        """Gradient covector of c: c_i = c'(r) n_i."""
        return self.c1 * self.n_low


def build_metric(frame: Frame, profiles: ProfilePair, x: np.ndarray) -> MetricState:
    """Assemble the metric family at x; the closed inverse is
    a^ij = b^i b^j / c^2 + u^ij / m, verified against a_ij a^jn = delta."""
    x = np.array(x, dtype=float).reshape(frame.n_dim)
    r = frame.radius(x)
    p = profiles.eval(r)
    n_low = (frame.u_low @ x) / r
    n_up = frame.u_up @ n_low
    b_low = frame.e_low.copy()
    b_up = p.c**2 * frame.e_up
    a_low = np.outer(b_low, b_low) / p.c**2 + p.m * frame.u_low
    a_up = np.outer(b_up, b_up) / p.c**2 + frame.u_up / p.m
    return MetricState(
        frame=frame,
        profiles=profiles,
        x=x,
        r=r,
        n_low=n_low,
        n_up=n_up,
        b_low=b_low,
        b_up=b_up,
        a_low=a_low,
        a_up=a_up,
        c=p.c,
        c1=p.c1,
        c2=p.c2,
        m=p.m,
        m1=p.m1,
        m2=p.m2,
    )


# ---------------------------------------------------------------------------
# Covariant derivatives of the axis covector and of c
# ---------------------------------------------------------------------------


def nabla_b(state: MetricState) -> np.ndarray:
    """Closed form nabla_i b_j = (c_i b_j + c_j b_i) / c; symmetric, m-free."""
    ci = state.dc_low
    return (np.outer(ci, state.b_low) + np.outer(state.b_low, ci)) / state.c


def nabla_b_definitional(state: MetricState, config: DiffConfig | None = None) -> np.ndarray:
    """Oracle: nabla_i b_j = d b_j / d x^i - b_n Gamma^n_ij with
    finite-difference partials and definitional Christoffel symbols."""
    cfg = config or DiffConfig()

    def b_field(pt: np.ndarray) -> np.ndarray:
        return build_metric(state.frame, state.profiles, pt).b_low

    db = fd_partials(b_field, state.x, cfg, scales=state.r)  # db[i, j] = d_i b_j
    gamma = christoffel_definitional(state, cfg)
    return db - np.einsum("n,nij->ij", state.b_low, gamma)


def nabla_c(state: MetricState) -> np.ndarray:
    """Closed form of nabla_i c_j for c_j = c'(r) n_j:

    c'' n_i n_j + (c'/r)(u_ij - n_i n_j)
    - (c'/2m) [2 m' n_i n_j + (2 c'/c^3) b_i b_j - m' u_ij]
    """
    n, b, u = state.n_low, state.b_low, state.frame.u_low
    nn = np.outer(n, n)
    return (
        state.c2 * nn
        + (state.c1 / state.r) * (u - nn)
        - (0.5 * state.c1 / state.m)
        * (2.0 * state.m1 * nn + (2.0 * state.c1 / state.c**3) * np.outer(b, b) - state.m1 * u)
    )


def nabla_c_definitional(state: MetricState, config: DiffConfig | None = None) -> np.ndarray:
    """Oracle: nabla_i c_j = d c_j / d x^i - c_n Gamma^n_ij, all numeric."""
    cfg = config or DiffConfig()

    def c_field(pt: np.ndarray) -> np.ndarray:
        return build_metric(state.frame, state.profiles, pt).dc_low

    dc = fd_partials(c_field, state.x, cfg, scales=state.r)
    gamma = christoffel_definitional(state, cfg)
    return dc - np.einsum("n,nij->ij", state.dc_low, gamma)


# ---------------------------------------------------------------------------
# Christoffel symbols
# ---------------------------------------------------------------------------


def christoffel(state: MetricState) -> np.ndarray:
    """Closed Christoffel symbols of the family, axes [k, i, j] for a^k_ij:

    a^k_ij = -(c'/c^3) b^k (n_i b_j + n_j b_i)
             + (1/2m) [m' n_i u_j^k + m' n_j u_i^k
                       + n^k ((2c'/c^3) b_i b_j - m' u_ij)]
    """
    n, n_up = state.n_low, state.n_up
    b, b_up = state.b_low, state.b_up
    u, u_mix = state.frame.u_low, state.frame.u_mix
    c, c1, m, m1 = state.c, state.c1, state.m, state.m1
    sym_nb = np.einsum("k,i,j->kij", b_up, n, b) + np.einsum("k,j,i->kij", b_up, n, b)
    inner = (
        m1 * np.einsum("i,jk->kij", n, u_mix)
        + m1 * np.einsum("j,ik->kij", n, u_mix)
        + (2.0 * c1 / c**3) * np.einsum("k,i,j->kij", n_up, b, b)
        - m1 * np.einsum("k,ij->kij", n_up, u)
    )
    return -(c1 / c**3) * sym_nb + inner / (2.0 * m)


def christoffel_definitional(state: MetricState, config: DiffConfig | None = None) -> np.ndarray:
    """Oracle: (1/2) a^kn (d_i a_nj + d_j a_ni - d_n a_ij) with numeric
    metric derivatives."""
    cfg = config or DiffConfig()

    def metric_field(pt: np.ndarray) -> np.ndarray:
        return build_metric(state.frame, state.profiles, pt).a_low

    da = fd_partials(metric_field, state.x, cfg, scales=state.r)  # da[n, i, j] = d_n a_ij
    # combo[i, n, j] = d_i a_nj + d_j a_ni - d_n a_ij
    combo = da + np.transpose(da, (2, 1, 0)) - np.transpose(da, (1, 0, 2))
    return 0.5 * np.einsum("kn,inj->kij", state.a_up, combo)


# ---------------------------------------------------------------------------
# Curvature
# ---------------------------------------------------------------------------


def _curvature_blocks(state: MetricState):
    """The four index blocks of the curvature closed form, axes [n, i, k, m]."""
    n, n_up = state.n_low, state.n_up
    b, b_up = state.b_low, state.b_up
    u, u_mix = state.frame.u_low, state.frame.u_mix
    m = state.m

    anti_nb = np.outer(n, b) - np.outer(b, n)  # [k, m] = n_k b_m - n_m b_k
    t_uu = np.einsum("mn,ki->nikm", u, u_mix) - np.einsum("kn,mi->nikm", u, u_mix)
    t_nb = np.einsum("n,km,i->nikm", n, anti_nb, b_up) - (1.0 / m) * np.einsum(
        "n,km,i->nikm", b, anti_nb, n_up
    )
    t_nu = (
        np.einsum("n,m,ki->nikm", n, n, u_mix)
        - np.einsum("n,k,mi->nikm", n, n, u_mix)
        - np.einsum("m,nk,i->nikm", n, u, n_up)
        + np.einsum("k,nm,i->nikm", n, u, n_up)
    )
    t_bu = (
        (1.0 / m)
        * (np.einsum("n,m,ki->nikm", b, b, u_mix) - np.einsum("n,k,mi->nikm", b, b, u_mix))
        - np.einsum("m,nk,i->nikm", b, u, b_up)
        + np.einsum("k,nm,i->nikm", b, u, b_up)
    )
    return t_uu, t_nb, t_nu, t_bu


def _block_scalars(state: MetricState):
    """Scalar weights of the four blocks: (m_slope, mixed, m_curv/2, cross/c^2)."""
    r, c, c1, c2, m, m1, m2 = state.r, state.c, state.c1, state.c2, state.m, state.m1, state.m2
    m_slope = (m1 / m) * (0.25 * m1 / m + 1.0 / r)
    mixed = c2 / c - 2.0 * (c1 / c) ** 2 - c1 / (r * c) - (c1 / c) * (m1 / m)
    m_curv_half = 0.5 * (m2 - m1 / r - 1.5 * m1**2 / m) / m
    cross_c = 0.5 * (c1 / c**3) * (m1 / m + 2.0 / r)
    return m_slope, mixed, m_curv_half, cross_c


def curvature_closed(state: MetricState) -> np.ndarray:
    """Closed-form curvature tensor a_n^i_km, axes [n, i, k, m].

    Five-block form with the pure-u block rewritten through
    m u_mn = a_mn - b_m b_n / c^2 and u_i^k = delta_i^k - b_i b^k / c^2;
    the remaining blocks keep their u/n/b structure.  Algebraically equal
    to the pre-substitution four-block sum (asserted in tests) and to the
    finite-difference oracle.
    """
    _, t_nb, t_nu, t_bu = _curvature_blocks(state)
    m_slope, mixed, m_curv_half, cross_c = _block_scalars(state)
    a, b, b_up = state.a_low, state.b_low, state.b_up
    m, c = state.m, state.c
    eye = np.eye(state.frame.n_dim)

    block_a = np.einsum("mn,ki->nikm", a, eye) - np.einsum("kn,mi->nikm", a, eye)
    block_ab = np.einsum("mn,k,i->nikm", a, b, b_up) - np.einsum("kn,m,i->nikm", a, b, b_up)
    block_bb = np.einsum("m,n,ki->nikm", b, b, eye) - np.einsum("k,n,mi->nikm", b, b, eye)
    return (
        -(m_slope / m) * block_a
        + (m_slope / (c**2 * m)) * (block_ab + block_bb)
        - (mixed / c**2) * t_nb
        - m_curv_half * t_nu
        + cross_c * t_bu
    )


def curvature_presubstitution(state: MetricState) -> np.ndarray:
    """The equivalent four-block curvature form kept in u/n/b variables."""
    t_uu, t_nb, t_nu, t_bu = _curvature_blocks(state)
    m_slope, mixed, m_curv_half, cross_c = _block_scalars(state)
    return (
        -m_slope * t_uu - (mixed / state.c**2) * t_nb - m_curv_half * t_nu + cross_c * t_bu
    )


def curvature_fd_oracle(state: MetricState, config: DiffConfig | None = None) -> np.ndarray:
    """Definitional curvature oracle, axes [n, i, k, m]:

    a_n^i_km = d_k a^i_nm - d_m a^i_nk + a^u_nm a^i_uk - a^u_nk a^i_um

    with the partials taken by central differences over the closed-form
    Christoffel field.
    """
    cfg = config or DiffConfig()

    def gamma_field(pt: np.ndarray) -> np.ndarray:
        return christoffel(build_metric(state.frame, state.profiles, pt))

    dgamma = fd_partials(gamma_field, state.x, cfg, scales=state.r)  # [d, k, i, j]
    gamma = christoffel(state)
    return (
        np.transpose(dgamma, (2, 1, 0, 3))
        - np.transpose(dgamma, (2, 1, 3, 0))
        + np.einsum("unm,iuk->nikm", gamma, gamma)
        - np.einsum("unk,ium->nikm", gamma, gamma)
    )


def ricci_from_curvature(curvature: np.ndarray) -> np.ndarray:
    """Contract the upper index with the first derivative index: a_n^i_im."""
    return np.trace(curvature, axis1=1, axis2=2)


def ricci_closed(state: MetricState) -> tuple[np.ndarray, RicciCoefficients]:
    """Decomposed Ricci tensor

        a_n^i_im = u_term * u_nm + bb_term * b_n b_m / (c^2 m) + nn_term * n_n n_m

    returned together with its three scalar coefficients."""
    coeffs = ricci_coefficients(state.profiles, state.r, state.frame.n_dim)
    ric = (
        coeffs.u_term * state.frame.u_low
        + (coeffs.bb_term / (state.c**2 * state.m)) * np.outer(state.b_low, state.b_low)
        + coeffs.nn_term * np.outer(state.n_low, state.n_low)
    )
    return ric, coeffs
