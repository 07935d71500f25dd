"""Verification suites driven by a Scenario.

Each suite samples deterministically from a seed derived from the scenario
seed and the suite's fixed position, evaluates its residuals (optionally
in parallel over samples; reductions stay order-stable either way), and
returns per-check statistics.  A suite whose preconditions fail is marked
skipped with the reason, and the run continues.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .finsler import (
    AdmissibilityError,
    hh_curvature,
    kinematics,
    kinematic_identity_residuals,
    spray_coefficients,
    spray_derivatives,
)
from .profiles import DomainError, ProfilePair
from .report import CheckResult, RunReport, SuiteResult
from .riemann import (
    Frame,
    MetricState,
    build_metric,
    christoffel,
    christoffel_definitional,
    curvature_closed,
    curvature_fd_oracle,
    curvature_presubstitution,
    ricci_closed,
    ricci_from_curvature,
)
from .scenario import SUITES, Scenario
from .tensors import DiffConfig, fd_partials, max_abs, rel_frobenius
from .vacuum import contraction_identities, reduced_curvature, verify_vacuum


def _config(scenario: Scenario) -> DiffConfig:
    return DiffConfig(tolerances=dict(scenario.tolerances))


def _suite_rng(scenario: Scenario, suite: str) -> np.random.Generator:
    return np.random.default_rng([scenario.seed, SUITES.index(suite)])


def _map(fn: Callable, items: Iterable, parallel: bool) -> list:
    items = list(items)
    if parallel and len(items) > 1:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _sampling_range(profile: ProfilePair) -> tuple[float, float]:
    lo = 1.2 * profile.r_min if profile.r_min > 0.0 else 0.5
    return lo, max(8.0, 4.0 * lo)


def _sample_point(rng: np.random.Generator, n_dim: int, lo: float, hi: float) -> np.ndarray:
    # Standard chart: coordinate 0 is the axis direction, the rest spatial.
    direction = rng.normal(size=n_dim - 1)
    direction /= np.linalg.norm(direction)
    x = np.empty(n_dim)
    x[0] = rng.uniform(-1.0, 1.0)
    x[1:] = rng.uniform(lo, hi) * direction
    return x


def _sample_states(scenario: Scenario, rng: np.random.Generator, count: int) -> list[MetricState]:
    frame = Frame.standard(scenario.n_dim, scenario.epsilon)
    lo, hi = _sampling_range(scenario.profile)
    states = []
    while len(states) < count:
        x = _sample_point(rng, scenario.n_dim, lo, hi)
        try:
            states.append(build_metric(frame, scenario.profile, x))
        except DomainError:
            continue
    return states


def _sample_admissible(
    scenario: Scenario,
    rng: np.random.Generator,
    count: int,
    relativistic: bool,
    charge: float | None = None,
    margin: float = 0.05,
):
    """Sample (state, y) pairs inside the admissible cone, with margins so
    derivative stencils stay inside too.  Returns None if the profile
    admits too few fibers."""
    frame = Frame.standard(scenario.n_dim, scenario.epsilon)
    lo, hi = _sampling_range(scenario.profile)
    effective_charge = scenario.charge if charge is None else charge
    pairs = []
    tries = 0
    max_tries = 60 * count
    while len(pairs) < count and tries < max_tries:
        tries += 1
        x = _sample_point(rng, scenario.n_dim, lo, hi)
        y = rng.normal(size=scenario.n_dim)
        try:
            state = build_metric(frame, scenario.profile, x)
            fib = kinematics(state, y, effective_charge, relativistic)
        except (AdmissibilityError, DomainError):
            continue
        scale = np.sqrt(abs(fib.s2)) + abs(fib.b)
        if fib.q < margin * scale or fib.nu < margin * max(fib.q, 1e-300):
            continue
        pairs.append((state, y))
    return pairs if len(pairs) == count else None


# ---------------------------------------------------------------------------
# Individual suites
# ---------------------------------------------------------------------------


def suite_frame_identities(scenario: Scenario, cfg: DiffConfig):
    rng = _suite_rng(scenario, "frame-identities")
    states = _sample_states(scenario, rng, scenario.n_points)
    frame = states[0].frame
    eye = np.eye(scenario.n_dim)

    def residuals(state: MetricState) -> dict[str, float]:
        e, e_up = frame.e_low, frame.e_up
        u, u_up, u_mix = frame.u_low, frame.u_up, frame.u_mix
        return {
            "axis_normalisation": abs(e @ e_up - 1.0),
            "axis_transversality": max_abs(e_up @ u),
            "transverse_inverse": max_abs(u_up @ u - (eye - np.outer(e_up, e))),
            "transverse_mixed": max_abs(u_mix - (eye - np.outer(e, e_up))),
            "metric_inverse": max_abs(state.a_low @ state.a_up - eye),
            "axis_vector_norm": abs(state.b_up @ state.b_low - state.c**2),
            "axis_vector_transversality": max_abs(state.b_up @ u),
            "axis_vector_form": max_abs(state.b_up - state.c**2 * e_up),
            "metric_raise_consistency": max_abs(state.a_up @ state.b_low - state.b_up),
            "radial_norm": abs(state.n_up @ state.n_low - 1.0),
            "radial_axis_orthogonality": abs(state.n_low @ state.b_up),
            "radial_raise_signature": max_abs(
                state.n_up - frame.epsilon * frame.background_inv @ state.n_low
            ),
            "axis_c_orthogonality": abs(state.b_up @ state.dc_low),
        }

    rows = _map(residuals, states, scenario.parallel)
    checks = [
        CheckResult.from_residuals(name, [row[name] for row in rows], cfg.tolerance("exact"), "exact")
        for name in rows[0]
    ]
    status = "pass" if all(c.passed for c in checks) else "fail"
    return SuiteResult("frame-identities", status, tuple(checks)), {}


def suite_christoffel_xcheck(scenario: Scenario, cfg: DiffConfig):
    rng = _suite_rng(scenario, "christoffel-xcheck")
    states = _sample_states(scenario, rng, scenario.n_points)

    def residuals(state: MetricState) -> dict[str, float]:
        closed = christoffel(state)
        return {
            "closed_vs_definitional": max_abs(closed - christoffel_definitional(state, cfg)),
            "lower_symmetry": max_abs(closed - np.transpose(closed, (0, 2, 1))),
        }

    rows = _map(residuals, states, scenario.parallel)
    checks = [
        CheckResult.from_residuals(
            "closed_vs_definitional",
            [row["closed_vs_definitional"] for row in rows],
            cfg.tolerance("closed_form"),
            "closed_form",
        ),
        CheckResult.from_residuals(
            "lower_symmetry",
            [row["lower_symmetry"] for row in rows],
            cfg.tolerance("exact"),
            "exact",
        ),
    ]
    status = "pass" if all(c.passed for c in checks) else "fail"
    return SuiteResult("christoffel-xcheck", status, tuple(checks)), {}


def suite_curvature_xcheck(scenario: Scenario, cfg: DiffConfig):
    rng = _suite_rng(scenario, "curvature-xcheck")
    count = min(scenario.n_points, 25)  # FD oracle per point; keep the suite brisk
    states = _sample_states(scenario, rng, count)

    def residuals(state: MetricState) -> dict[str, float]:
        closed = curvature_closed(state)
        oracle = curvature_fd_oracle(state, cfg)
        ric_decomposed, _ = ricci_closed(state)
        lowered = np.einsum("is,nskm->nikm", state.a_low, closed)
        return {
            "closed_vs_fd_oracle": rel_frobenius(closed, oracle),
            "block_form_equivalence": max_abs(closed - curvature_presubstitution(state)),
            "ricci_decomposition_consistency": max_abs(
                ricci_from_curvature(closed) - ric_decomposed
            ),
            "antisymmetry_last_pair": max_abs(closed + np.transpose(closed, (0, 1, 3, 2))),
            "antisymmetry_first_pair_lowered": max_abs(
                lowered + np.transpose(lowered, (1, 0, 2, 3))
            ),
        }

    rows = _map(residuals, states, scenario.parallel)
    check_plan = [
        ("closed_vs_fd_oracle", "finite_difference", 1.0),
        ("block_form_equivalence", "exact", 1.0),
        ("ricci_decomposition_consistency", "algebraic", 10.0),
        ("antisymmetry_last_pair", "exact", 1.0),
        ("antisymmetry_first_pair_lowered", "exact", 10.0),
    ]
    checks = [
        CheckResult.from_residuals(
            name, [row[name] for row in rows], cfg.tolerance(klass, scale), klass
        )
        for name, klass, scale in check_plan
    ]
    status = "pass" if all(c.passed for c in checks) else "fail"
    dumps = {}
    if scenario.dump_dir:
        dumps["curvature_closed_sample"] = curvature_closed(states[0])
    return SuiteResult("curvature-xcheck", status, tuple(checks)), dumps


def suite_vacuum(scenario: Scenario, cfg: DiffConfig):
    if scenario.profile.kind != "schwarzschild_isotropic":
        return (
            SuiteResult(
                "vacuum",
                "skipped",
                reason="requires the schwarzschild_isotropic profile",
            ),
            {},
        )
    xi = float(scenario.profile.params["xi"])
    report = verify_vacuum(xi, scenario.radii, scenario.n_dim, seed=scenario.seed, config=cfg)
    checks = [
        CheckResult.from_residuals(
            "ricci_scaled",
            [res.ricci_scaled for res in report.results],
            report.tolerances["ricci_scaled"],
            "algebraic",
        ),
        CheckResult.from_residuals(
            "ricci_coefficients_scaled",
            [max(res.coefficients_scaled) for res in report.results],
            report.tolerances["coefficients_scaled"],
            "algebraic",
        ),
        CheckResult.from_residuals(
            "closed_vs_oracle",
            [res.closed_vs_oracle for res in report.results],
            report.tolerances["closed_vs_oracle"],
            "finite_difference",
        ),
        CheckResult.from_residuals(
            "reduced_vs_closed",
            [res.reduced_vs_closed for res in report.results],
            report.tolerances["reduced_vs_closed"],
            "closed_form",
        ),
        CheckResult.from_residuals(
            "axis_contractions",
            [max(res.contractions.values()) for res in report.results],
            report.tolerances["contractions"],
            "algebraic",
        ),
    ]
    status = "pass" if report.passed else "fail"
    dumps = {}
    if scenario.dump_dir:
        frame = Frame.standard(scenario.n_dim, scenario.epsilon)
        for res in report.results:
            x = np.zeros(scenario.n_dim)
            x[1] = res.r
            state = build_metric(frame, scenario.profile, x)
            dumps[f"vacuum_curvature_r{res.r:g}"] = curvature_closed(state)
    return SuiteResult("vacuum", status, tuple(checks)), dumps


def suite_schwarzschild_reductions(scenario: Scenario, cfg: DiffConfig):
    if scenario.profile.kind != "schwarzschild_isotropic":
        return (
            SuiteResult(
                "schwarzschild-reductions",
                "skipped",
                reason="requires the schwarzschild_isotropic profile",
            ),
            {},
        )
    rng = _suite_rng(scenario, "schwarzschild-reductions")
    frame = Frame.standard(scenario.n_dim, scenario.epsilon)
    xi = float(scenario.profile.params["xi"])

    reduced_gaps, contraction_gaps, scaling_gaps = [], [], []
    for r in scenario.radii:
        x = _sample_point(rng, scenario.n_dim, r, r)
        state = build_metric(frame, scenario.profile, x)
        closed = curvature_closed(state)
        reduced_gaps.append(rel_frobenius(reduced_curvature(state), closed))
        y = rng.normal(size=scenario.n_dim)
        contraction_gaps.append(max(contraction_identities(state, y).values()))
        # Scaling xi -> lam*xi, x -> lam*x leaves (c, m) invariant and scales
        # curvature components by 1/lam^2.
        for lam in (0.5, 2.0):
            scaled_profile = ProfilePair.schwarzschild_isotropic(lam * xi)
            scaled_state = build_metric(frame, scaled_profile, lam * x)
            scaling_gaps.append(max_abs(lam**2 * curvature_closed(scaled_state) - closed))

    checks = [
        CheckResult.from_residuals(
            "reduced_vs_closed", reduced_gaps, cfg.tolerance("closed_form"), "closed_form"
        ),
        CheckResult.from_residuals(
            "axis_contractions", contraction_gaps, cfg.tolerance("algebraic", 10.0), "algebraic"
        ),
        CheckResult.from_residuals(
            "scaling_covariance", scaling_gaps, cfg.tolerance("algebraic"), "algebraic"
        ),
    ]
    status = "pass" if all(c.passed for c in checks) else "fail"
    return SuiteResult("schwarzschild-reductions", status, tuple(checks)), {}


def _relativistic_mode(scenario: Scenario) -> bool:
    return scenario.allow_indefinite_finsler and scenario.epsilon == -1


def suite_finsler_identities(scenario: Scenario, cfg: DiffConfig):
    relativistic = _relativistic_mode(scenario)
    if scenario.epsilon != 1 and not scenario.allow_indefinite_finsler:
        return (
            SuiteResult(
                "finsler-identities",
                "skipped",
                reason="needs signature +1 (set allow_indefinite_finsler for exploratory runs)",
            ),
            {},
        )
    rng = _suite_rng(scenario, "finsler-identities")
    # The identity set involves the charge through nu; if the scenario runs
    # charge 0 the suite still validates the charged formulas at 0.3.
    charge = scenario.charge if scenario.charge != 0.0 else 0.3
    pairs = _sample_admissible(scenario, rng, scenario.n_fibers, relativistic, charge=charge)
    if pairs is None:
        return (
            SuiteResult(
                "finsler-identities",
                "skipped",
                reason="profile admits too few admissible fiber vectors",
            ),
            {},
        )

    def residuals(pair):
        state, y = pair
        fib = kinematics(state, y, charge, relativistic)
        res = kinematic_identity_residuals(fib)
        res["e_fiber_derivative_fd"] = _e_fiber_rule_fd(fib, cfg)
        return res

    rows = _map(residuals, pairs, scenario.parallel)
    # The printed identity suite is only claimed for the positive-definite
    # convention; exploratory indefinite runs report residuals untested.
    identity_tol = None if relativistic else cfg.tolerance("algebraic")
    fd_tol = None if relativistic else cfg.tolerance("closed_form")
    checks = []
    for name in rows[0]:
        tol = fd_tol if name == "e_fiber_derivative_fd" else identity_tol
        klass = "closed_form" if name == "e_fiber_derivative_fd" else "algebraic"
        checks.append(
            CheckResult.from_residuals(name, [row[name] for row in rows], tol, klass)
        )
    status = "pass" if all(c.passed for c in checks) else "fail"
    return SuiteResult("finsler-identities", status, tuple(checks)), {}


def _e_fiber_rule_fd(fib, cfg: DiffConfig) -> float:
    """Finite-difference cross-check of the e_k derivative rule."""
    metric = fib.metric

    def e_field(yv: np.ndarray) -> np.ndarray:
        return kinematics(metric, yv, fib.charge, fib.relativistic).e_fiber

    d_e = fd_partials(e_field, fib.y, cfg, scales=float(np.linalg.norm(fib.y)))
    rhs = (fib.b / fib.q2) * fib.eta - np.outer(fib.v_low, fib.e_fiber) / fib.q2
    return max_abs(d_e - rhs.T)


def suite_finsler_curvature(scenario: Scenario, cfg: DiffConfig):
    if scenario.charge != 0.0 and scenario.epsilon != 1:
        # The spray closed forms are only asserted for the positive-definite
        # convention; charge 0 collapses to the Riemannian spray and runs on
        # any signature.
        return (
            SuiteResult(
                "finsler-curvature",
                "skipped",
                reason="charged runs need signature +1 (charge 0 runs on any signature)",
            ),
            {},
        )
    rng = _suite_rng(scenario, "finsler-curvature")
    frame = Frame.standard(scenario.n_dim, scenario.epsilon)
    count = min(scenario.n_fibers, 100)
    if scenario.charge == 0.0:
        lo, hi = _sampling_range(scenario.profile)
        pairs = []
        while len(pairs) < count:
            x = _sample_point(rng, scenario.n_dim, lo, hi)
            try:
                state = build_metric(frame, scenario.profile, x)
            except DomainError:
                continue
            pairs.append((state, rng.normal(size=scenario.n_dim)))
    else:
        pairs = _sample_admissible(scenario, rng, count, relativistic=False)
        if pairs is None:
            return (
                SuiteResult(
                    "finsler-curvature",
                    "skipped",
                    reason="profile admits too few admissible fiber vectors",
                ),
                {},
            )

    def evaluate(pair):
        state, y = pair
        derivs = spray_derivatives(state, y, scenario.charge, cfg)
        g1 = spray_coefficients(state, y, scenario.charge)
        g2 = spray_coefficients(state, 2.0 * y, scenario.charge)
        bundle = hh_curvature(frame, state.profiles, state.x, y, scenario.charge, cfg)
        out = {
            "spray_homogeneity": max_abs(g2 - 4.0 * g1),
            "euler_identity": max_abs(derivs.first_closed @ y - 2.0 * g1),
            "spray_first_derivative_gap": derivs.first_gap,
            "bundle_y_contraction": max_abs(bundle.curvature @ y),
            "bundle_magnitude": max_abs(bundle.curvature),
        }
        if scenario.charge == 0.0:
            riem = curvature_closed(state)
            comparison = np.einsum("nikm,n,m->ik", riem, y, y)
            out["riemann_limit"] = rel_frobenius(bundle.curvature, comparison)
        return out, bundle

    results = _map(evaluate, pairs, scenario.parallel)
    rows = [row for row, _ in results]
    check_plan = [
        ("spray_homogeneity", "exact", 1.0),
        ("euler_identity", "algebraic", 10.0),
        ("spray_first_derivative_gap", "finite_difference", 0.1),
        ("bundle_y_contraction", "finite_difference", 1.0),
    ]
    if scenario.charge == 0.0:
        check_plan.append(("riemann_limit", "bundle", 1.0))
    checks = [
        CheckResult.from_residuals(
            name, [row[name] for row in rows], cfg.tolerance(klass, scale), klass
        )
        for name, klass, scale in check_plan
    ]
    checks.append(
        CheckResult.from_residuals(
            "bundle_magnitude", [row["bundle_magnitude"] for row in rows], None, None
        )
    )
    status = "pass" if all(c.passed for c in checks) else "fail"
    dumps = {}
    if scenario.dump_dir:
        dumps["finsler_bundle_sample"] = results[0][1].curvature
    return SuiteResult("finsler-curvature", status, tuple(checks)), dumps


_SUITE_FUNCS = {
    "frame-identities": suite_frame_identities,
    "christoffel-xcheck": suite_christoffel_xcheck,
    "curvature-xcheck": suite_curvature_xcheck,
    "vacuum": suite_vacuum,
    "schwarzschild-reductions": suite_schwarzschild_reductions,
    "finsler-identities": suite_finsler_identities,
    "finsler-curvature": suite_finsler_curvature,
}


def write_tensor_csv(path: Path, array: np.ndarray) -> None:
    """One row per component: indices then the full-precision decimal value."""
    array = np.asarray(array, dtype=float)
    letters = ["i", "j", "k", "m"][: array.ndim]
    lines = [",".join(letters + ["value"])]
    for idx in np.ndindex(*array.shape):
        lines.append(",".join(str(i) for i in idx) + f",{float(array[idx])!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run(scenario: Scenario) -> RunReport:
    """Execute the scenario's suites in declared order and assemble the report.

    A suite precondition failure marks the suite skipped and the run
    continues; an unexpected numerical error marks it failed with the
    diagnostic.  Exit-code policy: report.exit_code is 0 iff no suite
    failed (skips do not fail a run).
    """
    cfg = _config(scenario)
    suite_results = []
    dumps_all: dict[str, np.ndarray] = {}
    for name in scenario.suites:
        func = _SUITE_FUNCS[name]
        started = time.perf_counter()
        try:
            result, dumps = func(scenario, cfg)
        except Exception as exc:  # numerical failure inside a suite
            result, dumps = (
                SuiteResult(name, "fail", reason=f"{type(exc).__name__}: {exc}"),
                {},
            )
        elapsed = time.perf_counter() - started
        suite_results.append(
            SuiteResult(result.name, result.status, result.checks, result.reason, elapsed)
        )
        dumps_all.update(dumps)

    report = RunReport(scenario=scenario.echo(), suites=tuple(suite_results))

    if scenario.report_path:
        path = Path(scenario.report_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.to_json() + "\n", encoding="utf-8")
    if scenario.dump_dir and dumps_all:
        dump_root = Path(scenario.dump_dir)
        dump_root.mkdir(parents=True, exist_ok=True)
        for name, array in dumps_all.items():
            write_tensor_csv(dump_root / f"{name}.csv", array)
    return report
