"""Structured run reports: machine-readable first, with the human-readable
table derived from the same data.

The report body (everything except wall-clock timings) is deterministic
for a fixed scenario and seed, so CI can hash it or gate on residuals.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckResult:
    """One verification check: residual statistics against one tolerance."""

    name: str
    residual_max: float
    residual_median: float
    tolerance: float | None
    tolerance_class: str | None
    n_samples: int
    passed: bool

    @staticmethod
    def from_residuals(
        name: str,
        residuals,
        tolerance: float | None,
        tolerance_class: str | None = None,
    ) -> "CheckResult":
        import numpy as np

        values = np.asarray(list(residuals), dtype=float)
        worst = float(np.max(values)) if values.size else 0.0
        med = float(np.median(values)) if values.size else 0.0
        passed = True if tolerance is None else worst <= tolerance
        return CheckResult(
            name=name,
            residual_max=worst,
            residual_median=med,
            tolerance=tolerance,
            tolerance_class=tolerance_class,
            n_samples=int(values.size),
            passed=passed,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual_max": self.residual_max,
            "residual_median": self.residual_median,
            "tolerance": self.tolerance,
            "tolerance_class": self.tolerance_class,
            "n_samples": self.n_samples,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class SuiteResult:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    checks: tuple[CheckResult, ...] = ()
    reason: str | None = None
    wall_time_s: float = 0.0

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "name": self.name,
            "status": self.status,
            "reason": self.reason,
            "checks": [c.to_dict() for c in self.checks],
        }
        if include_timing:
            out["wall_time_s"] = self.wall_time_s
        return out


@dataclass(frozen=True)
class RunReport:
    scenario: dict
    suites: tuple[SuiteResult, ...]

    @property
    def passed(self) -> bool:
        return not any(s.status == "fail" for s in self.suites)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def config_hash(self) -> str:
        payload = json.dumps(self.scenario, sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]

    def body_dict(self) -> dict:
        """The deterministic report body: no wall-clock data."""
        return {
            "scenario": self.scenario,
            "config_hash": self.config_hash(),
            "conventions": {
                "curvature_layout": "R[n,i,k,m] for a_n^i_km; Ricci contracts a_n^i_im",
                "bundle_index_lowering": "Riemannian a_ij (the Finsler metric tensor is out of scope)",
                "residual_units": "vacuum Ricci residuals are scaled by r^2",
            },
            "suites": [s.to_dict(include_timing=False) for s in self.suites],
            "passed": self.passed,
        }

    def to_dict(self) -> dict:
        out = self.body_dict()
        out["timings"] = {s.name: s.wall_time_s for s in self.suites}
        return out

    def body_json(self) -> str:
        return json.dumps(self.body_dict(), sort_keys=True, indent=2)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def human_summary(self) -> str:
        """Fixed-width table derived from the machine-readable data."""
        lines = []
        lines.append(f"config {self.config_hash()}  seed {self.scenario.get('seed')}")
        header = f"{'suite':<26} {'status':<8} {'worst check':<34} {'residual':>12} {'tol':>10}"
        lines.append(header)
        lines.append("-" * len(header))
        for suite in self.suites:
            if suite.status == "skipped":
                lines.append(f"{suite.name:<26} {'SKIPPED':<8} ({suite.reason})")
                continue
            gated = [c for c in suite.checks if c.tolerance is not None]
            if gated:
                worst = max(gated, key=lambda c: c.residual_max / c.tolerance)
                lines.append(
                    f"{suite.name:<26} {suite.status.upper():<8} {worst.name:<34} "
                    f"{worst.residual_max:>12.3e} {worst.tolerance:>10.1e}"
                )
            else:
                lines.append(f"{suite.name:<26} {suite.status.upper():<8} (informational)")
            for check in suite.checks:
                if check.tolerance is not None and not check.passed:
                    lines.append(
                        f"    FAIL {check.name}: max {check.residual_max:.3e} "
                        f"> tol {check.tolerance:.1e} over {check.n_samples} samples"
                    )
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)
