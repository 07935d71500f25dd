"""Declarative scenario files for the verification runner.

Grammar (INI-style, documented in the README):

    # comment lines start with '#'
    [scenario]
    dimension = 4
    signature = -1
    charge = 0.0
    seed = 0
    suites = vacuum, curvature-xcheck
    allow_indefinite_finsler = false
    parallel = false

    [profile]
    kind = schwarzschild_isotropic
    xi = 1.0
    # kind = constant:  c0 = 1.0, m0 = -1.0
    # kind = rational:  c_coeffs = 0.8, 0.1   m_coeffs = 1.0, 0.2

    [samples]
    radii = 0.5, 1, 2, 5, 10
    points = 100
    fibers = 100

    [tolerances]
    finite_difference = 1e-6

    [output]
    report = report.json
    dump_tensors = dumps

Unknown sections or keys are parse errors carrying the offending line
number; constraint violations are validation errors naming the constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .profiles import ProfilePair
from .tensors import TOLERANCE_CLASSES

SUITES = (
    "frame-identities",
    "christoffel-xcheck",
    "curvature-xcheck",
    "vacuum",
    "schwarzschild-reductions",
    "finsler-identities",
    "finsler-curvature",
)

DEFAULT_RADII = (0.5, 1.0, 2.0, 5.0, 10.0)

_SECTION_KEYS = {
    "scenario": {
        "dimension",
        "signature",
        "charge",
        "seed",
        "suites",
        "allow_indefinite_finsler",
        "parallel",
    },
    "profile": {"kind", "xi", "c0", "m0", "c_coeffs", "m_coeffs"},
    "samples": {"radii", "points", "fibers"},
    "tolerances": set(TOLERANCE_CLASSES),
    "output": {"report", "dump_tensors"},
}


class ScenarioError(ValueError):
    """Malformed or invalid scenario content; carries a line number when
    the problem is syntactic."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Scenario:
    """A validated run configuration with all defaults resolved."""

    n_dim: int = 4
    epsilon: int = -1
    profile: ProfilePair = field(default_factory=lambda: ProfilePair.schwarzschild_isotropic(1.0))
    charge: float = 0.0
    seed: int = 0
    suites: tuple[str, ...] = ()
    radii: tuple[float, ...] = DEFAULT_RADII
    n_points: int = 100
    n_fibers: int = 100
    tolerances: dict[str, float] = field(default_factory=lambda: dict(TOLERANCE_CLASSES))
    report_path: str | None = None
    dump_dir: str | None = None
    allow_indefinite_finsler: bool = False
    parallel: bool = False

    def echo(self) -> dict:
        """Deterministic dictionary form for reports and hashing."""
        return {
            "dimension": self.n_dim,
            "signature": self.epsilon,
            "profile": {"kind": self.profile.kind, "params": _plain(self.profile.params)},
            "charge": self.charge,
            "seed": self.seed,
            "suites": list(self.suites),
            "radii": list(self.radii),
            "points": self.n_points,
            "fibers": self.n_fibers,
            "tolerances": dict(sorted(self.tolerances.items())),
            "allow_indefinite_finsler": self.allow_indefinite_finsler,
            "parallel": self.parallel,
        }

    def with_overrides(
        self,
        seed: int | None = None,
        tolerance_overrides: dict[str, float] | None = None,
        dump_dir: str | None = None,
        parallel: bool | None = None,
        report_path: str | None = None,
    ) -> "Scenario":
        tol = dict(self.tolerances)
        if tolerance_overrides:
            for name, value in tolerance_overrides.items():
                if name not in TOLERANCE_CLASSES:
                    raise ScenarioError(
                        f"unknown tolerance class {name!r}; known: {sorted(TOLERANCE_CLASSES)}"
                    )
                if not value > 0.0:
                    raise ScenarioError(f"tolerance {name} must be > 0, got {value}")
                tol[name] = float(value)
        return replace(
            self,
            seed=self.seed if seed is None else int(seed),
            tolerances=tol,
            dump_dir=self.dump_dir if dump_dir is None else dump_dir,
            parallel=self.parallel if parallel is None else bool(parallel),
            report_path=self.report_path if report_path is None else report_path,
        )


def _plain(params) -> dict:
    out = {}
    for key, value in params.items():
        out[key] = list(value) if isinstance(value, tuple) else value
    return out


def _parse_scalar(text: str, line: int):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _parse_value(text: str, line: int):
    if "," in text:
        return [_parse_scalar(part.strip(), line) for part in text.split(",") if part.strip()]
    return _parse_scalar(text, line)


def _as_list(value):
    return value if isinstance(value, list) else [value]


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario file contents into a Scenario."""
    sections: dict[str, dict[str, object]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTION_KEYS:
                raise ScenarioError(
                    f"unknown section [{name}]; known: {sorted(_SECTION_KEYS)}", lineno
                )
            current = name
            sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got {line!r}", lineno)
        if current is None:
            raise ScenarioError("key outside any [section]", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _SECTION_KEYS[current]:
            raise ScenarioError(
                f"unknown key {key!r} in section [{current}]; "
                f"known: {sorted(_SECTION_KEYS[current])}",
                lineno,
            )
        sections[current][key] = _parse_value(value.strip(), lineno)
    return _validate(sections)


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def _validate(sections: dict[str, dict[str, object]]) -> Scenario:
    sc = sections.get("scenario", {})
    prof = sections.get("profile", {})
    samples = sections.get("samples", {})
    tols = sections.get("tolerances", {})
    output = sections.get("output", {})

    n_dim = int(sc.get("dimension", 4))
    if not 2 <= n_dim <= 8:
        raise ScenarioError(f"N must be in [2,8]; got {n_dim}")
    epsilon = int(sc.get("signature", -1))
    if epsilon not in (1, -1):
        raise ScenarioError(f"signature must be +1 or -1; got {epsilon}")
    charge = float(sc.get("charge", 0.0))
    seed = int(sc.get("seed", 0))

    suites_raw = [str(s) for s in _as_list(sc.get("suites", []))]
    for name in suites_raw:
        if name not in SUITES:
            raise ScenarioError(f"unknown suite {name!r}; known: {list(SUITES)}")

    kind = str(prof.get("kind", "schwarzschild_isotropic"))
    try:
        if kind == "schwarzschild_isotropic":
            profile = ProfilePair.schwarzschild_isotropic(float(prof.get("xi", 1.0)))
        elif kind == "constant":
            profile = ProfilePair.constant(
                float(prof.get("c0", 1.0)), float(prof.get("m0", 1.0))
            )
        elif kind == "rational":
            if "c_coeffs" not in prof or "m_coeffs" not in prof:
                raise ScenarioError("rational profile needs c_coeffs and m_coeffs")
            profile = ProfilePair.rational(
                _as_list(prof["c_coeffs"]), _as_list(prof["m_coeffs"])
            )
        else:
            raise ScenarioError(
                f"unknown profile kind {kind!r}; known: constant, "
                "schwarzschild_isotropic, rational"
            )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(str(exc)) from exc

    radii = tuple(float(r) for r in _as_list(samples.get("radii", list(DEFAULT_RADII))))
    if any(r <= 0 for r in radii):
        raise ScenarioError("radii must be > 0")
    n_points = int(samples.get("points", 100))
    n_fibers = int(samples.get("fibers", 100))
    if n_points < 1 or n_fibers < 1:
        raise ScenarioError("points and fibers counts must be >= 1")

    tolerances = dict(TOLERANCE_CLASSES)
    for name, value in tols.items():
        value = float(value)
        if not value > 0.0:
            raise ScenarioError(f"tolerance {name} must be > 0, got {value}")
        tolerances[name] = value

    return Scenario(
        n_dim=n_dim,
        epsilon=epsilon,
        profile=profile,
        charge=charge,
        seed=seed,
        suites=tuple(suites_raw),
        radii=radii,
        n_points=n_points,
        n_fibers=n_fibers,
        tolerances=tolerances,
        report_path=str(output["report"]) if "report" in output else None,
        dump_dir=str(output["dump_tensors"]) if "dump_tensors" in output else None,
        allow_indefinite_finsler=bool(sc.get("allow_indefinite_finsler", False)),
        parallel=bool(sc.get("parallel", False)),
    )
