"""Reproducible parameter sweeps, decay studies, and gradient checks.

Everything here is seeded through SplitMix64 substreams keyed by work-item
index, so results are deterministic regardless of execution order, and
outputs are listed in canonical (grid, state) order.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import lyapunov, model
from .integrators import Method, NewtonError, StepConfig, simulate
from .lyapunov import CertificateReport, MatrixFamily, Verdict, certify, definiteness_threshold
from .rng import substream

# Initial states are drawn with |x_i| <= 5, deep into tanh saturation, so
# decay studies exercise the genuinely nonlinear regime.
_STATE_RANGE = 5.0

_DECAY_TOLERANCE = {
    # Guaranteed per-step decay up to Newton slack.
    Method.DISCRETE_GRADIENT: 1e-10,
    # RK4 has no discrete guarantee; this absorbs O(dt^5) local error at
    # omega0*dt <= 0.01.
    Method.RK4: 1e-9,
}


class SpecValidationError(ValueError):
    """Sweep specification rejected; carries the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class SweepSpec:
    """Grid and sampling plan for a combined certification/decay sweep."""

    r_grid: tuple
    omega0_grid: tuple
    families: tuple
    seed: int
    samples_per_point: int
    method: Method = Method.DISCRETE_GRADIENT
    dt: float = 0.05
    n_steps: int = 200

    @staticmethod
    def from_dict(data: dict) -> "SweepSpec":
        """Build and validate a spec from parsed JSON, reporting the field
        path of the first violation."""
        if not isinstance(data, dict):
            raise SpecValidationError("$", "spec must be a JSON object")

        def grid(key, lo=None, hi=None, positive=False):
            values = data.get(key)
            if not isinstance(values, list) or not values:
                raise SpecValidationError(key, "must be a non-empty array of numbers")
            out = []
            for i, v in enumerate(values):
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise SpecValidationError(f"{key}[{i}]", "must be a number")
                v = float(v)
                if positive and not v > 0.0:
                    raise SpecValidationError(f"{key}[{i}]", f"must be > 0, got {v}")
                if lo is not None and not (lo <= v <= hi):
                    raise SpecValidationError(f"{key}[{i}]", f"must lie in [{lo}, {hi}], got {v}")
                out.append(v)
            if sorted(out) != out:
                raise SpecValidationError(key, "must be sorted ascending")
            return tuple(out)

        r_grid = grid("r", lo=0.0, hi=1.0)
        omega0_grid = grid("omega0", positive=True)

        fams = data.get("families")
        if not isinstance(fams, list) or not fams:
            raise SpecValidationError("families", "must be a non-empty array")
        by_value = {f.value: f for f in MatrixFamily}
        families = []
        for i, name in enumerate(fams):
            if name not in by_value:
                raise SpecValidationError(
                    f"families[{i}]", f"unknown family {name!r}; choose from {sorted(by_value)}"
                )
            families.append(by_value[name])

        seed = data.get("seed")
        if not isinstance(seed, int) or isinstance(seed, bool) or not (0 <= seed < 2 ** 64):
            raise SpecValidationError("seed", "must be an unsigned 64-bit integer")

        samples = data.get("samples_per_point")
        if not isinstance(samples, int) or isinstance(samples, bool) or samples < 1:
            raise SpecValidationError("samples_per_point", "must be a positive integer")

        method_name = data.get("method", Method.DISCRETE_GRADIENT.value)
        methods = {m.value: m for m in Method}
        if method_name not in methods:
            raise SpecValidationError("method", f"unknown method {method_name!r}")

        dt = data.get("dt", 0.05)
        if not isinstance(dt, (int, float)) or isinstance(dt, bool) or not dt > 0.0:
            raise SpecValidationError("dt", "must be a positive number")

        n_steps = data.get("n_steps", 200)
        if not isinstance(n_steps, int) or isinstance(n_steps, bool) or n_steps < 1:
            raise SpecValidationError("n_steps", "must be a positive integer")

        known = {"r", "omega0", "families", "seed", "samples_per_point", "method", "dt", "n_steps"}
        for key in data:
            if key not in known:
                raise SpecValidationError(key, "unknown field")

        return SweepSpec(
            r_grid=r_grid,
            omega0_grid=omega0_grid,
            families=tuple(families),
            seed=seed,
            samples_per_point=samples,
            method=methods[method_name],
            dt=float(dt),
            n_steps=n_steps,
        )

    def to_dict(self) -> dict:
        return {
            "r": list(self.r_grid),
            "omega0": list(self.omega0_grid),
            "families": [f.value for f in self.families],
            "seed": self.seed,
            "samples_per_point": self.samples_per_point,
            "method": self.method.value,
            "dt": self.dt,
            "n_steps": self.n_steps,
        }


@dataclass(frozen=True)
class TrajectorySummary:
    """Decay verdict for one simulated initial state."""

    omega0: float
    r: float
    method: str
    dt: float
    state_index: int
    x0: tuple
    max_v_increase: float
    final_norm: float
    passed: bool
    error: str | None = None


@dataclass
class SweepResult:
    reports: list = field(default_factory=list)
    summaries: list = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(s.passed for s in self.summaries)


def decay_tolerance(method: Method) -> float:
    return _DECAY_TOLERANCE[method]


def detect_threshold(family: MatrixFamily, r_grid) -> float | None:
    """Bisect between the first adjacent grid points whose definiteness
    verdicts differ; None when the whole grid agrees."""

    def is_definite(r):
        if family is MatrixFamily.QS_WORST_CASE and r == 0.0:
            return None
        return certify(family, model.make_params(1.0, r)).verdict is Verdict.NEGATIVE_DEFINITE

    flags = [is_definite(r) for r in r_grid]
    for i in range(len(r_grid) - 1):
        a, b = flags[i], flags[i + 1]
        if a is None or b is None or a == b:
            continue
        return definiteness_threshold(family, r_grid[i], r_grid[i + 1], tol=1e-8)
    return None


def run_definiteness_sweep(spec: SweepSpec) -> SweepResult:
    """Certify every (family, omega0, r) grid point and locate verdict
    boundaries along r."""
    result = SweepResult()
    for family in spec.families:
        for omega0 in spec.omega0_grid:
            for r in spec.r_grid:
                try:
                    result.reports.append(certify(family, model.make_params(omega0, r)))
                except ValueError as err:
                    raise ValueError(
                        f"certification failed at (family={family.value}, "
                        f"omega0={omega0}, r={r}): {err}"
                    ) from err
        result.thresholds[family.value] = detect_threshold(family, spec.r_grid)
    return result


def run_decay_study(
    p: model.FilterParams,
    seed: int,
    n_states: int,
    cfg: StepConfig,
    t_end: float,
    tol: float | None = None,
) -> SweepResult:
    """Simulate seeded random initial states and record the worst per-step
    energy increase and the final state norm for each.

    A state passes when its largest per-step increase stays at or below the
    method's tolerance.  Integrator failures are recorded in the summary,
    not raised.
    """
    n_states = int(n_states)
    if n_states < 1:
        raise ValueError(f"n_states must be >= 1, got {n_states}")
    if tol is None:
        tol = decay_tolerance(cfg.method)
    n_steps = max(1, int(round(t_end / cfg.dt)))
    result = SweepResult()
    for i in range(n_states):
        stream = substream(seed, i)
        x0 = tuple(stream.uniform(-_STATE_RANGE, _STATE_RANGE) for _ in range(4))
        try:
            traj = simulate(np.array(x0), p, cfg, n_steps)
        except NewtonError as err:
            result.summaries.append(TrajectorySummary(
                omega0=p.omega0, r=p.r, method=cfg.method.value, dt=cfg.dt,
                state_index=i, x0=x0, max_v_increase=math.nan,
                final_norm=math.nan, passed=False, error=str(err),
            ))
            continue
        increases = np.diff(traj.V)
        max_inc = float(increases.max()) if increases.size else 0.0
        result.summaries.append(TrajectorySummary(
            omega0=p.omega0, r=p.r, method=cfg.method.value, dt=cfg.dt,
            state_index=i, x0=x0, max_v_increase=max_inc,
            final_norm=float(np.linalg.norm(traj.states[-1])), passed=max_inc <= tol,
        ))
    return result


def run_gradcheck(seed: int, n_points: int) -> float:
    """Largest relative mismatch between the analytic energy gradient and
    central finite differences over seeded random (w, r) points.

    Point 0 is the origin anchor (exactly zero error by evenness); the rest
    draw r in (0, 1] and |w_i| <= 10.
    """
    n_points = int(n_points)
    if n_points < 1:
        raise ValueError(f"n_points must be >= 1, got {n_points}")
    worst = 0.0
    for i in range(n_points):
        if i == 0:
            p = model.make_params(1.0, 0.5)
            w = np.zeros(4)
        else:
            stream = substream(seed, i)
            p = model.make_params(1.0, 1.0 - stream.uniform())
            w = np.array([stream.uniform(-10.0, 10.0) for _ in range(4)])
        grad = lyapunov.grad_V(w, p)
        fd = np.empty(4)
        for k in range(4):
            h = 1e-6 * max(1.0, abs(w[k]))
            hi = w.copy()
            lo = w.copy()
            hi[k] += h
            lo[k] -= h
            fd[k] = (lyapunov.V_nonlinear(hi, p) - lyapunov.V_nonlinear(lo, p)) / (2.0 * h)
        err = float(np.abs(fd - grad).max() / max(1.0, np.abs(grad).max()))
        worst = max(worst, err)
    return worst


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Full sweep backing the CLI: certification plus per-grid-point decay
    studies with spec.samples_per_point seeded states each."""
    result = run_definiteness_sweep(spec)
    cfg = StepConfig(dt=spec.dt, method=spec.method)
    t_end = spec.dt * spec.n_steps
    point_index = 0
    for omega0 in spec.omega0_grid:
        for r in spec.r_grid:
            p = model.make_params(omega0, r)
            point_seed = substream(spec.seed, point_index).next_u64()
            decay = run_decay_study(p, point_seed, spec.samples_per_point, cfg, t_end)
            result.summaries.extend(decay.summaries)
            point_index += 1
    return result
