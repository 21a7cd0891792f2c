"""Command-line front end: eigenvalues, certification, simulation, sweeps,
and gradient checks, emitted as CSV or JSON.

Exit codes: 0 success / all checks passed, 1 a requested check failed,
2 usage or specification error, 3 numerical failure.  Floats are rendered
with the shortest round-trip decimal representation.
"""

import argparse
import json
import math
import sys

from . import experiments, integrators, lyapunov, model, spectral
from .experiments import SpecValidationError, SweepSpec
from .integrators import Method, NewtonError, StepConfig
from .lyapunov import MatrixFamily
from .spectral import RootFindingError

SCHEMA_VERSION = 1

_FAMILY_BOUNDARY = {
    MatrixFamily.AS: 5.0 / 12.0,
    MatrixFamily.BS: 1.0,
    MatrixFamily.QS_WORST_CASE: 1.0,
}


def _fmt(x: float) -> str:
    return repr(float(x))


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_grid(raw: str) -> list[float]:
    parts = raw.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be lo:hi:step, got {raw!r}")
    lo, hi, step = (float(t) for t in parts)
    if not step > 0.0:
        raise ValueError(f"grid step must be positive, got {step}")
    if hi < lo:
        raise ValueError(f"grid must be ascending, got lo={lo} > hi={hi}")
    count = int(math.floor((hi - lo) / step + 1e-9))
    values = [lo + k * step for k in range(count + 1)]
    if values[-1] > hi:
        values[-1] = hi
    return values


def _parse_x0(raw: str):
    parts = raw.split(",")
    if len(parts) != 4:
        raise ValueError(f"x0 must be four comma-separated reals, got {raw!r}")
    return [float(t) for t in parts]


def _parse_families(raw: str) -> list[MatrixFamily]:
    by_value = {f.value: f for f in MatrixFamily}
    out = []
    for name in raw.split(","):
        name = name.strip()
        if name not in by_value:
            raise ValueError(
                f"unknown family {name!r}; choose from {sorted(by_value)}"
            )
        out.append(by_value[name])
    return out


def _cmd_eig(args) -> int:
    p = model.make_params(args.omega0, args.r)
    closed = spectral.eigvals_closed_form(p)
    numeric = spectral.eigvals_numeric(model.linearized_matrix(p))
    if args.format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "omega0": p.omega0,
            "r": p.r,
            "closed": [{"re": z.real, "im": z.imag} for z in closed.eigenvalues],
            "numeric": [{"re": z.real, "im": z.imag} for z in numeric.eigenvalues],
            "max_real_part": closed.max_real_part,
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    lines = ["source,index,re,im"]
    for label, spec in (("closed", closed), ("numeric", numeric)):
        for k, z in enumerate(spec.eigenvalues):
            lines.append(f"{label},{k},{_fmt(z.real)},{_fmt(z.imag)}")
    lines.append(f"max_real_part,0,{_fmt(closed.max_real_part)},{_fmt(0.0)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _expected_verdict(family: MatrixFamily, r: float) -> lyapunov.Verdict:
    boundary = _FAMILY_BOUNDARY[family]
    if abs(r - boundary) <= 1e-9:
        return lyapunov.Verdict.NEGATIVE_SEMIDEFINITE
    if r < boundary:
        return lyapunov.Verdict.NEGATIVE_DEFINITE
    return lyapunov.Verdict.INDEFINITE


def _cmd_certify(args) -> int:
    families = _parse_families(args.families)
    grid = _parse_grid(args.r_grid)
    reports = []
    for family in families:
        for r in grid:
            reports.append(lyapunov.certify(family, model.make_params(args.omega0, r), tol=args.tol))
    thresholds = {}
    for family in families:
        thresholds[family.value] = experiments.detect_threshold(family, grid)

    mismatches = 0
    if args.expect:
        for rep in reports:
            if rep.verdict is not _expected_verdict(rep.family, rep.r):
                mismatches += 1

    if args.format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "omega0": args.omega0,
            "tol": args.tol,
            "reports": [
                {
                    "family": rep.family.value,
                    "r": rep.r,
                    "min_eig": rep.min_eig,
                    "max_eig": rep.max_eig,
                    "verdict": rep.verdict.value,
                }
                for rep in reports
            ],
            "thresholds": thresholds,
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 1 if mismatches else 0
    lines = ["family,r,min_eig,max_eig,verdict"]
    for rep in reports:
        lines.append(
            f"{rep.family.value},{_fmt(rep.r)},{_fmt(rep.min_eig)},"
            f"{_fmt(rep.max_eig)},{rep.verdict.value}"
        )
    for family in families:
        r_star = thresholds[family.value]
        if r_star is None:
            continue
        rep = lyapunov.certify(family, model.make_params(args.omega0, r_star), tol=args.tol)
        lines.append(
            f"{family.value},{_fmt(r_star)},{_fmt(rep.min_eig)},"
            f"{_fmt(rep.max_eig)},Threshold"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 1 if mismatches else 0


def _cmd_simulate(args) -> int:
    p = model.make_params(args.omega0, args.r)
    x0 = _parse_x0(args.x0)
    method = Method(args.method)
    cfg = StepConfig(dt=args.dt, method=method)
    traj = integrators.simulate(x0, p, cfg, args.steps)
    with_dv = method is Method.DISCRETE_GRADIENT
    if args.format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "omega0": p.omega0,
            "r": p.r,
            "method": method.value,
            "dt": cfg.dt,
            "t": list(traj.times),
            "x": [list(row) for row in traj.states],
            "v": list(traj.V),
            "vdot": list(traj.Vdot),
        }
        if with_dv:
            payload["dv"] = [0.0] + [
                traj.V[k] - traj.V[k - 1] for k in range(1, len(traj.V))
            ]
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    header = "t,x1,x2,x3,x4,v,vdot" + (",dv" if with_dv else "")
    lines = [header]
    for k in range(len(traj.times)):
        row = [
            _fmt(traj.times[k]),
            _fmt(traj.states[k][0]),
            _fmt(traj.states[k][1]),
            _fmt(traj.states[k][2]),
            _fmt(traj.states[k][3]),
            _fmt(traj.V[k]),
            _fmt(traj.Vdot[k]),
        ]
        if with_dv:
            row.append(_fmt(0.0 if k == 0 else traj.V[k] - traj.V[k - 1]))
        lines.append(",".join(row))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _summary_dict(s: experiments.TrajectorySummary) -> dict:
    return {
        "omega0": s.omega0,
        "r": s.r,
        "method": s.method,
        "dt": s.dt,
        "state_index": s.state_index,
        "x0": list(s.x0),
        "max_v_increase": None if math.isnan(s.max_v_increase) else s.max_v_increase,
        "final_norm": None if math.isnan(s.final_norm) else s.final_norm,
        "passed": s.passed,
        "error": s.error,
    }


def _cmd_sweep(args) -> int:
    try:
        with open(args.spec) as fh:
            data = json.load(fh)
    except OSError as err:
        print(f"error: cannot read spec: {err}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as err:
        print(f"error: spec is not valid JSON: {err}", file=sys.stderr)
        return 2
    spec = SweepSpec.from_dict(data)
    result = experiments.run_sweep(spec)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "spec": spec.to_dict(),
        "reports": [
            {
                "family": rep.family.value,
                "omega0": rep.omega0,
                "r": rep.r,
                "min_eig": rep.min_eig,
                "max_eig": rep.max_eig,
                "verdict": rep.verdict.value,
                "tol": rep.tol,
            }
            for rep in result.reports
        ],
        "thresholds": result.thresholds,
        "decay": [_summary_dict(s) for s in result.summaries],
        "all_pass": result.all_pass,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0 if result.all_pass else 1


def _cmd_gradcheck(args) -> int:
    worst = experiments.run_gradcheck(args.seed, args.points)
    if args.format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "seed": args.seed,
            "points": args.points,
            "max_relative_error": worst,
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit(f"max_relative_error\n{_fmt(worst)}\n", args.out)
    return 0 if worst < 1e-5 else 1


def _add_format(parser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default=None, help="write output to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moogvcf",
        description="Ladder-filter stability toolkit: eigenvalues, Lyapunov "
        "certification, and dissipation-preserving simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    eig = sub.add_parser("eig", help="closed-form and numeric eigenvalues of the linearization")
    eig.add_argument("--omega0", type=float, required=True)
    eig.add_argument("--r", type=float, required=True)
    _add_format(eig)
    eig.set_defaults(func=_cmd_eig)

    cert = sub.add_parser("certify", help="definiteness verdicts over a resonance grid")
    cert.add_argument("--families", required=True,
                      help="comma-separated subset of As,Bs,QsWorstCase")
    cert.add_argument("--r-grid", required=True, help="grid as lo:hi:step")
    cert.add_argument("--omega0", type=float, default=1.0)
    cert.add_argument("--tol", type=float, default=1e-10)
    cert.add_argument("--expect", action="store_true",
                      help="exit 1 unless every verdict matches its expected region")
    _add_format(cert)
    cert.set_defaults(func=_cmd_certify)

    sim = sub.add_parser("simulate", help="integrate a trajectory and record V along it")
    sim.add_argument("--omega0", type=float, required=True)
    sim.add_argument("--r", type=float, required=True)
    sim.add_argument("--x0", required=True, help="four comma-separated reals")
    sim.add_argument("--dt", type=float, required=True)
    sim.add_argument("--steps", type=int, required=True)
    sim.add_argument("--method", choices=[m.value for m in Method], default="dg")
    _add_format(sim)
    sim.set_defaults(func=_cmd_simulate)

    sweep = sub.add_parser("sweep", help="run a sweep specification file")
    sweep.add_argument("--spec", required=True, help="path to a JSON SweepSpec")
    sweep.add_argument("--out", default=None)
    sweep.set_defaults(func=_cmd_sweep)

    grad = sub.add_parser("gradcheck", help="finite-difference check of the energy gradient")
    grad.add_argument("--seed", type=int, default=42)
    grad.add_argument("--points", type=int, default=500)
    _add_format(grad)
    grad.set_defaults(func=_cmd_gradcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (SpecValidationError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (NewtonError, RootFindingError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
