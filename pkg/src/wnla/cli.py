"""Command-line front end.

Verbs::

    wnla run --n 3 --eta 0.2 --t 0.3 [--format json]
    wnla verify [--n-max 6]
    wnla sweep --quantity success_prob --n 3 4 --eta 0.2 --out p.csv
    wnla sample --n 3 --eta 0.5 --t 0.5 --shots 1000000 --seed 7
    wnla preset fig4 --out fig4.csv
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .analytics import analytic_eta_prime, analytic_gain, analytic_success_prob, curve_point
from .protocol import ProtocolConfig, ProtocolError, run_nla, sample_run
from .verify import DEFAULT_ETAS, DEFAULT_TS, FAULTS, verify_grid

CSV_HEADER = "t,value,quantity,n,eta"
QUANTITIES = ("gain", "success_prob")

PRESETS = {
    # fig3 eta set is a reconstruction; G does not depend on n, so only eta varies
    "fig3": ("gain", (3,), (0.2, 0.4, 0.6, 0.8)),
    "fig4": ("success_prob", (3, 4, 5, 6), (0.2,)),
    "fig5": ("success_prob", (3, 4, 5, 6), (0.8,)),
    "fig6": ("success_prob", (3,), (0.2, 0.4, 0.6, 0.8)),
}


class UsageError(Exception):
    """Bad parameters; reported on stderr with exit code 2."""


@dataclass(frozen=True)
class SweepSpec:
    quantity: str
    ns: tuple[int, ...]
    etas: tuple[float, ...]
    start: float = 0.01
    stop: float = 0.99
    steps: int = 99
    variable: str = "t"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise UsageError(f"quantity must be one of {QUANTITIES}")
        if not 0.0 <= self.start < self.stop <= 1.0:
            raise UsageError(f"need 0 <= start < stop <= 1, got {self.start}, {self.stop}")
        if self.steps < 2:
            raise UsageError("steps must be >= 2")
        if not self.ns or any(n < 2 for n in self.ns):
            raise UsageError("every n must be >= 2")
        if not self.etas or any(not 0.0 <= e <= 1.0 for e in self.etas):
            raise UsageError("every eta must lie in [0, 1]")

    def grid(self) -> list[float]:
        width = (self.stop - self.start) / (self.steps - 1)
        # rounding pins grid values such as 0.5 exactly
        return [round(self.start + k * width, 12) for k in range(self.steps)]


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _simulated(quantity: str, n: int, eta: float, t: float) -> float:
    out = run_nla(ProtocolConfig(n, eta, t))
    return out.gain if quantity == "gain" else out.success_prob


def sweep_rows(spec: SweepSpec, include_limits: bool = False, cross_check: bool = False) -> list[str]:
    rows = [CSV_HEADER]
    grid = spec.grid()
    for n in spec.ns:
        for eta in spec.etas:
            ts = [(t, False) for t in grid if 0.0 < t < 1.0]
            if include_limits:
                ts = [(0.0, True)] + ts + [(1.0, True)]
            for t, limit in ts:
                point = curve_point(spec.quantity, t, n, eta)
                name = spec.quantity + (":limit" if limit else "")
                rows.append(f"{_fmt(t)},{_fmt(point.value)},{name},{n},{_fmt(eta)}")
                if cross_check and not limit and (spec.quantity != "gain" or eta > 0.0):
                    sim = _simulated(spec.quantity, n, eta, t)
                    rows.append(f"{_fmt(t)},{_fmt(sim)},{spec.quantity}:sim,{n},{_fmt(eta)}")
    return rows


def write_csv(rows: list[str], out: str | None) -> None:
    text = "\n".join(rows) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


def _config(args) -> ProtocolConfig:
    try:
        return ProtocolConfig(args.n, args.eta, args.t)
    except ProtocolError as exc:
        raise UsageError(str(exc)) from exc


def render_run(outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(outcome.to_json(), indent=2)
    cfg = outcome.config
    buf = io.StringIO()
    buf.write(f"n={cfg.n_modes} eta={_fmt(cfg.eta)} t={_fmt(cfg.t)}\n")
    limit = "  (limit value)" if outcome.gain_is_limit else ""
    buf.write(f"eta_prime = {_fmt(outcome.eta_prime)}\n")
    buf.write(f"p_success = {_fmt(outcome.success_prob)}\n")
    buf.write(f"gain      = {_fmt(outcome.gain)}{limit}\n")
    buf.write(f"{'id':>4}  {'clicks':<{max(6, cfg.n_modes)}}  {'prob':>16}  {'fidelity':>16}\n")
    for r in outcome.per_pattern:
        fid = "n/a" if math.isnan(r.fidelity) else _fmt(r.fidelity)
        buf.write(f"{r.id:>4}  {r.pattern.label():<{max(6, cfg.n_modes)}}  {_fmt(r.prob):>16}  {fid:>16}\n")
    return buf.getvalue().rstrip("\n")


def cmd_run(args) -> int:
    outcome = run_nla(_config(args))
    print(render_run(outcome, args.format))
    return 0


def cmd_verify(args) -> int:
    if args.n_max < 2:
        raise UsageError("--n-max must be >= 2")
    etas = DEFAULT_ETAS if args.eta_points is None else tuple(np.linspace(0.1, 0.9, args.eta_points).round(12))
    ts = DEFAULT_TS if args.t_points is None else tuple(np.linspace(0.05, 0.95, args.t_points).round(12))
    report = verify_grid(range(2, args.n_max + 1), etas, ts, fault=args.inject_fault)
    print("\n".join(report.lines()))
    return 0 if report.ok else 1


def render_sample(s, fmt: str) -> str:
    cfg = s.config
    p_exact = analytic_success_prob(cfg.eta, cfg.t, cfg.n_modes)
    p_sigma = math.sqrt(p_exact * (1.0 - p_exact) / s.shots)
    e_exact = analytic_eta_prime(cfg.eta, cfg.t, cfg.n_modes) if cfg.t > 0 else math.nan
    g_exact = analytic_gain(cfg.eta, cfg.t) if cfg.eta > 0 else math.nan

    def z(hat, exact, se):
        return (hat - exact) / se if se and not math.isnan(se) and se > 0 else math.nan

    record = {
        "n": cfg.n_modes, "eta": cfg.eta, "t": cfg.t, "shots": s.shots, "seed": s.seed,
        "accepted": s.accepted, "accepted_signal": s.accepted_signal,
        "p_hat": s.p_hat, "p_se": s.p_se, "p_exact": p_exact, "p_z": z(s.p_hat, p_exact, p_sigma),
        "eta_prime_hat": s.eta_prime_hat, "eta_prime_se": s.eta_prime_se, "eta_prime_exact": e_exact,
        "eta_prime_z": z(s.eta_prime_hat, e_exact, s.eta_prime_se),
        "gain_hat": s.gain_hat, "gain_se": s.gain_se, "gain_exact": g_exact,
        "gain_z": z(s.gain_hat, g_exact, s.gain_se),
        "pattern_counts": {str(k): v for k, v in s.pattern_counts.items()},
    }
    if fmt == "json":
        clean = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in record.items()}
        return json.dumps(clean, indent=2)
    lines = [
        f"n={cfg.n_modes} eta={_fmt(cfg.eta)} t={_fmt(cfg.t)} shots={s.shots} seed={s.seed}",
        f"accepted {s.accepted} of {s.shots} ({s.accepted_signal} from the signal branch)",
    ]
    for key, label in (("p", "P"), ("eta_prime", "eta'"), ("gain", "G")):
        lines.append(
            f"{label + '_hat':<11s} = {_fmt(record[key + '_hat'])} +/- {_fmt(record[key + '_se'])}"
            f"   exact {_fmt(record[key + '_exact'])}   z = {record[key + '_z']:+.3f}"
        )
    return "\n".join(lines)


def cmd_sample(args) -> int:
    cfg = _config(args)
    try:
        s = sample_run(cfg, args.shots, args.seed)
    except ProtocolError as exc:
        raise UsageError(str(exc)) from exc
    print(render_sample(s, args.format))
    return 0


def cmd_sweep(args) -> int:
    spec = SweepSpec(args.quantity, tuple(args.n), tuple(args.eta), args.start, args.stop, args.steps)
    write_csv(sweep_rows(spec, args.include_limits, args.cross_check), args.out)
    return 0


def cmd_preset(args) -> int:
    quantity, ns, etas = PRESETS[args.figure]
    spec = SweepSpec(quantity, ns, etas, args.start, args.stop, args.steps)
    write_csv(sweep_rows(spec, args.include_limits, args.cross_check), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wnla", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def protocol_args(p):
        p.add_argument("--n", type=int, required=True, help="number of parties (>= 2)")
        p.add_argument("--eta", type=float, required=True, help="single-photon survival probability")
        p.add_argument("--t", type=float, required=True, help="ancilla beam-splitter transmission")
        p.add_argument("--format", choices=("text", "json"), default="text")

    def sweep_args(p):
        p.add_argument("--start", type=float, default=0.01)
        p.add_argument("--stop", type=float, default=0.99)
        p.add_argument("--steps", type=int, default=99)
        p.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
        p.add_argument("--include-limits", action="store_true", help="add flagged rows at t=0 and t=1")
        p.add_argument("--cross-check", action="store_true", help="add simulator rows next to formula rows")

    p = sub.add_parser("run", help="simulate one configuration exactly")
    protocol_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="check simulator against closed forms on a grid")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--eta-points", type=int, default=None, help="eta grid size on [0.1, 0.9]")
    p.add_argument("--t-points", type=int, default=None, help="t grid size on [0.05, 0.95]")
    p.add_argument("--inject-fault", choices=FAULTS, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="Monte Carlo estimate of P, eta' and G")
    protocol_args(p)
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("sweep", help="closed-form curves versus t as CSV")
    p.add_argument("--quantity", choices=QUANTITIES, required=True)
    p.add_argument("--n", type=int, nargs="+", default=[3])
    p.add_argument("--eta", type=float, nargs="+", required=True)
    sweep_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset", help="figure curve sets as CSV")
    p.add_argument("figure", choices=sorted(PRESETS))
    sweep_args(p)
    p.set_defaults(func=cmd_preset)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"wnla {args.command}: error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
