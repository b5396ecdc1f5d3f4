"""Grid check of the brute-force simulator against the closed forms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytics import analytic_eta_prime, analytic_gain, analytic_success_prob, gain_threshold_check
from .fock import fidelity, make_vacuum
from .optics import TwoModeElement
from .protocol import ProtocolConfig, kept_modes, run_nla

TOLERANCE = 1e-12
DEFAULT_ETAS = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_TS = tuple(round(0.05 + 0.1 * k, 12) for k in range(10))

FAULTS = ("bs-sign",)


def faulty_bs50(fault: str) -> TwoModeElement:
    """Balanced beam splitter with a deliberate defect, for mutation checks."""
    if fault == "bs-sign":
        h = 1.0 / math.sqrt(2.0)
        return TwoModeElement(np.array([[h, h], [h, h]]), allow_nonunitary=True)
    raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS}")


@dataclass
class Check:
    name: str
    worst: float = 0.0
    where: tuple | None = None

    def update(self, value: float, where: tuple) -> None:
        if math.isnan(value):
            value = math.inf
        if self.where is None or value > self.worst:
            self.worst = value
            self.where = where

    @property
    def ok(self) -> bool:
        return self.worst < TOLERANCE


@dataclass
class VerifyReport:
    checks: dict[str, Check] = field(default_factory=dict)
    threshold_violations: list[tuple] = field(default_factory=list)
    points: int = 0

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values()) and not self.threshold_violations

    def lines(self) -> list[str]:
        out = [f"grid points: {self.points}"]
        for c in self.checks.values():
            status = "ok" if c.ok else "FAIL"
            out.append(f"max {c.name:<28s} {c.worst:.3e}  [{status}]  worst at (n, eta, t) = {c.where}")
        status = "ok" if not self.threshold_violations else "FAIL"
        out.append(f"threshold (G > 1 <=> t < 1/2) violations: {len(self.threshold_violations)}  [{status}]")
        for where in self.threshold_violations[:10]:
            out.append(f"  violation at (n, eta, t) = {where}")
        if self.ok:
            out.append(f"max |sim-formula| < {TOLERANCE:g}")
        return out


def _threshold_broken(g_sim: float, eta: float, t: float) -> bool:
    below = t < 0.5
    if gain_threshold_check(eta, t) != below or (analytic_gain(eta, t) > 1.0) != below:
        return True
    # the simulated gain sits within rounding of 1 near t = 1/2, so only clear cases count
    return abs(g_sim - 1.0) > TOLERANCE and (g_sim > 1.0) != below


def verify_grid(
    ns=range(2, 7),
    etas=DEFAULT_ETAS,
    ts=DEFAULT_TS,
    fault: str | None = None,
) -> VerifyReport:
    bs50 = faulty_bs50(fault) if fault else None
    ns = [int(n) for n in ns]
    etas = [float(e) for e in etas]
    ts = [float(t) for t in ts]
    names = [
        "|eta'_sim - eta'_formula|",
        "|P_sim - P_formula|",
        "|G_sim - G_formula|",
        "|G(n) - G(n_ref)|",
        "|p_pattern - P/2^n|",
        "|1 - F(heralded, W)|",
        "|1 - F(vacuum branch, vac)|",
        "|sum of all outcomes - 1|",
    ]
    report = VerifyReport({name: Check(name) for name in names})
    c = report.checks
    n_ref = 3 if 3 in ns else ns[0]
    for eta in etas:
        for t in ts:
            gains = {}
            for n in ns:
                where = (n, eta, t)
                out = run_nla(ProtocolConfig(n, eta, t), bs50=bs50)
                report.points += 1
                c[names[0]].update(abs(out.eta_prime - analytic_eta_prime(eta, t, n)), where)
                c[names[1]].update(abs(out.success_prob - analytic_success_prob(eta, t, n)), where)
                c[names[2]].update(abs(out.gain - analytic_gain(eta, t)), where)
                gains[n] = out.gain
                share = out.success_prob / 2**n
                vac = make_vacuum(kept_modes(n))
                for r in out.per_pattern:
                    c[names[4]].update(abs(r.prob - share), where)
                    if eta > 0.0:
                        c[names[5]].update(abs(1.0 - r.fidelity), where)
                    if eta < 1.0:
                        f_vac = fidelity(r.vacuum_heralded, vac) if r.vacuum_heralded is not None else math.nan
                        c[names[6]].update(abs(1.0 - f_vac), where)
                c[names[7]].update(abs(out.total_prob - 1.0), where)
                if 0.0 < eta < 1.0 and _threshold_broken(out.gain, eta, t):
                    report.threshold_violations.append(where)
            for n in ns:
                c[names[3]].update(abs(gains[n] - gains[n_ref]), (n, eta, t))
    return report
