"""Heralded noiseless linear amplification of a single-photon W state.

Mode layout for party ``k`` (1-based):

* ``a{k}`` - the party's share of the W state (signal mode),
* ``b{k}`` - transmitted port of the party's ancilla beam splitter,
* ``c{k}`` - reflected port, which is kept and carries the amplified state.

The balanced beam splitter of party ``k`` mixes ``b{k}`` (input 1) with
``a{k}`` (input 2); its outputs are renamed ``d{k}+`` and ``d{k}-`` and
measured with number-resolving detectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .analytics import Limit, analytic_eta_prime
from .fock import MixedState, PureState, fidelity, make_vacuum, create_photon, tensor
from .optics import (
    DetectionPattern,
    TwoModeElement,
    accepted_patterns,
    apply_phase,
    apply_two_mode,
    loss_channel,
    make_bs50,
    make_vbs,
    outcome_distribution,
    outcome_probabilities,
    project_pattern,
)


class ProtocolError(ValueError):
    """Invalid protocol configuration or sampling request."""


def signal_modes(n: int) -> tuple[str, ...]:
    return tuple(f"a{k}" for k in range(1, n + 1))


def kept_modes(n: int) -> tuple[str, ...]:
    return tuple(f"c{k}" for k in range(1, n + 1))


def detector_pairs(n: int) -> list[tuple[str, str]]:
    return [(f"d{k}+", f"d{k}-") for k in range(1, n + 1)]


@dataclass(frozen=True)
class ProtocolConfig:
    n_modes: int
    eta: float
    t: float

    def __post_init__(self):
        if int(self.n_modes) != self.n_modes or self.n_modes < 2:
            raise ProtocolError(f"need at least 2 parties, got n={self.n_modes}")
        for name in ("eta", "t"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ProtocolError(f"{name} must lie in [0, 1], got {value}")
        object.__setattr__(self, "n_modes", int(self.n_modes))
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "t", float(self.t))


def build_w_state(n: int, modes: tuple[str, ...] | None = None) -> PureState:
    """Equal-weight superposition of one photon in each of ``n`` modes."""
    if int(n) != n or n < 2:
        raise ProtocolError(f"a W state needs n >= 2 modes, got {n}")
    modes = signal_modes(n) if modes is None else tuple(modes)
    if len(modes) != n:
        raise ProtocolError(f"expected {n} mode labels, got {len(modes)}")
    return PureState(modes, np.eye(n, dtype=np.int64), np.full(n, 1.0 / math.sqrt(n)))


def phase_correct(state: PureState, pattern: DetectionPattern) -> PureState:
    """Feed-forward: a pi phase on kept mode k for every minus-port click at pair k."""
    for k in pattern.minus_pairs:
        state = apply_phase(state, state.modes[k], math.pi)
    return state


def _ancillas(n: int) -> PureState:
    state = None
    for k in range(1, n + 1):
        local = create_photon(make_vacuum((f"b{k}", f"c{k}")), f"b{k}")
        state = local if state is None else tensor(state, local)
    return state


def evolve(branch: PureState, t: float, bs50: TwoModeElement | None = None) -> PureState:
    """Attach ancillas, run every VBS and balanced BS, rename the detector ports."""
    n = branch.n_modes
    state = tensor(branch, _ancillas(n))
    vbs = make_vbs(t)
    bs = make_bs50() if bs50 is None else bs50
    for k in range(1, n + 1):
        state = apply_two_mode(state, vbs.on(f"b{k}", f"c{k}"))
    for k in range(1, n + 1):
        state = apply_two_mode(state, bs.on(f"b{k}", f"a{k}"))
    rename = {}
    for k in range(1, n + 1):
        rename[f"b{k}"] = f"d{k}+"
        rename[f"a{k}"] = f"d{k}-"
    return state.relabel(rename)


@dataclass
class PatternResult:
    pattern: DetectionPattern
    prob: float
    signal_prob: float
    vacuum_prob: float
    heralded: PureState | None
    raw: PureState | None
    fidelity: float
    raw_fidelity: float
    vacuum_heralded: PureState | None

    @property
    def id(self) -> int:
        return self.pattern.id


@dataclass
class ProtocolOutcome:
    config: ProtocolConfig
    eta_prime: float
    success_prob: float
    gain: float
    per_pattern: list[PatternResult]
    output_state: MixedState
    total_prob: float
    gain_is_limit: bool = False

    def to_json(self) -> dict:
        return {
            "n": self.config.n_modes,
            "eta": self.config.eta,
            "t": self.config.t,
            "eta_prime": float(self.eta_prime),
            "p_success": self.success_prob,
            "gain": float(self.gain),
            "patterns": [
                {"id": r.id, "prob": r.prob, "fidelity": None if math.isnan(r.fidelity) else r.fidelity}
                for r in self.per_pattern
            ],
        }


def run_nla(cfg: ProtocolConfig, *, bs50: TwoModeElement | None = None) -> ProtocolOutcome:
    """Exact Fock-space run of the amplifier.

    ``bs50`` replaces the balanced beam splitter; it exists so verification
    harnesses can inject a faulty element.
    """
    n, eta, t = cfg.n_modes, cfg.eta, cfg.t
    w = build_w_state(n)
    target = build_w_state(n, kept_modes(n))
    kept_vacuum = make_vacuum(kept_modes(n))

    pairs = detector_pairs(n)
    evolved = {}
    weights = {"signal": 0.0, "vacuum": 0.0}
    for p, branch in loss_channel(w, eta).branches:
        kind = "vacuum" if branch.photon_numbers().max() == 0 else "signal"
        evolved[kind] = evolve(branch, t, bs50)
        weights[kind] = p

    total = sum(weights[k] * float(outcome_probabilities(s, pairs)[1].sum()) for k, s in evolved.items())

    def project(kind, pattern):
        if kind not in evolved:
            return 0.0, None
        return project_pattern(evolved[kind], pairs, pattern)

    per_pattern = []
    signal_accepted = 0.0
    success = 0.0
    for pattern in accepted_patterns(n):
        sig_p, sig_rem = project("signal", pattern)
        vac_p, vac_rem = project("vacuum", pattern)
        heralded = raw = None
        fid = raw_fid = math.nan
        if sig_rem is not None and sig_p > 0.0:
            raw = sig_rem.normalize()
            heralded = phase_correct(raw, pattern)
            fid = fidelity(heralded, target)
            raw_fid = fidelity(raw, target)
        vac_state = vac_rem.normalize() if vac_rem is not None and vac_p > 0.0 else None
        weighted = weights["signal"] * sig_p + weights["vacuum"] * vac_p
        signal_accepted += weights["signal"] * sig_p
        success += weighted
        per_pattern.append(
            PatternResult(pattern, weighted, sig_p, vac_p, heralded, raw, fid, raw_fid, vac_state)
        )

    gain_is_limit = False
    if success > 0.0:
        eta_prime = signal_accepted / success
    else:
        eta_prime = analytic_eta_prime(eta, t, n)
        gain_is_limit = True
    if eta > 0.0:
        gain = eta_prime / eta
    else:
        gain = Limit((1.0 - t) / t)
        gain_is_limit = True
    if gain_is_limit:
        gain = Limit(gain)

    branches = [(eta_prime, target), (1.0 - eta_prime, kept_vacuum)]
    output = MixedState(tuple((p, s) for p, s in branches if p > 0.0))
    return ProtocolOutcome(cfg, eta_prime, success, gain, per_pattern, output, total, gain_is_limit)


@dataclass
class SampleOutcome:
    config: ProtocolConfig
    shots: int
    seed: int
    signal_shots: int
    accepted: int
    accepted_signal: int
    pattern_counts: dict[int, int] = field(default_factory=dict)

    @property
    def p_hat(self) -> float:
        return self.accepted / self.shots

    @property
    def p_se(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.shots)

    @property
    def eta_prime_hat(self) -> float:
        return self.accepted_signal / self.accepted if self.accepted else math.nan

    @property
    def eta_prime_se(self) -> float:
        if not self.accepted:
            return math.nan
        e = self.eta_prime_hat
        return math.sqrt(e * (1.0 - e) / self.accepted)

    @property
    def gain_hat(self) -> float:
        return self.eta_prime_hat / self.config.eta if self.config.eta > 0 else math.nan

    @property
    def gain_se(self) -> float:
        return self.eta_prime_se / self.config.eta if self.config.eta > 0 else math.nan


SHOT_BLOCK = 1 << 16


def _branch_distribution(state: PureState, n: int):
    dist = outcome_distribution(state, detector_pairs(n), with_remainder=False)
    probs = np.array([p for _, p, _ in dist])
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    accepted = np.array([pat.accepted for pat, _, _ in dist])
    ids = np.array([pat.id if pat.accepted else -1 for pat, _, _ in dist])
    return cdf, accepted, ids


def sample_run(cfg: ProtocolConfig, shots: int, seed: int) -> SampleOutcome:
    """Monte Carlo run: per shot draw the loss branch, then one full detection record.

    Shots are drawn in fixed blocks of ``SHOT_BLOCK``, each from its own child of
    ``SeedSequence(seed)``, so results depend only on ``seed`` and ``shots``.
    """
    if int(shots) != shots or shots < 1:
        raise ProtocolError(f"shots must be a positive integer, got {shots}")
    shots = int(shots)
    n = cfg.n_modes
    cdf_s, acc_s, ids_s = _branch_distribution(evolve(build_w_state(n), cfg.t), n)
    cdf_v, acc_v, ids_v = _branch_distribution(evolve(make_vacuum(signal_modes(n)), cfg.t), n)

    hist_s = np.zeros(cdf_s.shape[0], dtype=np.int64)
    hist_v = np.zeros(cdf_v.shape[0], dtype=np.int64)
    n_blocks = -(-shots // SHOT_BLOCK)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    for b, child in enumerate(children):
        size = min(SHOT_BLOCK, shots - b * SHOT_BLOCK)
        u = np.random.default_rng(child).random((2, size))
        hs, hv = _kernels.tally(u[0], u[1], cfg.eta, cdf_s, cdf_v)
        hist_s += hs
        hist_v += hv

    counts: dict[int, int] = {}
    for ids, hist in ((ids_s, hist_s), (ids_v, hist_v)):
        for i, c in zip(ids, hist):
            if i >= 0 and c:
                counts[int(i)] = counts.get(int(i), 0) + int(c)
    accepted_signal = int(hist_s[acc_s].sum())
    accepted = accepted_signal + int(hist_v[acc_v].sum())
    return SampleOutcome(cfg, shots, seed, int(hist_s.sum()), accepted, accepted_signal, dict(sorted(counts.items())))
