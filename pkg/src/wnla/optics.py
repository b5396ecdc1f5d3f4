"""Linear-optical elements acting exactly on sparse Fock states."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .fock import FockError, MixedState, ModeRef, PureState, make_vacuum

UNITARY_TOL = 1e-12
PLUS, MINUS = 0, 1


class OpticsError(FockError):
    """Invalid optical element or detection request."""


@dataclass(frozen=True, eq=False)
class TwoModeElement:
    """2x2 transform on creation operators: a†_in,i -> sum_j U[j, i] a†_out,j.

    Output port ``j`` occupies the same registry slot as input mode ``j``.
    """

    matrix: np.ndarray
    modes: tuple[ModeRef, ModeRef] = (0, 1)
    # Fault-injection escape hatch for mutation checks; never set in production paths.
    allow_nonunitary: bool = False

    def __post_init__(self):
        u = np.array(self.matrix, dtype=np.complex128)
        if u.shape != (2, 2) or not np.all(np.isfinite(u)):
            raise OpticsError("a two-mode element needs a finite 2x2 matrix")
        if not self.allow_nonunitary and not is_unitary(u):
            raise OpticsError(f"matrix is not unitary:\n{u}")
        if len(self.modes) != 2 or self.modes[0] == self.modes[1]:
            raise OpticsError(f"a two-mode element needs two distinct modes, got {self.modes}")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)
        object.__setattr__(self, "modes", tuple(self.modes))

    def on(self, first: ModeRef, second: ModeRef) -> "TwoModeElement":
        return TwoModeElement(self.matrix, (first, second), self.allow_nonunitary)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0.0, atol=tol))


def make_vbs(t: float, modes: tuple[ModeRef, ModeRef] = (0, 1)) -> TwoModeElement:
    """Variable beam splitter with transmission ``t``.

    Input 1 carries the photon, input 2 is vacuum; output 1 is the transmitted
    port and output 2 the reflected one: |1,0> -> sqrt(t)|1,0> + sqrt(1-t)|0,1>.
    """
    if not 0.0 <= t <= 1.0:
        raise OpticsError(f"transmission must lie in [0, 1], got {t}")
    a, b = np.sqrt(t), np.sqrt(1.0 - t)
    return TwoModeElement(np.array([[a, b], [b, -a]]), modes)


def make_bs50(modes: tuple[ModeRef, ModeRef] = (0, 1)) -> TwoModeElement:
    """Balanced beam splitter; output 1 is the plus port, output 2 the minus port."""
    h = 1.0 / np.sqrt(2.0)
    return TwoModeElement(np.array([[h, h], [h, -h]]), modes)


def apply_two_mode(state: PureState, elem: TwoModeElement) -> PureState:
    if not elem.allow_nonunitary and not is_unitary(elem.matrix):
        raise OpticsError("refusing to apply a non-unitary element")
    i, j = state.index(elem.modes[0]), state.index(elem.modes[1])
    occ, amp = _kernels.expand_two_mode(state.occ, state.amp, i, j, elem.matrix)
    weight = state.weight
    out = PureState(state.modes, occ, amp)
    if weight is not None:
        out = out.replace(weight=out.norm2)
    return out


def apply_vbs(state: PureState, t: float, modes: tuple[ModeRef, ModeRef]) -> PureState:
    return apply_two_mode(state, make_vbs(t, modes))


def apply_bs50(state: PureState, modes: tuple[ModeRef, ModeRef]) -> PureState:
    return apply_two_mode(state, make_bs50(modes))


def apply_phase(state: PureState, mode: ModeRef, phase: float) -> PureState:
    """Multiply every term by exp(i * phase * n_mode)."""
    k = state.index(mode)
    factor = np.exp(1j * phase * state.occ[:, k].astype(np.float64))
    return state.replace(amp=state.amp * factor, weight=state.weight)


@dataclass(frozen=True)
class LossChannel:
    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise OpticsError(f"survival probability must lie in [0, 1], got {self.eta}")

    def __call__(self, state: PureState) -> MixedState:
        return loss_channel(state, self.eta)


def loss_channel(state: PureState, eta: float) -> MixedState:
    """Shared-photon loss: keep the state with probability ``eta``, else vacuum.

    Only defined on states with at most one photon per term.
    """
    LossChannel(eta)
    if not state.normalized:
        raise OpticsError("loss channel expects a normalised state")
    if state.n_terms and state.photon_numbers().max() > 1:
        raise OpticsError("loss model is only defined on the single-photon-plus-vacuum subspace")
    branches = [(eta, state), (1.0 - eta, make_vacuum(state.modes))]
    return MixedState(tuple((p, s) for p, s in branches if p > 0.0))


@dataclass(frozen=True)
class DetectionPattern:
    """Photon counts (plus-port, minus-port) for each detector pair, in pair order."""

    counts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        counts = tuple((int(a), int(b)) for a, b in self.counts)
        if any(a < 0 or b < 0 for a, b in counts):
            raise OpticsError("photon counts cannot be negative")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_clicks(cls, clicks: Sequence[int]) -> "DetectionPattern":
        """One photon per pair; ``clicks[k]`` is PLUS (0) or MINUS (1)."""
        if any(c not in (PLUS, MINUS) for c in clicks):
            raise OpticsError(f"clicks must be 0 (plus) or 1 (minus), got {tuple(clicks)}")
        return cls(tuple((1, 0) if c == PLUS else (0, 1) for c in clicks))

    @classmethod
    def from_id(cls, pattern_id: int, n_pairs: int) -> "DetectionPattern":
        """Inverse of :attr:`id`; the first pair is the most significant bit."""
        if not 0 <= pattern_id < 2**n_pairs:
            raise OpticsError(f"pattern id {pattern_id} outside 0..{2**n_pairs - 1}")
        bits = [(pattern_id >> (n_pairs - 1 - k)) & 1 for k in range(n_pairs)]
        return cls.from_clicks(bits)

    @property
    def n_pairs(self) -> int:
        return len(self.counts)

    @property
    def accepted(self) -> bool:
        return all(c in ((1, 0), (0, 1)) for c in self.counts)

    @property
    def clicks(self) -> tuple[int, ...]:
        if not self.accepted:
            raise OpticsError(f"pattern {self.counts} is not a one-photon-per-pair event")
        return tuple(PLUS if c == (1, 0) else MINUS for c in self.counts)

    @property
    def id(self) -> int:
        value = 0
        for c in self.clicks:
            value = (value << 1) | c
        return value

    @property
    def minus_pairs(self) -> tuple[int, ...]:
        return tuple(k for k, c in enumerate(self.clicks) if c == MINUS)

    def label(self) -> str:
        if self.accepted:
            return "".join("+" if c == PLUS else "-" for c in self.clicks)
        return " ".join(f"{a}{b}" for a, b in self.counts)


def accepted_patterns(n_pairs: int) -> list[DetectionPattern]:
    """All one-photon-per-pair patterns in canonical id order."""
    return [DetectionPattern.from_clicks(bits) for bits in itertools.product((PLUS, MINUS), repeat=n_pairs)]


def _pair_columns(state: PureState, pairs: Sequence[tuple[ModeRef, ModeRef]]) -> list[int]:
    cols = [state.index(m) for pair in pairs for m in pair]
    if len(set(cols)) != len(cols):
        raise OpticsError("detector pairs must be disjoint")
    return cols


def _remainder(state: PureState, rows: np.ndarray, cols: list[int]) -> PureState | None:
    keep = [k for k in range(state.n_modes) if k not in cols]
    if not keep:
        return None
    amp = state.amp[rows]
    weight = float(np.sum(np.abs(amp) ** 2))
    return PureState(tuple(state.modes[k] for k in keep), state.occ[np.ix_(rows, keep)], amp, weight)


def project_pattern(
    state: PureState,
    pairs: Sequence[tuple[ModeRef, ModeRef]],
    pattern: DetectionPattern,
) -> tuple[float, PureState | None]:
    """Number-resolved projection of detector ``pairs`` onto ``pattern``.

    Returns the outcome probability and the unnormalised remainder on the
    undetected modes (``None`` when every mode is a detector).
    """
    if len(pairs) != pattern.n_pairs:
        raise OpticsError(f"{len(pairs)} detector pairs but pattern has {pattern.n_pairs}")
    cols = _pair_columns(state, pairs)
    want = np.array([c for pair in pattern.counts for c in pair], dtype=np.int64)
    rows = np.flatnonzero(np.all(state.occ[:, cols].astype(np.int64) == want, axis=1))
    prob = float(np.sum(np.abs(state.amp[rows]) ** 2))
    return prob, _remainder(state, rows, cols)


def outcome_probabilities(
    state: PureState, pairs: Sequence[tuple[ModeRef, ModeRef]]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised detector statistics.

    Returns ``(counts, probs, inverse)``: the distinct detector occupation rows
    (shape ``(k, 2 * n_pairs)``), their probabilities, and the group index of
    every term of ``state``.
    """
    cols = _pair_columns(state, pairs)
    if state.n_terms == 0:
        return np.zeros((0, len(cols)), dtype=state.occ.dtype), np.zeros(0), np.zeros(0, dtype=np.int64)
    groups, inverse = np.unique(state.occ[:, cols], axis=0, return_inverse=True)
    inverse = inverse.ravel()
    probs = np.bincount(inverse, weights=np.abs(state.amp) ** 2, minlength=len(groups))
    return groups, probs, inverse


def outcome_distribution(
    state: PureState, pairs: Sequence[tuple[ModeRef, ModeRef]], with_remainder: bool = True
) -> list[tuple[DetectionPattern, float, PureState | None]]:
    """Every detection pattern with nonzero probability, sorted by counts.

    With ``with_remainder=False`` the third element of each entry is ``None``.
    """
    groups, probs, inverse = outcome_probabilities(state, pairs)
    cols = _pair_columns(state, pairs)
    out = []
    for g, row in enumerate(groups):
        pattern = DetectionPattern(tuple(zip(row[0::2], row[1::2])))
        remainder = _remainder(state, np.flatnonzero(inverse == g), cols) if with_remainder else None
        out.append((pattern, float(probs[g]), remainder))
    return out


__all__ = [
    "TwoModeElement", "DetectionPattern", "LossChannel", "OpticsError", "PLUS", "MINUS",
    "make_vbs", "make_bs50", "apply_two_mode", "apply_vbs", "apply_bs50", "apply_phase",
    "loss_channel", "project_pattern", "outcome_distribution", "outcome_probabilities", "accepted_patterns", "is_unitary",
]
