"""Sparse Fock-space states over a labelled set of optical modes.

A :class:`PureState` stores its superposition as two parallel arrays: an
``(n_terms, n_modes)`` occupation matrix whose rows are unique and sorted
lexicographically, and a complex amplitude vector. States are immutable and
every operation returns a new state.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from . import _kernels

PRUNE = 1e-14
NORM_TOL = 1e-12
OCC_DTYPE = np.uint8
MAX_PHOTONS = _kernels.MAX_OCCUPATION


class FockError(ValueError):
    """Invalid state construction or incompatible operands."""


@dataclass(frozen=True)
class ModeId:
    index: int
    label: str


ModeRef = Union[int, str, ModeId]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Superposition of Fock basis states.

    ``weight`` is ``None`` for ordinary states. Conditional states produced by a
    measurement carry ``weight`` equal to their squared norm, the probability
    of the outcome that produced them.
    """

    modes: tuple[str, ...]
    occ: np.ndarray
    amp: np.ndarray
    weight: float | None = None

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise FockError("a state needs at least one mode")
        if len(set(modes)) != len(modes):
            raise FockError(f"duplicate mode labels in {modes}")
        occ = np.asarray(self.occ)
        amp = np.asarray(self.amp, dtype=np.complex128).ravel()
        if occ.ndim != 2 or occ.shape[1] != len(modes) or occ.shape[0] != amp.shape[0]:
            raise FockError("occupation matrix does not match modes/amplitudes")
        if occ.size and (occ.min() < 0 or occ.sum(axis=1).max() > MAX_PHOTONS):
            raise FockError(f"occupations must lie in [0, {MAX_PHOTONS}] photons per term")
        if not np.all(np.isfinite(amp)):
            raise FockError("amplitudes must be finite")
        occ, amp = _kernels.canonicalize(occ.astype(OCC_DTYPE), amp, PRUNE)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "occ", _freeze(occ))
        object.__setattr__(self, "amp", _freeze(amp))

    @classmethod
    def from_dict(cls, modes: Sequence[str], terms: dict) -> "PureState":
        """Build from ``{occupation tuple: amplitude}``."""
        modes = tuple(modes)
        if not terms:
            return cls(modes, np.zeros((0, len(modes)), dtype=OCC_DTYPE), np.zeros(0))
        occ = np.array([tuple(k) for k in terms], dtype=np.int64).reshape(len(terms), len(modes))
        return cls(modes, occ, np.array(list(terms.values()), dtype=np.complex128))

    # -- inspection -------------------------------------------------------
    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def n_terms(self) -> int:
        return int(self.amp.shape[0])

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2))

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.norm2))

    @property
    def normalized(self) -> bool:
        return self.weight is None and abs(self.norm2 - 1.0) <= NORM_TOL

    def mode_ids(self) -> list[ModeId]:
        return [ModeId(i, label) for i, label in enumerate(self.modes)]

    def index(self, mode: ModeRef) -> int:
        if isinstance(mode, ModeId):
            mode = mode.label
        if isinstance(mode, (int, np.integer)):
            if not 0 <= mode < self.n_modes:
                raise FockError(f"mode index {mode} outside registry of {self.n_modes} modes")
            return int(mode)
        try:
            return self.modes.index(mode)
        except ValueError:
            raise FockError(f"unknown mode {mode!r}; registry is {self.modes}") from None

    def to_dict(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(x) for x in row): complex(a) for row, a in zip(self.occ, self.amp)}

    def amplitude(self, occupation: Sequence[int]) -> complex:
        return self.to_dict().get(tuple(occupation), 0j)

    def photon_numbers(self) -> np.ndarray:
        return self.occ.sum(axis=1)

    # -- derived states ---------------------------------------------------
    def replace(self, occ=None, amp=None, modes=None, weight=None) -> "PureState":
        return PureState(
            self.modes if modes is None else modes,
            self.occ if occ is None else occ,
            self.amp if amp is None else amp,
            weight,
        )

    def normalize(self) -> "PureState":
        n = self.norm
        if n == 0.0:
            raise FockError("cannot normalise a zero-norm state")
        return PureState(self.modes, self.occ, self.amp / n)

    def relabel(self, mapping: dict[str, str]) -> "PureState":
        modes = tuple(mapping.get(m, m) for m in self.modes)
        return PureState(modes, self.occ, self.amp, self.weight)

    def permute(self, modes: Sequence[str]) -> "PureState":
        """Reorder the registry to ``modes`` (same label set)."""
        if sorted(modes) != sorted(self.modes):
            raise FockError(f"{tuple(modes)} is not a permutation of {self.modes}")
        cols = [self.modes.index(m) for m in modes]
        return PureState(tuple(modes), self.occ[:, cols], self.amp, self.weight)

    def __repr__(self) -> str:
        terms = ", ".join(f"{tuple(int(x) for x in r)}: {a:.6g}" for r, a in zip(self.occ, self.amp))
        return f"PureState(modes={self.modes}, {{{terms}}})"


@dataclass(frozen=True)
class MixedState:
    """Probability-weighted ensemble of normalised pure states on one registry."""

    branches: tuple[tuple[float, PureState], ...]
    modes: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        branches = tuple((float(p), s) for p, s in self.branches)
        if not branches:
            raise FockError("a mixed state needs at least one branch")
        modes = branches[0][1].modes
        for p, s in branches:
            if not -NORM_TOL <= p <= 1.0 + NORM_TOL:
                raise FockError(f"branch probability {p} outside [0, 1]")
            if s.modes != modes:
                raise FockError("all branches must share one registry")
            if abs(s.norm2 - 1.0) > NORM_TOL:
                raise FockError("branch states must be normalised")
        total = sum(p for p, _ in branches)
        if abs(total - 1.0) > NORM_TOL:
            raise FockError(f"branch probabilities sum to {total}, not 1")
        object.__setattr__(self, "branches", branches)
        object.__setattr__(self, "modes", modes)

    @property
    def probabilities(self) -> list[float]:
        return [p for p, _ in self.branches]

    def fidelity(self, target: PureState) -> float:
        """<target| rho |target> for a normalised pure target."""
        return sum(p * fidelity(s, target) for p, s in self.branches)


def _check_registry(modes: Iterable[str]) -> tuple[str, ...]:
    modes = tuple(modes)
    if not modes:
        raise FockError("registry must contain at least one mode")
    return modes


def make_vacuum(modes: Sequence[str] | int) -> PureState:
    if isinstance(modes, int):
        modes = tuple(str(i) for i in range(modes))
    modes = _check_registry(modes)
    return PureState(modes, np.zeros((1, len(modes)), dtype=OCC_DTYPE), np.ones(1))


def basis_state(modes: Sequence[str], occupation: Sequence[int]) -> PureState:
    return PureState.from_dict(modes, {tuple(occupation): 1.0})


def create_photon(state: PureState, mode: ModeRef) -> PureState:
    """Normalised creation: |n> -> |n+1> term-wise (a† followed by 1/sqrt(n+1))."""
    k = state.index(mode)
    occ = state.occ.astype(np.int64)
    occ[:, k] += 1
    if occ.size and occ.sum(axis=1).max() > MAX_PHOTONS:
        raise FockError(f"photon number would exceed {MAX_PHOTONS}")
    return state.replace(occ=occ, weight=state.weight)


def tensor(s1: PureState, s2: PureState) -> PureState:
    overlap = set(s1.modes) & set(s2.modes)
    if overlap:
        raise FockError(f"registries overlap on {sorted(overlap)}")
    n1, n2 = s1.n_terms, s2.n_terms
    occ = np.hstack([np.repeat(s1.occ, n2, axis=0), np.tile(s2.occ, (n1, 1))])
    amp = np.outer(s1.amp, s2.amp).ravel()
    weight = None
    if s1.weight is not None or s2.weight is not None:
        weight = s1.norm2 * s2.norm2
    return PureState(s1.modes + s2.modes, occ, amp, weight)


def _require_same_registry(s1: PureState, s2: PureState) -> None:
    if s1.modes != s2.modes:
        raise FockError(f"registry mismatch: {s1.modes} vs {s2.modes}")


def inner_product(s1: PureState, s2: PureState) -> complex:
    """<s1|s2>, conjugating ``s1``."""
    _require_same_registry(s1, s2)
    lookup = {row.tobytes(): a for row, a in zip(s2.occ, s2.amp)}
    acc = 0j
    for row, a in zip(s1.occ, s1.amp):
        b = lookup.get(row.tobytes())
        if b is not None:
            acc += np.conj(a) * b
    return complex(acc)


def fidelity(state: PureState, target: PureState) -> float:
    """|<target|state/||state||>|^2."""
    n2 = state.norm2
    if n2 == 0.0:
        raise FockError("fidelity of a zero-norm state is undefined")
    return float(abs(inner_product(target, state)) ** 2 / n2)


def trace_out(state: PureState, modes: Sequence[ModeRef]) -> MixedState:
    """Discard ``modes``, returning the remaining subsystem as a branch ensemble.

    Terms are grouped by their occupation on the discarded modes; each group is a
    branch with probability equal to its squared norm.
    """
    drop = sorted({state.index(m) for m in modes})
    keep = [k for k in range(state.n_modes) if k not in drop]
    if not keep:
        raise FockError("cannot trace out every mode")
    keep_labels = tuple(state.modes[k] for k in keep)
    total = state.norm2
    if total == 0.0:
        raise FockError("cannot trace a zero-norm state")
    groups, inverse = np.unique(state.occ[:, drop], axis=0, return_inverse=True)
    branches = []
    for g in range(len(groups)):
        rows = np.flatnonzero(inverse.ravel() == g)
        sub = PureState(keep_labels, state.occ[np.ix_(rows, keep)], state.amp[rows])
        branches.append((sub.norm2 / total, sub.normalize()))
    return MixedState(tuple(branches))


# -- serialization --------------------------------------------------------
def _terms_json(state: PureState) -> list[dict]:
    return [
        {"occ": [int(x) for x in row], "re": float(a.real), "im": float(a.imag)}
        for row, a in zip(state.occ, state.amp)
    ]


def state_to_json(state: PureState | MixedState) -> dict:
    if isinstance(state, MixedState):
        return {
            "modes": list(state.modes),
            "branches": [{"prob": p, "terms": _terms_json(s)} for p, s in state.branches],
        }
    out = {"modes": list(state.modes), "terms": _terms_json(state)}
    if state.weight is not None:
        out["weight"] = state.weight
    return out


def _terms_from_json(modes, terms, weight=None) -> PureState:
    n = len(modes)
    occ = np.array([t["occ"] for t in terms], dtype=np.int64).reshape(len(terms), n)
    amp = np.array([complex(t["re"], t["im"]) for t in terms], dtype=np.complex128)
    return PureState(tuple(modes), occ, amp, weight)


def state_from_json(data: dict | str) -> PureState | MixedState:
    if isinstance(data, str):
        data = json.loads(data)
    modes = data["modes"]
    if "branches" in data:
        return MixedState(tuple((b["prob"], _terms_from_json(modes, b["terms"])) for b in data["branches"]))
    return _terms_from_json(modes, data["terms"], data.get("weight"))
