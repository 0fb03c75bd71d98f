"""Tensor-product Hilbert-space engine on truncated Fock bases.

States live over an ordered list of modes (two-level qubits and truncated
oscillators). Basis indexing is row-major over the declared mode order, so
the flat index of per-mode occupations equals numpy's ravel_multi_index
with the mode dims. Every Hamiltonian used in this package is diagonal in
the product Fock/qubit basis, so time evolution is exact phase
multiplication and never requires an ODE integrator.

Operations return new StateVector instances; callers may treat states as
immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TWO_LEVEL = "two_level"
OSCILLATOR = "oscillator"


@dataclass(frozen=True)
class ModeSpec:
    """One tensor factor: a qubit (dim 2) or an oscillator truncated at dim-1 photons."""

    kind: str
    dim: int
    label: str

    def __post_init__(self):
        if self.kind not in (TWO_LEVEL, OSCILLATOR):
            raise ValueError(f"unknown mode kind {self.kind!r}")
        if self.dim < 2:
            raise ValueError(f"mode {self.label!r}: dim must be >= 2, got {self.dim}")
        if self.kind == TWO_LEVEL and self.dim != 2:
            raise ValueError(f"two-level mode {self.label!r} must have dim 2")


def qubit(label: str) -> ModeSpec:
    return ModeSpec(TWO_LEVEL, 2, label)


def oscillator(label: str, n_max: int = 30) -> ModeSpec:
    return ModeSpec(OSCILLATOR, n_max + 1, label)


@dataclass(frozen=True)
class SystemLayout:
    """Ordered mode list fixing the row-major product basis."""

    modes: tuple

    @property
    def dims(self) -> tuple:
        return tuple(m.dim for m in self.modes)

    @property
    def labels(self) -> tuple:
        return tuple(m.label for m in self.modes)

    @property
    def total_dim(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no mode labelled {label!r}") from None

    def dim_of(self, label: str) -> int:
        return self.modes[self.index(label)].dim

    def flat_index(self, occupations) -> int:
        return int(np.ravel_multi_index(tuple(occupations), self.dims))

    def occupations_of(self, flat: int) -> tuple:
        return tuple(int(i) for i in np.unravel_index(flat, self.dims))


def build_layout(modes) -> SystemLayout:
    modes = tuple(modes)
    if not modes:
        raise ValueError("layout needs at least one mode")
    labels = [m.label for m in modes]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate mode labels in {labels}")
    return SystemLayout(modes)


@dataclass(eq=False)
class StateVector:
    """Complex amplitude vector over a layout's product basis."""

    layout: SystemLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.layout.total_dim,):
            raise ValueError(
                f"amplitude vector of shape {amps.shape} does not match "
                f"layout dim {self.layout.total_dim}"
            )
        self.amplitudes = amps

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to the per-mode tensor (a view; do not mutate)."""
        return self.amplitudes.reshape(self.layout.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.layout, self.amplitudes / n)

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        _require_same_layout(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity_to(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.layout, self.amplitudes.copy())


@dataclass(eq=False, frozen=True)
class DiagonalOperator:
    """Real diagonal over the product basis (rad/s when used as a Hamiltonian)."""

    layout: SystemLayout
    diagonal: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diagonal, dtype=float)
        if diag.shape != (self.layout.total_dim,):
            raise ValueError("diagonal length does not match layout")
        object.__setattr__(self, "diagonal", diag)


def _require_same_layout(a, b):
    la = a.layout if isinstance(a, (StateVector, DiagonalOperator)) else a
    lb = b.layout if isinstance(b, (StateVector, DiagonalOperator)) else b
    if la != lb:
        raise ValueError("layout mismatch")


def ground_state(layout: SystemLayout) -> StateVector:
    amps = np.zeros(layout.total_dim, dtype=complex)
    amps[0] = 1.0
    return StateVector(layout, amps)


def basis_state(layout: SystemLayout, occupations=None) -> StateVector:
    """Product basis state; occupations is a {label: n} mapping, default all zero."""
    occ = [0] * len(layout.modes)
    for label, n in (occupations or {}).items():
        i = layout.index(label)
        if not 0 <= int(n) < layout.dims[i]:
            raise ValueError(f"occupation {n} out of range for mode {label!r}")
        occ[i] = int(n)
    amps = np.zeros(layout.total_dim, dtype=complex)
    amps[layout.flat_index(occ)] = 1.0
    return StateVector(layout, amps)


def product_state(layout: SystemLayout, factors) -> StateVector:
    """Tensor product of per-mode vectors; modes absent from `factors` get vacuum/|g>."""
    unknown = set(factors) - set(layout.labels)
    if unknown:
        raise KeyError(f"factors for unknown modes: {sorted(unknown)}")
    amps = None
    for mode in layout.modes:
        v = factors.get(mode.label)
        if v is None:
            v = np.zeros(mode.dim, dtype=complex)
            v[0] = 1.0
        else:
            v = np.asarray(v, dtype=complex)
            if v.shape != (mode.dim,):
                raise ValueError(
                    f"factor for {mode.label!r} has shape {v.shape}, expected ({mode.dim},)"
                )
        amps = v if amps is None else np.kron(amps, v)
    return StateVector(layout, amps)


def coherent_amplitudes(alpha: complex, dim: int):
    """Truncated coherent-state column c_n = e^{-|a|^2/2} a^n / sqrt(n!).

    Returns (amplitudes, leakage) where leakage = 1 - sum |c_n|^2 is the
    Poisson weight beyond the cutoff. The recurrence c_n = c_{n-1} a/sqrt(n)
    is numerically stable for the amplitudes used here.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    alpha = complex(alpha)
    amps = np.zeros(dim, dtype=complex)
    amps[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        amps[n] = amps[n - 1] * alpha / np.sqrt(n)
    leakage = max(0.0, 1.0 - float(np.vdot(amps, amps).real))
    return amps, leakage


@lru_cache(maxsize=None)
def occupation_vector(layout: SystemLayout, label: str) -> np.ndarray:
    """Flat vector of one mode's occupation number at every basis index (read-only)."""
    i = layout.index(label)
    shape = [1] * len(layout.dims)
    shape[i] = layout.dims[i]
    n = np.arange(layout.dims[i], dtype=float).reshape(shape)
    out = np.broadcast_to(n, layout.dims).reshape(layout.total_dim)
    out = np.ascontiguousarray(out)
    out.setflags(write=False)
    return out


def level_population(state: StateVector, label: str, n: int) -> float:
    """Probability of finding mode `label` in Fock/qubit level n."""
    occ = occupation_vector(state.layout, label)
    mask = occ == float(n)
    return float(np.sum(np.abs(state.amplitudes[mask]) ** 2))


def apply_mode_local(state: StateVector, label: str, matrix) -> StateVector:
    """Apply a dense dim x dim matrix to one mode (I (x) ... (x) M (x) ... (x) I)."""
    layout = state.layout
    i = layout.index(label)
    d = layout.dims[i]
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (d, d):
        raise ValueError(f"matrix shape {m.shape} does not match mode dim {d}")
    t = np.moveaxis(state.tensor(), i, -1)
    shape = t.shape
    out = t.reshape(-1, d) @ m.T
    out = np.moveaxis(out.reshape(shape), -1, i)
    return StateVector(layout, np.ascontiguousarray(out).reshape(layout.total_dim))


def apply_pair_local(state: StateVector, label_a: str, label_b: str, matrix) -> StateVector:
    """Apply a dense (da*db) x (da*db) matrix to a mode pair; the flattened pair
    index is a-major, matching np.kron(op_a, op_b)."""
    layout = state.layout
    ia, ib = layout.index(label_a), layout.index(label_b)
    if ia == ib:
        raise ValueError("pair operation needs two distinct modes")
    da, db = layout.dims[ia], layout.dims[ib]
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (da * db, da * db):
        raise ValueError(f"matrix shape {m.shape} does not match pair dims ({da},{db})")
    t = np.moveaxis(state.tensor(), (ia, ib), (-2, -1))
    shape = t.shape
    out = t.reshape(-1, da * db) @ m.T
    out = np.moveaxis(out.reshape(shape), (-2, -1), (ia, ib))
    return StateVector(layout, np.ascontiguousarray(out).reshape(layout.total_dim))


def evolve_diagonal(state: StateVector, hamiltonian: DiagonalOperator, t: float) -> StateVector:
    """amplitude_i -> amplitude_i * exp(-i H_i t); exactly norm preserving."""
    _require_same_layout(state, hamiltonian)
    if t < 0:
        raise ValueError("evolution time must be >= 0")
    if t == 0.0:
        return state.copy()
    return StateVector(state.layout, state.amplitudes * np.exp(-1j * hamiltonian.diagonal * t))


def expectation(state: StateVector, operator) -> complex:
    """<psi|O|psi> for a DiagonalOperator or a {label: matrix} product of mode-local factors."""
    if isinstance(operator, DiagonalOperator):
        _require_same_layout(state, operator)
        return complex(np.sum(np.abs(state.amplitudes) ** 2 * operator.diagonal))
    psi = state
    for label, matrix in operator.items():
        psi = apply_mode_local(psi, label, matrix)
    return state.overlap(psi)


def number_expectation(state: StateVector, label: str) -> float:
    occ = occupation_vector(state.layout, label)
    return float(np.sum(np.abs(state.amplitudes) ** 2 * occ))


def reduced_density(state: StateVector, keep_labels) -> np.ndarray:
    """Dense reduced density matrix over the kept modes (row-major in their layout order)."""
    layout = state.layout
    keep = [layout.index(lb) for lb in keep_labels]
    if len(set(keep)) != len(keep):
        raise ValueError("duplicate modes in keep_labels")
    keep.sort()
    rest = [i for i in range(len(layout.dims)) if i not in keep]
    t = np.transpose(state.tensor(), keep + rest)
    dk = 1
    for i in keep:
        dk *= layout.dims[i]
    t = t.reshape(dk, -1)
    return t @ t.conj().T
