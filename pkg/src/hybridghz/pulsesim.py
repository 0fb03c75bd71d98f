"""Pulse-level operations: displacements, qubit rotations, number-selective
gates, and the Ramsey-type parity mapping.

Rotation convention: a rotation by `angle` about the equatorial axis at
azimuth a is exp(-i angle (cos a sx + sin a sy) / 2) in the (|g>, |e>)
basis, i.e.

    [[cos(angle/2),            -i sin(angle/2) e^{-ia}],
     [-i sin(angle/2) e^{+ia},  cos(angle/2)          ]]

so a +y pi/2 pulse takes |g> to (|g> + |e>)/sqrt(2), and a -y pi/2 pulse
followed by a ground/excited readout measures sigma_x with |g> mapping
to +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
import math

import numpy as np
from scipy.linalg import expm

from .errors import AncillaNotResetError, TruncationError
from .fockspace import (
    OSCILLATOR,
    TWO_LEVEL,
    StateVector,
    apply_mode_local,
    apply_pair_local,
    level_population,
    occupation_vector,
)
from .tolerances import ANCILLA_RESET_TOL, LEAK_MAX, PROB_DEGENERATE

# Number of top Fock levels whose combined population flags truncation.
_GUARD_BAND = 3


@dataclass(frozen=True)
class BlochAxis:
    """Equatorial Bloch-sphere axis, fixed by its azimuth from +x."""

    azimuth: float


AXIS_X = BlochAxis(0.0)
AXIS_Y = BlochAxis(math.pi / 2.0)
AXIS_MINUS_X = BlochAxis(math.pi)
AXIS_MINUS_Y = BlochAxis(-math.pi / 2.0)


def rotation_matrix(axis: BlochAxis, angle: float) -> np.ndarray:
    c = math.cos(angle / 2.0)
    s = math.sin(angle / 2.0)
    phase = np.exp(1j * axis.azimuth)
    return np.array(
        [[c, -1j * s / phase], [-1j * s * phase, c]], dtype=np.complex128
    )


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=np.float64)), k=1).astype(
        np.complex128
    )


@lru_cache(maxsize=4096)
def _displacement_cached(re: float, im: float, dim: int) -> np.ndarray:
    a = annihilation(dim)
    alpha = complex(re, im)
    d = expm(alpha * a.conj().T - np.conj(alpha) * a)
    d.setflags(write=False)
    return d


def displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    """Truncated displacement operator exp(alpha a+ - alpha* a).

    Unitary on the truncated space only up to leakage; callers that move
    real population should use displace(), which guards the truncation.
    """
    alpha = complex(alpha)
    return _displacement_cached(alpha.real, alpha.imag, dim)


def _mode_kind(state: StateVector, label: str) -> str:
    return state.layout.modes[state.layout.index(label)].kind


def _require_oscillator(state: StateVector, label: str):
    if _mode_kind(state, label) != OSCILLATOR:
        raise ValueError(f"mode {label!r} is not an oscillator")


def _require_qubit(state: StateVector, label: str):
    if _mode_kind(state, label) != TWO_LEVEL:
        raise ValueError(f"mode {label!r} is not a two-level mode")


def _mode_populations(state: StateVector, label: str) -> np.ndarray:
    k = state.layout.index(label)
    t = np.abs(state.tensor()) ** 2
    axes = tuple(i for i in range(len(state.layout.dims)) if i != k)
    return t.sum(axis=axes)


def top_band_population(state: StateVector, label: str, band: int = _GUARD_BAND) -> float:
    """Total population in the top `band` Fock levels of one mode."""
    pops = _mode_populations(state, label)
    return float(pops[-band:].sum())


def displace(
    state: StateVector, cavity_label: str, alpha: complex, leak_tol: float = LEAK_MAX
) -> StateVector:
    """Apply D(alpha) to one cavity, guarding against Fock truncation.

    Raises TruncationError if the requested amplitude obviously exceeds the
    truncated space, or if afterwards the top Fock levels hold more than
    leak_tol population (the displaced state then scraped the ceiling).
    """
    _require_oscillator(state, cavity_label)
    dim = state.layout.dim_of(cavity_label)
    if 3.0 * abs(alpha) >= dim - 1:
        raise TruncationError(
            f"displacement |alpha| = {abs(alpha):.3f} too large for {dim} Fock levels"
        )
    out = apply_mode_local(state, cavity_label, displacement_matrix(alpha, dim))
    leak = top_band_population(out, cavity_label)
    if leak > leak_tol:
        raise TruncationError(
            f"top {_GUARD_BAND} Fock levels of {cavity_label!r} hold {leak:.3e} "
            f"population after displacement (tolerance {leak_tol:.1e})"
        )
    return out


def rotate_qubit(
    state: StateVector, qubit_label: str, axis: BlochAxis, angle: float
) -> StateVector:
    _require_qubit(state, qubit_label)
    return apply_mode_local(state, qubit_label, rotation_matrix(axis, angle))


def conditional_qubit_rotation(
    state: StateVector,
    qubit_label: str,
    cavity_label: str,
    selected_n: int,
    axis: BlochAxis,
    angle: float,
) -> StateVector:
    """Rotate the qubit only in the subspace where the cavity holds exactly
    selected_n photons (number-selective qubit pulse)."""
    _require_qubit(state, qubit_label)
    _require_oscillator(state, cavity_label)
    dim = state.layout.dim_of(cavity_label)
    if not 0 <= selected_n < dim:
        raise ValueError(f"selected photon number {selected_n} outside 0..{dim - 1}")
    proj = np.zeros((dim, dim), dtype=np.complex128)
    proj[selected_n, selected_n] = 1.0
    rest = np.eye(dim, dtype=np.complex128) - proj
    op = np.kron(rotation_matrix(axis, angle), proj) + np.kron(
        np.eye(2, dtype=np.complex128), rest
    )
    return apply_pair_local(state, qubit_label, cavity_label, op)


def conditional_cavity_phase(
    state: StateVector, qubit_label: str, cavity_label: str, phi: float
) -> StateVector:
    """Phase e^{i phi n} on the cavity conditioned on the qubit being excited.

    This is the entangling resource of the dispersive interaction: with
    phi = 2 pi chi tau it reproduces the qubit-state-dependent rotation of
    the cavity field accumulated over an idle time tau.
    """
    _require_qubit(state, qubit_label)
    _require_oscillator(state, cavity_label)
    diag = occupation_vector(state.layout, qubit_label) * occupation_vector(
        state.layout, cavity_label
    )
    return StateVector(state.layout, state.amplitudes * np.exp(1j * phi * diag))


def excited_population(state: StateVector, qubit_label: str) -> float:
    _require_qubit(state, qubit_label)
    return level_population(state, qubit_label, 1)


@dataclass(frozen=True)
class QubitMeasurement:
    """Both branches of a projective qubit readout.

    Collapsed branches are normalized; a branch with probability below
    PROB_DEGENERATE is returned as None rather than divided by ~0.
    """

    p_g: float
    p_e: float
    collapsed_g: StateVector | None
    collapsed_e: StateVector | None


def measure_qubit(
    state: StateVector, qubit_label: str, pre_rotation: np.ndarray | None = None
) -> QubitMeasurement:
    """Project one qubit onto |g>/|e>, optionally after a basis-change pulse.

    pre_rotation is a 2x2 unitary (e.g. rotation_matrix(AXIS_MINUS_Y, pi/2)
    to read out sigma_x).
    """
    _require_qubit(state, qubit_label)
    if pre_rotation is not None:
        state = apply_mode_local(state, qubit_label, pre_rotation)
    k = state.layout.index(qubit_label)
    t = np.moveaxis(state.tensor(), k, 0)
    branches = []
    probs = []
    for level in (0, 1):
        full = np.zeros_like(t)
        full[level] = t[level]
        p = float(np.sum(np.abs(t[level]) ** 2))
        probs.append(p)
        if p < PROB_DEGENERATE:
            branches.append(None)
        else:
            amps = np.moveaxis(full, 0, k).reshape(-1) / math.sqrt(p)
            branches.append(StateVector(state.layout, amps))
    return QubitMeasurement(
        p_g=probs[0], p_e=probs[1], collapsed_g=branches[0], collapsed_e=branches[1]
    )


class ParityProtocol(Enum):
    """Ramsey phase pair of the parity mapping; names give the two pulse
    phases in units where the first pulse is about +y."""

    ZERO_ZERO = "zero_zero"
    ZERO_PI = "zero_pi"

    @property
    def second_axis(self) -> BlochAxis:
        return AXIS_Y if self is ParityProtocol.ZERO_ZERO else AXIS_MINUS_Y

    @property
    def parity_of_g(self) -> int:
        # zero_zero maps odd photon number to |g>, zero_pi maps even to |g>
        return -1 if self is ParityProtocol.ZERO_ZERO else +1


def measured_parity(outcome_is_g: bool, protocol: ParityProtocol) -> int:
    return protocol.parity_of_g if outcome_is_g else -protocol.parity_of_g


def parity_map(
    state: StateVector,
    qubit_label: str,
    cavity_label: str,
    protocol: ParityProtocol,
) -> StateVector:
    """Map cavity photon parity onto an ancilla qubit.

    pi/2 pulse, conditional pi phase per photon (idle time pi / chi), then a
    second pi/2 pulse whose sign selects the protocol. The ancilla must
    start in |g>; the parity estimate is read from measure_qubit plus
    measured_parity afterwards.
    """
    pe = excited_population(state, qubit_label)
    if pe > ANCILLA_RESET_TOL:
        raise AncillaNotResetError(
            f"parity ancilla {qubit_label!r} has excited population {pe:.3e}"
        )
    state = rotate_qubit(state, qubit_label, AXIS_Y, math.pi / 2.0)
    state = conditional_cavity_phase(state, qubit_label, cavity_label, math.pi)
    return rotate_qubit(state, qubit_label, protocol.second_axis, math.pi / 2.0)
