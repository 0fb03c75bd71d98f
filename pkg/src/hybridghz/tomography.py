"""Displaced-parity expectations and Wigner maps of the two cavities.

Conventions: the single-mode Wigner function is W(gamma) = (2/pi) <Pi(gamma)>
and the two-mode one is W(g1, g2) = (4/pi^2) <Pi_1(g1) Pi_2(g2)>, with
Pi(gamma) = D(gamma) P D(gamma)+ the displaced photon-number parity. Grid
evaluators use the identity Pi(gamma) = D(2 gamma) P (parity conjugation
flips the sign of a displacement) to turn each grid point into one dense
matrix, and factor plane grids into row/column displacement stacks. Grid
paths assume the grid stays inside the truncated Fock window; the scalar
entry points go through the guarded displace().
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .fockspace import (
    StateVector,
    SystemLayout,
    apply_mode_local,
    occupation_vector,
    reduced_density,
)
from .pulsesim import (
    AXIS_MINUS_Y,
    displace,
    displacement_matrix,
    measure_qubit,
    rotation_matrix,
)
from .tolerances import PROB_DEGENERATE

CUT_RE_RE = "ReRe"
CUT_IM_IM = "ImIm"
CUT_PLANE = "plane"


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: a plane for one mode, or a two-mode quadrature cut
    (both displacements real for ReRe, both imaginary for ImIm), with
    points_per_axis samples over [-half_width, half_width] around centers."""

    cut: str = CUT_IM_IM
    centers: tuple = (0j, 0j)
    half_width: float = 2.5
    points_per_axis: int = 51

    def __post_init__(self):
        if self.cut not in (CUT_RE_RE, CUT_IM_IM, CUT_PLANE):
            raise ValueError(f"unknown cut {self.cut!r}")
        need = 1 if self.cut == CUT_PLANE else 2
        if len(self.centers) != need:
            raise ValueError(f"cut {self.cut!r} needs {need} center(s)")
        if self.half_width <= 0:
            raise ValueError("half_width must be > 0")
        if self.points_per_axis < 2:
            raise ValueError("points_per_axis must be >= 2")

    def offsets(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.points_per_axis)


@dataclass(eq=False, frozen=True)
class WignerGrid:
    """Wigner values over a GridSpec.

    For two-mode cuts, values[i, j] belongs to the point pair
    (centers[0] + t_i, centers[1] + t_j) with t the cut offsets (real for
    ReRe, imaginary for ImIm). For a single-mode plane, values[i, j]
    belongs to centers[0] + t_j + 1i t_i (row index = imaginary part).
    probability is the weight of the conditioning branch (1 when
    unconditioned).
    """

    cut: str
    centers: tuple
    half_width: float
    points_per_axis: int
    values: np.ndarray
    probability: float = 1.0

    def offsets(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.points_per_axis)


@lru_cache(maxsize=None)
def _parity_signs(layout: SystemLayout, label: str) -> np.ndarray:
    """(-1)^n over the flat basis for one mode (read-only)."""
    signs = np.where(occupation_vector(layout, label) % 2 == 0, 1.0, -1.0)
    signs.setflags(write=False)
    return signs


def _parity_diag(dim: int) -> np.ndarray:
    return np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)


def displaced_parity_expect(state: StateVector, cavity_label: str, gamma: complex) -> float:
    """<D(gamma) P D(gamma)+> of one cavity, in [-1, 1].

    Evaluated by displacing the state by -gamma (truncation-guarded) and
    summing signed occupation probabilities.
    """
    shifted = displace(state, cavity_label, -gamma)
    signs = _parity_signs(state.layout, cavity_label)
    return float(np.sum(np.abs(shifted.amplitudes) ** 2 * signs))


def joint_wigner(state: StateVector, gamma1: complex, gamma2: complex) -> float:
    """Two-mode Wigner value (4/pi^2) <Pi_1(gamma1) Pi_2(gamma2)> of s1, s2."""
    shifted = displace(displace(state, "s1", -gamma1), "s2", -gamma2)
    signs = _parity_signs(state.layout, "s1") * _parity_signs(state.layout, "s2")
    parity = float(np.sum(np.abs(shifted.amplitudes) ** 2 * signs))
    return 4.0 / math.pi**2 * parity


def _parity_matrix_stack(points: np.ndarray, dim: int) -> np.ndarray:
    """Stack of Pi(gamma) = D(2 gamma) P matrices for a 1-D array of points."""
    par = _parity_diag(dim)
    out = np.empty((len(points), dim, dim), dtype=np.complex128)
    for k, g in enumerate(points):
        out[k] = displacement_matrix(2.0 * complex(g), dim) * par[None, :]
    return out


def _cut_points(spec: GridSpec) -> tuple:
    t = spec.offsets()
    step = t if spec.cut == CUT_RE_RE else 1j * t
    return spec.centers[0] + step, spec.centers[1] + step


def conditional_joint_wigner(state: StateVector, condition: int, grid: GridSpec = GridSpec()) -> WignerGrid:
    """Joint Wigner cut of (s1, s2) conditioned on the three-qubit x product.

    Rotates each qubit by R_{-y}^{pi/2} (so |g> afterwards means x = +1),
    enumerates the 8 readout branches exactly, and keeps the branches whose
    x1 x2 x3 product equals `condition`. The returned probability is the
    total weight of that branch group.
    """
    if condition not in (+1, -1):
        raise ValueError("condition must be +1 or -1")
    if grid.cut == CUT_PLANE:
        raise ValueError("joint Wigner needs a two-mode cut (ReRe or ImIm)")
    layout = state.layout
    rot = rotation_matrix(AXIS_MINUS_Y, math.pi / 2.0)
    for q in ("q1", "q2", "q3"):
        state = apply_mode_local(state, q, rot)

    axes = [layout.index(lb) for lb in ("q1", "q2", "q3", "s1", "s2")]
    psi = np.moveaxis(state.tensor(), axes, range(5))
    d1, d2 = psi.shape[3], psi.shape[4]
    p1, p2 = _cut_points(grid)
    m1 = _parity_matrix_stack(p1, d1)
    m2 = _parity_matrix_stack(p2, d2)

    total = np.zeros((len(p1), len(p2)), dtype=np.complex128)
    weight = 0.0
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                if (1 - 2 * a) * (1 - 2 * b) * (1 - 2 * c) != condition:
                    continue
                block = psi[a, b, c]
                weight += float(np.sum(np.abs(block) ** 2))
                # T1[i, n, m] = sum_z M1[i, n, z] block[z, m]
                t1 = np.tensordot(m1, block, axes=([2], [0]))
                # G[n, j, m] = sum_z conj(block[n, z]) M2[j, z, m]
                g = np.tensordot(block.conj(), m2, axes=([1], [1]))
                total += np.einsum("inm,njm->ij", t1, g)
    if weight < PROB_DEGENERATE:
        raise ValueError(f"condition {condition:+d} branch group has zero probability")
    values = (4.0 / math.pi**2) * total.real / weight
    return WignerGrid(
        cut=grid.cut,
        centers=grid.centers,
        half_width=grid.half_width,
        points_per_axis=grid.points_per_axis,
        values=values,
        probability=weight,
    )


@lru_cache(maxsize=8)
def _plane_stacks(dim: int, offsets: tuple) -> tuple:
    """Row/column displacement stacks for a square plane grid.

    Pi(x + iy) = e^{4ixy} D(2x) D(2iy) P, so one stack per quadrature plus a
    phase matrix covers the whole plane without storing n^2 dense matrices.
    """
    t = np.asarray(offsets, dtype=float)
    par = _parity_diag(dim)
    a = np.empty((len(t), dim, dim), dtype=np.complex128)
    b = np.empty((len(t), dim, dim), dtype=np.complex128)
    for k, v in enumerate(t):
        a[k] = displacement_matrix(2.0 * v, dim)
        b[k] = displacement_matrix(2j * v, dim) * par[None, :]
    phase = np.exp(4j * np.outer(t, t))
    a.setflags(write=False)
    b.setflags(write=False)
    phase.setflags(write=False)
    return a, b, phase


def plane_parity_values(rho: np.ndarray, center: complex, offsets: np.ndarray) -> np.ndarray:
    """<Pi(center + t_j + 1i t_i)> for a single-mode density matrix."""
    dim = rho.shape[0]
    dm = displacement_matrix(-complex(center), dim)
    rho_c = dm @ rho @ dm.conj().T
    a, b, phase = _plane_stacks(dim, tuple(float(v) for v in offsets))
    # vals[i, j] = Tr(rho_c A_j B_i) * phase[i, j]
    c = np.tensordot(rho_c, a, axes=([1], [1]))  # c[m, j, n] = sum_z rho_c[m, z] a[j, z, n]
    vals = np.einsum("mjn,inm->ij", c, b)
    return (phase * vals).real


def plane_points(center: complex, offsets: np.ndarray) -> np.ndarray:
    """Complex coordinates of a plane grid, rows indexing the imaginary part."""
    t = np.asarray(offsets, dtype=float)
    return complex(center) + t[None, :] + 1j * t[:, None]


def conditional_single_wigner(
    state: StateVector,
    project_q3: str,
    cavity_label: str,
    grid: GridSpec = GridSpec(cut=CUT_PLANE, centers=(0j,)),
) -> WignerGrid:
    """Single-cavity Wigner plane after projecting q3 onto |g> or |e>.

    The projected branch is renormalized and traced down to the named
    cavity; projections with probability below 0.01 are rejected rather
    than amplified.
    """
    if project_q3 not in ("g", "e"):
        raise ValueError("project_q3 must be 'g' or 'e'")
    if grid.cut != CUT_PLANE:
        raise ValueError("single-mode Wigner needs a plane grid")
    meas = measure_qubit(state, "q3")
    prob = meas.p_g if project_q3 == "g" else meas.p_e
    branch = meas.collapsed_g if project_q3 == "g" else meas.collapsed_e
    if prob < 0.01 or branch is None:
        raise ValueError(f"projection onto |{project_q3}> has probability {prob:.3e}")
    rho = reduced_density(branch, [cavity_label])
    parities = plane_parity_values(rho, grid.centers[0], grid.offsets())
    return WignerGrid(
        cut=grid.cut,
        centers=grid.centers,
        half_width=grid.half_width,
        points_per_axis=grid.points_per_axis,
        values=(2.0 / math.pi) * parities,
        probability=prob,
    )
