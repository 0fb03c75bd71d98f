"""Wigner tomography: displaced-parity oracles and conditional cuts."""

import math

import numpy as np
import pytest

from hybridghz.fockspace import build_layout, ground_state, oscillator, qubit
from hybridghz.pulsesim import displace
from hybridghz.tomography import (
    CUT_IM_IM,
    CUT_PLANE,
    CUT_RE_RE,
    GridSpec,
    conditional_joint_wigner,
    conditional_single_wigner,
    displaced_parity_expect,
    joint_wigner,
)

JOINT_BOUND = 4.0 / math.pi**2
SINGLE_BOUND = 2.0 / math.pi


@pytest.fixture(scope="module")
def ghz_roomy(params, ideal_seq):
    # displacement-based cross-checks need headroom over the default cutoff
    from hybridghz import generate_ghz, standard_layout

    return generate_ghz(params, standard_layout(40), ideal_seq)


def test_displaced_parity_coherent_oracle():
    # <Pi(gamma)> on |alpha> must equal e^{-2 |alpha - gamma|^2}
    lo = build_layout([oscillator("s", 30)])
    rng = np.random.default_rng(42)
    for _ in range(50):
        alpha = complex(*rng.uniform(-1.2, 1.2, size=2))
        gamma = complex(*rng.uniform(-1.2, 1.2, size=2))
        st = displace(ground_state(lo), "s", alpha)
        got = displaced_parity_expect(st, "s", gamma)
        assert abs(got - math.exp(-2.0 * abs(alpha - gamma) ** 2)) < 1e-9


def test_joint_wigner_vacuum_and_coherent():
    lo = build_layout([qubit("q1"), qubit("q2"), qubit("q3"),
                       oscillator("s1", 20), oscillator("s2", 20)])
    st = ground_state(lo)
    assert joint_wigner(st, 0j, 0j) == pytest.approx(JOINT_BOUND, abs=1e-12)
    g1, g2 = 0.6, -0.4j
    ref = JOINT_BOUND * math.exp(-2.0 * abs(g1) ** 2) * math.exp(-2.0 * abs(g2) ** 2)
    assert joint_wigner(st, g1, g2) == pytest.approx(ref, abs=1e-11)


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(cut="imre")
    with pytest.raises(ValueError):
        GridSpec(cut=CUT_PLANE, centers=(0j, 0j))
    with pytest.raises(ValueError):
        GridSpec(cut=CUT_IM_IM, centers=(0j,))
    with pytest.raises(ValueError):
        GridSpec(half_width=0.0)
    with pytest.raises(ValueError):
        GridSpec(points_per_axis=1)
    offs = GridSpec(half_width=2.0, points_per_axis=5).offsets()
    assert offs.tolist() == [-2.0, -1.0, 0.0, 1.0, 2.0]


def test_conditional_joint_requires_two_mode_cut(ghz_ideal):
    with pytest.raises(ValueError):
        conditional_joint_wigner(ghz_ideal, +1, GridSpec(cut=CUT_PLANE, centers=(0j,)))
    with pytest.raises(ValueError):
        conditional_joint_wigner(ghz_ideal, 0)


def test_conditional_branches_recompose_to_total(ghz_roomy):
    # p+ W+ + p- W- must reproduce the unconditioned joint Wigner pointwise
    grid = GridSpec(cut=CUT_IM_IM, half_width=1.5, points_per_axis=5)
    wp = conditional_joint_wigner(ghz_roomy, +1, grid)
    wm = conditional_joint_wigner(ghz_roomy, -1, grid)
    assert wp.probability + wm.probability == pytest.approx(1.0, abs=1e-12)
    t = grid.offsets()
    for i, ti in enumerate(t):
        for j, tj in enumerate(t):
            tot = joint_wigner(ghz_roomy, 1j * ti, 1j * tj)
            mix = wp.probability * wp.values[i, j] + wm.probability * wm.values[i, j]
            assert abs(mix - tot) < 1e-9


def test_conditional_joint_matrix_oracle(ghz_roomy):
    # recompute a few points through the branch-projection route
    from hybridghz.fockspace import apply_mode_local
    from hybridghz.pulsesim import AXIS_MINUS_Y, measure_qubit, rotation_matrix

    grid = GridSpec(cut=CUT_RE_RE, half_width=1.0, points_per_axis=3)
    w = conditional_joint_wigner(ghz_roomy, +1, grid)
    rot = rotation_matrix(AXIS_MINUS_Y, math.pi / 2)
    st = ghz_roomy
    for q in ("q1", "q2", "q3"):
        st = apply_mode_local(st, q, rot)
    # enumerate the 8 qubit branches by nested measurements
    branches = []
    m1 = measure_qubit(st, "q1")
    for x1, p1, st1 in ((+1, m1.p_g, m1.collapsed_g), (-1, m1.p_e, m1.collapsed_e)):
        if st1 is None:
            continue
        m2 = measure_qubit(st1, "q2")
        for x2, p2, st2 in ((+1, m2.p_g, m2.collapsed_g), (-1, m2.p_e, m2.collapsed_e)):
            if st2 is None:
                continue
            m3 = measure_qubit(st2, "q3")
            for x3, p3, st3 in ((+1, m3.p_g, m3.collapsed_g), (-1, m3.p_e, m3.collapsed_e)):
                if x1 * x2 * x3 == +1 and st3 is not None:
                    branches.append((p1 * p2 * p3, st3))
    weight = sum(p for p, _ in branches)
    assert weight == pytest.approx(w.probability, abs=1e-12)
    t = grid.offsets()
    for i in (0, 2):
        for j in (0, 1):
            ref = sum(p * joint_wigner(b, t[i], t[j]) for p, b in branches) / weight
            assert abs(w.values[i, j] - ref) < 1e-10


def test_conditional_joint_values_bounded(ghz_ideal):
    grid = GridSpec(cut=CUT_IM_IM, half_width=2.0, points_per_axis=7)
    for cond in (+1, -1):
        w = conditional_joint_wigner(ghz_ideal, cond, grid)
        assert np.max(np.abs(w.values)) <= JOINT_BOUND * (1.0 + 1e-9)
        assert w.values.shape == (7, 7)


def test_single_wigner_peaks_at_branch_amplitude(ghz_ideal, default_enc):
    # q3 projected onto |g> leaves s2 near |beta2| and s1 near vacuum
    beta2 = default_enc.beta2
    grid = GridSpec(cut=CUT_PLANE, centers=(beta2,), half_width=0.4, points_per_axis=5)
    w = conditional_single_wigner(ghz_ideal, "g", "s2", grid)
    assert 0.45 < w.probability < 0.55
    center = w.values[2, 2]
    assert center > 0.9 * SINGLE_BOUND
    assert center <= SINGLE_BOUND * (1.0 + 1e-9)
    assert center == np.max(w.values)

    g0 = GridSpec(cut=CUT_PLANE, centers=(0j,), half_width=0.2, points_per_axis=3)
    w1 = conditional_single_wigner(ghz_ideal, "g", "s1", g0)
    assert w1.values[1, 1] > 0.9 * SINGLE_BOUND


def test_single_wigner_plane_orientation():
    # values[i, j] sits at center + t_j + 1i t_i
    lo = build_layout([qubit("q1"), qubit("q2"), qubit("q3"),
                       oscillator("s1", 20), oscillator("s2", 20)])
    st = displace(ground_state(lo), "s1", 1.0)
    grid = GridSpec(cut=CUT_PLANE, centers=(0j,), half_width=2.0, points_per_axis=21)
    w = conditional_single_wigner(st, "g", "s1", grid)
    i, j = np.unravel_index(np.argmax(w.values), w.values.shape)
    t = grid.offsets()
    assert abs(t[i] - 0.0) < 0.11   # imag part of the peak
    assert abs(t[j] - 1.0) < 0.11   # real part of the peak
    assert w.probability == pytest.approx(1.0, abs=1e-12)


def test_single_wigner_rejects_bad_projection(ghz_ideal):
    lo = build_layout([qubit("q1"), qubit("q2"), qubit("q3"),
                       oscillator("s1", 8), oscillator("s2", 8)])
    st = ground_state(lo)
    with pytest.raises(ValueError):
        conditional_single_wigner(st, "e", "s1")
    with pytest.raises(ValueError):
        conditional_single_wigner(ghz_ideal, "up", "s1")
    with pytest.raises(ValueError):
        conditional_single_wigner(ghz_ideal, "g", "s1", GridSpec(cut=CUT_IM_IM))
