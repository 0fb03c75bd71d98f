"""Acceptance checks, one per criterion, each printing a PASS or FAIL line.

Run with -s (or read the captured output) to see the C1..C12 lines. C7 is
expected to fail: the amplitude-sweep thresholds sit beyond what the exact
closed forms allow at beta = 4, and we keep the honest number rather than
bend the curve. The analysis lives next to the assertion.
"""

import itertools
import math
import time

import numpy as np
import pytest

from hybridghz.detection import (
    load_detection,
    perfect_detection,
    predicted_measured_bell,
    visibility,
)
from hybridghz.device import config_text, standard_layout, tau_for_phase
from hybridghz.fockspace import (
    StateVector,
    build_layout,
    coherent_amplitudes,
    ground_state,
    oscillator,
    qubit,
)
from hybridghz.ghzbuilder import (
    DEFAULT_BETA1,
    DEFAULT_BETA2,
    IDEAL,
    SequenceParams,
    analytic_target_state,
    default_sequence,
    generate_ghz,
    resolved_sequence,
    sequence_encoding,
)
from hybridghz.mermin import (
    auto_n_max,
    bell_matrix,
    bell_theta_sweep,
    classical_bound_bruteforce,
    enumerate_terms,
    four_partite_bound_check,
    ideal_bell_vs_amplitude,
    optimize_bell,
    sample_correlation,
    sigma_y_single_cavity,
    term_expectation,
)
from hybridghz.pulsesim import apply_mode_local, apply_pair_local, displace
from hybridghz.tomography import (
    CUT_IM_IM,
    GridSpec,
    conditional_joint_wigner,
    displaced_parity_expect,
    joint_wigner,
)

# reference numbers for the bundled device: printed detection budget
# (0.845 / 0.145 / 0.700), kerr-limited simulated maximum 12.29, and the
# measured value 8.381 +- 0.038 it is compared against
REF_P0, REF_P1, REF_V = 0.845, 0.145, 0.700
REF_SIM_MAX = 12.29
REF_MEASURED = 8.381


def _report(tag: str, ok: bool, detail: str) -> bool:
    print(f"{tag} {'PASS' if ok else 'FAIL'}: {detail}")
    return ok


def test_c01_visibility_triple():
    start = time.perf_counter()
    rep = visibility(load_detection(config_text("paper_device")))
    elapsed = time.perf_counter() - start
    ok = (
        abs(rep.p0 - REF_P0) <= 0.002
        and abs(rep.p1 - REF_P1) <= 0.002
        and abs(rep.visibility - REF_V) <= 0.002
        and elapsed < 1.0
    )
    assert _report(
        "C1",
        ok,
        f"P0={rep.p0:.4f} P1={rep.p1:.4f} V={rep.visibility:.4f},"
        f" each within 0.002 of {REF_P0}/{REF_P1}/{REF_V} ({elapsed:.2f}s)",
    )


def test_c02_predicted_vs_measured_ratio():
    start = time.perf_counter()
    rep = visibility(load_detection(config_text("paper_device")))
    predicted = predicted_measured_bell(rep.visibility, REF_SIM_MAX)
    measured_ratio = REF_MEASURED / REF_SIM_MAX
    elapsed = time.perf_counter() - start
    ok = abs(rep.visibility - measured_ratio) <= 0.02 and elapsed < 1.0
    assert _report(
        "C2",
        ok,
        f"V*{REF_SIM_MAX} = {predicted:.3f}, measured ratio"
        f" {REF_MEASURED}/{REF_SIM_MAX} = {measured_ratio:.3f},"
        f" |V - {measured_ratio:.3f}| = {abs(rep.visibility - measured_ratio):.4f}"
        f" <= 0.02 ({elapsed:.2f}s)",
    )


def test_c03_classical_bound():
    start = time.perf_counter()
    bound = classical_bound_bruteforce()
    elapsed = time.perf_counter() - start
    ok = bound == 4 and elapsed < 1.0
    assert _report(
        "C3", ok, f"max over 1024 deterministic strategies = {bound} ({elapsed:.2f}s)"
    )


def test_c04_ideal_ghz_extremum():
    start = time.perf_counter()
    psi = np.zeros(32, dtype=complex)
    psi[0] = psi[31] = 1.0 / math.sqrt(2.0)
    value = float(np.real(np.vdot(psi, bell_matrix() @ psi)))
    elapsed = time.perf_counter() - start
    ok = abs(value - 16.0) < 1e-12 and elapsed < 1.0
    assert _report(
        "C4", ok, f"two-level GHZ gives <B> = {value:.15f}, |.-16| < 1e-12 ({elapsed:.2f}s)"
    )


def test_c05_four_partite_ceiling():
    start = time.perf_counter()
    out = four_partite_bound_check(200, seed=1)
    elapsed = time.perf_counter() - start
    ok = (
        abs(out["ghz4_value"] - 8.0) < 1e-12
        and out["all_within"]
        and out["max_abs"] <= 8.0 + 1e-6
        and elapsed < 120.0
    )
    assert _report(
        "C5",
        ok,
        f"GHZ4 x |+> gives {out['ghz4_value']:.12f}; 200 at-most-4-partite"
        f" samples max |<B>| = {out['max_abs']:.6f} <= 8+1e-6 ({elapsed:.1f}s)",
    )


def test_c06_encoding_overlaps():
    start = time.perf_counter()
    o1 = math.exp(-abs(DEFAULT_BETA1) ** 2)
    o2 = math.exp(-abs(DEFAULT_BETA2) ** 2)
    elapsed = time.perf_counter() - start
    ok = abs(o1 / 6.6e-4 - 1.0) <= 0.05 and abs(o2 / 2.5e-3 - 1.0) <= 0.10
    assert _report(
        "C6",
        ok,
        f"e^-|b1|^2 = {o1:.3e} (ref 6.6e-4, off {abs(o1 / 6.6e-4 - 1):.1%}),"
        f" e^-|b2|^2 = {o2:.3e} (ref 2.5e-3, off {abs(o2 / 2.5e-3 - 1):.1%})"
        f" ({elapsed:.2f}s)",
    )


@pytest.mark.filterwarnings("ignore::hybridghz.errors.EncodingValidityWarning")
def test_c07_amplitude_sweep_shape():
    start = time.perf_counter()
    betas = np.linspace(1.5, 4.0, 11)
    curve = [v for _, v in ideal_bell_vs_amplitude(betas)]
    sigmas = [sigma_y_single_cavity(b) for b in betas]
    elapsed = time.perf_counter() - start
    monotone = all(a < b for a, b in zip(curve, curve[1:])) and all(
        a < b for a, b in zip(sigmas, sigmas[1:])
    )
    ok = monotone and curve[-1] >= 15.5 and sigmas[-1] >= 0.95 and elapsed < 300.0
    _report(
        "C7",
        ok,
        f"monotone={monotone}; at beta=4: <B> = {curve[-1]:.6f} (threshold 15.5),"
        f" sigma_y = {sigmas[-1]:.6f} (threshold 0.95) ({elapsed:.1f}s)",
    )
    assert monotone
    if not ok:
        # The displaced Y measurement pays e^{-pi^2/(8 b^2)} per cavity, so
        # the exact ceilings at beta = 4 are 4(1+y)^2 = 14.835 and
        # y(1+e^{-8}) = 0.926 with y = e^{-pi^2/128}. The stated thresholds
        # are crossed only near beta = 6.2 and beta = 4.9; we report the
        # honest curve instead of inflating it.
        pytest.fail(
            "amplitude-sweep thresholds exceed the closed-form values at"
            f" beta = 4: bell {curve[-1]:.6f} < 15.5, sigma_y"
            f" {sigmas[-1]:.6f} < 0.95 (ceilings 14.835 / 0.926)"
        )


def test_c08_sequence_fidelity_grid(params):
    start = time.perf_counter()
    worst = 1.0
    for alpha in (1.95, 1.99, 2.03):
        layout = standard_layout(auto_n_max(2.0 * alpha))
        for phi2 in (4.5, 4.6, 4.7):
            seq = SequenceParams(
                alpha1=alpha, alpha2=alpha, tau=tau_for_phase(params, phi2), kerr_mode=IDEAL
            )
            enc = sequence_encoding(params, resolved_sequence(seq, params))
            st = generate_ghz(params, layout, seq)
            worst = min(worst, st.fidelity_to(analytic_target_state(layout, enc, 0.0)))
    elapsed = time.perf_counter() - start
    ok = worst >= 0.999 and elapsed < 300.0
    assert _report(
        "C8",
        ok,
        f"worst fidelity over 3x3 (alpha, phi2) grid = {worst:.6f} >= 0.999"
        f" ({elapsed:.1f}s)",
    )


def test_c09_theta_sweep_fit(params, layout, ideal_seq):
    start = time.perf_counter()
    thetas = np.linspace(0.0, 2.0 * math.pi, 21)
    values = np.asarray([v for _, v in bell_theta_sweep(params, layout, ideal_seq, thetas)])
    design = np.column_stack([np.cos(thetas), np.sin(thetas), np.ones_like(thetas)])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    amplitude = math.hypot(coef[0], coef[1])
    residual = float(np.max(np.abs(values - design @ coef)))
    elapsed = time.perf_counter() - start
    ok = residual < 1e-4 * amplitude and elapsed < 600.0
    assert _report(
        "C9",
        ok,
        f"A cos(theta - theta0) + c fit: A = {amplitude:.4f}, c = {coef[2]:.4f},"
        f" relative residual = {residual / amplitude:.2e} < 1e-4 ({elapsed:.1f}s)",
    )


@pytest.mark.filterwarnings("ignore::hybridghz.errors.EncodingValidityWarning")
def test_c10_kerr_mode_soft_target(params):
    start = time.perf_counter()
    layout = standard_layout(30)
    kerr = optimize_bell(params, layout, default_sequence(params))
    ideal = optimize_bell(params, layout, default_sequence(params, kerr_mode=IDEAL))
    elapsed = time.perf_counter() - start
    bk = kerr["best_bell"]
    ok = 11.5 <= bk <= 13.5 and elapsed < 1800.0
    # documented finding, not an assertion: how far the kerr-limited optimum
    # lands from the reference simulated maximum
    assert _report(
        "C10",
        ok,
        f"optimized kerr-mode <B> = {bk:.4f} in [11.5, 13.5], deviation from"
        f" {REF_SIM_MAX} reference = {bk - REF_SIM_MAX:+.3f}; ideal mode pushes to"
        f" the alpha bound ({ideal['best_seq'].alpha1.real:.2f}) with"
        f" <B> = {ideal['best_bell']:.4f} ({elapsed:.1f}s)",
    )
    assert ideal["best_bell"] > bk


def test_c11_oracle_suites(params, layout, ideal_seq):
    start = time.perf_counter()
    rng = np.random.default_rng(3)

    def _unitary(dim):
        z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    # gate application against the full Kronecker product, dim 30 <= 64
    lo = build_layout([qubit("a"), oscillator("s", 4), oscillator("t", 2)])
    vec = rng.standard_normal(lo.total_dim) + 1j * rng.standard_normal(lo.total_dim)
    st = StateVector(lo, vec / np.linalg.norm(vec))
    worst_kron = 0.0
    for label, before, after in (("a", 1, 15), ("s", 2, 3), ("t", 10, 1)):
        u = _unitary(lo.dim_of(label))
        got = apply_mode_local(st, label, u).amplitudes
        ref = np.kron(np.kron(np.eye(before), u), np.eye(after)) @ st.amplitudes
        worst_kron = max(worst_kron, float(np.max(np.abs(got - ref))))
    for pair, before, after in ((("a", "s"), 1, 3), (("s", "t"), 2, 1)):
        u = _unitary(lo.dim_of(pair[0]) * lo.dim_of(pair[1]))
        got = apply_pair_local(st, pair[0], pair[1], u).amplitudes
        ref = np.kron(np.kron(np.eye(before), u), np.eye(after)) @ st.amplitudes
        worst_kron = max(worst_kron, float(np.max(np.abs(got - ref))))

    # displaced parity on coherent states against e^{-2|a-g|^2}
    single = build_layout([oscillator("s", 30)])
    worst_parity = 0.0
    for _ in range(50):
        alpha, gamma = (
            complex(*rng.uniform(-1.2, 1.2, size=2)),
            complex(*rng.uniform(-1.2, 1.2, size=2)),
        )
        amps, _ = coherent_amplitudes(alpha, single.dim_of("s"))
        coherent = StateVector(single, amps / np.linalg.norm(amps))
        got = displaced_parity_expect(coherent, "s", gamma)
        worst_parity = max(
            worst_parity, abs(got - math.exp(-2.0 * abs(alpha - gamma) ** 2))
        )

    # conditional Wigner branches recompose to the unconditioned function
    roomy = standard_layout(40)
    state = generate_ghz(params, roomy, ideal_seq)
    spec = GridSpec(cut=CUT_IM_IM, centers=(0j, 0j), half_width=1.0, points_per_axis=5)
    plus = conditional_joint_wigner(state, +1, spec)
    minus = conditional_joint_wigner(state, -1, spec)
    worst_total = 0.0
    offs = spec.offsets()
    for i, j in itertools.product(range(5), repeat=2):
        whole = joint_wigner(state, 1j * offs[i], 1j * offs[j])
        mixed = (
            plus.probability * plus.values[i, j]
            + minus.probability * minus.values[i, j]
        )
        worst_total = max(worst_total, abs(mixed - whole))

    elapsed = time.perf_counter() - start
    ok = (
        worst_kron < 1e-12
        and worst_parity < 1e-9
        and worst_total < 1e-9
        and elapsed < 120.0
    )
    assert _report(
        "C11",
        ok,
        f"kron oracle {worst_kron:.1e} < 1e-12; coherent displaced parity"
        f" {worst_parity:.1e} < 1e-9; conditional total law {worst_total:.1e}"
        f" < 1e-9 ({elapsed:.1f}s)",
    )


def test_c12_shot_sampling(params, ghz_ideal, default_enc):
    start = time.perf_counter()
    terms = enumerate_terms()
    model = load_detection(config_text("paper_device"))
    totals = []
    for rep in range(10):
        total = 0.0
        for k, term in enumerate(terms):
            out = sample_correlation(
                ghz_ideal, term, default_enc, 10_000, detection=model, seed=1000 * rep + k
            )
            total += term.sign * out["estimate"]
        totals.append(total)
    spread = float(np.std(totals, ddof=1))

    worst_z = 0.0
    total = var = exact_total = 0.0
    perfect = perfect_detection()
    for k, term in enumerate(terms):
        exact = term_expectation(ghz_ideal, term, default_enc)
        out = sample_correlation(
            ghz_ideal, term, default_enc, 10_000, detection=perfect, seed=777 + k
        )
        worst_z = max(worst_z, abs(out["estimate"] - exact) / out["std_error"])
        total += term.sign * out["estimate"]
        var += out["std_error"] ** 2
        exact_total += term.sign * exact
    total_z = abs(total - exact_total) / math.sqrt(var)
    elapsed = time.perf_counter() - start
    ok = 0.01 <= spread <= 0.1 and total_z < 4.0 and worst_z < 4.0 and elapsed < 300.0
    assert _report(
        "C12",
        ok,
        f"10 x 10,000-shot repeats with detection: spread = {spread:.4f}"
        f" (order 0.04); perfect detection converges with total z = {total_z:.2f},"
        f" worst per-term z = {worst_z:.2f} < 4 ({elapsed:.1f}s)",
    )
