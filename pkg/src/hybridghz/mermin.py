"""The 16-term five-partite Bell operator and everything measured with it.

Parties are ordered (q1, q2, q3, s1, s2) with the logical relabeling
|up> = (|e>, |g>, |g>, |0>, |beta2>) and |down> = (|g>, |e>, |e>, |beta1>,
|0>), under which the GHZ state is a +16 extremum of

    B = XXXXX - sum(two Y's) + sum(four Y's)

i.e. the real part of the raised-operator product (X+iY)^x5. Qubit X and Y
are read out through pi/2 pre-rotations and a ground/excited measurement;
cavity X and Y are displaced-parity measurements, with the Y plan adding a
quarter-fringe displacement perpendicular to the branch separation. All
binary outcomes map |g>/even to +1.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .detection import DetectionModel, as_shot_error_channels
from .device import DeviceParams, standard_layout
from .errors import TruncationError
from .fockspace import (
    StateVector,
    SystemLayout,
    apply_mode_local,
    build_layout,
    coherent_amplitudes,
    occupation_vector,
    oscillator,
)
from .ghzbuilder import (
    CatEncoding,
    SequenceParams,
    analytic_target_state,
    generate_ghz,
    resolved_sequence,
    sequence_encoding,
)
from .pulsesim import (
    AXIS_MINUS_X,
    AXIS_MINUS_Y,
    AXIS_X,
    BlochAxis,
    displace,
    rotation_matrix,
)

log = logging.getLogger(__name__)

X = "X"
Y = "Y"

QUBIT_PARTIES = ("q1", "q2", "q3")
CAVITY_PARTIES = ("s1", "s2")

# Sign of the quarter-fringe Y displacement per cavity; opposite because the
# two encodings put |0> on opposite logical poles.
EPSILONS = (-1, +1)


@dataclass(frozen=True)
class BellTerm:
    """One correlation of the Bell operator: five X/Y letters and the sign
    it enters the sum with."""

    letters: tuple
    sign: int


@dataclass(frozen=True)
class MeasurementPlan:
    """Concrete pulse settings measuring one term: a pre-rotation axis per
    qubit (all pi/2 pulses) and a parity displacement per cavity."""

    qubit_axes: tuple
    cavity_gammas: tuple


def enumerate_terms() -> list:
    """The 16 terms: XXXXX (+1), the 10 two-Y permutations (-1), and the 5
    four-Y permutations (+1), in lexicographic letter order."""
    terms = []
    for n_y in (0, 2, 4):
        sign = +1 if n_y % 4 == 0 else -1
        for positions in itertools.combinations(range(5), n_y):
            letters = tuple(Y if k in positions else X for k in range(5))
            terms.append(BellTerm(letters, sign))
    return sorted(terms, key=lambda t: t.letters)


def qubit_measurement_axis(letter: str, party_index: int) -> BlochAxis:
    """Pre-rotation axis reading a qubit letter out as a +-1 ground/excited
    outcome. The q1 relabeling (|up> = |e>) inverts its y and z axes, so
    its Y readout uses the opposite rotation sense."""
    if letter == X:
        return AXIS_MINUS_Y
    if letter == Y:
        return AXIS_MINUS_X if party_index == 0 else AXIS_X
    raise ValueError(f"unknown letter {letter!r}")


def cavity_measurement_gamma(letter: str, beta: complex, epsilon: int) -> complex:
    """Parity displacement reading a cavity letter on the {|0>, |beta>} pair.

    X mirrors the two branches into each other: gamma = beta/2. Y adds a
    quarter-fringe offset of length pi/(4|beta|) perpendicular to the
    branch separation, so the parity fringes sample the imaginary part of
    the branch coherence whatever the encoding's orientation in phase
    space. A zero beta has no branch direction; the offset degenerates to
    nothing.
    """
    if letter == X:
        return beta / 2.0
    if letter == Y:
        if beta == 0:
            return 0j
        return beta / 2.0 - 1j * epsilon * (math.pi / 4.0) * beta / abs(beta) ** 2
    raise ValueError(f"unknown letter {letter!r}")


def measurement_plan(term: BellTerm, enc: CatEncoding) -> MeasurementPlan:
    axes = tuple(qubit_measurement_axis(term.letters[k], k) for k in range(3))
    betas = (enc.beta1, enc.beta2)
    gammas = tuple(
        cavity_measurement_gamma(term.letters[3 + j], betas[j], EPSILONS[j])
        for j in range(2)
    )
    return MeasurementPlan(qubit_axes=axes, cavity_gammas=gammas)


@lru_cache(maxsize=None)
def _outcome_sign_vector(layout: SystemLayout) -> np.ndarray:
    """Product of the five binary outcome values (+1 for |g>/even) over the
    flat basis (read-only)."""
    v = np.ones(layout.total_dim)
    for label in QUBIT_PARTIES + CAVITY_PARTIES:
        v = v * np.where(occupation_vector(layout, label) % 2 == 0, 1.0, -1.0)
    v.setflags(write=False)
    return v


def _apply_plan(state: StateVector, plan: MeasurementPlan) -> StateVector:
    """Rotate the qubits and displace the cavities into the measurement
    frame; the five outcomes are then plain g/e and parity readouts."""
    for k, label in enumerate(QUBIT_PARTIES):
        state = apply_mode_local(
            state, label, rotation_matrix(plan.qubit_axes[k], math.pi / 2.0)
        )
    for j, label in enumerate(CAVITY_PARTIES):
        state = displace(state, label, -plan.cavity_gammas[j])
    return state


def term_expectation(state: StateVector, term: BellTerm, enc: CatEncoding) -> float:
    """Exact expectation of one term's five-operator product, in [-1, 1]."""
    measured = _apply_plan(state, measurement_plan(term, enc))
    signs = _outcome_sign_vector(state.layout)
    return float(np.sum(np.abs(measured.amplitudes) ** 2 * signs))


def bell_expectation(state: StateVector, enc: CatEncoding) -> float:
    """<B> = sum of sign * term over the 16 terms.

    The four cavity displacement combinations are shared across terms, so
    the heavy mode-local products run 6 times rather than 32.
    """
    betas = (enc.beta1, enc.beta2)
    shifted = {}
    for a in (X, Y):
        s1 = displace(state, "s1", -cavity_measurement_gamma(a, betas[0], EPSILONS[0]))
        for b in (X, Y):
            shifted[a + b] = displace(
                s1, "s2", -cavity_measurement_gamma(b, betas[1], EPSILONS[1])
            )
    signs = _outcome_sign_vector(state.layout)
    total = 0.0
    for term in enumerate_terms():
        psi = shifted[term.letters[3] + term.letters[4]]
        for k, label in enumerate(QUBIT_PARTIES):
            psi = apply_mode_local(
                psi,
                label,
                rotation_matrix(
                    qubit_measurement_axis(term.letters[k], k), math.pi / 2.0
                ),
            )
        total += term.sign * float(np.sum(np.abs(psi.amplitudes) ** 2 * signs))
    return total


def bell_theta_sweep(
    params: DeviceParams, layout: SystemLayout, seq: SequenceParams, thetas
) -> list:
    """(theta, <B>) pairs for the generated state; the encoding, and hence
    the measurement plan, is theta-independent."""
    seq = resolved_sequence(seq, params)
    enc = sequence_encoding(params, seq)
    out = []
    for theta in thetas:
        state = generate_ghz(params, layout, replace(seq, theta=float(theta)))
        out.append((float(theta), bell_expectation(state, enc)))
    return out


def theta_maximized_bell(
    params: DeviceParams, layout: SystemLayout, seq: SequenceParams
) -> tuple:
    """(theta*, max <B>) from three sweep samples.

    <B>(theta) is exactly c + a cos(theta) + b sin(theta): the operator
    couples only the two branches, whose relative weight enters through
    e^{-i theta} alone. Three samples therefore fix the whole curve.
    """
    samples = bell_theta_sweep(params, layout, seq, (0.0, math.pi / 2.0, math.pi))
    b0, b1, b2 = (v for _, v in samples)
    c = 0.5 * (b0 + b2)
    a, b = b0 - c, b1 - c
    theta_star = math.atan2(b, a) % (2.0 * math.pi)
    return theta_star, c + math.hypot(a, b)


def auto_n_max(beta_mag: float) -> int:
    """Fock cutoff holding a displaced blob of amplitude beta_mag with
    negligible top-band population."""
    return max(30, math.ceil(beta_mag**2 + 8.0 * beta_mag))


def ideal_bell_vs_amplitude(betas) -> list:
    """(beta, <B>) for the analytic target with beta1 = beta2 = beta at
    theta = 0, where the branch-phase cosine of the ideal state peaks.

    Small beta triggers the encoding-validity warning and is evaluated
    anyway; the curve is meant to extend into the degenerate region.
    """
    out = []
    for beta in betas:
        beta = float(beta)
        if beta < 0:
            raise ValueError("beta must be >= 0")
        layout = standard_layout(auto_n_max(beta))
        enc = CatEncoding(beta, beta)
        state = analytic_target_state(layout, enc, 0.0)
        out.append((beta, bell_expectation(state, enc)))
    return out


def sigma_y_single_cavity(beta: float) -> float:
    """Y-plan displaced parity on the single-cavity state (|0> + i|beta>)/N,
    the +1 eigenstate of the encoded sigma_y."""
    beta = float(beta)
    if beta <= 0:
        raise ValueError("beta must be > 0")
    layout = build_layout([oscillator("s", auto_n_max(beta))])
    c, _ = coherent_amplitudes(beta, layout.dim_of("s"))
    vac = np.zeros_like(c)
    vac[0] = 1.0
    amps = vac + 1j * c
    state = StateVector(layout, amps / np.linalg.norm(amps))
    gamma = cavity_measurement_gamma(Y, beta, EPSILONS[0])
    measured = displace(state, "s", -gamma)
    signs = np.where(occupation_vector(layout, "s") % 2 == 0, 1.0, -1.0)
    return float(np.sum(np.abs(measured.amplitudes) ** 2 * signs))


_ASSIGNMENTS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def _strategy_values(terms) -> list:
    """Bell value of every deterministic local strategy (x_k, y_k per
    party), in integer arithmetic."""
    values = []
    for assign in itertools.product(_ASSIGNMENTS, repeat=5):
        total = 0
        for term in terms:
            p = term.sign
            for k, letter in enumerate(term.letters):
                p *= assign[k][0] if letter == X else assign[k][1]
            total += p
        values.append(total)
    return values


def classical_bound_bruteforce() -> int:
    """Maximum of <B> over all 4^5 = 1024 deterministic local strategies."""
    return max(_strategy_values(enumerate_terms()))


_PAULI = {
    X: np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    Y: np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
}


@lru_cache(maxsize=1)
def bell_matrix() -> np.ndarray:
    """The 32 x 32 Bell operator over five exact two-level parties."""
    b = np.zeros((32, 32), dtype=complex)
    for term in enumerate_terms():
        m = np.array([[1.0]], dtype=complex)
        for letter in term.letters:
            m = np.kron(m, _PAULI[letter])
        b += term.sign * m
    b.setflags(write=False)
    return b


def _phase_ascended_abs(psi: np.ndarray, sweeps: int = 3) -> float:
    """Coordinate-ascend <B> over per-party Rz phases and return |<B>|.

    Per party the value is c + a cos(phi) + b sin(phi) exactly (every term
    carries exactly one X or Y on that party), so three samples give the
    coordinate optimum in closed form. A pi phase on any single party
    negates every term, so maximizing the value also covers the minimum.
    """
    b = bell_matrix()

    def value(v):
        return float(np.real(np.vdot(v, b @ v)))

    psi = psi.reshape([2] * 5)
    for _ in range(sweeps):
        for party in range(5):
            samples = []
            for phi in (0.0, math.pi / 2.0, math.pi):
                rot = np.moveaxis(psi.copy(), party, 0)
                rot[1] *= np.exp(1j * phi)
                samples.append(value(np.moveaxis(rot, 0, party).reshape(-1)))
            v0, v1, v2 = samples
            c = 0.5 * (v0 + v2)
            a, bb = v0 - c, v1 - c
            best = math.atan2(bb, a)
            rot = np.moveaxis(psi, party, 0)
            rot[1] *= np.exp(1j * best)
            psi = np.moveaxis(rot, 0, party)
    return abs(value(psi.reshape(-1)))


def four_partite_bound_check(samples: int, seed: int = 0) -> dict:
    """Check that states with at most 4-partite entanglement stay at or
    below 8.

    Each sample is a Haar-ish random 4-party state tensored with a random
    single party, cycling the unentangled slot over all 5 positions, phase-
    ascended toward the largest |<B>| it can reach. GHZ4 x |+> saturates
    the bound exactly and is evaluated alongside.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    b = bell_matrix()

    ghz4 = np.zeros(16, dtype=complex)
    ghz4[0] = ghz4[15] = 1.0 / math.sqrt(2.0)
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    reference = np.kron(ghz4, plus)
    ghz4_value = float(np.real(np.vdot(reference, b @ reference)))

    max_abs = 0.0
    for k in range(samples):
        slot = k % 5
        part4 = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        part1 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        part4 /= np.linalg.norm(part4)
        part1 /= np.linalg.norm(part1)
        full = np.multiply.outer(part4.reshape([2] * 4), part1)
        psi = np.moveaxis(full, 4, slot).reshape(-1)
        max_abs = max(max_abs, _phase_ascended_abs(psi))
    return {
        "samples": samples,
        "max_abs": max_abs,
        "bound": 8.0,
        "all_within": max_abs <= 8.0 + 1e-6,
        "ghz4_value": ghz4_value,
    }


def _even_odd_indicator(dim: int) -> np.ndarray:
    ind = np.zeros((dim, 2))
    ind[0::2, 0] = 1.0
    ind[1::2, 1] = 1.0
    return ind


def sample_correlation(
    state: StateVector,
    term: BellTerm,
    enc: CatEncoding,
    shots: int,
    detection: DetectionModel | None = None,
    seed: int = 0,
) -> dict:
    """Monte Carlo estimate of one term from binary shot outcomes.

    The 32-way outcome distribution (8 qubit patterns x 2 parities x 2
    parities) is exact, so shots are drawn multinomially per category.
    Independent detection flips alter the +-1 product only through their
    count's parity, so they reduce to one Bernoulli flip per shot with
    p = (1 - prod(1 - 2 f_i)) / 2.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    measured = _apply_plan(state, measurement_plan(term, enc))
    layout = measured.layout
    axes = [layout.index(lb) for lb in QUBIT_PARTIES + CAVITY_PARTIES]
    w = np.moveaxis(np.abs(measured.tensor()) ** 2, axes, range(5))
    e1 = _even_odd_indicator(w.shape[3])
    e2 = _even_odd_indicator(w.shape[4])
    probs = np.einsum("abcnm,ne,mf->abcef", w, e1, e2).reshape(-1)
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise RuntimeError(f"outcome probabilities sum to {total:.12f}")
    probs /= total

    outcome = np.array([1.0, -1.0])
    values = np.einsum(
        "a,b,c,e,f->abcef", outcome, outcome, outcome, outcome, outcome
    ).reshape(-1)

    p_flip = 0.0
    if detection is not None:
        flips = as_shot_error_channels(detection)
        keep = math.prod(1.0 - 2.0 * flips[lb] for lb in QUBIT_PARTIES + CAVITY_PARTIES)
        p_flip = 0.5 * (1.0 - keep)

    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    flipped = rng.binomial(counts, p_flip) if p_flip > 0.0 else np.zeros_like(counts)
    mean = float(np.sum(values * (counts - 2 * flipped)) / shots)
    if shots > 1:
        std_error = math.sqrt(max(0.0, 1.0 - mean**2) / (shots - 1))
    else:
        std_error = 0.0
    return {"estimate": mean, "std_error": std_error}


def optimize_bell(
    params: DeviceParams,
    layout: SystemLayout,
    init: SequenceParams,
    bounds: tuple = ((0.5, 3.0), (1e-8, 1e-6)),
) -> dict:
    """Maximize the theta-optimal <B> over (alpha, tau) with alpha1 =
    alpha2 = alpha real, coarse 11 x 11 grid first, then a bounded
    Nelder-Mead refinement restarted once from its own optimum.

    alpha3/alpha4 follow the ideal closure at every trial point, and each
    trial runs on a Fock cutoff sized for its own worst-case branch
    amplitude 2 alpha (never below the supplied layout's). Trials that
    overflow the truncation guard score -inf and are skipped with a log
    line.
    """
    (a_lo, a_hi), (t_lo, t_hi) = bounds
    if not (0.0 < a_lo < a_hi and 0.0 < t_lo < t_hi):
        raise ValueError(f"unusable bounds {bounds}")
    floor_n = max(m.dim for m in layout.modes) - 1
    trace = []

    def objective(alpha: float, tau: float, stage: str) -> float:
        seq = replace(
            init, alpha1=alpha, alpha2=alpha, tau=tau, alpha3=None, alpha4=None
        )
        trial_layout = standard_layout(max(floor_n, auto_n_max(2.0 * alpha)))
        try:
            theta_star, best = theta_maximized_bell(params, trial_layout, seq)
        except TruncationError as err:
            log.warning("skipping (alpha=%.4f, tau=%.4g s): %s", alpha, tau, err)
            return -math.inf
        trace.append(
            {"stage": stage, "alpha": alpha, "tau": tau, "theta": theta_star, "bell": best}
        )
        return best

    best_alpha = min(max(float(init.alpha1.real), a_lo), a_hi)
    best_tau = min(max(init.tau, t_lo), t_hi)
    best_value = objective(best_alpha, best_tau, "init")

    for alpha in np.linspace(a_lo, a_hi, 11):
        for tau in np.linspace(t_lo, t_hi, 11):
            value = objective(float(alpha), float(tau), "grid")
            if value > best_value:
                best_alpha, best_tau, best_value = float(alpha), float(tau), value

    def neg(x):
        alpha = a_lo + x[0] * (a_hi - a_lo)
        tau = t_lo + x[1] * (t_hi - t_lo)
        return -objective(alpha, tau, "simplex")

    x0 = np.array(
        [(best_alpha - a_lo) / (a_hi - a_lo), (best_tau - t_lo) / (t_hi - t_lo)]
    )
    for _ in range(2):
        result = minimize(
            neg,
            x0,
            method="Nelder-Mead",
            bounds=[(0.0, 1.0), (0.0, 1.0)],
            options={"xatol": 1e-3, "fatol": 1e-4, "maxfev": 80},
        )
        x0 = result.x
    for point in trace:
        if point["bell"] > best_value:
            best_alpha, best_tau, best_value = point["alpha"], point["tau"], point["bell"]

    best_theta = next(
        p["theta"]
        for p in trace
        if p["alpha"] == best_alpha and p["tau"] == best_tau and p["bell"] == best_value
    )
    best_seq = replace(
        init,
        alpha1=best_alpha,
        alpha2=best_alpha,
        tau=best_tau,
        alpha3=None,
        alpha4=None,
        theta=best_theta,
    )
    return {"best_seq": best_seq, "best_bell": best_value, "trace": trace}
