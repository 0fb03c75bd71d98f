"""Measurement-imperfection model and Bell-signal visibility.

Five binary detection channels feed the joint correlation measurement:
QND readouts of q1 and q2, the terminal readout of q3, and one parity
assignment per cavity. Each channel flips its outcome independently, so the
product correlation is scaled by prod(2 p_i - 1); the first-order visibility
P0 - P1 (no-error minus exactly-one-error probability) is the commonly
quoted headline number and both are reported side by side.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import math

from .device import bundled_config_text


@dataclass(frozen=True)
class QubitReadout:
    p_gg: float
    p_ee: float
    p_m: float


@dataclass(frozen=True)
class ParityReadout:
    p00_even: float
    p00_odd: float
    p0pi_even: float
    p0pi_odd: float


@dataclass(frozen=True)
class DetectionModel:
    qubits: tuple      # (QubitReadout, QubitReadout, QubitReadout) for q1, q2, q3
    cavities: tuple    # (ParityReadout, ParityReadout) for s1, s2
    t1_q: tuple        # per-qubit T1, seconds
    readout_time: float

    def __post_init__(self):
        probs = [p for q in self.qubits for p in (q.p_gg, q.p_ee, q.p_m)]
        probs += [p for c in self.cavities
                  for p in (c.p00_even, c.p00_odd, c.p0pi_even, c.p0pi_odd)]
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("detection probabilities must lie in [0, 1]")
        if len(self.t1_q) != 3 or any(t <= 0 for t in self.t1_q):
            raise ValueError("need three positive T1 values")


@dataclass(frozen=True)
class VisibilityReport:
    p0: float
    p1: float
    visibility: float
    exact_product: float


def detection_from_dict(cfg: dict) -> DetectionModel:
    qubits = tuple(
        QubitReadout(
            p_gg=float(cfg[f"det.q{k}.pgg"]),
            p_ee=float(cfg[f"det.q{k}.pee"]),
            p_m=float(cfg[f"det.q{k}.pm"]),
        )
        for k in (1, 2, 3)
    )
    cavities = tuple(
        ParityReadout(
            p00_even=float(cfg[f"det.s{j}.p00_even"]),
            p00_odd=float(cfg[f"det.s{j}.p00_odd"]),
            p0pi_even=float(cfg[f"det.s{j}.p0pi_even"]),
            p0pi_odd=float(cfg[f"det.s{j}.p0pi_odd"]),
        )
        for j in (1, 2)
    )
    t1 = tuple(float(cfg[f"t1.q{k}_us"]) * 1e-6 for k in (1, 2, 3))
    return DetectionModel(qubits, cavities, t1, float(cfg["readout.tr_ns"]) * 1e-9)


def load_detection(text: str) -> DetectionModel:
    cfg = json.loads(text)
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")
    return detection_from_dict(cfg)


def default_detection() -> DetectionModel:
    return load_detection(bundled_config_text())


def perfect_detection() -> DetectionModel:
    q = QubitReadout(1.0, 1.0, 1.0)
    c = ParityReadout(1.0, 1.0, 1.0, 1.0)
    # T1 effectively infinite so the damping factor is 1
    return DetectionModel((q, q, q), (c, c), (1.0, 1.0, 1.0), 0.0)


def qnd_fidelity(model: DetectionModel, k: int) -> float:
    """(p_gg + p_ee)/2 for qubit k (1-based): equal weights because the GHZ
    branches put the qubit in |g> and |e> with equal probability."""
    q = model.qubits[k - 1]
    return 0.5 * (q.p_gg + q.p_ee)


def readout_fidelity_pQ(model: DetectionModel, k: int) -> float:
    """p_M (1 + exp(-T_r / 2 T1)) / 2: threshold distinguishability degraded by
    qubit damping over half the readout window."""
    q = model.qubits[k - 1]
    damping = math.exp(-model.readout_time / (2.0 * model.t1_q[k - 1]))
    return q.p_m * (1.0 + damping) / 2.0


def parity_fidelity_pS(model: DetectionModel, j: int) -> float:
    """Mean of the four protocol x parity assignment fidelities of cavity j."""
    c = model.cavities[j - 1]
    return 0.25 * (c.p00_even + c.p00_odd + c.p0pi_even + c.p0pi_odd)


def channel_fidelities(model: DetectionModel) -> dict:
    """Effective per-channel assignment fidelity for each of the five parties.

    q1 and q2 are read out QND-style before the parity measurements; q3 is
    read terminally, so its damping during the readout window matters.
    """
    return {
        "q1": qnd_fidelity(model, 1),
        "q2": qnd_fidelity(model, 2),
        "q3": readout_fidelity_pQ(model, 3),
        "s1": parity_fidelity_pS(model, 1),
        "s2": parity_fidelity_pS(model, 2),
    }


def visibility(model: DetectionModel) -> VisibilityReport:
    """First-order visibility of the Bell signal.

    P0 is the probability that no channel errs; P1 that exactly one does
    (each single error flips the product's sign). The truncation at one
    error gives V = P0 - P1; the untruncated scaling of the product
    correlation is exactly prod(2 p_i - 1), reported alongside.
    """
    ps = list(channel_fidelities(model).values())
    p0 = math.prod(ps)
    p1 = sum(
        (1.0 - p) * math.prod(q for j, q in enumerate(ps) if j != i)
        for i, p in enumerate(ps)
    )
    exact = math.prod(2.0 * p - 1.0 for p in ps)
    return VisibilityReport(p0=p0, p1=p1, visibility=p0 - p1, exact_product=exact)


def predicted_measured_bell(v: float, ideal_bell: float) -> float:
    """Detector-limited Bell expectation: visibility times the ideal value."""
    return v * ideal_bell


def as_shot_error_channels(model: DetectionModel) -> dict:
    """Independent binary flip probability (1 - p) per measurement channel,
    keyed by party label, for attachment to the shot sampler."""
    return {label: 1.0 - p for label, p in channel_fidelities(model).items()}
