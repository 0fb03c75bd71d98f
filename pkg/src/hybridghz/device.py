"""Device parameters and the diagonal dispersive Hamiltonian.

The config format is a flat JSON object with dotted keys; dispersive and
Kerr couplings are stored as chi/2pi in MHz (as a device datasheet would
print them) and converted to angular frequency once, at Hamiltonian build.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .fockspace import (
    DiagonalOperator,
    SystemLayout,
    TWO_LEVEL,
    build_layout,
    occupation_vector,
    oscillator,
    qubit,
)

QUBIT_LABELS = ("q1", "q2", "q3")
CAVITY_LABELS = ("s1", "s2")

_REQUIRED_KEYS = (
    "chi.q1s1_mhz",
    "chi.q2s2_mhz",
    "chi.q3s1_mhz",
    "chi.q3s2_mhz",
    "t1.q1_us",
    "t1.q2_us",
    "t1.q3_us",
    "readout.tr_ns",
)

# absent Kerr and qubit-qubit couplings mean "too small to resolve", i.e. zero
_OPTIONAL_KEYS = (
    "kerr.s1_mhz",
    "kerr.s2_mhz",
    "kerr.s1s2_mhz",
    "chi.q1q2_mhz",
    "chi.q1q3_mhz",
    "chi.q2q3_mhz",
)


@dataclass(frozen=True)
class DeviceParams:
    """Couplings as ordinary frequencies (chi/2pi, Hz); times in seconds."""

    chi_q1_s1: float
    chi_q2_s2: float
    chi_q3_s1: float
    chi_q3_s2: float
    kerr_s1: float = 0.0
    kerr_s2: float = 0.0
    cross_kerr_s1_s2: float = 0.0
    chi_q1_q2: float = 0.0
    chi_q1_q3: float = 0.0
    chi_q2_q3: float = 0.0
    t1_q: tuple = (1.0, 1.0, 1.0)
    readout_time: float = 0.0

    def __post_init__(self):
        couplings = (
            self.chi_q1_s1, self.chi_q2_s2, self.chi_q3_s1, self.chi_q3_s2,
            self.kerr_s1, self.kerr_s2, self.cross_kerr_s1_s2,
            self.chi_q1_q2, self.chi_q1_q3, self.chi_q2_q3,
        )
        if any(c < 0 for c in couplings):
            raise ValueError("couplings are stored as magnitudes and must be >= 0")
        if len(self.t1_q) != 3 or any(t <= 0 for t in self.t1_q):
            raise ValueError("need three positive T1 values")
        if self.readout_time < 0:
            raise ValueError("readout time must be >= 0")


def device_from_dict(cfg: dict) -> DeviceParams:
    missing = [k for k in _REQUIRED_KEYS if k not in cfg]
    if missing:
        raise KeyError(f"config is missing required keys: {missing}")
    bad = [k for k in _REQUIRED_KEYS + _OPTIONAL_KEYS if float(cfg.get(k, 0.0)) < 0]
    if bad:
        raise ValueError(f"negative values for keys: {bad}")
    mhz = 1e6
    return DeviceParams(
        chi_q1_s1=float(cfg["chi.q1s1_mhz"]) * mhz,
        chi_q2_s2=float(cfg["chi.q2s2_mhz"]) * mhz,
        chi_q3_s1=float(cfg["chi.q3s1_mhz"]) * mhz,
        chi_q3_s2=float(cfg["chi.q3s2_mhz"]) * mhz,
        kerr_s1=float(cfg.get("kerr.s1_mhz", 0.0)) * mhz,
        kerr_s2=float(cfg.get("kerr.s2_mhz", 0.0)) * mhz,
        cross_kerr_s1_s2=float(cfg.get("kerr.s1s2_mhz", 0.0)) * mhz,
        chi_q1_q2=float(cfg.get("chi.q1q2_mhz", 0.0)) * mhz,
        chi_q1_q3=float(cfg.get("chi.q1q3_mhz", 0.0)) * mhz,
        chi_q2_q3=float(cfg.get("chi.q2q3_mhz", 0.0)) * mhz,
        t1_q=tuple(float(cfg[f"t1.q{k}_us"]) * 1e-6 for k in (1, 2, 3)),
        readout_time=float(cfg["readout.tr_ns"]) * 1e-9,
    )


def load_device(text: str) -> DeviceParams:
    """Parse a flat JSON config string into DeviceParams."""
    cfg = json.loads(text)
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")
    return device_from_dict(cfg)


def bundled_config_text(name: str = "paper_device") -> str:
    """Text of a config shipped with the package (without the .json suffix)."""
    return resources.files(__package__).joinpath(f"configs/{name}.json").read_text()


def config_text(name_or_path: str) -> str:
    """Resolve a config argument: a bundled name first, then a filesystem path."""
    try:
        return bundled_config_text(name_or_path)
    except (FileNotFoundError, ModuleNotFoundError):
        pass
    with open(name_or_path, "r", encoding="utf-8") as fh:
        return fh.read()


def default_device() -> DeviceParams:
    return load_device(bundled_config_text())


def standard_layout(n_max: int = 30) -> SystemLayout:
    """The canonical five-mode layout (q1, q2, q3, s1, s2), row-major."""
    return build_layout(
        [qubit("q1"), qubit("q2"), qubit("q3"),
         oscillator("s1", n_max), oscillator("s2", n_max)]
    )


def _check_canonical(layout: SystemLayout):
    if layout.labels != ("q1", "q2", "q3", "s1", "s2"):
        raise ValueError(f"expected modes (q1, q2, q3, s1, s2), got {layout.labels}")
    if any(layout.modes[i].kind != TWO_LEVEL for i in range(3)):
        raise ValueError("q1, q2, q3 must be two-level modes")


def dispersive_hamiltonian(
    params: DeviceParams,
    layout: SystemLayout,
    include_kerr: bool = True,
    include_qubit_qubit: bool = False,
) -> DiagonalOperator:
    """Diagonal H/hbar in rad/s over the canonical layout.

    H = -2pi [ chi_q1s1 n1 q1 + chi_q3s1 n1 q3 + chi_q2s2 n2 q2 + chi_q3s2 n2 q3 ]
        -2pi [ kerr_s1 n1(n1-1)/2 + kerr_s2 n2(n2-1)/2 + cross_kerr n1 n2 ]   (if include_kerr)
        -2pi [ chi_q1q2 q1 q2 + chi_q1q3 q1 q3 + chi_q2q3 q2 q3 ]             (if include_qubit_qubit)

    with q_k in {0,1} the qubit excitation and n_j the Fock index. The
    qubit-qubit terms are state-independent phases on the two GHZ branches
    (absorbable into the branch-phase knob), hence excluded by default.
    """
    _check_canonical(layout)
    q1 = occupation_vector(layout, "q1")
    q2 = occupation_vector(layout, "q2")
    q3 = occupation_vector(layout, "q3")
    n1 = occupation_vector(layout, "s1")
    n2 = occupation_vector(layout, "s2")
    two_pi = 2.0 * np.pi
    h = -two_pi * (
        params.chi_q1_s1 * n1 * q1
        + params.chi_q3_s1 * n1 * q3
        + params.chi_q2_s2 * n2 * q2
        + params.chi_q3_s2 * n2 * q3
    )
    if include_kerr:
        h = h - two_pi * (
            0.5 * params.kerr_s1 * n1 * (n1 - 1.0)
            + 0.5 * params.kerr_s2 * n2 * (n2 - 1.0)
            + params.cross_kerr_s1_s2 * n1 * n2
        )
    if include_qubit_qubit:
        h = h - two_pi * (
            params.chi_q1_q2 * q1 * q2
            + params.chi_q1_q3 * q1 * q3
            + params.chi_q2_q3 * q2 * q3
        )
    return DiagonalOperator(layout, h)


def conditional_phase_angles(params: DeviceParams, tau: float):
    """Cavity phase angles (phi1, phi2) accumulated on the q3-excited branch
    after free dispersive evolution for tau seconds: phi_j = 2 pi chi_q3_sj tau."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    two_pi = 2.0 * np.pi
    return two_pi * params.chi_q3_s1 * tau, two_pi * params.chi_q3_s2 * tau


def tau_for_phase(params: DeviceParams, phi2: float) -> float:
    """Interaction time giving the requested phi2 on the second cavity."""
    if phi2 < 0:
        raise ValueError("phi2 must be >= 0")
    return phi2 / (2.0 * np.pi * params.chi_q3_s2)
