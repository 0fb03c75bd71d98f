"""Numerical model of a five-partite hybrid GHZ experiment: three qubits
and two cavity modes under always-on dispersive coupling, with displaced-
parity tomography and a 16-term Bell test over the joint state."""

from .detection import (
    DetectionModel,
    VisibilityReport,
    default_detection,
    load_detection,
    perfect_detection,
    predicted_measured_bell,
    visibility,
)
from .device import (
    DeviceParams,
    config_text,
    default_device,
    dispersive_hamiltonian,
    load_device,
    standard_layout,
    tau_for_phase,
)
from .errors import AncillaNotResetError, EncodingValidityWarning, TruncationError
from .fockspace import (
    ModeSpec,
    StateVector,
    SystemLayout,
    basis_state,
    build_layout,
    coherent_amplitudes,
    evolve_diagonal,
    ground_state,
    oscillator,
    product_state,
    qubit,
    reduced_density,
)
from .ghzbuilder import (
    CatEncoding,
    SequenceParams,
    analytic_target_state,
    default_sequence,
    extract_beta,
    generate_ghz,
    resolved_sequence,
    sequence_encoding,
)
from .mermin import (
    BellTerm,
    bell_expectation,
    bell_theta_sweep,
    classical_bound_bruteforce,
    enumerate_terms,
    four_partite_bound_check,
    ideal_bell_vs_amplitude,
    measurement_plan,
    optimize_bell,
    sample_correlation,
    sigma_y_single_cavity,
    term_expectation,
    theta_maximized_bell,
)
from .pulsesim import (
    ParityProtocol,
    conditional_qubit_rotation,
    displace,
    displacement_matrix,
    measure_qubit,
    parity_map,
    rotate_qubit,
    rotation_matrix,
)
from .tomography import (
    GridSpec,
    WignerGrid,
    conditional_joint_wigner,
    conditional_single_wigner,
    displaced_parity_expect,
    joint_wigner,
)

__version__ = "0.1.0"
