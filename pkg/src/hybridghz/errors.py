"""Exception and warning types used across the simulator."""


class TruncationError(RuntimeError):
    """A displacement would push significant population past the Fock cutoff."""


class AncillaNotResetError(RuntimeError):
    """A qubit that must start in |g> carries excited-state population."""


class EncodingValidityWarning(UserWarning):
    """Cat amplitudes too small for {|0>, |beta>} to act as a logical qubit."""
