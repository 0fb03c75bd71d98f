import pytest

from hybridghz import default_device, default_sequence, generate_ghz, standard_layout
from hybridghz.ghzbuilder import IDEAL, resolved_sequence, sequence_encoding


@pytest.fixture(scope="session")
def params():
    return default_device()


@pytest.fixture(scope="session")
def layout():
    return standard_layout(30)


@pytest.fixture(scope="session")
def ideal_seq(params):
    return default_sequence(params, kerr_mode=IDEAL)


@pytest.fixture(scope="session")
def default_enc(params, ideal_seq):
    return sequence_encoding(params, resolved_sequence(ideal_seq, params))


@pytest.fixture(scope="session")
def ghz_ideal(params, layout, ideal_seq):
    # shared read-only state; every operation in the package is functional
    return generate_ghz(params, layout, ideal_seq)
