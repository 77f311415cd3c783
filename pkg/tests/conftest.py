import numpy as np
import pytest

from relaybounds.channel import RelayChannel
from relaybounds.optimize import decode_profile, profile_dim


def random_channel(rng, max_antennas=2, complex_entries=False):
    mt = int(rng.integers(1, max_antennas + 1))
    mr = int(rng.integers(1, max_antennas + 1))
    nt = int(rng.integers(1, max_antennas + 1))
    nr = int(rng.integers(1, max_antennas + 1))

    def mat(r, c):
        m = rng.standard_normal((r, c))
        if complex_entries:
            m = m + 1j * rng.standard_normal((r, c))
        return m

    return RelayChannel(H1=mat(nr, mt), H2=mat(nt, mt), H3=mat(nt, mr),
                        gamma1=float(rng.uniform(0.1, 2.0)),
                        gamma2=float(rng.uniform(0.1, 2.0)),
                        gamma3=float(rng.uniform(0.1, 2.0)))


def random_profile(rng, ch, strategy="sc_u_first"):
    return decode_profile(rng.standard_normal(profile_dim(ch)), ch, strategy)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


#: one line per acceptance criterion, echoed after the test summary
acceptance_report = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_report:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in acceptance_report:
            terminalreporter.write_line(line)
