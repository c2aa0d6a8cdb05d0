import pytest

from hybridorient.observables import orientation_trace, revival_stats
from hybridorient.propagator import KickAreas, free_evolve, kick_ground


@pytest.fixture(scope="session")
def fig3_state():
    """Post-pulse state for A_HCP = 3, A_L = 1.2."""
    return kick_ground(KickAreas(3.0, 1.2))


@pytest.fixture(scope="session")
def fig3_stats(fig3_state):
    return revival_stats(orientation_trace(fig3_state), 0.5)


@pytest.fixture(scope="session")
def fig3_at_smax(fig3_state, fig3_stats):
    return free_evolve(fig3_state, fig3_stats.s_at_max)


@pytest.fixture(scope="session")
def island_state():
    return kick_ground(KickAreas(1.25, 3.7))


# one line per acceptance check, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
