import numpy as np
import pytest

from isingpulse import solve_standard

# High-precision roots of the two boundary-value problems, frozen from the
# closed-form characterization of the constant-rate angle schedules (see
# test_geodesic.py for the derivation and the live oracle that recomputes
# them).  The opening step satisfies f = cos(f*tau); the interior step
# satisfies f*tau = pi/2.
F1 = 0.520028221453108171
TAU1 = 1.96895532542416656
F2 = 1.23769811505479954
TAU2 = 1.26912718674161432
U1 = 1.04005644290621634  # = 2*F1, the constant opening-pulse amplitude
THETA1 = 1.02391233600095515  # = F1*TAU1 = arccos(F1)
ALIGN = 0.546883990793941466  # = pi/2 - THETA1 = arcsin(F1)

SQ2 = 1.0 / np.sqrt(2.0)


@pytest.fixture(scope="session")
def solutions():
    return solve_standard()


@pytest.fixture(scope="session")
def first_solution(solutions):
    return solutions["first"]


@pytest.fixture(scope="session")
def intermediate_solution(solutions):
    return solutions["intermediate"]


@pytest.fixture(scope="session")
def last_solution(solutions):
    return solutions["last"]
