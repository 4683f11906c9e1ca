import numpy as np
import pytest

from swarmlimit import Objective


def linear_cost(dim: int = 1) -> Objective:
    """E(x) = x_1, declared on the unit box; handy for hand-checkable oracles."""
    return Objective(
        name="linear",
        dim=dim,
        eval=lambda x: x[:, 0].copy(),
        minimizer=np.zeros(dim),
        lower_bound=0.0,
        upper_bound=1.0,
        lipschitz_l=np.inf,  # the weighted form has no finite constant at 0
        test_box=np.stack([np.zeros(dim), np.ones(dim)]),
    )


class RecordingTape:
    """Tape wrapper logging every consumed block, for coupling checks."""

    def __init__(self, tape):
        self.tape = tape
        self.log = {}

    def theta_block(self, r, n, ch=1):
        block = self.tape.theta_block(r, n, ch)
        self.log[(r, n, ch)] = block.copy()
        return block


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
