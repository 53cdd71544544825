import numpy as np
import pytest

import isac_lab as il


@pytest.fixture(scope="session")
def config1():
    """Desk numerology with a single UE."""
    return il.desk_config(n_ues=1)


@pytest.fixture(scope="session")
def target(config1):
    """Unit-amplitude single-path target at 50 m / 20 m/s."""
    return il.make_target_channel(config1, 50.0, 20.0,
                                  np.deg2rad(60.0), np.deg2rad(90.0))


def single_ue_assignment(indices):
    return il.ResourceAssignment(ue_index=1, subcarriers=tuple(indices),
                                 symbols=tuple(indices))


@pytest.fixture(scope="session")
def interleaved_assignment():
    return single_ue_assignment(il.TABLE1_SINGLE_UE["interleaved"])
