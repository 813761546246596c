import pytest

from assisted_tunneling.config import PacketSpec, SimulationConfig, TimeGrid, alpha_barrier
from assisted_tunneling.drive import DriveSpec
from assisted_tunneling.poles import build_catalog


def make_config(barrier=None, width=4.0, drive=None, **kw):
    return SimulationConfig(
        barrier=barrier or alpha_barrier(),
        packet=PacketSpec(width),
        drive=drive or DriveSpec.off(),
        times=TimeGrid(0.0, 3.0, 61, unit="tau"),
        **kw,
    )


@pytest.fixture(scope="session")
def barrier():
    return alpha_barrier()


@pytest.fixture(scope="session")
def delta_barrier():
    return alpha_barrier().equivalent_delta()


@pytest.fixture(scope="session")
def catalog(barrier):
    return build_catalog(make_config(barrier))


@pytest.fixture(scope="session")
def delta_catalog(delta_barrier):
    return build_catalog(make_config(delta_barrier))


@pytest.fixture(scope="session")
def packet():
    return PacketSpec(4.0)
