import numpy as np
import pytest
from hypothesis import settings

from blaschke_transfer.blaschke import BlaschkeProduct
from blaschke_transfer.hardy import admissible_annulus

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


MAPS = {
    "z2": BlaschkeProduct.power(2),
    "cubic03": BlaschkeProduct((0.0, 0.0, 0.3), 1.0),  # z^2 (z - 0.3)/(1 - 0.3 z)
    "mu05": BlaschkeProduct.mu_family(0.5),
    "mu_complex": BlaschkeProduct.mu_family(0.3 + 0.2j),
    "pair03": BlaschkeProduct((0.3, -0.3), 1.0),        # B(0) != 0, B(inf) finite
}

# the three maps with a worked-out spectrum in closed form
CORE = ("z2", "cubic03", "mu05")


@pytest.fixture(scope="session")
def maps():
    return MAPS


@pytest.fixture(scope="session")
def annuli():
    return {k: admissible_annulus(b) for k, b in MAPS.items()}


@pytest.fixture(params=sorted(MAPS))
def fixture_map(request, annuli):
    return request.param, MAPS[request.param], annuli[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance results, printed as one block at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
