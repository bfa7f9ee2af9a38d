import numpy as np
import pytest

import lorentz_frames as lf

STEP = 1e-3


@pytest.fixture(scope="session")
def hyperbola():
    return lf.make_gallery_curve("hyperbola").realize(STEP)[0]


@pytest.fixture(scope="session")
def helix():
    return lf.make_gallery_curve("helix").realize(STEP)[0]


@pytest.fixture(scope="session")
def line():
    return lf.make_gallery_curve("line").realize(STEP)[0]


@pytest.fixture(scope="session")
def example_2_1():
    return lf.make_gallery_curve("example-2-1").realize(STEP)[0]


@pytest.fixture(scope="session")
def example_2_2():
    return lf.make_gallery_curve("example-2-2").realize(STEP)[0]


@pytest.fixture(scope="session")
def prop_3_3():
    ptc, path = lf.make_gallery_curve("prop-3-3").realize(STEP)
    return ptc, path


@pytest.fixture(scope="session")
def hyperbola_bishop(hyperbola):
    return lf.construct_bishop(hyperbola, np.eye(4))


@pytest.fixture(scope="session")
def helix_bishop(helix):
    return lf.construct_bishop(helix, lf.default_initial_frame(helix))


@pytest.fixture(scope="session")
def helix_normal(helix):
    return lf.principal_normal_from_2regular(helix)


@pytest.fixture(scope="session")
def helix_frenet(helix):
    return lf.construct_frenet(helix)


@pytest.fixture(scope="session")
def helix_d_to_c(helix_bishop, helix_normal):
    return lf.d_to_c_transform(helix_bishop, helix_normal)
