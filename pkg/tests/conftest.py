import pytest

from sdym.prolongation import extract_determining_system
from sdym.tensors import load_gauge_algebra, su2_algebra

from importlib import resources


@pytest.fixture(scope="session")
def su2():
    return su2_algebra()


@pytest.fixture(scope="session")
def su3():
    with resources.as_file(resources.files("sdym.data").joinpath("su3.json")) as p:
        return load_gauge_algebra(p)


@pytest.fixture(scope="session")
def su2_system(su2):
    return extract_determining_system(su2)


@pytest.fixture(scope="session")
def su3_system(su3):
    return extract_determining_system(su3)
