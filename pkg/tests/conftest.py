"""Shared meshes and metric models, built once per session."""

import pytest

from cochainflow import (InnerProductModel, build_flat_torus,
                         build_icosahedron_sphere)


@pytest.fixture(scope="session")
def torus4():
    return build_flat_torus(4, 2)


@pytest.fixture(scope="session")
def torus8():
    return build_flat_torus(8, 2)


@pytest.fixture(scope="session")
def sphere():
    return build_icosahedron_sphere()


@pytest.fixture(scope="session")
def toy8(torus8):
    return InnerProductModel(torus8, "toy")


@pytest.fixture(scope="session")
def whitney8(torus8):
    return InnerProductModel(torus8, "whitney")
