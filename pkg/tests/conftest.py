import math

import pytest

from edgeserve_sim import kernels
from edgeserve_sim.catalog import builtin_catalog, catalog_index


def _backends():
    names = ["python"]
    try:
        kernels.backend("cython")
        names.append("cython")
    except ImportError:
        pass
    return names


BACKENDS = _backends()


@pytest.fixture(params=BACKENDS)
def kernel_backend(request, monkeypatch):
    """Runs a test once per available kernel implementation."""
    impl = kernels.backend(request.param)
    monkeypatch.setattr(kernels, "context_sum", impl.context_sum)
    monkeypatch.setattr(kernels, "utility", impl.utility)
    return request.param


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()


@pytest.fixture(scope="session")
def models(catalog):
    return catalog_index(catalog)


def closed_form_alpha(a0, one, few, k_ref):
    """Independent oracle: invert a0 + g*log2(1 + K^alpha) = few for alpha."""
    gain = one - a0
    return math.log(2 ** ((few - a0) / gain) - 1) / math.log(k_ref)
