import pytest

from _testfns import ensure_registered

ensure_registered()


@pytest.fixture(scope="session")
def f1_field():
    from amred.geometry import build_gradient_field

    return build_gradient_field("f1", spacing=0.05)


@pytest.fixture(scope="session")
def f2_field():
    from amred.geometry import build_gradient_field

    return build_gradient_field("f2", spacing=0.05)


@pytest.fixture(scope="session")
def f1_manifold(f1_field):
    from amred.manifold import build_active_manifold

    return build_active_manifold(f1_field)


@pytest.fixture(scope="session")
def f2_manifold(f2_field):
    from amred.manifold import build_active_manifold

    return build_active_manifold(f2_field)
