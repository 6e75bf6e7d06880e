import pytest

from toricres.toricdata import Fan, build_ses, toric_morphism


@pytest.fixture(scope="session")
def p2():
    fan = Fan(
        rays=[(0, 1), (1, 0), (-1, -1)],
        max_cones=[(0, 1), (0, 2), (1, 2)],
        name="P2",
        product_of_projective_spaces=True,
    )
    return build_ses(fan)


@pytest.fixture(scope="session")
def p1():
    fan = Fan(rays=[(1,), (-1,)], max_cones=[(0,), (1,)], name="P1", product_of_projective_spaces=True)
    return build_ses(fan)


@pytest.fixture(scope="session")
def p1xp1():
    fan = Fan(
        rays=[(1, 0), (-1, 0), (0, 1), (0, -1)],
        max_cones=[(0, 2), (0, 3), (1, 2), (1, 3)],
        name="P1xP1",
        product_of_projective_spaces=True,
    )
    return build_ses(fan)


@pytest.fixture(scope="session")
def p1_fan():
    return Fan(rays=[(1,), (-1,)], max_cones=[(0,), (1,)], name="P1")


@pytest.fixture(scope="session")
def point_to_p2():
    return toric_morphism([], target_dim=2)


@pytest.fixture(scope="session")
def cubic_morphism():
    return toric_morphism([(2,), (3,)], target_dim=2)


@pytest.fixture(scope="session")
def quadric_morphism():
    return toric_morphism([(2,), (1,)], target_dim=2)
