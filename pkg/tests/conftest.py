import pytest

from app.core.models import GtrsInstance

from .test_utils import INF, instance_payload, make_instance, write_json


##################
#   INSTANCES    #
##################


@pytest.fixture
def e1() -> GtrsInstance:
    """f = -x^2, h = x^2 on [1, 4]; hard case at the upper bound."""
    return make_instance([[-1.0]], [0.0], 0.0, [[1.0]], [0.0], 0.0, 1.0, 4.0)


@pytest.fixture
def e2() -> GtrsInstance:
    """f = -x^2 + 1/2, h = 2x on [-1, 1]; exception case."""
    return make_instance([[-1.0]], [0.0], 0.5, [[0.0]], [1.0], 0.0, -1.0, 1.0)


@pytest.fixture
def e3() -> GtrsInstance:
    """f = |x|^2 - 1, h = |x|^2 on [1, 4]; hard case at the lower bound."""
    return make_instance(
        [[1.0, 0.0], [0.0, 1.0]],
        [0.0, 0.0],
        -1.0,
        [[1.0, 0.0], [0.0, 1.0]],
        [0.0, 0.0],
        0.0,
        1.0,
        4.0,
    )


@pytest.fixture
def e4() -> GtrsInstance:
    """f = -x^2 + 4, h = x^2 on [-5, 4]."""
    return make_instance([[-1.0]], [0.0], 4.0, [[1.0]], [0.0], 0.0, -5.0, 4.0)


@pytest.fixture
def interior() -> GtrsInstance:
    """f = x^2 - 4x, h = x^2 on [-10, 10]; unconstrained minimizer x = 2."""
    return make_instance([[1.0]], [-2.0], 0.0, [[1.0]], [0.0], 0.0, -10.0, 10.0)


@pytest.fixture
def infeasible() -> GtrsInstance:
    return make_instance([[1.0]], [0.0], 0.0, [[1.0]], [0.0], 0.0, -3.0, -1.0)


@pytest.fixture
def unbounded() -> GtrsInstance:
    """f = -x^2, h = x^2 with no upper bound."""
    return make_instance([[-1.0]], [0.0], 0.0, [[1.0]], [0.0], 0.0, 1.0, INF)


##################
#  INSTANCE FILES #
##################


@pytest.fixture
def e1_file(tmp_path, e1):
    return write_json(tmp_path / "e1.json", instance_payload(e1))


@pytest.fixture
def e2_file(tmp_path, e2):
    return write_json(tmp_path / "e2.json", instance_payload(e2))


@pytest.fixture
def infeasible_file(tmp_path, infeasible):
    return write_json(tmp_path / "infeasible.json", instance_payload(infeasible))
