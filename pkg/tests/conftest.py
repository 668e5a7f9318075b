import logging

import pytest
from hypothesis import HealthCheck, settings

from unipart.model import LightColor, RobotState, compute_snapshot
from unipart.geometry import Point

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

C = LightColor


def make_snap(region, me, others=(), color=C.OFF, tie=0, eps=1e-9):
    """Snapshot for a robot at ``me``; ``others`` are (position, color) pairs or bare positions."""
    robots = [RobotState(0, Point(*me), color)]
    for i, item in enumerate(others):
        if len(item) == 2 and isinstance(item[1], LightColor):
            pos, c = item
        else:
            pos, c = item, C.OFF
        robots.append(RobotState(i + 1, Point(*pos), c))
    return compute_snapshot(robots, 0, region, tie, eps)


@pytest.fixture
def snap():
    return make_snap


@pytest.fixture(autouse=True)
def _quiet_spoke_warnings(caplog):
    caplog.set_level(logging.ERROR, logger="unipart")
    yield
