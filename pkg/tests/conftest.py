import pytest

from curves import dumbbell, theta


@pytest.fixture
def db():
    return dumbbell()


@pytest.fixture
def th():
    return theta()
