import pytest

from pk_levy import (
    CompoundPoisson,
    DeterministicLaw,
    ExponentialLaw,
    GammaSubordinator,
    LevyModel,
    NoJumps,
    StableSmallJumps,
    UniformLaw,
    exponent_view,
    validate,
)


def mixed_model():
    """c=2, sigma2=1, exponential jumps at rate 1 with mean 1."""
    return validate(LevyModel(drift_c=2.0, sigma2=1.0, jumps=CompoundPoisson(1.0, ExponentialLaw(1.0))))


def brownian_model():
    return validate(LevyModel(drift_c=1.0, sigma2=2.0, jumps=NoJumps()))


def mm1_model():
    return validate(LevyModel(drift_c=1.0, sigma2=0.0, jumps=CompoundPoisson(0.5, ExponentialLaw(1.0))))


def stable_model():
    return validate(LevyModel(mu=1.0, sigma2=0.0, jumps=StableSmallJumps(1.0, 1.5)))


def gamma_model():
    return validate(LevyModel(drift_c=2.0, sigma2=0.5, jumps=GammaSubordinator(1.0, 1.0)))


def deterministic_model():
    return validate(LevyModel(drift_c=1.0, sigma2=0.0, jumps=CompoundPoisson(0.25, DeterministicLaw(2.0))))


def uniform_model():
    return validate(LevyModel(drift_c=1.5, sigma2=0.5, jumps=CompoundPoisson(1.0, UniformLaw(2.0))))


@pytest.fixture
def mixed():
    return mixed_model()


@pytest.fixture
def mixed_view():
    return exponent_view(mixed_model())


@pytest.fixture
def brownian():
    return brownian_model()


@pytest.fixture
def mm1():
    return mm1_model()


@pytest.fixture
def stable():
    return stable_model()
