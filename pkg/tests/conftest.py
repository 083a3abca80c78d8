from __future__ import annotations

import pytest

from iodasim.config import ScenarioConfig
from iodasim.env import EnvVariant, NavEnv
from iodasim.policies import Policy, PolicyKind, PolicySpec
from iodasim.rollouts import collect
from iodasim.runner import assemble_stack


@pytest.fixture(scope="session")
def env_c() -> NavEnv:
    return NavEnv(variant=EnvVariant.FREEZE_Y_OUTSIDE)


@pytest.fixture(scope="session")
def env_b() -> NavEnv:
    return NavEnv(variant=EnvVariant.LEAVE_PENALTY)


@pytest.fixture(scope="session")
def env_plain() -> NavEnv:
    return NavEnv(variant=EnvVariant.UNCONSTRAINED)


@pytest.fixture(scope="session")
def policy_c(env_c) -> Policy:
    return Policy(PolicySpec(kind=PolicyKind.VARIANT_C_FREEZE), env_c)


@pytest.fixture(scope="session")
def policy_b(env_b) -> Policy:
    return Policy(PolicySpec(kind=PolicyKind.VARIANT_B_SPORADIC, noise_seed=5), env_b)


@pytest.fixture(scope="session")
def policy_plain(env_plain) -> Policy:
    return Policy(PolicySpec(kind=PolicyKind.PROPORTIONAL_OPTIMAL), env_plain)


@pytest.fixture(scope="session")
def rollouts_small(policy_c):
    return collect(policy_c, n_rollouts=60, seed=11)


@pytest.fixture(scope="session")
def stack_small(rollouts_small):
    config = ScenarioConfig()
    return assemble_stack(config, rollouts_small)
