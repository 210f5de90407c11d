import numpy as np
import pytest

from tokzip import DensityConfig, SelectionConfig, SyntheticSpec, generate


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def clone_bundle():
    """16 tokens: one 12-clone cluster plus 4 near-orthogonal uniques,
    attention concentrated on the unique quarter."""
    return generate(
        SyntheticSpec(
            n_tokens=16,
            dim=24,
            redundancy_fraction=0.75,
            attention_profile="concentrated",
            seed=7,
        )
    )


@pytest.fixture
def clone_density_cfg():
    # limit_k below the clone peer count (11) so exactly the clones trip it
    return DensityConfig(alpha=0.7, limit_k=3)


@pytest.fixture
def selection_cfg():
    return SelectionConfig(seed=0)
