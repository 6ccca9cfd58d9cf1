"""Shared fixtures: small generated datasets reused across test modules."""

import dataclasses

import pytest

from clustercast.datagen import desk_config, generate_dataset


@pytest.fixture(scope="session")
def tiny_gen():
    """A 10-record, 3-column, length-120 generation config."""
    return dataclasses.replace(desk_config(seed=7), n_records=10, length=120)


@pytest.fixture(scope="session")
def tiny_dataset(tiny_gen):
    """Generated dataset plus its outlier log."""
    return generate_dataset(tiny_gen)
