import pytest

from hybridplan.generators import (
    BlocksDatasetConfig,
    MazeDatasetConfig,
    generate_blocks_dataset,
    generate_maze_dataset,
)


@pytest.fixture(scope="session")
def maze_dataset():
    """Full paper-recipe maze dataset (3200/400/400, lengths 1-8)."""
    return generate_maze_dataset(1, MazeDatasetConfig())


@pytest.fixture(scope="session")
def blocks_dataset():
    """Full paper-recipe blocks dataset (3000/250/200)."""
    return generate_blocks_dataset(1, BlocksDatasetConfig())


@pytest.fixture(scope="session")
def small_maze_dataset():
    return generate_maze_dataset(2, MazeDatasetConfig(split_sizes=(160, 40, 40)))


@pytest.fixture(scope="session")
def small_blocks_dataset():
    return generate_blocks_dataset(2, BlocksDatasetConfig(split_sizes=(60, 20, 20)))
