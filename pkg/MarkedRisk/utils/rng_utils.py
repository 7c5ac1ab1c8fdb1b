"""
Seeded random streams.

Every chunk of a Monte Carlo run draws from its own substream keyed by
(seed, chunk_index), so results do not depend on how many threads ran.
"""
import numpy as np


def validate_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValueError(f'seed must be an integer, got {seed!r}')
    if seed < 0:
        raise ValueError(f'seed must be non-negative, got {seed}')
    return int(seed)


def substream(seed: int, chunk_index: int) -> np.random.Generator:
    """
    Build the generator for one chunk.

    Args:
        seed: Run seed
        chunk_index: Zero-based chunk number

    Returns:
        Independent numpy Generator for that chunk
    """
    seed = validate_seed(seed)
    return np.random.default_rng(np.random.SeedSequence([seed, int(chunk_index)]))


def chunk_sizes(samples: int, chunk_size: int) -> list[int]:
    """Split `samples` into consecutive chunks of at most `chunk_size`."""
    if samples < 0:
        raise ValueError(f'samples must be non-negative, got {samples}')
    if chunk_size < 1:
        raise ValueError(f'chunk_size must be positive, got {chunk_size}')
    full, rest = divmod(samples, chunk_size)
    sizes = [chunk_size] * full
    if rest:
        sizes.append(rest)
    return sizes


# Chunk index reserved for draws that are not tied to a simulated chunk
AUXILIARY_STREAM = 2 ** 32 - 1


def auxiliary_stream(seed: int) -> np.random.Generator:
    """Generator for side draws of a run, disjoint from every chunk substream."""
    return substream(seed, AUXILIARY_STREAM)
