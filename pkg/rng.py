"""Counter-based random streams.

Every generator is Philox keyed by SeedSequence([seed, stream, index]), so
trial t or restart k of a run is reproducible on its own, independent of how
many other trials ran before it or on which thread.
"""

from enum import IntEnum

import numpy as np

from linalg import sign


class Stream(IntEnum):
    TRIAL = 1
    RESTART = 2
    SPLIT = 3
    NOISE = 4
    CHECK = 5
    SOLVER_SEED = 6


def generator(seed: int, stream: Stream, index: int = 0) -> np.random.Generator:
    sequence = np.random.SeedSequence([int(seed), int(stream), int(index)])
    return np.random.Generator(np.random.Philox(sequence))


def derived_seed(seed: int, index: int) -> int:
    """Seed handed to the solvers of trial `index` of a batch seeded by `seed`."""
    sequence = np.random.SeedSequence([int(seed), int(Stream.SOLVER_SEED), int(index)])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def gaussian_signs(seed: int, index: int, n: int) -> np.ndarray:
    """sgn(a) for a ~ N(0, I_n) drawn from restart stream `index`."""
    a = generator(seed, Stream.RESTART, index).standard_normal(n)
    return sign(a)
