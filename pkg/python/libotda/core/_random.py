from typing import Optional

import numpy as np


class RandomNumberEngine:
    """Seeded PCG64 bit generator

    All randomness in libotda is drawn from a PCG64 engine seeded through
    :class:`numpy.random.SeedSequence`, so a seed gives the same stream on every
    platform.

    Parameters
    ----------
    seed : int = 0
        Non-negative seed, up to 64 bits.
    *stream : int
        Optional extra keys deriving an independent stream from the same seed, for
        example a repetition index.
    """

    def __init__(self, seed: int = 0, *stream: int):
        self.seed = int(seed)
        self.stream = tuple(int(x) for x in stream)
        entropy = [self.seed, *self.stream]
        self.bit_generator = np.random.PCG64(np.random.SeedSequence(entropy))

    def dump(self) -> dict:
        """Current engine state"""
        return self.bit_generator.state

    def load(self, state: dict) -> None:
        """Restore an engine state obtained from :func:`dump`"""
        self.bit_generator.state = state

    def substream(self, *stream: int) -> "RandomNumberEngine":
        """Independent engine keyed by this engine's seed, stream and `stream`"""
        return RandomNumberEngine(self.seed, *self.stream, *stream)


class RandomNumberGenerator:
    """Draw random numbers from a :class:`RandomNumberEngine`

    Parameters
    ----------
    engine : Optional[RandomNumberEngine] = None
        Engine shared with other generators. If None, a new engine with seed 0 is
        constructed.
    """

    def __init__(self, engine: Optional[RandomNumberEngine] = None):
        if engine is None:
            engine = RandomNumberEngine()
        self.engine = engine
        self._generator = np.random.Generator(engine.bit_generator)

    def random_int(self, maximum_value: int) -> int:
        """Integer in [0, maximum_value]"""
        return int(self._generator.integers(0, maximum_value, endpoint=True))

    def random_real(self, maximum_value: float) -> float:
        """Real in [0, maximum_value)"""
        return float(self._generator.random() * maximum_value)

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        """`size` indices drawn from range(n)"""
        return self._generator.choice(n, size=size, replace=replace)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def normal(self, loc=0.0, scale=1.0, size=None) -> np.ndarray:
        return self._generator.normal(loc, scale, size)
