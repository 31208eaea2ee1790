import numpy as np


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """
    Philox4x64 generator for the substream (seed, stream).

    Philox is counter based, so a (seed, stream) pair names the same sequence
    on every platform and shards never overlap.
    """
    sequence = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(sequence))


def split_count(count: int, shards: int) -> list[int]:
    """Splits ``count`` draws over ``shards``; earlier shards take the remainder."""
    base, remainder = divmod(count, shards)
    return [base + (1 if shard < remainder else 0) for shard in range(shards)]
