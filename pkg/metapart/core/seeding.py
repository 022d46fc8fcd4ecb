"""
Seed derivation

All randomness in a run hangs off one master seed. Each stage draws from its own
stream so that changing, say, the chain count does not move the dataset.
"""
import numpy as np

# stream ids under the master seed
STREAM_DATA = 0
STREAM_KMEANS = 1
STREAM_BANDWIDTH = 2
STREAM_CHAINS = 3


def derive_seed(master: int, *path: int) -> int:
    """Deterministic 32-bit child seed for (master, path)."""
    ss = np.random.SeedSequence(entropy=master, spawn_key=tuple(path))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) for one chain or stage."""
    return np.random.Generator(np.random.Philox(seed))
