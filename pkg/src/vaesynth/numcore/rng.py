import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, label: str) -> int:
    """
    Derive an independent 64-bit seed from a master seed and a label.

    :param seed: Master seed.
    :param label: Stream or module name, e.g. ``"shuffle"``.
    :return: BLAKE2b-64 digest of ``"<seed>:<label>"`` as an unsigned integer.
    """
    digest = hashlib.blake2b(f"{seed & _MASK64}:{label}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class Rng:
    """
    Deterministic source of named random streams.

    Each stream is a counter-based Philox generator keyed by the seed derived from (seed, label), so the
    values drawn from one stream do not depend on how much any other stream was consumed.

    Example Usage:
        rng = Rng(42)
        shuffle = rng.stream("shuffle")
        order = shuffle.permutation(10)
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64

    def stream(self, label: str) -> np.random.Generator:
        """Return a fresh generator positioned at draw index 0 of the stream `label`."""
        return np.random.Generator(np.random.Philox(key=derive_seed(self.seed, label)))

    def child(self, label: str) -> 'Rng':
        """Return an Rng whose seed is derived from this one and `label`."""
        return Rng(derive_seed(self.seed, label))

    def __repr__(self):
        return f"Rng(seed={self.seed})"
