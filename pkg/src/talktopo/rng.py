"""Named, reproducible random streams.

All randomness in a run flows from one root seed. Components derive their
own independent generator from the root seed plus a tuple of name parts,
e.g. ``generator_for(seed, "talk", talk_id)`` or
``generator_for(seed, "model", "logreg", label_idx, fold_idx)``. Streams
are independent of each other and stable across platforms (names are
hashed with crc32, which is fixed by the zlib spec).

Streams used by the pipeline:

- ``("talk", talk_id)``              synthetic cloud geometry
- ``("doc", talk_id)``               synthetic doc2vec stand-in vector
- ``("ratings", talk_id)``           synthetic rating counts
- ``("folds",)``                     cross-validation fold shuffle
- ``("model", kind, label, fold)``   classifier init / minibatch order
"""

from __future__ import annotations

import zlib

import numpy as np


def seed_sequence_for(root_seed: int, *parts) -> np.random.SeedSequence:
    """SeedSequence for the stream named by ``parts`` under ``root_seed``."""
    entropy = [int(root_seed) & 0xFFFFFFFFFFFFFFFF]
    entropy += [zlib.crc32(str(p).encode("utf-8")) for p in parts]
    return np.random.SeedSequence(entropy)


def generator_for(root_seed: int, *parts) -> np.random.Generator:
    """Fresh PCG64 generator for the named stream."""
    return np.random.default_rng(seed_sequence_for(root_seed, *parts))


def int_seed_for(root_seed: int, *parts) -> int:
    """A plain integer seed derived from the named stream (for APIs that
    take an int rather than a Generator)."""
    return int(seed_sequence_for(root_seed, *parts).generate_state(1)[0])
