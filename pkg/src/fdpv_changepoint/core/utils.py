from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

DEFAULT_SEED = 20090101


def split_seed(seed: int, index: int) -> int:
    """
    Derive the child seed of replication (or segment) `index` from `seed`.

    The child is the first 64-bit word of ``SeedSequence([seed, index])``; it
    depends only on the pair, never on how many other children were drawn.
    """
    ss = np.random.SeedSequence([int(seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def rng_from(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed))


def nbytes(*arrays: np.ndarray | None) -> int:
    """Total payload bytes of the given arrays (None entries ignored)."""
    return int(sum(a.nbytes for a in arrays if a is not None))


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write `text` to `path` through a temporary file and an atomic rename."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or Path("."))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
