import numpy as np


def frozen_array(values, dtype=float) -> np.ndarray:
    """Copy into a contiguous read-only array."""
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array
