"""Pure-numpy relation kernels, used when the compiled extension is absent."""

import numpy as np


def transitive_closure(bits):
    """Transitive closure of a square boolean adjacency matrix.

    Iterated boolean matrix products with early exit: each round unions in
    paths of doubled length, so at most ceil(log2 n) products are needed.
    The product runs through float32 BLAS and is exact because only > 0 is
    tested.
    """
    closed = np.array(bits, dtype=bool)
    if closed.shape[0] == 0:
        return closed
    while True:
        f = closed.astype(np.float32)
        new = closed | ((f @ f) > 0.0)
        if np.array_equal(new, closed):
            return new
        closed = new
