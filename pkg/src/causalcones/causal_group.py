"""Affine maps of Minkowski vector space and the causal ones among them.

A causal map preserves the closed-cone order in both directions. The
checker is a seeded Monte Carlo over difference vectors; the decomposition
factors a causal linear part exactly into dilation x orthochronous Lorentz,
rejecting time-reversing inputs (they preserve the squared interval but not
the order).

Deviation and round-trip tolerances are measured relative to the matrix
magnitude: long generator words reach norms where absolute float64 bounds
are meaningless, while the factorization itself is algebraically exact.
"""

from dataclasses import dataclass, field

import numpy as np

from . import lorentz
from .errors import InputError, NumericError

PROBE_BOX = 5.0


@dataclass(frozen=True)
class AffineMap:
    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=float)
        tr = np.asarray(self.translation, dtype=float)
        if lin.ndim != 2 or lin.shape[0] != lin.shape[1]:
            raise InputError(f"linear part must be square, got {lin.shape}")
        if tr.shape != (lin.shape[0],):
            raise InputError("translation length must match the linear part")
        if not (np.all(np.isfinite(lin)) and np.all(np.isfinite(tr))):
            raise InputError("non-finite affine map data")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tr)

    @property
    def dim(self):
        return self.linear.shape[0]

    @classmethod
    def identity(cls, n):
        return cls(np.eye(int(n)), np.zeros(int(n)))

    def apply(self, points):
        """Map one vector or a stack of row vectors."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.linear.T + self.translation

    def compose(self, other):
        """self after other."""
        return AffineMap(self.linear @ other.linear,
                         self.linear @ other.translation + self.translation)

    def inverse(self):
        inv = np.linalg.inv(self.linear)
        return AffineMap(inv, -inv @ self.translation)


@dataclass(frozen=True)
class ZeemanFactors:
    lam: float
    lorentz: np.ndarray
    translation: np.ndarray
    tol: float = field(default=1e-9, compare=False)

    def __post_init__(self):
        lor = np.asarray(self.lorentz, dtype=float)
        object.__setattr__(self, "lorentz", lor)
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))
        if self.lam <= 0:
            raise InputError(f"dilation factor must be positive, got {self.lam}")
        frame = lorentz.LorentzFrame(1, lor.shape[0] - 1)
        dev = np.abs(lor.T @ frame.eta @ lor - frame.eta).max()
        if dev > self.tol * 10:
            raise InputError(f"factor is not pseudo-orthogonal (deviation {dev:.3g})")
        if lor[0, 0] <= 0:
            raise InputError("factor is not orthochronous")

    def reconstruct(self):
        return AffineMap(self.lam * self.lorentz, self.translation)


def _closed_cone_mask(vectors, band):
    """Row-wise closed-cone membership with a magnitude-scaled band."""
    x = vectors[:, 0]
    s = np.linalg.norm(vectors[:, 1:], axis=1)
    tol = band * np.maximum(1.0, np.abs(x) + s)
    return (x - s) >= -tol


def _definite_sides(vectors, band):
    """(inside, outside) masks with a neutral band between them.

    An exact causal map moves boundary-band probes across an absolute
    threshold (margins rescale under boosts), so equality of banded masks
    is the wrong test; only probes that definitely switch sides count.
    """
    x = vectors[:, 0]
    s = np.linalg.norm(vectors[:, 1:], axis=1)
    margin = x - s
    tol = band * np.maximum(1.0, np.abs(x) + s)
    return margin > tol, margin < -tol


def _probe_pairs(q, samples, rng):
    """Mixed difference probes: uniform box pairs plus constructed related
    and near-null pairs so boundary behavior is actually exercised."""
    n = 1 + q
    n_uniform = samples // 2
    n_related = (samples - n_uniform) // 2
    n_null = samples - n_uniform - n_related

    x_u = rng.uniform(-PROBE_BOX, PROBE_BOX, (n_uniform, n))
    y_u = rng.uniform(-PROBE_BOX, PROBE_BOX, (n_uniform, n))

    def cone_vectors(count, margins):
        u = rng.standard_normal((count, q))
        norm = np.linalg.norm(u, axis=1, keepdims=True)
        norm[norm == 0] = 1.0
        u = u / norm
        s = rng.uniform(0.1, PROBE_BOX, count)
        t = s * (1.0 + margins)
        return np.column_stack([t, s[:, None] * u])

    margins_rel = 10.0 ** rng.uniform(-6, 1, n_related)
    x_r = rng.uniform(-PROBE_BOX, PROBE_BOX, (n_related, n))
    y_r = x_r + cone_vectors(n_related, margins_rel)

    margins_nl = np.concatenate([10.0 ** rng.uniform(-9, -1, n_null // 2),
                                 -(10.0 ** rng.uniform(-9, -1, n_null - n_null // 2))])
    x_n = rng.uniform(-PROBE_BOX, PROBE_BOX, (n_null, n))
    y_n = x_n + cone_vectors(n_null, margins_nl)

    return np.vstack([x_u, x_r, x_n]), np.vstack([y_u, y_r, y_n])


def is_causal_map(f, q, samples=10_000, seed=0, band=1e-9):
    """Monte Carlo check that f preserves the closed-cone order both ways.

    Deterministic given the seed; a singular linear part is rejected up
    front because causal permutations are invertible.
    """
    if f.dim != 1 + int(q):
        raise InputError(f"map dimension {f.dim} does not match 1+q = {1 + q}")
    if np.linalg.matrix_rank(f.linear) < f.dim:
        raise InputError("linear part is singular; causal maps are invertible")
    rng = np.random.default_rng(seed)
    x, y = _probe_pairs(int(q), int(samples), rng)
    in_b, out_b = _definite_sides(y - x, band)
    in_a, out_a = _definite_sides(f.apply(y) - f.apply(x), band)
    flipped = (in_b & out_a) | (out_b & in_a)
    return not bool(flipped.any())


def open_order_agrees(f, q, samples=10_000, seed=0, band=1e-9):
    """Same sampling and flip semantics as is_causal_map, on the strict
    interior order: preserving the closed order must preserve the open one."""
    rng = np.random.default_rng(seed)
    x, y = _probe_pairs(int(q), int(samples), rng)
    in_b, out_b = _definite_sides(y - x, band)
    in_a, out_a = _definite_sides(f.apply(y) - f.apply(x), band)
    flipped = (in_b & out_a) | (out_b & in_a)
    return not bool(flipped.any())


def is_cone_endomorphism(a, q, rays=1_000, seed=0, tol=1e-9):
    """True iff a maps sampled interior and boundary rays into the closed
    cone. Tests a(C) within C only, weaker than automorphism; singular maps
    are allowed."""
    a = np.asarray(a, dtype=float)
    n = 1 + int(q)
    if a.shape != (n, n):
        raise InputError(f"matrix must be {n}x{n}, got {a.shape}")
    rng = np.random.default_rng(seed)
    count = int(rays)
    u = rng.standard_normal((count, int(q)))
    norm = np.linalg.norm(u, axis=1, keepdims=True)
    norm[norm == 0] = 1.0
    u = u / norm
    s = rng.uniform(0.5, 2.0, (count, 1))
    margins = np.where(rng.random(count) < 0.5,
                       0.0,                                # boundary rays
                       10.0 ** rng.uniform(-3, 1, count))  # interior rays
    vecs = np.column_stack([s[:, 0] * (1 + margins), s * u])
    images = vecs @ a.T
    return bool(np.all(_closed_cone_mask(images, tol)))


def zeeman_decompose(f, q, tol=1e-9):
    """Split a causal affine map into (dilation, orthochronous Lorentz,
    translation).

    The Gram matrix L^T eta L must be a positive multiple of eta (deviation
    measured relative to the multiple); time-reversing inputs preserve the
    squared interval but reverse the order and are rejected with a distinct
    error.
    """
    n = 1 + int(q)
    if f.dim != n:
        raise InputError(f"map dimension {f.dim} does not match 1+q = {n}")
    if np.linalg.matrix_rank(f.linear) < n:
        raise InputError("linear part is singular; causal maps are invertible")
    frame = lorentz.LorentzFrame(1, int(q))
    gram = f.linear.T @ frame.eta @ f.linear
    c = float(gram[0, 0])
    dev = float(np.abs(gram - c * frame.eta).max())
    if c <= 0 or dev > tol * max(1.0, abs(c)):
        raise NumericError(
            f"not a causal linear part: L^T eta L deviates from c*eta by {dev:.3g} (c={c:.3g})")
    lam = float(np.sqrt(c))
    lor = f.linear / lam
    if lor[0, 0] <= 0:
        raise NumericError("anticausal: reverses time orientation")
    return ZeemanFactors(lam=lam, lorentz=lor, translation=np.array(f.translation), tol=tol)


def random_causal_element(q, word_length, seed):
    """Seeded word in the generators boost / rotation / dilation /
    translation; always passes is_causal_map."""
    q = int(q)
    if int(word_length) < 1:
        raise InputError("word length must be at least 1")
    rng = np.random.default_rng(seed)
    n = 1 + q
    out = AffineMap.identity(n)
    for _ in range(int(word_length)):
        kind = rng.integers(4)
        if kind == 0:
            t = rng.uniform(-2.0, 2.0)
            axis = int(rng.integers(1, q + 1))
            step = AffineMap(lorentz.boost(q, t, axis), np.zeros(n))
        elif kind == 1:
            step = AffineMap(lorentz.embed_rotation(lorentz.random_rotation(q, rng)), np.zeros(n))
        elif kind == 2:
            lam = float(np.exp(rng.uniform(np.log(0.25), np.log(4.0))))
            step = AffineMap(lorentz.dilation(n, lam), np.zeros(n))
        else:
            step = AffineMap(np.eye(n), rng.uniform(-2.0, 2.0, n))
        out = step.compose(out)
    return out
