"""Forward light cone in R^{1+q} and the maps that preserve it.

The indefinite form eta = diag(1, ..., 1, -1, ..., -1) of signature (p, q)
is supported in general for the quadratic form and the pseudo-orthogonality
test; the cone operations (region classification, orbit decomposition)
require p = 1, where membership is the inequality x >= |y|.

Boundary classification uses an absolute tolerance band; callers working at
large magnitudes should rescale first.
"""

import enum
from typing import NamedTuple

import numpy as np

from .errors import DomainError, InputError, NumericError

BOUNDARY_TOL = 1e-9


class LorentzFrame:
    """Signature data (p, q) with the bilinear form v . (eta w)."""

    def __init__(self, p, q):
        if int(p) < 1 or int(q) < 1:
            raise InputError(f"signature counts must be positive, got ({p}, {q})")
        self.p = int(p)
        self.q = int(q)
        self.eta = np.diag(np.concatenate([np.ones(self.p), -np.ones(self.q)]))
        self.eta.flags.writeable = False

    @property
    def n(self):
        return self.p + self.q

    def __repr__(self):
        return f"LorentzFrame(p={self.p}, q={self.q})"


class ConeRegion(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior_forward_complement"
    BACKWARD = "backward"


class OrbitFactors(NamedTuple):
    lam: float
    t: float
    rotation: np.ndarray  # q x q special orthogonal


def _check_vector(q, v):
    v = np.asarray(v, dtype=float)
    if v.shape != (1 + int(q),):
        raise InputError(f"vector must have length {1 + q}, got shape {v.shape}")
    return v


def lc_classify(q, v, tol=BOUNDARY_TOL):
    """Region of v relative to the forward light cone {x >= |y|}.

    interior if x - |y| > tol, boundary within the tol band, backward when
    the reflected vector lands in the closed cone, else the forward-exterior
    complement (spacelike side).
    """
    if tol < 0:
        raise InputError("tolerance must be nonnegative")
    v = _check_vector(q, v)
    x, s = v[0], float(np.linalg.norm(v[1:]))
    if x - s > tol:
        return ConeRegion.INTERIOR
    if abs(x - s) <= tol:
        return ConeRegion.BOUNDARY
    if x < -tol and (-x) - s >= -tol:
        return ConeRegion.BACKWARD
    return ConeRegion.EXTERIOR


def q_form(frame, v, w):
    """Indefinite inner product v . (eta w)."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if v.shape != (frame.n,) or w.shape != (frame.n,):
        raise InputError(f"vectors must have length {frame.n}")
    return float(v @ frame.eta @ w)


def is_pseudo_orthogonal(frame, a, tol=1e-9):
    """True iff a preserves the form: max |a^T eta a - eta| <= tol."""
    a = np.asarray(a, dtype=float)
    if a.shape != (frame.n, frame.n):
        raise InputError(f"matrix must be {frame.n}x{frame.n}, got {a.shape}")
    return bool(np.abs(a.T @ frame.eta @ a - frame.eta).max() <= tol)


def is_orthochronous(frame, a, tol=1e-9):
    """True iff a pseudo-orthogonal map keeps the future cone (a00 > 0)."""
    if frame.p != 1:
        raise InputError("orthochronous test requires p = 1")
    a = np.asarray(a, dtype=float)
    if not is_pseudo_orthogonal(frame, a, tol):
        raise InputError("matrix is not pseudo-orthogonal to tolerance")
    return bool(a[0, 0] > 0)


def boost(q, t, spatial_axis=1):
    """Hyperbolic rotation by t in the (time, spatial_axis) plane.

    boost(0) is the identity and boosts on a fixed axis add parameters.
    """
    q = int(q)
    axis = int(spatial_axis)
    if not 1 <= axis <= q:
        raise InputError(f"spatial axis must be in 1..{q}, got {axis}")
    m = np.eye(1 + q)
    c, s = np.cosh(t), np.sinh(t)
    m[0, 0] = c
    m[0, axis] = s
    m[axis, 0] = s
    m[axis, axis] = c
    return m


def dilation(n, lam):
    """lam * identity, lam > 0; preserves every cone region tag."""
    if lam <= 0:
        raise InputError(f"dilation factor must be positive, got {lam}")
    return float(lam) * np.eye(int(n))


def embed_rotation(rot):
    """Spatial rotation lifted to R^{1+q}: block diag(1, rot)."""
    rot = np.asarray(rot, dtype=float)
    q = rot.shape[0]
    out = np.eye(1 + q)
    out[1:, 1:] = rot
    return out


def rotation_to_first_axis(u):
    """Special orthogonal q x q matrix sending e1 to the unit vector u.

    Householder reflection through (u - e1), with a sign flip on another
    axis to land in SO(q). Needs q >= 2 unless u is already e1.
    """
    u = np.asarray(u, dtype=float)
    q = len(u)
    e1 = np.zeros(q)
    e1[0] = 1.0
    if np.linalg.norm(u - e1) <= 1e-14:
        return np.eye(q)
    if q == 1:
        raise DomainError("SO(1) cannot move the spatial axis")
    w = u - e1
    w = w / np.linalg.norm(w)
    h = np.eye(q) - 2.0 * np.outer(w, w)
    flip = np.eye(q)
    # flipping a non-first axis before the reflection keeps e1's image
    # (flip fixes e1) and restores det +1
    flip[q - 1, q - 1] = -1.0
    return h @ flip


def orbit_decompose(q, v, tol=1e-9):
    """Factor an interior vector as lam * embed(R) * boost(t) * e1.

    lam is the Minkowski norm sqrt(x^2 - |y|^2); t = artanh(|y|/x) with R
    rotating the first spatial axis onto y/|y| (for q = 1 the rotation is
    trivial and t is signed instead). The reconstruction residual is checked
    against tol.
    """
    v = _check_vector(q, v)
    if lc_classify(q, v, tol) is not ConeRegion.INTERIOR:
        raise DomainError(f"vector {v.tolist()} is not interior to the forward cone")
    x, y = v[0], v[1:]
    s = float(np.linalg.norm(y))
    lam = float(np.sqrt((x - s) * (x + s)))
    if int(q) == 1:
        t = float(np.arctanh(y[0] / x))
        rot = np.eye(1)
    else:
        t = float(np.arctanh(s / x))
        rot = np.eye(int(q)) if s == 0.0 else rotation_to_first_axis(y / s)
    recon = reconstruct_orbit(q, OrbitFactors(lam, t, rot))
    resid = float(np.abs(recon - v).max())
    if resid > tol:
        raise NumericError(f"orbit reconstruction residual {resid:.3g} exceeds {tol:.3g}")
    return OrbitFactors(lam, t, rot)


def reconstruct_orbit(q, factors):
    """Apply the orbit factors to the base point e1."""
    e1 = np.zeros(1 + int(q))
    e1[0] = 1.0
    return factors.lam * (embed_rotation(factors.rotation) @ (boost(q, factors.t) @ e1))


def random_rotation(q, rng):
    """Haar-ish random SO(q) via QR of a Gaussian matrix, det fixed to +1."""
    q = int(q)
    if q == 1:
        return np.eye(1)
    m = rng.standard_normal((q, q))
    r, _ = np.linalg.qr(m)
    if np.linalg.det(r) < 0:
        r[:, 0] = -r[:, 0]
    return r
