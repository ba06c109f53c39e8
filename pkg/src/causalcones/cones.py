"""Finitely generated closed convex cones in R^n.

A cone carries generating rays (V-representation) and/or inward hyperplane
normals (H-representation, the set {x : (h_i, x) >= 0 for all i}). Only
closed finitely generated cones are representable, which is what makes
membership decidable and keeps pointedness equivalent to properness.

Membership against a V-representation is a nonnegative least-squares
feasibility solve; against an H-representation it is a sign check of the
normal inequalities. Dual V-representations are synthesized by an
active-set nullspace enumeration, capped because vertex enumeration is
exponential.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .errors import CapacityError, ConsistencyError, InputError, NumericError

FEASIBILITY_TOL = 1e-9
RAY_SET_TOL = 1e-8
RAY_DEDUP_TOL = 1e-10
POINTED_TOL = 1e-7
ZERO_NORM_TOL = 1e-12
DUAL_MAX_DIM = 6
DUAL_MAX_RAYS = 64
ENUM_MAX_NORMALS = 128


class ConvexCone:
    """Closed convex cone with at least one of the two representations.

    ``generators`` is an (m, dim) array of rays; an empty array means the
    trivial cone {0}; None means the V-representation was not synthesized
    (H-only cone). ``normals`` is a (k, dim) array of inward normals; an
    empty array means no constraints (the whole space); None means absent.
    Arrays are stored read-only; cones are immutable and safe to share.
    """

    def __init__(self, dim, generators=None, normals=None):
        if int(dim) < 1:
            raise InputError(f"ambient dimension must be positive, got {dim}")
        self.dim = int(dim)
        if generators is None and normals is None:
            raise InputError("a cone needs generators or normals")
        self.generators = self._own(generators)
        self.normals = self._own(normals, drop_zero=True)
        if self.generators is not None and self.normals is not None:
            viol = self.generators @ self.normals.T
            if viol.size and viol.min() < -RAY_SET_TOL:
                raise InputError(
                    f"generator violates a normal inequality by {-viol.min():.3g}")

    def _own(self, arr, drop_zero=False):
        if arr is None:
            return None
        a = np.atleast_2d(np.asarray(arr, dtype=float))
        if a.size == 0:
            a = a.reshape(0, self.dim)
        if a.ndim != 2 or a.shape[1] != self.dim:
            raise InputError(f"vectors must have length {self.dim}, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InputError("non-finite entries in cone data")
        if drop_zero and len(a):
            a = a[np.linalg.norm(a, axis=1) > ZERO_NORM_TOL]
        a = a.copy()
        a.flags.writeable = False
        return a

    @property
    def has_vrep(self):
        return self.generators is not None

    @property
    def has_hrep(self):
        return self.normals is not None

    def __repr__(self):
        g = "?" if self.generators is None else len(self.generators)
        h = "?" if self.normals is None else len(self.normals)
        return f"ConvexCone(dim={self.dim}, generators={g}, normals={h})"


@dataclass(frozen=True)
class ConeClassification:
    generating: bool
    pointed: bool
    proper: bool
    regular: bool
    self_dual: bool

    def __post_init__(self):
        if self.regular != (self.generating and self.proper):
            raise ConsistencyError("regular must equal generating and proper")


def make_cone(dim, generators, dedup_tol=RAY_DEDUP_TOL):
    """Cone generated by a finite vector set: zero rays dropped, positive
    multiples deduplicated by normalized-direction comparison."""
    gens = np.atleast_2d(np.asarray(generators, dtype=float))
    if gens.size == 0:
        gens = gens.reshape(0, int(dim))
    if gens.shape[1] != int(dim):
        raise InputError(f"generators must have length {dim}, got {gens.shape[1]}")
    norms = np.linalg.norm(gens, axis=1)
    gens = gens[norms > ZERO_NORM_TOL]
    kept = []
    for g in gens:
        u = g / np.linalg.norm(g)
        if not any(np.linalg.norm(u - k / np.linalg.norm(k)) <= dedup_tol for k in kept):
            kept.append(g)
    return ConvexCone(dim, generators=np.array(kept).reshape(len(kept), int(dim)))


def _nnls(a, b, max_iter=None):
    """Lawson-Hanson active-set nonnegative least squares.

    Returns (weights, residual norm) for min |a w - b| over w >= 0. Carried
    here because the installed scipy's rewritten solver returns non-optimal
    points on desk-scale inputs (KKT violations verified against an
    independent bounded solver); the tests keep both cross-checks.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = a.shape
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    if max_iter is None:
        max_iter = 50 * n + 200
    grad_tol = 1e-12 * max(1.0, float(np.abs(a).max()) * max(1.0, float(np.linalg.norm(b))))
    best_x = x
    best_r = float(np.linalg.norm(b))
    stalled = 0
    converged = False
    for _ in range(max_iter):
        w = a.T @ (b - a @ x)
        free = ~passive
        if not free.any() or w[free].max() <= grad_tol:
            converged = True
            break
        passive[np.flatnonzero(free)[np.argmax(w[free])]] = True
        for _inner in range(n + 1):
            s = np.zeros(n)
            sol, *_ = np.linalg.lstsq(a[:, passive], b, rcond=None)
            s[passive] = sol
            if not passive.any() or s[passive].min() > 0:
                x = s
                break
            blocking = passive & (s <= 0)
            ratios = x[blocking] / (x[blocking] - s[blocking])
            alpha = float(ratios.min())
            x = x + alpha * (s - x)
            # drop the variables driven to the boundary, at minimum the
            # ratio minimizer, so the inner loop always shrinks the set
            drop = np.zeros(n, dtype=bool)
            drop[np.flatnonzero(blocking)[ratios <= alpha]] = True
            x[drop | (x < 0)] = 0.0
            passive &= ~drop
            passive &= x > 0
        r = float(np.linalg.norm(a @ x - b))
        if r < best_r - 1e-13 * max(1.0, best_r):
            best_x, best_r = x, r
            stalled = 0
        else:
            # float-level cycling near the optimum: accept the best point
            stalled += 1
            if stalled >= 5:
                return best_x, best_r
    if not converged:
        raise NumericError(
            f"feasibility solve did not converge in {max_iter} iterations "
            f"(best residual {best_r:.3g})")
    r = float(np.linalg.norm(a @ x - b))
    if r <= best_r:
        return x, r
    return best_x, best_r


def membership_residual(cone, x):
    """Distance from x to the cone along the generator representation."""
    x = np.asarray(x, dtype=float)
    if x.shape != (cone.dim,):
        raise InputError(f"vector must have length {cone.dim}, got shape {x.shape}")
    if cone.has_vrep:
        if len(cone.generators) == 0:
            return float(np.linalg.norm(x))
        _, rnorm = _nnls(cone.generators.T, x)
        return float(rnorm)
    # H-only cone: worst normalized inequality violation, 0 if inside
    if len(cone.normals) == 0:
        return 0.0
    unit = cone.normals / np.linalg.norm(cone.normals, axis=1, keepdims=True)
    worst = float((unit @ x).min())
    return max(0.0, -worst)


def member(cone, x, tol=FEASIBILITY_TOL):
    """True iff x lies within distance tol of the cone."""
    return membership_residual(cone, x) <= tol


def _extreme_rays(normals, dim, feas_tol=FEASIBILITY_TOL):
    """Extreme rays and lineality basis of {x : n_i . x >= 0}.

    Candidate rays are nullspace directions of (d-1)-subsets of the
    constraints inside the pointed quotient by the lineality space; a
    candidate survives if it satisfies every constraint. Exact for desk
    scale; the subset count is the capacity bound.
    """
    normals = np.asarray(normals, dtype=float).reshape(-1, dim)
    if len(normals) > ENUM_MAX_NORMALS:
        raise CapacityError(
            f"vertex enumeration over {len(normals)} constraints exceeds cap {ENUM_MAX_NORMALS}")
    if len(normals) == 0:
        return np.zeros((0, dim)), np.eye(dim)
    lineality = null_space(normals)
    lin_basis = lineality.T  # rows
    d = dim - lin_basis.shape[0]
    if d == 0:
        return np.zeros((0, dim)), lin_basis
    # orthonormal basis of the pointed quotient
    w_basis = null_space(lin_basis) if lin_basis.shape[0] else np.eye(dim)
    proj = normals @ w_basis  # constraints in quotient coordinates, shape (m, d)
    scale = np.linalg.norm(proj, axis=1, keepdims=True)
    scale[scale == 0] = 1.0
    proj_unit = proj / scale

    cands = []
    if d == 1:
        cands = [np.array([1.0]), np.array([-1.0])]
    else:
        from itertools import combinations

        # the quotient constraint matrix has rank d, so m >= d > d-1 and
        # the subset list is never empty
        idx = np.array(list(combinations(range(len(proj)), d - 1)))
        mats = proj_unit[idx]  # (n_sub, d-1, d)
        _, s, vt = np.linalg.svd(mats)
        for k in range(len(idx)):
            sv = s[k]
            # a candidate needs the active set at full rank d-1; a deficient
            # subset has a >= 2-dim nullspace and some other subset recovers
            # the same ray
            rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0])))
            if rank != d - 1:
                continue
            cands.append(vt[k][-1])
            cands.append(-vt[k][-1])
    rays_w = []
    for v in cands:
        nv = np.linalg.norm(v)
        if nv < ZERO_NORM_TOL:
            continue
        v = v / nv
        if (proj_unit @ v).min() < -feas_tol:
            continue
        if not any(np.linalg.norm(v - r) <= RAY_DEDUP_TOL for r in rays_w):
            rays_w.append(v)
    rays = np.array([w_basis @ r for r in rays_w]).reshape(len(rays_w), dim)
    return rays, lin_basis


def dual(cone, require_vrep=False, max_dim=DUAL_MAX_DIM, max_rays=DUAL_MAX_RAYS):
    """Dual cone {x : (x, y) >= 0 for all y in the cone}.

    The generators of the input become the normals of the dual; a dual
    V-representation is synthesized by the extreme-ray pass while dim and
    ray count stay under the caps, otherwise the dual is H-only (membership
    still decidable). With require_vrep=True a cap overflow raises
    CapacityError instead.
    """
    if cone.has_vrep:
        dual_normals = np.array(cone.generators)
        gens = None
        if cone.dim <= max_dim or require_vrep:
            rays, lin = _extreme_rays(dual_normals, cone.dim)
            full = np.vstack([rays, lin, -lin])
            if len(full) <= max_rays:
                gens = full
            elif require_vrep:
                raise CapacityError(
                    f"dual V-representation has {len(full)} rays, cap {max_rays}")
        elif require_vrep:
            raise CapacityError(f"dual synthesis capped at dim {max_dim}, got {cone.dim}")
        return ConvexCone(cone.dim, generators=gens, normals=dual_normals)
    # H-only input {x : n.x >= 0} is the dual of Cone(normals), so its dual
    # is Cone(normals) itself (closed convex cones: C** = C).
    return make_cone(cone.dim, cone.normals)


def ensure_vrep(cone):
    """Return a cone equal to the input that carries generators."""
    if cone.has_vrep:
        return cone
    rays, lin = _extreme_rays(cone.normals, cone.dim)
    gens = np.vstack([rays, lin, -lin])
    return ConvexCone(cone.dim, generators=gens, normals=cone.normals)


def _basis_of_rows(rows, rank_tol=1e-10):
    rows = np.asarray(rows, dtype=float)
    if rows.size == 0:
        return rows.reshape(0, rows.shape[1] if rows.ndim == 2 else 0)
    u, s, vt = np.linalg.svd(rows)
    rank = int(np.sum(s > rank_tol * max(1.0, s[0])))
    return vt[:rank]


def edge_and_span(cone, tol=FEASIBILITY_TOL):
    """Edge (largest subspace inside the cone) and span (smallest subspace
    containing it), each as an orthonormal row basis.

    The span is a rank factorization of the generator matrix. The edge is
    spanned by exactly those generators whose negatives are members, which
    is an identity for finitely generated cones, not an approximation.
    """
    cone = ensure_vrep(cone)
    gens = cone.generators
    span_basis = _basis_of_rows(gens)
    edge_gens = [g for g in gens if member(cone, -g, tol)]
    edge_basis = _basis_of_rows(np.array(edge_gens).reshape(len(edge_gens), cone.dim))
    return edge_basis, span_basis


def _dual_interior_radius(cone):
    """Chebyshev-style LP: largest r with (g_i/|g_i|, x) >= r over the unit
    box. Positive iff the dual has interior, i.e. iff the cone is pointed."""
    gens = cone.generators
    if len(gens) == 0:
        return 1.0  # dual is the whole space
    unit = gens / np.linalg.norm(gens, axis=1, keepdims=True)
    n = cone.dim
    # variables (x, r): maximize r s.t. unit @ x - r >= 0, |x| <= 1, 0 <= r <= 2
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-unit, np.ones((len(unit), 1))])
    b_ub = np.zeros(len(unit))
    bounds = [(-1.0, 1.0)] * n + [(0.0, 2.0)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise NumericError(f"pointedness LP failed: {res.message}")
    return float(res.x[-1])


def same_ray_set(gens_a, gens_b, tol=RAY_SET_TOL):
    """Equality of two ray sets up to positive scaling: canonical normalized
    rays must match within tol in both directions."""
    a = np.atleast_2d(np.asarray(gens_a, dtype=float))
    b = np.atleast_2d(np.asarray(gens_b, dtype=float))
    a = a[np.linalg.norm(a, axis=1) > ZERO_NORM_TOL] if a.size else a.reshape(0, a.shape[-1])
    b = b[np.linalg.norm(b, axis=1) > ZERO_NORM_TOL] if b.size else b.reshape(0, b.shape[-1])
    if len(a) == 0 or len(b) == 0:
        return len(a) == len(b)
    ua = a / np.linalg.norm(a, axis=1, keepdims=True)
    ub = b / np.linalg.norm(b, axis=1, keepdims=True)
    d = np.linalg.norm(ua[:, None, :] - ub[None, :, :], axis=2)
    return bool(d.min(axis=1).max() <= tol and d.min(axis=0).max() <= tol)


def classify(cone, tol=RAY_SET_TOL, feas_tol=FEASIBILITY_TOL):
    """Classification predicates, with the equivalent-criteria cross-checks.

    generating <=> generator rank equals dim; proper <=> edge is {0};
    pointed via interior of the dual (LP); self-dual by canonical ray-set
    comparison against the synthesized dual. pointed/proper and
    proper/dual-generating must agree or ConsistencyError is raised.
    """
    cone = ensure_vrep(cone)
    rank = len(_basis_of_rows(cone.generators))
    generating = rank == cone.dim
    edge_basis, _ = edge_and_span(cone, feas_tol)
    proper = len(edge_basis) == 0
    radius = _dual_interior_radius(cone)
    pointed = radius > POINTED_TOL
    if pointed != proper:
        raise ConsistencyError(
            f"pointed ({pointed}, dual interior radius {radius:.3g}) disagrees with "
            f"proper ({proper}, edge dimension {len(edge_basis)})")
    dual_cone = dual(cone)
    if dual_cone.has_vrep:
        dual_generating = len(_basis_of_rows(dual_cone.generators)) == cone.dim
        if dual_generating != proper:
            raise ConsistencyError(
                f"proper ({proper}) disagrees with dual generating ({dual_generating})")
        self_dual = same_ray_set(cone.generators, dual_cone.generators, tol)
    else:
        raise CapacityError("self-duality check needs the dual V-representation")
    return ConeClassification(
        generating=generating,
        pointed=pointed,
        proper=proper,
        regular=generating and proper,
        self_dual=self_dual,
    )


def classification_report(cone, tol=RAY_SET_TOL, feas_tol=FEASIBILITY_TOL):
    """Classification plus residual diagnostics, as a plain dict."""
    cone = ensure_vrep(cone)
    cls = classify(cone, tol, feas_tol)
    edge_basis, span_basis = edge_and_span(cone, feas_tol)
    return {
        "generating": cls.generating,
        "pointed": cls.pointed,
        "proper": cls.proper,
        "regular": cls.regular,
        "self_dual": cls.self_dual,
        "diagnostics": {
            "dim": cone.dim,
            "generator_count": len(cone.generators),
            "generator_rank": len(span_basis),
            "edge_dimension": len(edge_basis),
            "dual_interior_radius": _dual_interior_radius(cone),
        },
    }
