"""Brute-force cross-checks for the closed-form support and gauge values.

Every formula in geometry has a second route here that shares no code with
it: product-state grids for the separable support, eigensolves of the
measurement operator for the quantum and maximal supports, sampled dual
ratios for the gauges, and a Frank-Wolfe projection for hull membership.
The optimization-based routes are monotone lower bounds, so they can only
fail in one direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import geometry, twoqubit
from .detect import MAX_OVER_QM, QM_OVER_SEP
from .geometry import MAX, QM, SEP, MeasurementSettings
from .smallmat import EPS, max_trace_over_rotations


@dataclass(frozen=True)
class OracleConfig:
    seed: int = 0
    grid_points: int = 4096
    restarts: int = 32
    samples: int = 10_000
    tol: float = 1e-4

    def __post_init__(self):
        if min(self.grid_points, self.restarts, self.samples) < 1:
            raise ValueError("all counts must be at least 1")
        if not self.tol > 0.0:
            raise ValueError("tolerance must be positive")


DEFAULT_CONFIG = OracleConfig()

_FW_MAX_ITERS = 500
_REFINE_SWEEPS = 150


def fibonacci_sphere(n: int) -> np.ndarray:
    """n nearly uniform unit vectors, rows of an (n, 3) array."""
    i = np.arange(n)
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    phi = 2.0 * np.pi * i / golden
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def support_sep_oracle(s: MeasurementSettings, z, cfg: OracleConfig = DEFAULT_CONFIG) -> float:
    """Largest u.(X v) over unit Bloch vectors, X = A^T Z B.

    Grid seeding on a Fibonacci sphere, then alternating maximization from
    the best seeds. Each half-step is the exact inner optimum, so the value
    climbs monotonically and never exceeds the true support.
    """
    x = s.a.T @ np.asarray(z, dtype=float) @ s.b
    grid = fibonacci_sphere(cfg.grid_points)
    scores = np.linalg.norm(grid @ x, axis=1)
    k = min(cfg.restarts, cfg.grid_points)
    u = grid[np.argpartition(scores, -k)[-k:]]
    v = np.zeros_like(u)
    for _ in range(_REFINE_SWEEPS):
        w = u @ x
        nw = np.linalg.norm(w, axis=1, keepdims=True)
        v = np.where(nw > 0.0, w / np.where(nw > 0.0, nw, 1.0), v)
        w = v @ x.T
        nw = np.linalg.norm(w, axis=1, keepdims=True)
        u_next = np.where(nw > 0.0, w / np.where(nw > 0.0, nw, 1.0), u)
        if np.max(np.abs(u_next - u)) < 1e-15:
            u = u_next
            break
        u = u_next
    values = np.einsum("ri,ij,rj->r", u, x, v)
    return max(0.0, float(values.max()))


def support_qm_oracle(s: MeasurementSettings, z) -> float:
    """Largest eigenvalue of the weighted measurement operator."""
    op = twoqubit.bell_operator(s, z)
    return float(np.linalg.eigvalsh(op)[-1])


def support_max_oracle(s: MeasurementSettings, z) -> float:
    """Largest eigenvalue over the operator and its partial transpose."""
    op = twoqubit.bell_operator(s, z)
    plain = np.linalg.eigvalsh(op)[-1]
    flipped = np.linalg.eigvalsh(twoqubit.partial_transpose(op))[-1]
    return float(max(plain, flipped))


def _support_batch(model: str, s: MeasurementSettings, zs: np.ndarray) -> np.ndarray:
    """Closed-form support on a (k, m, m) stack of coefficient matrices."""
    frames = np.einsum("ia,kij,jb->kab", s.a, zs, s.b)
    sv = np.linalg.svd(frames, compute_uv=False)
    if model == SEP:
        return sv[:, 0]
    if model == MAX:
        return sv.sum(axis=1)
    dets = np.linalg.det(frames)
    dead = np.abs(dets) < 1e-12 * sv[:, 0] * sv[:, 1] * np.maximum(sv[:, 2], EPS)
    signs = np.where(dead, 0.0, np.sign(dets))
    return sv[:, 0] + sv[:, 1] - sv[:, 2] * signs


def gauge_dual_oracle(model: str, s: MeasurementSettings, c,
                      cfg: OracleConfig = DEFAULT_CONFIG) -> float:
    """Best ratio <Z, C> / support(Z) over sampled coefficient directions.

    A lower bound on the gauge for any sample set. The closed-form optimizer
    direction is appended when it exists, which closes the gap.
    """
    c = np.asarray(c, dtype=float)
    rng = np.random.default_rng(cfg.seed)
    zs = rng.standard_normal((cfg.samples, s.m, s.m))
    phi = _support_batch(model, s, zs)
    num = np.einsum("kij,ij->k", zs, c)
    live = phi > 1e-15 * max(1.0, float(phi.max(initial=0.0)))
    best = float((num[live] / phi[live]).max(initial=0.0))
    g = geometry.gauge(model, s, c)
    if g.finite and g.value > 0.0:
        z_star = geometry.optimizer_z(model, s, c)
        best = max(best, float(np.sum(z_star * c)) / geometry.support(model, s, z_star))
    return best


def _hull_atom(model: str, s: MeasurementSettings, grad: np.ndarray) -> np.ndarray:
    """Extreme point of the hull maximizing <grad, .> (the linear oracle)."""
    x = s.a.T @ grad @ s.b
    if model == SEP:
        u, _, vt = np.linalg.svd(x)
        return np.outer(s.a @ u[:, 0], s.b @ vt[0])
    component = "SO3_minus" if model == QM else "O3"
    _, q = max_trace_over_rotations(x, component)
    return s.a @ q @ s.b.T


def _project_to_active_hull(atoms: np.ndarray, weights: np.ndarray, c_vec: np.ndarray):
    """Exact Euclidean projection of c onto the convex hull of the atom rows.

    Minor cycle of Wolfe's minimum-norm-point scheme: minimize over the
    affine hull of the active atoms (a small equality-constrained least
    squares problem solved through its KKT system), and whenever that
    optimum leaves the simplex, walk back to the boundary, drop whatever
    atom lands at weight zero, and resolve. Every pass removes an atom, so
    the cycle is finite, and the result is the exact projection.
    """
    while True:
        k = len(atoms)
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = atoms @ atoms.T
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.append(atoms @ c_vec, 1.0)
        v = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
        if np.all(v >= -1e-12):
            weights = np.clip(v, 0.0, None)
            weights /= weights.sum()
            return atoms, weights, weights @ atoms
        sinking = v < 0.0
        theta = float(np.min(weights[sinking] / (weights[sinking] - v[sinking])))
        weights = weights + min(1.0, max(0.0, theta)) * (v - weights)
        # The affine combination keeps the weight sum at one, so something
        # always survives the cut.
        keep = weights > 1e-14
        atoms = atoms[keep]
        weights = np.clip(weights[keep], 0.0, None)
        weights /= weights.sum()


def hull_membership_oracle(model: str, s: MeasurementSettings, c,
                           cfg: OracleConfig = DEFAULT_CONFIG) -> bool:
    """Project C onto the hull of extreme correlations; True if it lands on C.

    Fully corrective Frank-Wolfe: each round asks the linear oracle for the
    extreme point best aligned with the current residual, then projects
    exactly onto the hull of the active set. The iterate always stays a
    convex combination, so a small residual certifies membership. Outside
    points exit early: with x in the hull and the oracle's gap
    g = <c - x, atom - x>, the squared distance to the hull is at least
    residual^2 - 2g. With the projection exact the loop cannot stall: any
    round that passes both exits has g > (res^2 - tol^2) / 2 > 0, and the
    next projection then shrinks the residual by at least the line-search
    amount g^2 / |atom - x|^2.
    """
    if model not in geometry.MODELS:
        raise ValueError(f"unknown model {model!r}")
    c = np.asarray(c, dtype=float)
    if c.shape != (s.m, s.m):
        raise ValueError(f"expected a {s.m}x{s.m} matrix, got {c.shape}")

    c_vec = c.ravel()
    first = _hull_atom(model, s, c)
    atoms = first.reshape(1, -1).copy()
    weights = np.ones(1)
    x = atoms[0].copy()
    tol_sq = cfg.tol * cfg.tol

    for _ in range(_FW_MAX_ITERS):
        grad = c_vec - x
        res_sq = float(grad @ grad)
        if res_sq <= tol_sq:
            return True
        fresh = _hull_atom(model, s, grad.reshape(s.m, s.m)).ravel()
        gap = float(grad @ (fresh - x))
        if res_sq - 2.0 * gap > tol_sq:
            return False
        atoms = np.vstack([atoms, fresh])
        weights = np.append(weights, 0.0)
        atoms, weights, x = _project_to_active_hull(atoms, weights, c_vec)
    return float(np.linalg.norm(c_vec - x)) <= cfg.tol


def random_settings(rng, m: int, rank: int) -> MeasurementSettings:
    """Random unit-row settings with both parties at the given rank.

    Rows are unit vectors drawn inside a shared rank-dimensional subspace,
    one independent subspace per party.
    """
    if not 1 <= rank <= min(3, m):
        raise ValueError(f"rank must be between 1 and min(3, m)={min(3, m)}, got {rank}")
    rng = np.random.default_rng(rng)

    def one_party():
        while True:
            basis = np.linalg.qr(rng.standard_normal((3, 3)))[0][:, :rank]
            rows = rng.standard_normal((m, rank)) @ basis.T
            norms = np.linalg.norm(rows, axis=1)
            if norms.min() < 1e-6:
                continue
            rows /= norms[:, None]
            if np.linalg.matrix_rank(rows, tol=1e-8) == rank:
                return rows

    return MeasurementSettings(one_party(), one_party())


class ScanResult(NamedTuple):
    value: float
    maximizer_c: np.ndarray


def _haar_batch(rng, n: int, component: str) -> np.ndarray:
    """Stack of n Haar-random 3x3 matrices from the requested component."""
    g = rng.standard_normal((n, 3, 3))
    q, r = np.linalg.qr(g)
    diag_signs = np.where(np.diagonal(r, axis1=1, axis2=2) >= 0.0, 1.0, -1.0)
    q = q * diag_signs[:, None, :]
    det = np.linalg.det(q)
    if component == "SO3":
        q[det < 0.0, :, 2] *= -1.0
    elif component == "SO3_minus":
        q[det > 0.0, :, 2] *= -1.0
    elif component != "O3":
        raise ValueError(f"unknown component {component!r}")
    return q


def ratio_scan(s: MeasurementSettings, pair: str,
               cfg: OracleConfig = DEFAULT_CONFIG) -> ScanResult:
    """Sampled containment radius: gauge of the inner body at random extreme
    points of the outer one. Approaches the exact radius from below."""
    if pair == QM_OVER_SEP:
        component, inner = "SO3_minus", SEP
    elif pair == MAX_OVER_QM:
        component, inner = "O3", QM
    else:
        raise ValueError(f"pair must be {QM_OVER_SEP!r} or {MAX_OVER_QM!r}, got {pair!r}")
    rng = np.random.default_rng(cfg.seed)
    best = -np.inf
    best_c = None
    for q in _haar_batch(rng, cfg.samples, component):
        c = geometry.extreme_point(QM if inner == SEP else MAX, s, q)
        value = geometry.gauge(inner, s, c).value
        if value > best:
            best, best_c = value, c
    return ScanResult(float(best), best_c)
