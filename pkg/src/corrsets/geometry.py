"""Correlation-set geometry for fixed two-qubit measurement settings.

A scenario is a pair of m x 3 matrices A, B whose unit rows are the Bloch
directions of each party's dichotomic observables. A state with Pauli
correlation block T produces the m x m correlation matrix C = A T B.T, and
three nested convex bodies of such matrices arise from the separable, the
quantum and the block-positive (maximal) state classes.

This module computes, for each of the three models:

* the support function of the body at a coefficient matrix Z, which is a
  norm of the 3x3 matrix A.T Z B (largest singular value, the signed
  combination s1 + s2 - s3 sgn(det), or the trace norm);
* the gauge function of the body at a correlation matrix C, the smallest
  t with C/t inside the body, finite exactly when C is compatible with the
  ranges of A and B and then a matching norm of W = A^+ C (B.T)^+;
* closed forms specific to m = 2 written in the Gram angles alpha, beta;
* the coefficient matrix attaining the gauge value in the duality
  sup_Z Tr[Z.T C] / support(Z);
* extreme points, membership tests, and a constructor that realizes any
  admissible singular value pattern of A.T Z B.

Everything is deterministic and allocation-light; matrices stay small.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import twoqubit
from .smallmat import (
    EPS,
    RANK_TOL,
    det3_intrinsic,
    det_sign,
    norm_minus,
    norm_plus,
    op_norm,
    pinv,
    random_rotation,
    svdvals,
    trace_norm,
)

SEP = "sep"
QM = "qm"
MAX = "max"
MODELS = (SEP, QM, MAX)

UNIT_ROW_TOL = 1e-9
RANGE_TOL = 1e-8
DEGENERATE_ANGLE_TOL = 1e-9


def _check_model(model: str) -> str:
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    return model


@dataclass
class MeasurementSettings:
    """Measurement directions of both parties, one unit row per setting."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2 or a.shape[1] != 3:
            raise ValueError(f"A must be m x 3, got {a.shape}")
        if b.shape != a.shape:
            raise ValueError(f"B must match A's shape {a.shape}, got {b.shape}")
        if a.shape[0] < 1:
            raise ValueError("need at least one measurement setting")
        for name, mat in (("A", a), ("B", b)):
            norms = np.linalg.norm(mat, axis=1)
            if np.max(np.abs(norms - 1.0)) > UNIT_ROW_TOL:
                raise ValueError(f"rows of {name} must be unit vectors")
        self.a = a
        self.b = b

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @cached_property
    def gram_a(self) -> np.ndarray:
        return self.a @ self.a.T

    @cached_property
    def gram_b(self) -> np.ndarray:
        return self.b @ self.b.T

    @cached_property
    def rank_a(self) -> int:
        return _numerical_rank(self.a)

    @cached_property
    def rank_b(self) -> int:
        return _numerical_rank(self.b)

    @property
    def r(self) -> int:
        """min rank of the two setting matrices; controls which sets coincide."""
        return min(self.rank_a, self.rank_b)


def _numerical_rank(x) -> int:
    # Strict inequality so values sitting exactly at the cutoff resolve
    # toward the lower rank.
    s = svdvals(x)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))


@dataclass(frozen=True)
class GaugeValue:
    """Gauge function result; ``finite`` is False when no scaling works."""

    finite: bool
    value: float = field(default=float("inf"))

    def __post_init__(self):
        if self.finite and not self.value >= 0.0:
            raise ValueError("finite gauge values must be >= 0")


def correlation_matrix(rho, s: MeasurementSettings) -> np.ndarray:
    """Image of a state under the settings: C = A T B.T."""
    t = twoqubit.pauli_expand(rho).t
    return s.a @ t @ s.b.T


def planar_settings(alpha: float, beta: float, rng=None) -> MeasurementSettings:
    """Two settings per party at prescribed Gram angles.

    a1.a2 = cos(alpha) and b1.b2 = cos(beta). With an rng the two planes get
    independent random orientations in space; the angles are what matter.
    """
    a = np.array([[1.0, 0.0, 0.0], [np.cos(alpha), np.sin(alpha), 0.0]])
    b = np.array([[1.0, 0.0, 0.0], [np.cos(beta), np.sin(beta), 0.0]])
    if rng is not None:
        rng = np.random.default_rng(rng)
        a = a @ random_rotation(rng, "SO3").T
        b = b @ random_rotation(rng, "SO3").T
    return MeasurementSettings(a, b)


def _frame(s: MeasurementSettings, z) -> np.ndarray:
    """A.T Z B, the coefficient matrix pushed into Bloch coordinates."""
    z = np.asarray(z, dtype=float)
    if z.shape != (s.m, s.m):
        raise ValueError(f"coefficient matrix must be {s.m}x{s.m}, got {z.shape}")
    return s.a.T @ z @ s.b


def support(model: str, s: MeasurementSettings, z) -> float:
    """Support function of the model's correlation body at Z."""
    _check_model(model)
    m = _frame(s, z)
    if model == SEP:
        return op_norm(m)
    if model == QM:
        return norm_minus(m)
    return trace_norm(m)


def _cos_sin_m2(s: MeasurementSettings):
    """Cosine and sine of each party's Gram angle, (ca, sa, cb, sb).

    The sine comes from the cross product, not from arccos of the dot
    product: for nearly collinear rows the latter only knows the sine to
    absolute epsilon through the cosine, which costs ~1e-10 of relative
    accuracy exactly where the closed forms divide by it.
    """
    if s.m != 2:
        raise ValueError("closed forms in the Gram angles need m = 2")
    ca = float(s.a[0] @ s.a[1])
    sa = float(np.linalg.norm(np.cross(s.a[0], s.a[1])))
    cb = float(s.b[0] @ s.b[1])
    sb = float(np.linalg.norm(np.cross(s.b[0], s.b[1])))
    return ca, sa, cb, sb


def _gram_2x2(cos_theta: float) -> np.ndarray:
    return np.array([[1.0, cos_theta], [cos_theta, 1.0]])


def _skew_2x2(cos_theta: float, sin_theta: float) -> np.ndarray:
    e = complex(cos_theta, sin_theta)
    return np.array([[e.conjugate(), 1.0], [1.0, e]], dtype=complex)


def support_m2_closed_form(model: str, s: MeasurementSettings, z) -> float:
    """Two-setting support function straight from the Gram angles.

    Avoids the SVD entirely: for two settings per side the support function
    reduces to scalar traces against the 2x2 Gram matrix of each party and,
    for the separable body, one complex phase matrix.
    """
    if model not in (SEP, QM):
        raise ValueError("closed forms cover the sep and qm models only")
    ca, sa, cb, sb = _cos_sin_m2(s)
    z = np.asarray(z, dtype=float)
    if z.shape != (2, 2):
        raise ValueError(f"coefficient matrix must be 2x2, got {z.shape}")
    ga = _gram_2x2(ca)
    gb = _gram_2x2(cb)
    quad = float(np.trace(ga @ z @ gb @ z.T))
    if model == SEP:
        cross = abs(complex(np.trace(ga @ z @ _skew_2x2(cb, sb) @ z.T)))
        return float(np.sqrt(max(0.0, (quad + cross) / 2.0)))
    det_term = 2.0 * abs(float(np.linalg.det(z))) * sa * sb
    return float(np.sqrt(max(0.0, quad + det_term)))


def _range_deficit(projector: np.ndarray, c: np.ndarray) -> float:
    return float(np.linalg.norm(c - projector @ c))


def _gauge_core(s: MeasurementSettings, c):
    """Range check plus W = A^+ C (B.T)^+; returns (finite, W, norm_c)."""
    c = np.asarray(c, dtype=float)
    if c.shape != (s.m, s.m):
        raise ValueError(f"correlation matrix must be {s.m}x{s.m}, got {c.shape}")
    norm_c = float(np.linalg.norm(c))
    if norm_c == 0.0:
        return True, np.zeros((3, 3)), 0.0
    a_pinv = pinv(s.a)
    b_pinv = pinv(s.b)
    if _range_deficit(s.a @ a_pinv, c) > RANGE_TOL * norm_c:
        return False, None, norm_c
    if _range_deficit(s.b @ b_pinv, c.T) > RANGE_TOL * norm_c:
        return False, None, norm_c
    w = a_pinv @ c @ b_pinv.T
    return True, w, norm_c


def gauge(model: str, s: MeasurementSettings, c) -> GaugeValue:
    """Gauge function of the model's correlation body at C.

    Infinite whenever C is incompatible with the column spaces of A or B,
    since no scaling of such a C is reachable by any state. Otherwise a
    norm of W = A^+ C (B.T)^+: the trace norm for the separable body, the
    operator norm for the maximal one, and for the quantum body the signed
    sum s1 + s2 + s3 sgn(det W) when both settings have full rank (below
    full rank the quantum and maximal bodies coincide).
    """
    _check_model(model)
    finite, w, norm_c = _gauge_core(s, c)
    if not finite:
        return GaugeValue(False)
    if norm_c == 0.0:
        return GaugeValue(True, 0.0)
    if model == SEP:
        return GaugeValue(True, trace_norm(w))
    if model == MAX:
        return GaugeValue(True, op_norm(w))
    if s.r == 3:
        return GaugeValue(True, norm_plus(w))
    return GaugeValue(True, op_norm(w))


def gauge_m2_closed_form(model: str, s: MeasurementSettings, c) -> float:
    """Two-setting gauge function from the Gram angles.

    Requires both angle sines bounded away from zero; with collinear
    settings the body flattens out and the general path with its range
    test is the right tool.
    """
    if model not in (SEP, QM):
        raise ValueError("closed forms cover the sep and qm models only")
    ca, sa, cb, sb = _cos_sin_m2(s)
    if sa * sb <= DEGENERATE_ANGLE_TOL:
        raise ValueError("settings are too close to collinear for the closed form")
    c = np.asarray(c, dtype=float)
    if c.shape != (2, 2):
        raise ValueError(f"correlation matrix must be 2x2, got {c.shape}")
    # The phase matrices are rank one, L_theta = u u^dag / sin^2(theta) with
    # u = (1, -exp(-i theta)), so each quadratic trace collapses to the
    # squared modulus of a single scalar. Evaluating those scalars first and
    # dividing by the sines last keeps the cancellation at the scale of the
    # entries of C instead of 1/sin^2, which is what makes nearly collinear
    # settings come out to full precision.
    ua = np.array([1.0, -complex(ca, sa)])
    ub = np.array([1.0, -complex(cb, sb)])
    w_plus = abs(complex(ua @ c @ ub))
    w_minus = abs(complex(ua @ c @ ub.conjugate()))
    if model == SEP:
        return max(w_plus, w_minus) / (sa * sb)
    return 0.5 * (w_plus + w_minus) / (sa * sb)


def optimizer_z(model: str, s: MeasurementSettings, c) -> np.ndarray:
    """Coefficient matrix attaining the gauge value in the support duality.

    The returned Z satisfies Tr[Z.T C] / support(model, s, Z) = gauge value.
    Built from the SVD of W = A^+ C (B.T)^+: the full orthogonal product
    for the separable body, the top dyad for the maximal body, and for the
    quantum body at full rank the orthogonal product with the trailing
    direction flipped onto the orientation of W.
    """
    _check_model(model)
    finite, w, norm_c = _gauge_core(s, c)
    if not finite:
        raise ValueError("gauge is infinite; no optimizer exists")
    if norm_c == 0.0:
        raise ValueError("gauge is zero at C = 0; the duality ratio is undefined")
    u, _, vt = np.linalg.svd(w)
    if model == SEP:
        core = u @ vt
    elif model == MAX or s.r <= 2:
        core = np.outer(u[:, 0], vt[0])
    else:
        eta = 1.0 if np.linalg.det(u @ vt) > 0 else -1.0
        core = u @ np.diag([1.0, 1.0, eta]) @ vt
    at_pinv = pinv(s.a).T          # (A.T)^+
    b_pinv = pinv(s.b)
    return at_pinv @ core @ b_pinv


def membership(model: str, s: MeasurementSettings, c, tol: float = 1e-9) -> bool:
    """Whether C lies in the model's correlation body, up to tol in gauge."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    g = gauge(model, s, c)
    return g.finite and g.value <= 1.0 + tol


def extreme_point(model: str, s: MeasurementSettings, param) -> np.ndarray:
    """An extreme point of the model's correlation body.

    For the separable body ``param`` is a pair of unit Bloch vectors
    (ra, rb) and the point is A ra rb.T B.T. For the quantum body it is an
    orthogonal 3x3 matrix with determinant -1, for the maximal body any
    orthogonal matrix, and the point is A Q B.T.
    """
    _check_model(model)
    if model == SEP:
        ra, rb = param
        ra = np.asarray(ra, dtype=float)
        rb = np.asarray(rb, dtype=float)
        if ra.shape != (3,) or rb.shape != (3,):
            raise ValueError("separable extreme points take two 3-vectors")
        if abs(np.linalg.norm(ra) - 1.0) > UNIT_ROW_TOL or abs(np.linalg.norm(rb) - 1.0) > UNIT_ROW_TOL:
            raise ValueError("Bloch vectors must be unit length")
        return s.a @ np.outer(ra, rb) @ s.b.T
    q = np.asarray(param, dtype=float)
    if q.shape != (3, 3) or np.linalg.norm(q.T @ q - np.eye(3)) > UNIT_ROW_TOL * 10:
        raise ValueError("extreme points of this body take an orthogonal 3x3 matrix")
    if model == QM and np.linalg.det(q) > 0:
        raise ValueError("quantum extreme points need determinant -1")
    return s.a @ q @ s.b.T


def construct_target_Z(s: MeasurementSettings, target, det_sign_req: int = 0) -> np.ndarray:
    """Coefficient matrix whose frame A.T Z B has the given singular values.

    ``target`` lists the desired nonzero singular values, descending, at
    most r = min rank of the settings; the remaining singular values come
    out zero. ``det_sign_req`` of +1 or -1 additionally fixes the sign of
    det(A.T Z B), which needs three nonzero target values.
    """
    target = np.asarray(target, dtype=float)
    if target.ndim != 1 or target.size > s.r:
        raise ValueError(f"target must list at most r = {s.r} values")
    if np.any(target < 0) or np.any(np.diff(target) > 0):
        raise ValueError("target values must be nonnegative and descending")
    d = np.zeros(3)
    d[: target.size] = target

    # Orthonormal bases whose leading columns span the row spaces.
    va = np.linalg.svd(s.a, full_matrices=True)[2].T
    vb = np.linalg.svd(s.b, full_matrices=True)[2].T

    if det_sign_req not in (-1, 0, 1):
        raise ValueError("det_sign_req must be -1, 0 or +1")
    if det_sign_req != 0:
        if target.size < 3 or target[2] <= 0.0:
            raise ValueError("a determinant sign needs three nonzero target values")
        current = np.linalg.det(va) * np.linalg.det(vb) * np.prod(d)
        if current * det_sign_req < 0:
            d[2] = -d[2]

    frame = va @ np.diag(d) @ vb.T
    return pinv(s.a).T @ frame @ pinv(s.b)


def _psd_sqrt(g: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(g)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def gram_equivalent_support(s: MeasurementSettings, z, model: str) -> float:
    """Support function evaluated in the Gram picture.

    Works on G_A^(1/2) Z G_B^(1/2), whose nonzero singular values match
    those of A.T Z B, and recovers the orientation sign for the quantum
    model from the basis-free determinant expansion. Agreement with
    ``support`` witnesses that the bodies depend on the settings only
    through their Gram data.
    """
    _check_model(model)
    z = np.asarray(z, dtype=float)
    if z.shape != (s.m, s.m):
        raise ValueError(f"coefficient matrix must be {s.m}x{s.m}, got {z.shape}")
    mm = _psd_sqrt(s.gram_a) @ z @ _psd_sqrt(s.gram_b)
    sv = svdvals(mm)
    if model == SEP:
        return float(sv[0]) if sv.size else 0.0
    if model == MAX:
        return float(sv.sum())
    s3 = np.zeros(3)
    s3[: min(3, sv.size)] = sv[:3]
    det = det3_intrinsic(s.a, s.b, z)
    if abs(det) < 1e-12 * s3[0] * s3[1] * max(s3[2], EPS):
        sign = 0.0
    else:
        sign = 1.0 if det > 0 else -1.0
    return float(s3[0] + s3[1] - s3[2] * sign)
