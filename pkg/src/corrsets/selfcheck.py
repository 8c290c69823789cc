"""Verification battery: every closed form against its independent route.

Each check draws fresh random instances, compares two ways of computing the
same quantity, and reports the worst deviation it saw. A failing check
serializes one offending instance as JSON so it can be replayed by hand.

Reports are pure functions of (level, seed): running twice with the same
arguments gives byte-identical text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import detect, geometry, oracles, twoqubit
from ._version import __version__
from .geometry import MAX, QM, SEP, MeasurementSettings
from .oracles import OracleConfig
from .smallmat import (det3_intrinsic, kron, max_trace_over_rotations, norm_minus,
                       norm_plus, op_norm, pinv, random_rotation, special_svd,
                       trace_norm, vec)

LEVELS = ("quick", "full")

# Sample counts per level. The quick column is sized for a seconds-scale
# smoke run, the full column for the real gate.
_SIZES = {
    "quick": dict(combo=25, dual=150, dual_oracle=6, identity=2000, recon=20_000,
                  m2=400, mc_states=400, mc_z=8, hull=2, scan=500, rigidity=120,
                  pullback=400),
    "full": dict(combo=1000, dual=1000, dual_oracle=25, identity=10_000, recon=100_000,
                 m2=10_000, mc_states=10_000, mc_z=100, hull=8, scan=10_000,
                 rigidity=1000, pullback=5000),
}

_COMBOS = [(m, rank) for m in (2, 3, 4, 5) for rank in (1, 2, 3) if rank <= min(3, m)]

# Agreement tolerances between closed forms and oracles.
_TOL_EXACT = 1e-9
_TOL_EIG = 1e-6
_TOL_SEP_ORACLE = 1e-4


@dataclass
class CheckResult:
    name: str
    passed: bool
    instances: int
    worst: float
    detail: str = ""


@dataclass
class VerifyReport:
    level: str
    seed: int
    version: str
    results: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def render(self) -> str:
        lines = [f"verification report: level={self.level} seed={self.seed} "
                 f"version={self.version}"]
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"{status} {r.name:<28s} instances={r.instances:<7d} "
                         f"worst={r.worst:.6e}")
            if r.detail and not r.passed:
                lines.append(f"     replay: {r.detail}")
        npass = sum(r.passed for r in self.results)
        lines.append(f"summary: {npass} passed, {len(self.results) - npass} failed")
        return "\n".join(lines) + "\n"


def _serialize(**kwargs) -> str:
    out = {}
    for key, value in kwargs.items():
        if isinstance(value, np.ndarray):
            out[key] = np.round(value, 14).tolist()
        elif isinstance(value, (np.floating, np.integer)):
            out[key] = value.item()
        else:
            out[key] = value
    return json.dumps(out, sort_keys=True)


def _result(name, n, worst, tol, detail="") -> CheckResult:
    return CheckResult(name, bool(worst <= tol), n, float(worst), detail)


def _check_support_oracles(rng, sizes):
    """Closed-form supports vs grid/eigensolve oracles across (m, rank)."""
    n = sizes["combo"]
    cfg = OracleConfig(seed=int(rng.integers(2**31)), grid_points=1024, restarts=12)
    worst = {SEP: 0.0, QM: 0.0, MAX: 0.0}
    lower_breach = 0.0
    bad = {SEP: "", QM: "", MAX: ""}
    count = 0
    for m, rank in _COMBOS:
        for _ in range(n):
            s = oracles.random_settings(rng, m, rank)
            z = rng.standard_normal((m, m))
            count += 1
            for model, reference in (
                (SEP, oracles.support_sep_oracle(s, z, cfg)),
                (QM, oracles.support_qm_oracle(s, z)),
                (MAX, oracles.support_max_oracle(s, z)),
            ):
                value = geometry.support(model, s, z)
                dev = abs(value - reference)
                if model == SEP:
                    lower_breach = max(lower_breach, reference - value)
                if dev > worst[model]:
                    worst[model] = dev
                    bad[model] = _serialize(model=model, a=s.a, b=s.b, z=z,
                                            closed=value, oracle=reference)
    results = [
        _result("support-vs-oracle-sep", count, worst[SEP], _TOL_SEP_ORACLE, bad[SEP]),
        _result("support-vs-oracle-qm", count, worst[QM], _TOL_EIG, bad[QM]),
        _result("support-vs-oracle-max", count, worst[MAX], _TOL_EIG, bad[MAX]),
        _result("sep-oracle-one-sided", count, lower_breach, _TOL_EXACT),
    ]
    return results


def _random_finite_c(rng, s):
    """Correlation-type matrix guaranteed compatible with the setting ranges."""
    c = s.a @ rng.standard_normal((3, 3)) @ s.b.T
    norm = np.linalg.norm(c)
    return c / norm if norm > 0 else c


def _check_duality(rng, sizes):
    """Optimizer attainment: Tr[Z*^T C] / support(Z*) reproduces the gauge."""
    n = sizes["dual"]
    worst = 0.0
    bad = ""
    count = 0
    for model in geometry.MODELS:
        for _ in range(n):
            m = int(rng.integers(2, 6))
            rank = int(rng.integers(1, min(3, m) + 1))
            s = oracles.random_settings(rng, m, rank)
            c = _random_finite_c(rng, s)
            g = geometry.gauge(model, s, c)
            if not g.finite or g.value <= 1e-12:
                continue
            count += 1
            z_star = geometry.optimizer_z(model, s, c)
            ratio = float(np.sum(z_star * c)) / geometry.support(model, s, z_star)
            dev = abs(ratio - g.value) / max(1.0, g.value)
            if dev > worst:
                worst = dev
                bad = _serialize(model=model, a=s.a, b=s.b, c=c,
                                 gauge=g.value, ratio=ratio)
    return [_result("gauge-duality-attainment", count, worst, 1e-8, bad)]


def _check_dual_oracle(rng, sizes):
    """Sampled dual ratios agree with the gauge once Z* is in the pool."""
    n = sizes["dual_oracle"]
    cfg = OracleConfig(seed=int(rng.integers(2**31)), samples=4000)
    worst = 0.0
    bad = ""
    count = 0
    for model in geometry.MODELS:
        for _ in range(n):
            m = int(rng.integers(2, 5))
            s = oracles.random_settings(rng, m, int(rng.integers(1, min(3, m) + 1)))
            c = _random_finite_c(rng, s)
            g = geometry.gauge(model, s, c)
            if not g.finite or g.value <= 1e-12:
                continue
            count += 1
            dev = abs(oracles.gauge_dual_oracle(model, s, c, cfg) - g.value)
            if dev > worst:
                worst = dev
                bad = _serialize(model=model, a=s.a, b=s.b, c=c, gauge=g.value)
    return [_result("gauge-vs-dual-oracle", count, worst, 1e-8, bad)]


def _gram_2x2(theta):
    return np.array([[1.0, np.cos(theta)], [np.cos(theta), 1.0]])


def _skew_2x2(theta):
    return np.array([[np.exp(-1j * theta), 1.0], [1.0, np.exp(1j * theta)]])


def _ell_2x2(theta):
    return np.array([[1.0, -np.exp(1j * theta)],
                     [-np.exp(-1j * theta), 1.0]]) / np.sin(theta) ** 2


def _f_4x4(alpha, beta):
    ca, cb = np.cos(alpha), np.cos(beta)
    f = np.array([
        [1.0, -ca, -cb, np.cos(alpha + beta)],
        [-ca, 1.0, np.cos(alpha - beta), -cb],
        [-cb, np.cos(alpha - beta), 1.0, -ca],
        [np.cos(alpha + beta), -cb, -ca, 1.0],
    ])
    return f / (np.sin(alpha) ** 2 * np.sin(beta) ** 2)


def _check_m2_forms(rng, sizes):
    """Angle-form expressions at m = 2 against the general SVD route.

    Every eighth draw is near-degenerate, with sin(alpha) sin(beta) pushed
    down to exactly 1e-6 on a fixed cadence. The explicit trace and
    Kronecker quadratic forms hold extra digits only at moderate angles
    (their matrices carry 1/sin^2 factors that eat precision), so those
    routes are compared on the moderate draws; the production closed forms,
    which factor the same expressions through rank-one phase vectors, are
    compared on every draw. Deviations are measured relative to the value,
    since the gauge forms blow up as the angles degenerate.
    """
    n = sizes["m2"]
    worst = 0.0
    bad = ""
    for i in range(n):
        near_degenerate = i % 8 == 7
        if near_degenerate:
            log_product = -6.0 if i % 16 == 15 else rng.uniform(-6.0, -2.5)
            sines = np.sqrt(10.0 ** log_product)
            alpha = np.arcsin(sines) if rng.integers(2) else np.pi - np.arcsin(sines)
            beta = np.arcsin(sines) if rng.integers(2) else np.pi - np.arcsin(sines)
        else:
            alpha = rng.uniform(0.05, np.pi - 0.05)
            beta = rng.uniform(0.05, np.pi - 0.05)
        s = geometry.planar_settings(alpha, beta, rng)
        z = rng.standard_normal((2, 2))
        c = _random_finite_c(rng, s)

        checks = []
        for model in (SEP, QM):
            general = geometry.support(model, s, z)
            closed = geometry.support_m2_closed_form(model, s, z)
            checks.append((general, closed, "support-" + model))
        g_sep = geometry.gauge(SEP, s, c)
        if g_sep.finite:
            checks.append((g_sep.value, geometry.gauge_m2_closed_form(SEP, s, c),
                           "gauge-sep"))
        g_qm = geometry.gauge(QM, s, c)
        if g_qm.finite:
            closed_qm = geometry.gauge_m2_closed_form(QM, s, c)
            checks.append((g_qm.value, closed_qm, "gauge-qm"))

        # vec-form route for the support: quadratic forms in vec(Z) with the
        # Kronecker matrices. Entries are O(1), fine at any angle.
        ga, gb = _gram_2x2(alpha), _gram_2x2(beta)
        zv = z.T.ravel()
        kq = float(zv @ np.kron(gb, ga) @ zv)
        jq = complex(zv @ np.kron(_skew_2x2(beta), ga) @ zv)
        checks.append((geometry.support(SEP, s, z),
                       np.sqrt((kq + abs(jq)) / 2.0), "support-sep-vec"))

        if not near_degenerate:
            # explicit matrix routes for the gauges
            ga_inv = np.linalg.inv(ga)
            gb_inv = np.linalg.inv(gb)
            sep_trace = float(np.trace(ga_inv @ c @ gb_inv @ c.T))
            sep_lit = np.sqrt(max(0.0, sep_trace
                                  + 2.0 * abs(float(np.linalg.det(c)))
                                  / (np.sin(alpha) * np.sin(beta))))
            checks.append((g_sep.value, sep_lit, "gauge-sep-literal"))
            la = _ell_2x2(alpha)
            t_plus = complex(np.trace(la @ c @ _ell_2x2(beta).T @ c.T)).real
            t_minus = complex(np.trace(la @ c @ _ell_2x2(-beta).T @ c.T)).real
            ell_val = 0.5 * (np.sqrt(max(0.0, t_plus)) + np.sqrt(max(0.0, t_minus)))
            checks.append((g_qm.value, ell_val, "gauge-qm-literal"))
            cv = c.T.ravel()
            fq = float(cv @ _f_4x4(alpha, beta) @ cv)
            fq_m = float(cv @ _f_4x4(alpha, -beta) @ cv)
            vec_val = 0.5 * (np.sqrt(max(fq, 0.0)) + np.sqrt(max(fq_m, 0.0)))
            checks.append((g_qm.value, vec_val, "gauge-qm-vec"))

        for general, closed, tag in checks:
            dev = abs(general - closed) / max(1.0, abs(general))
            if dev > worst:
                worst = dev
                bad = _serialize(tag=tag, alpha=alpha, beta=beta, a=s.a, b=s.b,
                                 z=z, c=c, general=general, closed=closed)
    return [_result("m2-closed-forms", n, worst, _TOL_EXACT, bad)]


def _check_kernel_identities(rng, sizes):
    """SVD reconstruction, pseudoinverse laws, the vectorization identity,
    and the intrinsic determinant expansion."""
    n_recon = sizes["recon"]
    mats = rng.standard_normal((n_recon, 3, 3))
    u, sv, vt = np.linalg.svd(mats)
    rebuilt = np.einsum("kij,kj,kjl->kil", u, sv, vt)
    recon_dev = float(np.abs(rebuilt - mats).max())

    n = sizes["identity"]
    n_pinv = max(1, n // 20)
    penrose_dev = 0.0
    for _ in range(n_pinv):
        m = int(rng.integers(1, 7))
        x = rng.standard_normal((m, 3))
        k = int(rng.integers(1, 4))
        if k < 3:
            basis = np.linalg.qr(rng.standard_normal((3, 3)))[0][:, :k]
            x = x @ basis @ basis.T
        p = pinv(x)
        penrose_dev = max(
            penrose_dev,
            float(np.abs(x @ p @ x - x).max()),
            float(np.abs(p @ x @ p - p).max()),
            float(np.abs((x @ p) - (x @ p).T).max()),
            float(np.abs((p @ x) - (p @ x).T).max()),
        )

    vec_dev = 0.0
    for _ in range(max(1, n // 20)):
        ma, mb = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        a = rng.standard_normal((ma, 3))
        x = rng.standard_normal((3, 3))
        b = rng.standard_normal((mb, 3))
        vec_dev = max(vec_dev, float(np.abs(
            vec(a @ x @ b.T) - kron(b, a) @ vec(x)).max()))

    det_dev = 0.0
    for _ in range(n):
        m = int(rng.integers(2, 6))
        s = oracles.random_settings(rng, m, int(rng.integers(1, min(3, m) + 1)))
        z = rng.standard_normal((m, m))
        frame = s.a.T @ z @ s.b
        det_dev = max(det_dev, abs(det3_intrinsic(s.a, s.b, z)
                                   - float(np.linalg.det(frame))))

    return [
        _result("svd-reconstruction", n_recon, recon_dev, 1e-11),
        _result("pseudoinverse-laws", n_pinv, penrose_dev, 1e-8),
        _result("vectorization-identity", max(1, n // 20), vec_dev, _TOL_EXACT),
        _result("intrinsic-determinant", n, det_dev, _TOL_EXACT),
    ]


def _check_asymmetric_norms(rng, sizes):
    """Chain and duality of the signed singular value combinations.

    Both signed norms sit between the operator and trace norms; they order
    as norm_minus <= norm_plus only when det >= 0 (negating flips which is
    which, the mirror identity). Duality: sup Tr[X^T Y]/norm_minus(Y) =
    norm_plus(X), attained at the best rotation; and the hull of sampled
    rotations stays in the norm_minus unit ball.
    """
    n = max(20, sizes["identity"] // 20)
    chain_dev = 0.0
    dual_dev = 0.0
    hull_dev = 0.0
    for _ in range(n):
        x = rng.standard_normal((3, 3))
        lo, hi, tn = norm_minus(x), norm_plus(x), trace_norm(x)
        op = op_norm(x)
        chain_dev = max(chain_dev, op - lo, op - hi, lo - tn, hi - tn,
                        abs(norm_plus(-x) - lo), abs(norm_minus(-x) - hi))
        if float(np.linalg.det(x)) >= 0.0:
            chain_dev = max(chain_dev, lo - hi)

        ys = rng.standard_normal((50, 3, 3))
        numer = np.einsum("ij,kij->k", x, ys)
        denom = np.array([norm_minus(y) for y in ys])
        sampled = float((numer / denom).max())
        _, q = max_trace_over_rotations(x, "SO3")
        attained = float(np.sum(x * q)) / norm_minus(q)
        dual_dev = max(dual_dev, sampled - hi, abs(attained - hi))

        qs = np.stack([random_rotation(rng, "SO3") for _ in range(5)])
        mix = np.tensordot(rng.dirichlet(np.ones(5)), qs, axes=1)
        hull_dev = max(hull_dev, norm_minus(mix) - 1.0)

    return [
        _result("asymmetric-norm-chain", n, chain_dev, _TOL_EXACT),
        _result("asymmetric-norm-duality", n * 50, dual_dev, _TOL_EIG),
        _result("rotation-hull-unit-ball", n * 5, hull_dev, _TOL_EXACT),
    ]


def _check_gram_equivalence(rng, sizes):
    """Supports depend on the settings only through their Gram matrices."""
    n = sizes["identity"]
    worst = 0.0
    bad = ""
    for _ in range(n):
        m = int(rng.integers(2, 6))
        s = oracles.random_settings(rng, m, int(rng.integers(1, min(3, m) + 1)))
        z = rng.standard_normal((m, m))
        for model in geometry.MODELS:
            direct = geometry.support(model, s, z)
            gram = geometry.gram_equivalent_support(s, z, model)
            dev = abs(direct - gram) / max(1.0, abs(direct))
            if dev > worst:
                worst = dev
                bad = _serialize(model=model, a=s.a, b=s.b, z=z,
                                 direct=direct, gram=gram)
    return [_result("gram-equivalence", n, worst, _TOL_EXACT, bad)]


def _check_bell_spectrum(rng, sizes):
    """Operator eigenvalues equal the odd signed sums of the special SVD."""
    n = sizes["identity"]
    worst = 0.0
    bad = ""
    signs = np.array([[1, 1, -1], [1, -1, 1], [-1, 1, 1], [-1, -1, -1]])
    for _ in range(n):
        m = int(rng.integers(2, 6))
        s = oracles.random_settings(rng, m, int(rng.integers(1, min(3, m) + 1)))
        z = rng.standard_normal((m, m))
        frame = s.a.T @ z @ s.b
        tilde = special_svd(frame).s
        predicted = np.sort(signs @ tilde)
        actual = np.linalg.eigvalsh(twoqubit.bell_operator(s, z))
        dev = float(np.abs(predicted - actual).max()) / max(1.0, abs(tilde).max())
        if dev > worst:
            worst = dev
            bad = _serialize(a=s.a, b=s.b, z=z, predicted=predicted, actual=actual)
    return [_result("bell-operator-spectrum", n, worst, _TOL_EXACT, bad)]


def _check_witness_mc(rng, sizes):
    """Witnesses stay nonnegative on their protected class, and the
    constructed maximizers violate them at the full margin."""
    n_states = sizes["mc_states"]
    n_z = sizes["mc_z"]
    s = detect.pauli_settings()

    sep_states = np.stack([twoqubit.random_separable_state(rng) for _ in range(n_states)])
    qm_states = np.stack([twoqubit.random_quantum_state(rng) for _ in range(n_states)])

    worst = 0.0
    bad = ""
    for _ in range(n_z):
        z = rng.standard_normal((3, 3))
        for states, build, tag in ((sep_states, detect.entanglement_witness, "sep"),
                                   (qm_states, detect.bqs_witness, "qm")):
            w = build(s, z)
            values = np.einsum("kij,ji->k", states, w).real
            breach = float(-values.min())
            if breach > worst:
                worst = breach
                bad = _serialize(tag=tag, z=z, value=float(values.min()))

    # Margin at the constructed maximizers: 1 - radius on both witnesses.
    margin_dev = 0.0
    q = random_rotation(rng, "SO3_minus")
    z_star = geometry.optimizer_z(SEP, s, s.a @ q @ s.b.T)
    w_ent = detect.entanglement_witness(s, z_star)
    rho = twoqubit.max_entangled(q)
    margin_dev = max(margin_dev,
                     abs(float(np.trace(rho @ w_ent).real) - (1.0 - 3.0)))
    z_star = geometry.optimizer_z(QM, s, np.eye(3))
    w_bqs = detect.bqs_witness(s, z_star)
    margin_dev = max(margin_dev,
                     abs(float(np.trace(twoqubit.rho_max() @ w_bqs).real) - (1.0 - 3.0)))

    return [
        _result("witness-nonnegativity", n_states * n_z * 2, worst, _TOL_EXACT, bad),
        _result("witness-margin", 2, margin_dev, _TOL_EXACT),
    ]


def _check_radii(rng, sizes):
    """Containment radii from the aligned constructions, plus the sampled scan."""
    del sizes
    expected = {
        "pauli3": (3.0, 3.0),
        "chsh": (2.0, 1.0),
        "rank1": (1.0, 1.0),
    }
    scenarios = {
        "pauli3": detect.pauli_settings(),
        "chsh": detect.chsh_settings(),
        "rank1": MeasurementSettings(np.tile([0.0, 0.0, 1.0], (2, 1)),
                                     np.tile([1.0, 0.0, 0.0], (2, 1))),
    }
    worst = 0.0
    bad = ""
    for name, s in scenarios.items():
        for pair, want in zip((detect.QM_OVER_SEP, detect.MAX_OVER_QM), expected[name]):
            report = detect.containment_radius(s, pair)
            dev = abs(report.radius - want)
            reached = geometry.gauge(report.pair[1], s, report.maximizer_c)
            dev = max(dev, abs(reached.value - want))
            if dev > worst:
                worst = dev
                bad = _serialize(scenario=name, pair=pair, radius=report.radius)

    # Alignment matters below full rank: an aligned reflection reaches 2,
    # a misaligned one stays strictly short of it.
    s2 = MeasurementSettings(
        np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
        np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
    aligned = geometry.gauge(SEP, s2, s2.a @ np.diag([1.0, 1.0, -1.0]) @ s2.b.T)
    theta = 0.4
    rot = np.array([[1.0, 0.0, 0.0],
                    [0.0, np.cos(theta), -np.sin(theta)],
                    [0.0, np.sin(theta), np.cos(theta)]])
    tilted = rot @ np.diag([1.0, 1.0, -1.0])
    misaligned = geometry.gauge(SEP, s2, s2.a @ tilted @ s2.b.T)
    align_dev = abs(aligned.value - 2.0)
    align_ok = misaligned.value < 2.0 - 1e-3
    result = _result("radii-constructions", 8, max(worst, align_dev), 1e-8, bad)
    if not align_ok:
        result.passed = False
        result.detail = _serialize(misaligned=misaligned.value)
    return [result]


def _check_ratio_scan(rng, sizes):
    """Sampled radii approach the exact values from below."""
    cfg = OracleConfig(seed=int(rng.integers(2**31)), samples=sizes["scan"])
    s = detect.pauli_settings()
    worst = 0.0
    slack = 0.01 if sizes["scan"] >= 10_000 else 0.25
    for pair, want in ((detect.QM_OVER_SEP, 3.0), (detect.MAX_OVER_QM, 3.0)):
        got = oracles.ratio_scan(s, pair, cfg).value
        if got > want + 1e-9:
            worst = max(worst, got - want)
        else:
            worst = max(worst, max(0.0, want - got - slack))
    return [_result("ratio-scan-approach", 2 * sizes["scan"], worst, 0.0)]


def _check_state_thresholds(rng, sizes):
    """Separability of the noisy singlet-type family flips at 2/3, and
    quantumness of the noisy beyond-quantum family flips at 2/3."""
    del rng, sizes

    def bisect(flag, lo, hi):
        while hi - lo > 1e-7:
            mid = 0.5 * (lo + hi)
            if flag(mid):
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    werner_flip = bisect(
        lambda p: twoqubit.classify_state(twoqubit.werner_state(p), restarts=8).is_separable,
        0.0, 1.0)
    tau_flip = bisect(
        lambda p: twoqubit.classify_state(twoqubit.tau_state(p), restarts=8).is_quantum,
        0.0, 1.0)
    worst = max(abs(werner_flip - 2.0 / 3.0), abs(tau_flip - 2.0 / 3.0))
    return [_result("state-class-thresholds", 2, worst, 1e-6)]


def _check_table1(rng, sizes):
    """Critical-noise table against its published values."""
    del rng, sizes
    rows = {row.method: (row.two_setting, row.three_setting)
            for row in detect.table1(detect.chsh_settings(), detect.pauli_settings())}
    chsh_p = 1.0 - 1.0 / np.sqrt(2.0)
    expected = {
        "ppt": (None, 2.0 / 3.0),
        "gauge": (0.5, 2.0 / 3.0),
        "chsh": (chsh_p, chsh_p),
        "i3322": (None, 0.2),
    }
    worst = 0.0
    for method, want in expected.items():
        for got_v, want_v in zip(rows[method], want):
            if want_v is None:
                if got_v is not None:
                    worst = max(worst, 1.0)
            else:
                worst = max(worst, abs(got_v - want_v))
    return [_result("table1-anchors", 8, worst, 1e-4)]


def _check_symmetry(rng, sizes):
    """Evenness of the separable and maximal gauges; the quantum gauge is
    genuinely asymmetric."""
    n = max(10, sizes["identity"] // 20)
    worst = 0.0
    for _ in range(n):
        m = int(rng.integers(2, 6))
        s = oracles.random_settings(rng, m, int(rng.integers(1, min(3, m) + 1)))
        c = _random_finite_c(rng, s)
        for model in (SEP, MAX):
            plus = geometry.gauge(model, s, c)
            minus = geometry.gauge(model, s, -c)
            if plus.finite != minus.finite:
                worst = max(worst, 1.0)
            elif plus.finite:
                worst = max(worst, abs(plus.value - minus.value))
    s3 = detect.pauli_settings()
    lopsided = geometry.gauge(QM, s3, np.eye(3)).value
    mirrored = geometry.gauge(QM, s3, -np.eye(3)).value
    if abs(lopsided - 3.0) > 1e-9 or abs(mirrored - 1.0) > 1e-9:
        worst = max(worst, abs(lopsided - 3.0), abs(mirrored - 1.0))
    return [_result("gauge-symmetry", 2 * n + 2, worst, _TOL_EXACT)]


def _check_hull_membership(rng, sizes):
    """Frank-Wolfe membership agrees with the gauge verdict on both sides."""
    n = sizes["hull"]
    cfg = OracleConfig(seed=int(rng.integers(2**31)))
    failures = 0.0
    count = 0
    bad = ""
    for model in geometry.MODELS:
        s = oracles.random_settings(rng, 3, 3)
        for _ in range(n):
            c = _random_finite_c(rng, s)
            g = geometry.gauge(model, s, c)
            if not g.finite or g.value <= 1e-9:
                continue
            inside = 0.85 * c / g.value
            outside = 1.1 * c / g.value
            count += 2
            if not oracles.hull_membership_oracle(model, s, inside, cfg):
                failures += 1.0
                bad = _serialize(model=model, a=s.a, b=s.b, c=inside, expect="inside")
            if oracles.hull_membership_oracle(model, s, outside, cfg):
                failures += 1.0
                bad = _serialize(model=model, a=s.a, b=s.b, c=outside, expect="outside")
        zero = np.zeros((3, 3))
        count += 1
        if not oracles.hull_membership_oracle(model, s, zero, cfg):
            failures += 1.0
            bad = _serialize(model=model, expect="zero inside")
    return [_result("hull-membership", count, failures, 0.0, bad)]


def _check_pullback(rng, sizes):
    """Support of the quantum body as a maximum over quantum states."""
    n = sizes["pullback"]
    s = oracles.random_settings(rng, 3, 3)
    z = rng.standard_normal((3, 3))
    phi = geometry.support(QM, s, z)
    op = twoqubit.bell_operator(s, z)
    states = np.stack([twoqubit.random_quantum_state(rng) for _ in range(n)])
    values = np.einsum("kij,ji->k", states, op).real
    # the top eigenvector's projector is itself a quantum state
    w, v = np.linalg.eigh(op)
    top = np.outer(v[:, -1], v[:, -1].conj())
    attained = float(np.trace(top @ op).real)
    overshoot = max(float(values.max()) - phi, attained - phi)
    gap = phi - attained
    return [_result("support-state-pullback", n + 1, max(overshoot, gap), _TOL_EXACT)]


def _check_rigidity(rng, sizes):
    """Orthogonal correlation blocks admit no local Bloch vectors.

    Nonzero local parts must break block positivity by at least the slice
    bound |r_A - Q r_B|; zero local parts sit exactly on the boundary.
    """
    n = sizes["rigidity"]
    worst = 0.0
    bad = ""
    for i in range(n):
        q = random_rotation(rng, "O3")
        if i % 2 == 0:
            ra = rng.standard_normal(3) * 0.2
            rb = rng.standard_normal(3) * 0.2
            slice_bound = float(np.linalg.norm(ra - q @ rb))
            if slice_bound < 1e-3:
                continue
            value, _, _ = twoqubit.block_positivity_minimum(
                twoqubit.PauliForm(1.0, ra, rb, q), restarts=16,
                seed=int(rng.integers(2**31)))
            # the minimum must dip at least as low as the slice bound says
            dev = max(0.0, value + slice_bound)
        else:
            value, _, _ = twoqubit.block_positivity_minimum(
                twoqubit.PauliForm(1.0, np.zeros(3), np.zeros(3), q), restarts=16,
                seed=int(rng.integers(2**31)))
            dev = abs(value)
        if dev > worst:
            worst = dev
            bad = _serialize(q=q, value=value, case="local" if i % 2 == 0 else "bare")
    return [_result("extremal-rigidity", n, worst, 1e-7, bad)]


def _check_scenario(s: MeasurementSettings, seed: int):
    """Spot-check the closed forms on one user-supplied scenario."""
    rng = np.random.default_rng(seed)
    cfg = OracleConfig(seed=seed)
    worst = 0.0
    for _ in range(20):
        z = rng.standard_normal((s.m, s.m))
        worst = max(
            worst,
            abs(geometry.support(SEP, s, z) - oracles.support_sep_oracle(s, z, cfg)),
            abs(geometry.support(QM, s, z) - oracles.support_qm_oracle(s, z)),
            abs(geometry.support(MAX, s, z) - oracles.support_max_oracle(s, z)),
        )
    return [_result("scenario-spot-check", 20, worst, _TOL_SEP_ORACLE)]


_CHECKS = [
    _check_support_oracles,
    _check_duality,
    _check_dual_oracle,
    _check_m2_forms,
    _check_kernel_identities,
    _check_asymmetric_norms,
    _check_gram_equivalence,
    _check_bell_spectrum,
    _check_witness_mc,
    _check_radii,
    _check_ratio_scan,
    _check_state_thresholds,
    _check_table1,
    _check_symmetry,
    _check_hull_membership,
    _check_pullback,
    _check_rigidity,
]


def run_battery(level: str = "quick", seed: int = 0,
                scenario: MeasurementSettings | None = None) -> VerifyReport:
    """Run every check at the chosen level and collect a deterministic report."""
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level!r}")
    sizes = _SIZES[level]
    streams = np.random.SeedSequence(seed).spawn(len(_CHECKS))
    results = []
    for check, stream in zip(_CHECKS, streams):
        results.extend(check(np.random.default_rng(stream), sizes))
    if scenario is not None:
        results.extend(_check_scenario(scenario, seed))
    return VerifyReport(level=level, seed=seed, version=__version__, results=results)
