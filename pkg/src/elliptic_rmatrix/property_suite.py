"""Residual checks for the identities the R-matrix families satisfy.

Each ``check_*`` function evaluates one identity at explicit spectral
points, reduces it to a single relative Frobenius residual, and wraps the
outcome in a :class:`PropertyReport`.  Conventions shared by all checks:

* identities with a matrix on both sides use ||LHS - RHS|| / ||LHS||;
  identities whose right-hand side is (a scalar multiple of) the identity
  use ||LHS - RHS|| / max(1, ||RHS||), so residuals stay scale-free;
* sampling happens on fixed annuli (|z| in [0.5, 2], |q| in [0.3, 0.8],
  |p| in [0.05, 0.5]) with uniform phases;
* a PoleError triggers resampling (when an ``rng`` is supplied) and the
  report lists the points actually used, never the discarded ones.

``run_suite`` orchestrates every check over seeded random draws and is the
engine behind the CLI ``verify`` command.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import EllipticRMatrixError, PoleError, SingularError
from .special_functions import DEFAULT_POLICY, LogComplex, TruncationPolicy
from .tensor_algebra import (
    TensorOperator,
    antisymmetrizer,
    embed,
    partial_transpose,
    permutation_op,
    spectral,
)
from .rmatrix_builders import (
    ModelParams,
    RKind,
    alpha_exponent,
    build_f,
    build_g,
    build_g_half,
    build_h,
    build_r,
    build_v,
    rho,
    tau,
    u_scalar,
)

__all__ = [
    "PropertyReport",
    "DEFAULT_TOLERANCES",
    "CANARY_MARGIN",
    "draw_log",
    "draw_params",
    "check_ybe",
    "check_unitarity",
    "check_regularity",
    "check_crossing",
    "check_antisymmetry",
    "check_quasi_periodicity",
    "check_h_invariance",
    "check_crossing_unitarity",
    "check_kernel_structure",
    "check_spectrum_nonelliptic",
    "check_gauge_relation",
    "check_twist_relation",
    "check_p_to_zero",
    "check_evaluated_ll",
    "check_nsigma",
    "check_transpose_symmetry",
    "effective_pass",
    "run_suite",
]


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of one identity check.

    ``sample_points`` records the spectral arguments actually evaluated
    (post-resampling); ``detail`` carries check-specific extras such as the
    g^{1/2} branch used or a residual-vs-p sequence.
    """

    name: str
    params_digest: str
    sample_points: tuple[complex, ...]
    residual: float
    tolerance: float
    passed: bool
    runtime_ms: float
    detail: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.residual < 0.0:
            raise ValueError("residual must be non-negative")
        if self.passed != (self.residual <= self.tolerance):
            raise ValueError("passed flag inconsistent with residual vs tolerance")


DEFAULT_TOLERANCES: dict[str, float] = {
    "ybe": 1e-8,
    "unitarity": 1e-8,
    "regularity": 1e-8,
    "crossing": 1e-8,
    "antisymmetry": 1e-8,
    "quasi-periodicity": 1e-8,
    "h-invariance": 1e-8,
    "crossing-unitarity": 1e-8,
    "kernel-structure": 1e-9,
    "spectrum-nonelliptic": 1e-9,
    "gauge-relation": 1e-10,
    "twist-relation": 1e-10,
    "p-to-zero": 1e-5,
    "evaluated-ll": 1e-9,
    "nsigma": 0.0,
    "transpose-symmetry": 1e-8,
}

# A must-fail canary counts as discriminating only above this residual.
CANARY_MARGIN = 1e-3

Z_MODULUS = (0.5, 2.0)
Q_MODULUS = (0.3, 0.8)
P_MODULUS = (0.05, 0.5)
MAX_RESAMPLES = 8
COND_LIMIT = 1e12


def draw_log(rng: np.random.Generator, modulus: tuple[float, float] = Z_MODULUS) -> LogComplex:
    """Draw log(x) with |x| uniform on the annulus and uniform phase."""
    lo, hi = modulus
    return LogComplex(complex(math.log(rng.uniform(lo, hi)), rng.uniform(-math.pi, math.pi)))


def draw_params(
    rng: np.random.Generator,
    n: int,
    *,
    central_charge: float = 0.0,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> ModelParams:
    """Draw generic (q, p): redraw until no genericity warning fires."""
    while True:
        params = ModelParams(
            n, draw_log(rng, Q_MODULUS), draw_log(rng, P_MODULUS), central_charge, policy
        )
        if not params.genericity_warnings():
            return params


def _tol(name: str, override: float | None) -> float:
    return DEFAULT_TOLERANCES[name] if override is None else float(override)


def _report(
    name: str,
    params_digest: str,
    points: Iterable[complex],
    residual: float,
    tolerance: float,
    started: float,
    detail: dict | None = None,
) -> PropertyReport:
    residual = float(residual)
    return PropertyReport(
        name=name,
        params_digest=params_digest,
        sample_points=tuple(points),
        residual=residual,
        tolerance=tolerance,
        passed=residual <= tolerance,
        runtime_ms=(time.perf_counter() - started) * 1000.0,
        detail=dict(detail or {}),
    )


def _rel(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """Residual for matrix = matrix identities, normalized by the LHS."""
    return float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), 1e-300))


def _rel_identity(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """Residual for identities whose RHS is (a multiple of) the identity."""
    return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(rhs)))


def _inv(mat: np.ndarray, what: str) -> np.ndarray:
    if np.linalg.cond(mat) > COND_LIMIT:
        raise SingularError(f"matrix inversion in {what}: condition number exceeds {COND_LIMIT:g}")
    return np.linalg.inv(mat)


def _resample(
    compute: Callable[..., float],
    points: tuple[LogComplex, ...],
    redraw: Callable[[np.random.Generator], tuple[LogComplex, ...]] | None,
    rng: np.random.Generator | None,
) -> tuple[float, tuple[LogComplex, ...]]:
    attempts = 0
    while True:
        try:
            return compute(*points), points
        except PoleError:
            attempts += 1
            if rng is None or redraw is None or attempts > MAX_RESAMPLES:
                raise
            points = redraw(rng)


def _r21(params: ModelParams, kind: RKind, log_z: LogComplex) -> np.ndarray:
    return embed(build_r(params, kind, log_z), (2, 1), 2).entries


# ---------------------------------------------------------------------------
# identity checks


def check_ybe(
    params: ModelParams,
    kind: RKind,
    log_z1: LogComplex,
    log_z2: LogComplex,
    log_z3: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """R12(z1/z2) R13(z1/z3) R23(z2/z3) = R23 R13 R12 on three slots."""
    started = time.perf_counter()

    def compute(lz1: LogComplex, lz2: LogComplex, lz3: LogComplex) -> float:
        def emb(slots: tuple[int, int], lz: LogComplex) -> np.ndarray:
            return embed(build_r(params, kind, lz), slots, 3).entries

        r12 = emb((1, 2), lz1 / lz2)
        r13 = emb((1, 3), lz1 / lz3)
        r23 = emb((2, 3), lz2 / lz3)
        return _rel(r12 @ r13 @ r23, r23 @ r13 @ r12)

    redraw = lambda gen: (draw_log(gen), draw_log(gen), draw_log(gen))
    residual, pts = _resample(compute, (log_z1, log_z2, log_z3), redraw, rng)
    return _report(
        f"ybe[{kind.value}]",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("ybe", tolerance),
        started,
    )


def check_unitarity(
    params: ModelParams,
    kind: RKind,
    log_z: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """R12(z) R21(1/z) equals the kind-specific scalar times the identity.

    Plain elliptic and eight-vertex: the identity itself.  Hat
    normalization: U(z) I, with U evaluated from its theta-quotient form and
    cross-checked against tau(q^{1/2}z) tau(q^{1/2}/z).  Trigonometric
    kinds: rho_N(x) rho_N(1/x) I at x = z (homogeneous) or x = z^2.
    """
    started = time.perf_counter()
    detail: dict = {}

    def compute(lz: LogComplex) -> float:
        prod = build_r(params, kind, lz).entries @ _r21(params, kind, lz.inv())
        eye = np.eye(params.n * params.n)
        if kind in (RKind.ELLIPTIC, RKind.EIGHT_VERTEX):
            rhs = eye
        elif kind is RKind.ELLIPTIC_HAT:
            u_def = u_scalar(params, lz)
            half = params.log_q**0.5
            u_tau = tau(params, half * lz) * tau(params, half / lz)
            detail["u_cross_check"] = abs(u_def - u_tau) / max(abs(u_def), 1e-300)
            rhs = u_def * eye
        elif kind is RKind.HOMOGENEOUS:
            rhs = rho(params, lz) * rho(params, lz.inv()) * eye
        else:
            lx = lz**2
            rhs = rho(params, lx) * rho(params, lx.inv()) * eye
        return _rel_identity(prod, rhs)

    residual, pts = _resample(compute, (log_z,), lambda gen: (draw_log(gen),), rng)
    return _report(
        f"unitarity[{kind.value}]",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("unitarity", tolerance),
        started,
        detail,
    )


def check_regularity(
    params: ModelParams,
    kind: RKind = RKind.ELLIPTIC,
    *,
    tolerance: float | None = None,
) -> PropertyReport:
    """R(1) equals the permutation matrix (elliptic family only)."""
    started = time.perf_counter()
    r_one = build_r(params, kind, LogComplex(0j)).entries
    perm = permutation_op((2, 1), params.n).entries
    residual = _rel_identity(r_one, perm)
    return _report(
        f"regularity[{kind.value}]",
        params.digest(),
        [1.0 + 0j],
        residual,
        _tol("regularity", tolerance),
        started,
    )


def check_crossing(
    params: ModelParams,
    log_z: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """R12(z)^{t2} R21(z^{-1} q^{-N})^{t2} = I for the plain elliptic matrix."""
    started = time.perf_counter()
    n = params.n

    def compute(lz: LogComplex) -> float:
        lhs = partial_transpose(build_r(params, RKind.ELLIPTIC, lz), 2).entries
        arg = (lz * (params.log_q**n)).inv()
        r21_t2 = partial_transpose(TensorOperator(n, 2, _r21(params, RKind.ELLIPTIC, arg)), 2).entries
        return _rel_identity(lhs @ r21_t2, np.eye(n * n))

    residual, pts = _resample(compute, (log_z,), lambda gen: (draw_log(gen),), rng)
    return _report(
        "crossing",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("crossing", tolerance),
        started,
    )


def check_antisymmetry(
    params: ModelParams,
    log_z: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """R12(-z) = omega (g^{-1} x I) R12(z) (g x I), with -z = z e^{i pi}."""
    started = time.perf_counter()
    n = params.n
    g = build_g(params).entries
    eye = np.eye(n)

    def compute(lz: LogComplex) -> float:
        lhs = build_r(params, RKind.ELLIPTIC, lz.negated()).entries
        rhs = (
            params.omega()
            * np.kron(np.linalg.inv(g), eye)
            @ build_r(params, RKind.ELLIPTIC, lz).entries
            @ np.kron(g, eye)
        )
        return _rel(lhs, rhs)

    residual, pts = _resample(compute, (log_z,), lambda gen: (draw_log(gen),), rng)
    return _report(
        "antisymmetry",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("antisymmetry", tolerance),
        started,
    )


def check_quasi_periodicity(
    params: ModelParams,
    log_z: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """Rhat12(-z p^{1/2}) = G^{-1} Rhat21(1/z)^{-1} G with G = g^{1/2} h g^{1/2} x I.

    Tried with the principal branch of g^{1/2} first; if that misses the
    tolerance, retried with the alternate branch, and the report records
    which branch held.
    """
    started = time.perf_counter()
    n = params.n
    tol = _tol("quasi-periodicity", tolerance)
    h = build_h(params).entries
    eye = np.eye(n)
    detail: dict = {}

    def compute(lz: LogComplex) -> float:
        lhs = build_r(params, RKind.ELLIPTIC_HAT, (lz * (params.log_p**0.5)).negated()).entries
        r21_inv = _inv(_r21(params, RKind.ELLIPTIC_HAT, lz.inv()), "quasi-periodicity")
        best = math.inf
        for branch in ("principal", "alternate"):
            gh = build_g_half(params, alternate=(branch == "alternate")).entries
            big_g = np.kron(gh @ h @ gh, eye)
            res = _rel(lhs, np.linalg.inv(big_g) @ r21_inv @ big_g)
            if res < best:
                best = res
                detail["g_half_branch"] = branch
            if res <= tol:
                break
        return best

    residual, pts = _resample(compute, (log_z,), lambda gen: (draw_log(gen),), rng)
    return _report(
        "quasi-periodicity",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        tol,
        started,
        detail,
    )


def check_h_invariance(
    params: ModelParams,
    log_z: LogComplex,
    kind: RKind = RKind.ELLIPTIC,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """(H x H) R(z) = R(z) (H x H) with H the cyclic symmetry generator.

    For the kinds carrying the corner sign factor (elliptic and hat) the
    generator is h conjugated by the same half-power diagonal that produces
    that factor, H = g^{1/2} h g^{-1/2}; the bare h commutes only with the
    matrix written without the sign factor.  The explicit eight-vertex route
    (N = 2) uses bare h, where the two coincide in effect.
    """
    started = time.perf_counter()
    h = build_h(params).entries
    if kind in (RKind.ELLIPTIC, RKind.ELLIPTIC_HAT):
        gh = build_g_half(params).entries
        gen = gh @ h @ np.linalg.inv(gh)
        gen_name = "g^{1/2} h g^{-1/2}"
    else:
        gen = h
        gen_name = "h"

    def compute(lz: LogComplex) -> float:
        r = build_r(params, kind, lz).entries
        hh = np.kron(gen, gen)
        return _rel(hh @ r, r @ hh)

    residual, pts = _resample(compute, (log_z,), lambda gen_: (draw_log(gen_),), rng)
    return _report(
        f"h-invariance[{kind.value}]",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("h-invariance", tolerance),
        started,
        {"generator": gen_name},
    )


def check_crossing_unitarity(
    params: ModelParams,
    log_z: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """(R12(x)^{t2})^{-1} = (R12(q^N x)^{-1})^{t2}, for both R and Rhat."""
    started = time.perf_counter()
    n = params.n
    detail: dict = {}

    def compute(lz: LogComplex) -> float:
        worst = 0.0
        for kind in (RKind.ELLIPTIC, RKind.ELLIPTIC_HAT):
            r = build_r(params, kind, lz)
            lhs = _inv(partial_transpose(r, 2).entries, "crossing-unitarity")
            shifted = build_r(params, kind, (params.log_q**n) * lz)
            rhs = partial_transpose(
                TensorOperator(n, 2, _inv(shifted.entries, "crossing-unitarity")), 2
            ).entries
            res = _rel(lhs, rhs)
            detail[kind.value] = res
            worst = max(worst, res)
        return worst

    residual, pts = _resample(compute, (log_z,), lambda gen: (draw_log(gen),), rng)
    return _report(
        "crossing-unitarity",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("crossing-unitarity", tolerance),
        started,
        detail,
    )


def check_kernel_structure(
    params: ModelParams,
    *,
    tolerance: float | None = None,
    sv_threshold: float = 1e-8,
) -> PropertyReport:
    """At z = q the hat matrix kills exactly the antisymmetric subspace.

    Folds four sub-residuals: (i) ||Rhat(q) A2|| / ||Rhat(q)||; (ii) the
    rank defect vs N^2 - N(N-1)/2; (iii) the column-symmetry residual
    max |R^{j,l} - R^{l,j}| (weighted by 100 = the ratio of its tighter
    tolerance to this report's); (iv) the SVD kernel basis lying inside the
    antisymmetric subspace.
    """
    started = time.perf_counter()
    n = params.n
    r_hat = build_r(params, RKind.ELLIPTIC_HAT, params.log_q)
    a2 = antisymmetrizer(n, 2).entries
    scale = np.linalg.norm(r_hat.entries)

    res_kernel = float(np.linalg.norm(r_hat.entries @ a2) / scale)

    report = spectral(r_hat, sv_threshold=sv_threshold)
    expected_rank = n * n - n * (n - 1) // 2
    rank_defect = abs(report.rank - expected_rank)

    view = r_hat.tensor_view()
    sym = view - view.transpose(0, 1, 3, 2)
    res_colsym = float(np.max(np.abs(sym)) / np.max(np.abs(r_hat.entries)))

    kernel = report.kernel_basis
    res_basis = 0.0
    if kernel.size:
        res_basis = float(np.linalg.norm(a2 @ kernel - kernel) / np.linalg.norm(kernel))

    residual = max(res_kernel, 100.0 * res_colsym, float(rank_defect), res_basis)
    detail = {
        "kernel_residual": res_kernel,
        "rank": report.rank,
        "expected_rank": expected_rank,
        "column_symmetry_residual": res_colsym,
        "kernel_in_antisymmetric_subspace": res_basis,
    }
    return _report(
        "kernel-structure",
        params.digest(),
        [params.q],
        residual,
        _tol("kernel-structure", tolerance),
        started,
        detail,
    )


def check_spectrum_nonelliptic(
    params: ModelParams,
    *,
    tolerance: float | None = None,
) -> PropertyReport:
    """Eigenvalues of the non-elliptic matrix at z = q match the closed form.

    Expected multiset: rho_N(q^2) with multiplicity N, zero with
    multiplicity N(N-1)/2, and rho_N(q^2) Q (q^{(2i-2j+N)/N} +
    q^{-(2i-2j+N)/N}) for i < j, Q = q/(1 + q^2).  Greedy nearest matching
    in decreasing magnitude order; residual = max pair distance / max |eig|.
    """
    started = time.perf_counter()
    n, lq = params.n, params.log_q
    q = params.q
    r = build_r(params, RKind.NON_ELLIPTIC, lq)
    computed = list(np.linalg.eigvals(r.entries))

    rho_q2 = rho(params, lq**2)
    big_q = q / (1.0 + q * q)
    expected: list[complex] = [rho_q2] * n + [0.0j] * (n * (n - 1) // 2)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            power = (lq ** Fraction(2 * i - 2 * j + n, n)).to_complex()
            expected.append(rho_q2 * big_q * (power + 1.0 / power))

    scale = max(abs(v) for v in computed)
    worst = 0.0
    remaining = computed[:]
    for want in sorted(expected, key=abs, reverse=True):
        best_idx = min(range(len(remaining)), key=lambda k: abs(remaining[k] - want))
        worst = max(worst, abs(remaining.pop(best_idx) - want))
    residual = worst / max(scale, 1e-300)
    detail = {"eigenvalues": [complex(v) for v in computed]}
    return _report(
        "spectrum-nonelliptic",
        params.digest(),
        [q],
        residual,
        _tol("spectrum-nonelliptic", tolerance),
        started,
        detail,
    )


def check_gauge_relation(
    params: ModelParams,
    log_z: LogComplex,
    log_w: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """Principal matrix at z/w = (V(z) x V(w)) homogeneous(z^2/w^2) (V x V)^{-1}."""
    started = time.perf_counter()

    def compute(lz: LogComplex, lw: LogComplex) -> float:
        lhs = build_r(params, RKind.PRINCIPAL, lz / lw).entries
        conj = np.kron(build_v(params, lz).entries, build_v(params, lw).entries)
        hom = build_r(params, RKind.HOMOGENEOUS, (lz**2) / (lw**2)).entries
        return _rel(lhs, conj @ hom @ np.linalg.inv(conj))

    redraw = lambda gen: (draw_log(gen), draw_log(gen))
    residual, pts = _resample(compute, (log_z, log_w), redraw, rng)
    return _report(
        "gauge-relation",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("gauge-relation", tolerance),
        started,
    )


def check_twist_relation(
    params: ModelParams,
    log_z: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """Non-elliptic matrix = F21 (principal matrix) F12^{-1}."""
    started = time.perf_counter()
    n = params.n
    f12 = build_f(params).entries
    perm = permutation_op((2, 1), n).entries
    f21 = perm @ f12 @ perm

    def compute(lz: LogComplex) -> float:
        lhs = build_r(params, RKind.NON_ELLIPTIC, lz).entries
        rhs = f21 @ build_r(params, RKind.PRINCIPAL, lz).entries @ np.linalg.inv(f12)
        return _rel(lhs, rhs)

    residual, pts = _resample(compute, (log_z,), lambda gen: (draw_log(gen),), rng)
    return _report(
        "twist-relation",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("twist-relation", tolerance),
        started,
    )


def check_p_to_zero(
    params: ModelParams,
    log_z: LogComplex,
    p_sequence: Sequence[float] = (1e-2, 1e-4, 1e-6, 1e-8),
    kind_target: RKind = RKind.NON_ELLIPTIC,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """The hat matrix approaches the twisted principal matrix as p -> 0.

    For each p in the sequence the best scalar multiple s of the target is
    fitted by least squares over entries.  Two convergence speeds coexist:
    entries outside the target's support vanish only like p^{1/N}, while
    entries on the support settle at rate p.  The full-norm residual
    sequence must decrease monotonically (otherwise the report carries
    residual 1.0); the reported residual is the final support-restricted
    one, which is what the threshold can meaningfully bound.  The fitted s
    at the smallest p is recorded; it converges to 1 for the hat
    normalization used here.
    """
    started = time.perf_counter()
    if not p_sequence or any(
        p2 >= p1 for p1, p2 in zip(p_sequence, list(p_sequence)[1:])
    ) or any(not 0.0 < p < 1.0 for p in p_sequence):
        raise ValueError("p_sequence must decrease strictly within (0, 1)")
    detail: dict = {"elliptic_kind": RKind.ELLIPTIC_HAT.value, "p_sequence": list(p_sequence)}

    def compute(lz: LogComplex) -> float:
        target = build_r(params, kind_target, lz).entries
        target_norm = np.linalg.norm(target)
        support = np.abs(target) > 1e-13 * np.max(np.abs(target))
        residuals: list[float] = []
        support_residuals: list[float] = []
        fits: list[complex] = []
        for p_val in p_sequence:
            shrunk = replace(params, log_p=LogComplex.from_complex(complex(p_val)))
            diff = build_r(shrunk, RKind.ELLIPTIC_HAT, lz).entries
            s = np.vdot(target, diff) / np.vdot(target, target)
            diff = diff - s * target
            residuals.append(float(np.linalg.norm(diff) / target_norm))
            support_residuals.append(float(np.linalg.norm(diff[support]) / target_norm))
            fits.append(complex(s))
        detail["residual_sequence"] = residuals
        detail["support_residual_sequence"] = support_residuals
        detail["fitted_scalar"] = fits[-1]
        detail["monotone"] = all(b < a for a, b in zip(residuals, residuals[1:]))
        return support_residuals[-1] if detail["monotone"] else 1.0

    residual, pts = _resample(compute, (log_z,), lambda gen: (draw_log(gen),), rng)
    return _report(
        "p-to-zero",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("p-to-zero", tolerance),
        started,
        detail,
    )


def check_evaluated_ll(
    params: ModelParams,
    log_z: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """Exchange identity for the evaluated Lax blocks at arguments (z, z/q).

    With E_ij(w) the (i, j) N x N block of the hat matrix at w, checks
    E_ij(z)E_kl(z/q) - E_il(z)E_kj(z/q) = E_kl(z)E_ij(z/q) - E_kj(z)E_il(z/q)
    for all i, j, k, l, plus its single-row specialization
    E_ij(z)E_il(z/q) = E_il(z)E_ij(z/q).
    """
    started = time.perf_counter()
    n = params.n

    def compute(lz: LogComplex) -> float:
        top = build_r(params, RKind.ELLIPTIC_HAT, lz)
        bot = build_r(params, RKind.ELLIPTIC_HAT, lz / params.log_q)
        v_top, v_bot = top.tensor_view(), bot.tensor_view()
        scale = np.linalg.norm(top.entries) * np.linalg.norm(bot.entries) / (n * n)

        def blk(view: np.ndarray, i: int, j: int) -> np.ndarray:
            return view[i - 1, :, j - 1, :]

        worst = 0.0
        rng_idx = range(1, n + 1)
        for i in rng_idx:
            for j in rng_idx:
                for k in rng_idx:
                    for l in rng_idx:
                        combo = (
                            blk(v_top, i, j) @ blk(v_bot, k, l)
                            - blk(v_top, i, l) @ blk(v_bot, k, j)
                            - blk(v_top, k, l) @ blk(v_bot, i, j)
                            + blk(v_top, k, j) @ blk(v_bot, i, l)
                        )
                        worst = max(worst, float(np.linalg.norm(combo)))
        for i in rng_idx:
            for j in rng_idx:
                for l in rng_idx:
                    combo = blk(v_top, i, j) @ blk(v_bot, i, l) - blk(v_top, i, l) @ blk(v_bot, i, j)
                    worst = max(worst, float(np.linalg.norm(combo)))
        return worst / max(scale, 1e-300)

    residual, pts = _resample(compute, (log_z,), lambda gen: (draw_log(gen),), rng)
    return _report(
        "evaluated-ll",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("evaluated-ll", tolerance),
        started,
    )


def _inversions(sigma: Sequence[int]) -> int:
    return sum(
        1 for i in range(len(sigma)) for j in range(i + 1, len(sigma)) if sigma[i] > sigma[j]
    )


def check_nsigma(n_max: int = 5, *, tolerance: float | None = None) -> PropertyReport:
    """The permutation exponent of the twisted determinant vanishes exactly.

    n_sigma = l(sigma) + (2/N) sum_i i (sigma(i) - i)
              + sum_{i<j} (alpha_{sigma(i) sigma(j)} - alpha_{ij}),
    evaluated in exact rational arithmetic for every sigma in S_N, N <= n_max.
    """
    started = time.perf_counter()
    worst = Fraction(0)
    checked = 0
    for n in range(2, n_max + 1):
        for sigma in permutations(range(1, n + 1)):
            total = Fraction(_inversions(sigma))
            total += Fraction(2, n) * sum(
                Fraction(i * (sigma[i - 1] - i)) for i in range(1, n + 1)
            )
            total += sum(
                alpha_exponent(n, sigma[i - 1], sigma[j - 1]) - alpha_exponent(n, i, j)
                for i in range(1, n + 1)
                for j in range(i + 1, n + 1)
            )
            worst = max(worst, abs(total))
            checked += 1
    return _report(
        "nsigma",
        f"exact:S2..S{n_max}",
        [],
        float(worst),
        _tol("nsigma", tolerance),
        started,
        {"permutations_checked": checked},
    )


def check_transpose_symmetry(
    params: ModelParams,
    log_z: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """R(z)^{t1 t2} vs R(z): equal at N = 2, a must-fail canary for N >= 3."""
    started = time.perf_counter()

    def compute(lz: LogComplex) -> float:
        r = build_r(params, RKind.ELLIPTIC, lz)
        flipped = partial_transpose(partial_transpose(r, 1), 2).entries
        return _rel(flipped, r.entries)

    residual, pts = _resample(compute, (log_z,), lambda gen: (draw_log(gen),), rng)
    return _report(
        "transpose-symmetry",
        params.digest(),
        [p.to_complex() for p in pts],
        residual,
        _tol("transpose-symmetry", tolerance),
        started,
        {"canary": params.n >= 3},
    )


def effective_pass(report: PropertyReport) -> bool:
    """Suite-level verdict: canaries must fail loudly, everything else passes."""
    if report.detail.get("canary"):
        return report.residual > CANARY_MARGIN
    return report.passed


# ---------------------------------------------------------------------------
# suite runner


def run_suite(
    n: int,
    seed: int,
    *,
    n_points: int = 10,
    tolerances: dict[str, float] | None = None,
    params: ModelParams | None = None,
    central_charge: float = 0.0,
    policy: TruncationPolicy = DEFAULT_POLICY,
    include_ybe_n4: bool = True,
    safe: bool = False,
) -> list[PropertyReport]:
    """Run every applicable check at ``n_points`` seeded random draws.

    When ``params`` is given the same (q, p) is reused at every point and
    only the spectral arguments are redrawn; otherwise each point draws a
    fresh generic parameter set.  YBE is additionally spot-checked at N = 4
    (once) when requested, matching the acceptance bar.  With ``safe`` a
    check that raises is recorded as a failed report instead of aborting
    the suite.
    """
    overrides = tolerances or {}
    rng = np.random.default_rng(seed)
    reports: list[PropertyReport] = []

    def tol(name: str) -> float | None:
        return overrides.get(name)

    def add(fn: Callable, *args, **kwargs) -> None:
        try:
            reports.append(fn(*args, **kwargs))
        except EllipticRMatrixError as exc:
            if not safe:
                raise
            name = fn.__name__.removeprefix("check_").replace("_", "-")
            reports.append(
                PropertyReport(
                    name=f"{name}:error",
                    params_digest="",
                    sample_points=(),
                    residual=math.inf,
                    tolerance=0.0,
                    passed=False,
                    runtime_ms=0.0,
                    detail={"error": f"{type(exc).__name__}: {exc}"},
                )
            )

    kinds = [RKind.ELLIPTIC, RKind.ELLIPTIC_HAT, RKind.HOMOGENEOUS, RKind.PRINCIPAL, RKind.NON_ELLIPTIC]
    if n == 2:
        kinds.append(RKind.EIGHT_VERTEX)

    for _ in range(n_points):
        pt_params = params if params is not None else draw_params(
            rng, n, central_charge=central_charge, policy=policy
        )
        z1, z2, z3, zw = (draw_log(rng) for _ in range(4))
        for kind in kinds:
            add(check_ybe, pt_params, kind, z1, z2, z3, tolerance=tol("ybe"), rng=rng)
            add(check_unitarity, pt_params, kind, z1, tolerance=tol("unitarity"), rng=rng)
        add(check_regularity, pt_params, tolerance=tol("regularity"))
        add(check_crossing, pt_params, z1, tolerance=tol("crossing"), rng=rng)
        add(check_antisymmetry, pt_params, z2, tolerance=tol("antisymmetry"), rng=rng)
        add(check_quasi_periodicity, pt_params, z1, tolerance=tol("quasi-periodicity"), rng=rng)
        add(check_h_invariance, pt_params, z2, tolerance=tol("h-invariance"), rng=rng)
        add(check_crossing_unitarity, pt_params, z3, tolerance=tol("crossing-unitarity"), rng=rng)
        add(check_evaluated_ll, pt_params, z1, tolerance=tol("evaluated-ll"), rng=rng)
        add(check_gauge_relation, pt_params, z2, zw, tolerance=tol("gauge-relation"), rng=rng)
        add(check_twist_relation, pt_params, z3, tolerance=tol("twist-relation"), rng=rng)
        add(check_transpose_symmetry, pt_params, z1, tolerance=tol("transpose-symmetry"), rng=rng)
        add(check_kernel_structure, pt_params, tolerance=tol("kernel-structure"))
        add(check_spectrum_nonelliptic, pt_params, tolerance=tol("spectrum-nonelliptic"))

    limit_params = params if params is not None else draw_params(
        rng, n, central_charge=central_charge, policy=policy
    )
    add(check_p_to_zero, limit_params, draw_log(rng), tolerance=tol("p-to-zero"), rng=rng)
    add(check_nsigma, tolerance=tol("nsigma"))

    if include_ybe_n4:
        n4_params = draw_params(rng, 4, central_charge=central_charge, policy=policy)
        add(
            check_ybe,
            n4_params,
            RKind.ELLIPTIC,
            draw_log(rng),
            draw_log(rng),
            draw_log(rng),
            tolerance=tol("ybe"),
            rng=rng,
        )
    return reports
