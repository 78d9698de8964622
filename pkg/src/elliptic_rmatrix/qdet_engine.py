"""Quantum determinant of the elliptic algebra in its evaluation representation.

Three independent routes to the same scalar:

* the product route: sandwich the N-fold product of hat matrices
  Rhat_{1,0}(z) Rhat_{2,0}(z/q) ... Rhat_{N,0}(z q^{1-N}) with the rank-one
  antisymmetrizer on slots 1..N and read off the auxiliary-slot factor;
* the permutation-sum route: the signed sum over S_N of products of
  evaluated Lax blocks E_{1,sigma(1)}(z) ... E_{N,sigma(N)}(z q^{1-N});
* the closed form: a theta-quotient expression for each diagonal value m_k.

All three equal the identity (respectively 1); ``verify_qdet`` computes the
pairwise deviations.  N!-term sums run in fixed lexicographic order with
Neumaier-compensated accumulation so results are bit-reproducible and do not
lose the cancellation structure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from itertools import permutations
from typing import Sequence

import numpy as np

from .errors import KindError, PoleError, SizeError
from .special_functions import LogComplex, pochhammer_inf, theta
from .tensor_algebra import (
    TensorOperator,
    antisymmetrizer,
    embed,
    partial_trace,
    permutation_sign,
)
from .rmatrix_builders import ModelParams, RKind, build_r, s_theta_ratio
from .property_suite import (
    DEFAULT_TOLERANCES,
    MAX_RESAMPLES,
    PropertyReport,
    _report,
    draw_log,
)

__all__ = [
    "QdetResult",
    "qdet_product",
    "qdet_closed_form",
    "qdet_sum_formula",
    "inverse_product_residual",
    "centrality_witness",
    "closed_form_q_spread",
    "verify_qdet",
]

MAX_PRODUCT_SLOTS = 5
MAX_SUM_TERMS_N = 6


@dataclass(frozen=True)
class QdetResult:
    """Quantum determinant at one spectral point, via all three routes.

    ``m_matrix`` is the auxiliary-slot operator extracted from the product
    route; ``m_k_values`` the closed-form diagonal; ``sum_formula_matrix``
    the permutation-sum operator; ``deviations`` the named pairwise
    residuals (all should sit at roundoff for generic parameters).
    """

    m_matrix: TensorOperator
    m_k_values: tuple[complex, ...]
    sum_formula_matrix: TensorOperator
    deviations: dict = field(default_factory=dict)
    z_point: LogComplex | None = None
    params_digest: str = ""


class _CompensatedSum:
    """Neumaier-compensated elementwise accumulation of complex arrays."""

    def __init__(self, shape: tuple[int, ...]):
        self._total = np.zeros(shape, dtype=np.complex128)
        self._comp = np.zeros(shape, dtype=np.complex128)

    def add(self, term: np.ndarray) -> None:
        new_total = self._total + term
        total_bigger = np.abs(self._total) >= np.abs(term)
        self._comp = self._comp + np.where(
            total_bigger, (self._total - new_total) + term, (term - new_total) + self._total
        )
        self._total = new_total

    @property
    def value(self) -> np.ndarray:
        return self._total + self._comp


def _hat_factors(params: ModelParams, log_z: LogComplex) -> list[TensorOperator]:
    """Hat matrices at the q-shifted arguments z, z/q, ..., z q^{1-N}."""
    lq = params.log_q
    return [
        build_r(params, RKind.ELLIPTIC_HAT, log_z / (lq ** j)) for j in range(params.n)
    ]


def _blocks(op: TensorOperator) -> np.ndarray:
    """Lax-evaluation blocks: blocks[i, j] acts on the second slot."""
    return op.tensor_view()


def _product_with_residual(
    params: ModelParams, log_z: LogComplex
) -> tuple[TensorOperator, float]:
    n = params.n
    if n > MAX_PRODUCT_SLOTS:
        raise SizeError(
            f"product route needs a dense operator on {n ** (n + 1)} dimensions; "
            f"N is capped at {MAX_PRODUCT_SLOTS}"
        )
    arity = n + 1
    a_big = embed(antisymmetrizer(n, n), tuple(range(1, n + 1)), arity).entries
    x = a_big.copy()
    # Right-to-left: X = Rhat_{1,0}(z) ... Rhat_{N,0}(z q^{1-N}) A.
    for j, factor in reversed(list(enumerate(_hat_factors(params, log_z), start=1))):
        x = embed(factor, (j, arity), arity).entries @ x

    x_op = TensorOperator(n, arity, x)
    # tr A = 1 (rank-one projector), so tracing out slots 1..N isolates the
    # auxiliary factor.
    m_op = partial_trace(x_op, tuple(range(1, n + 1)))
    a_small = antisymmetrizer(n, n).entries
    reassembled = np.kron(a_small, m_op.entries)
    residual = float(
        np.linalg.norm(x - reassembled) / max(np.linalg.norm(x), 1e-300)
    )
    return m_op, residual


def qdet_product(params: ModelParams, log_z: LogComplex) -> TensorOperator:
    """Auxiliary-slot operator M(z) from the antisymmetrized product route."""
    return _product_with_residual(params, log_z)[0]


def inverse_product_residual(params: ModelParams, log_z: LogComplex) -> float:
    """Residual of the inverted product relation.

    Since the forward product maps the antisymmetrizer to itself, applying
    the inverses in reverse order must fix it too:
    Rhat_{N,0}^{-1} ... Rhat_{1,0}^{-1} A = A.
    """
    n = params.n
    if n > MAX_PRODUCT_SLOTS:
        raise SizeError(f"N is capped at {MAX_PRODUCT_SLOTS} for the product route")
    arity = n + 1
    a_big = embed(antisymmetrizer(n, n), tuple(range(1, n + 1)), arity).entries
    y = a_big.copy()
    # Left-multiplying successively by Rhat_{1,0}^{-1}, Rhat_{2,0}^{-1}, ...
    # composes to Rhat_{N,0}^{-1} ... Rhat_{1,0}^{-1} applied to A.
    for j, factor in enumerate(_hat_factors(params, log_z), start=1):
        y = np.linalg.inv(embed(factor, (j, arity), arity).entries) @ y
    return float(np.linalg.norm(y - a_big) / max(np.linalg.norm(a_big), 1e-300))


def qdet_closed_form(params: ModelParams, log_z: LogComplex) -> tuple[complex, ...]:
    """Diagonal values m_k(z) of the quantum determinant, k = 1..N.

    m_k = (-(p^N; p^N)/(p; p))^{3N} q^{2k-2N} Theta_p(q^2)^N
          Theta_p(z^2)/Theta_p(q^2 z^2)
          sum_sigma sgn(sigma) prod_l Shat_{l, k + shift_l}^{sigma(l)}(z/q^{l-1}),

    where shift_l = sum_{i<l} (i - sigma(i)) and Shat is the bare theta
    quotient (no power prefactors, indices not reduced mod N).  All m_k
    equal 1 for generic parameters.
    """
    n = params.n
    if n > MAX_SUM_TERMS_N:
        raise SizeError(f"N! sum capped at N = {MAX_SUM_TERMS_N}")
    lq, lp, policy = params.log_q, params.log_p, params.policy
    q = params.q
    z2 = log_z**2
    q2 = lq**2
    pn = lp**n

    poch_ratio = -(
        pochhammer_inf(pn, (pn,), policy) / pochhammer_inf(lp, (lp,), policy)
    )
    theta_q2 = theta(q2, lp, policy)
    theta_den = theta(q2 * z2, lp, policy)
    if abs(theta_den) < 1e-300:
        raise PoleError("closed form denominator vanished", argument=(q2 * z2).to_complex())
    prefactor_z = poch_ratio ** (3 * n) * theta_q2**n * theta(z2, lp, policy) / theta_den

    shifted_logs = [log_z / (lq**j) for j in range(n)]
    values: list[complex] = []
    for k in range(1, n + 1):
        acc = _CompensatedSum(())
        for sigma in permutations(range(1, n + 1)):
            term = complex(permutation_sign(sigma))
            shift = 0
            for ell in range(1, n + 1):
                term *= s_theta_ratio(params, ell, sigma[ell - 1], k + shift, shifted_logs[ell - 1])
                shift += ell - sigma[ell - 1]
            acc.add(np.asarray(term, dtype=np.complex128))
        values.append(complex(acc.value) * prefactor_z * q ** (2 * k - 2 * n))
    return tuple(values)


def qdet_sum_formula(
    params: ModelParams, kind: RKind, log_z: LogComplex
) -> TensorOperator:
    """Signed permutation sum of evaluated Lax blocks, as an auxiliary operator.

    sum_sigma sgn(sigma) E_{1,sigma(1)}(z) E_{2,sigma(2)}(z/q) ...
    E_{N,sigma(N)}(z q^{1-N}) with E_{ij}(w) the (i, j) block of the chosen
    matrix at w.  Supported kinds: the hat normalization (elliptic algebra)
    and the non-elliptic twisted matrix (its p -> 0 analogue, built on the
    undeformed antisymmetrizer); both sums equal the identity.
    """
    n = params.n
    if n > MAX_SUM_TERMS_N:
        raise SizeError(f"N! sum capped at N = {MAX_SUM_TERMS_N}")
    if kind not in (RKind.ELLIPTIC_HAT, RKind.NON_ELLIPTIC):
        raise KindError(
            f"permutation-sum route is defined for the hat and non-elliptic kinds, got {kind.value}"
        )
    lq = params.log_q
    views = [
        _blocks(build_r(params, kind, log_z / (lq**j))) for j in range(n)
    ]
    acc = _CompensatedSum((n, n))
    for sigma in permutations(range(1, n + 1)):
        term = views[0][0, :, sigma[0] - 1, :]
        for ell in range(2, n + 1):
            term = term @ views[ell - 1][ell - 1, :, sigma[ell - 1] - 1, :]
        acc.add(permutation_sign(sigma) * term)
    return TensorOperator(n, 1, acc.value)


def centrality_witness(
    params: ModelParams,
    log_z: LogComplex,
    log_w: LogComplex,
    *,
    tolerance: float | None = None,
    rng: np.random.Generator | None = None,
) -> PropertyReport:
    """M(z) commutes with every evaluated Lax block E_{ij}(w).

    The evaluation-representation shadow of centrality: residual is the
    worst commutator norm over all N^2 blocks of a hat matrix at an
    unrelated point w, relative to ||M|| times the largest block norm.
    """
    started = time.perf_counter()
    if tolerance is None:
        tolerance = 1e-9 if params.n == 2 else 1e-8
    n = params.n

    def compute(lz: LogComplex, lw: LogComplex) -> float:
        m = qdet_product(params, lz).entries
        view = _blocks(build_r(params, RKind.ELLIPTIC_HAT, lw))
        scale = float(np.linalg.norm(m)) * max(
            float(np.linalg.norm(view[i, :, j, :])) for i in range(n) for j in range(n)
        )
        worst = 0.0
        for i in range(n):
            for j in range(n):
                block = view[i, :, j, :]
                worst = max(worst, float(np.linalg.norm(m @ block - block @ m)))
        return worst / max(scale, 1e-300)

    attempts = 0
    points = (log_z, log_w)
    while True:
        try:
            residual = compute(*points)
            break
        except PoleError:
            attempts += 1
            if rng is None or attempts > MAX_RESAMPLES:
                raise
            points = (draw_log(rng), draw_log(rng))
    return _report(
        "centrality-witness",
        params.digest(),
        [p.to_complex() for p in points],
        residual,
        tolerance,
        started,
    )


def closed_form_q_spread(
    params: ModelParams, log_z: LogComplex, other_log_q: LogComplex
) -> float:
    """|m(z; q) - m(z; q')| at fixed (p, z): the determinant ignores q."""
    here = qdet_closed_form(params, log_z)
    there = qdet_closed_form(replace(params, log_q=other_log_q), log_z)
    mean_here = sum(here) / len(here)
    mean_there = sum(there) / len(there)
    return abs(mean_here - mean_there)


def verify_qdet(
    params: ModelParams,
    log_z: LogComplex,
    *,
    rng: np.random.Generator | None = None,
) -> QdetResult:
    """All three routes at one point, with every pairwise deviation.

    On a PoleError the whole computation resamples at a fresh z (never a
    single factor), so all routes always see the same point.
    """
    n = params.n
    attempts = 0
    while True:
        try:
            m_op, internal = _product_with_residual(params, log_z)
            m_values = qdet_closed_form(params, log_z)
            sum_op = qdet_sum_formula(params, RKind.ELLIPTIC_HAT, log_z)
            nonell_op = qdet_sum_formula(params, RKind.NON_ELLIPTIC, log_z)
            inverse_res = inverse_product_residual(params, log_z)
            break
        except PoleError:
            attempts += 1
            if rng is None or attempts > MAX_RESAMPLES:
                raise
            log_z = draw_log(rng)

    eye = np.eye(n)
    diag_closed = np.diag(np.asarray(m_values, dtype=np.complex128))
    scale = float(np.sqrt(n))
    deviations = {
        "product_internal_consistency": internal,
        "product_vs_identity": float(np.linalg.norm(m_op.entries - eye) / scale),
        "closed_form_vs_identity": max(abs(v - 1.0) for v in m_values),
        "closed_form_spread": max(abs(v - m_values[0]) for v in m_values),
        "product_vs_closed_form": float(np.linalg.norm(m_op.entries - diag_closed) / scale),
        "product_vs_sum_formula": float(
            np.linalg.norm(m_op.entries - sum_op.entries) / scale
        ),
        "sum_formula_vs_closed_form": float(
            np.linalg.norm(sum_op.entries - diag_closed) / scale
        ),
        "nonelliptic_sum_vs_identity": float(
            np.linalg.norm(nonell_op.entries - eye) / scale
        ),
        "inverse_product": inverse_res,
    }
    return QdetResult(
        m_matrix=m_op,
        m_k_values=tuple(m_values),
        sum_formula_matrix=sum_op,
        deviations=deviations,
        z_point=log_z,
        params_digest=params.digest(),
    )
