"""Strong-converse calculators for hypothesis testing and c-q coding.

Asymmetric hypothesis testing between n copies of two faithful states is
solved exactly at desk scale by the threshold-test oracle (positive part of
rho^(x)n - lambda sigma^(x)n with boundary randomization), and compared
against the finite-blocklength lower bound on the type-II error driven by
the relative entropy, the sup-norm likelihood ratio gamma, and a sqrt(n)
correction. For classical-quantum codes the same machinery bounds the rate
of any code through the mutual information of its codeword ensemble; the
pretty-good-measurement decoder supplies concrete error probabilities.

All bound values are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .entropy_dirichlet import relative_entropy, von_neumann_entropy
from .errors import (
    DimensionMismatchError,
    DomainError,
    ParameterError,
    ResourceLimitError,
)
from .operator_core import (
    MAX_DIM,
    DensityMatrix,
    as_matrix,
    eig_hermitian,
    matrix_from_doc,
    matrix_to_doc,
    random_unitary,
)
from .rng import as_generator

__all__ = [
    "HypothesisInstance",
    "QuantumTest",
    "CQCode",
    "tensor_power",
    "gamma_infinity",
    "qht_bound_rhs",
    "beta_lower_bound",
    "strong_converse_exponent_f",
    "np_oracle",
    "alt_check",
    "mutual_information",
    "random_test",
    "pgm_decoder",
    "code_mutual_information",
    "cq_converse_check",
    "instance_to_doc",
    "instance_from_doc",
    "code_from_doc",
]


def tensor_power(x, n: int) -> np.ndarray:
    """n-fold Kronecker power."""
    if n < 1:
        raise ParameterError("tensor power requires n >= 1")
    xm = as_matrix(x)
    out = xm
    for _ in range(n - 1):
        out = np.kron(out, xm)
    return out


def gamma_infinity(rho, sigma) -> float:
    """Operator norm of rho sigma^(-1) (largest singular value)."""
    s = as_matrix(sigma)
    w, v = eig_hermitian(s)
    if w.min() <= 0:
        raise DomainError("second state must be positive definite")
    inv = (v / w) @ v.conj().T
    return float(np.linalg.norm(as_matrix(rho) @ inv, 2))


@dataclass
class HypothesisInstance:
    """A pair of faithful states with a copy count and derived constants.

    ``gamma`` is the sup-norm of the likelihood-ratio operator and
    ``rel_ent`` the relative entropy, both computed at construction.
    Instances where gamma comes out below one are flagged for inspection
    (``gamma_below_one``) but not rejected.
    """

    rho: DensityMatrix
    sigma: DensityMatrix
    n: int = 1
    gamma: float = field(init=False)
    rel_ent: float = field(init=False)
    gamma_below_one: bool = field(init=False)

    def __post_init__(self):
        if not isinstance(self.rho, DensityMatrix):
            self.rho = DensityMatrix(self.rho, strict=True)
        if not isinstance(self.sigma, DensityMatrix):
            self.sigma = DensityMatrix(self.sigma, strict=True)
        if self.rho.dim != self.sigma.dim:
            raise DimensionMismatchError("states must share a dimension")
        if self.n < 1:
            raise ParameterError("copy count must be >= 1")
        if self.rho.dim**self.n > MAX_DIM:
            raise ResourceLimitError(
                f"dim^n = {self.rho.dim ** self.n} exceeds {MAX_DIM}"
            )
        self.gamma = gamma_infinity(self.rho, self.sigma)
        if self.gamma <= 0:
            raise DomainError("likelihood-ratio norm must be positive")
        self.rel_ent = relative_entropy(self.rho, self.sigma)
        if self.rel_ent < -1e-10:
            raise DomainError(f"negative relative entropy {self.rel_ent!r}")
        self.gamma_below_one = self.gamma < 1.0 - 1e-10

    @property
    def rho_n(self) -> np.ndarray:
        return tensor_power(self.rho, self.n)

    @property
    def sigma_n(self) -> np.ndarray:
        return tensor_power(self.sigma, self.n)


class QuantumTest:
    """A two-outcome test 0 <= T <= I bound to a hypothesis instance.

    Eigenvalues outside [0, 1] by more than 1e-10 are rejected; within that
    tolerance they are clipped. Error probabilities are recomputed from the
    operator on access.
    """

    def __init__(self, t, instance: HypothesisInstance):
        tm = as_matrix(t)
        tm = (tm + tm.conj().T) / 2.0
        w, v = eig_hermitian(tm)
        if w.min() < -1e-10 or w.max() > 1.0 + 1e-10:
            raise DomainError(
                f"test eigenvalues [{w.min():.3e}, {w.max():.3e}] leave [0, 1]"
            )
        w = np.clip(w, 0.0, 1.0)
        self.t = (v * w) @ v.conj().T
        self.instance = instance
        if self.t.shape[0] != instance.rho.dim**instance.n:
            raise DimensionMismatchError("test dimension does not match instance")

    @property
    def alpha(self) -> float:
        """Type-I error tr((I - T) rho^n)."""
        rn = self.instance.rho_n
        return float(np.real(np.trace(rn) - np.trace(self.t @ rn)))

    @property
    def beta(self) -> float:
        """Type-II error tr(T sigma^n)."""
        return float(np.real(np.trace(self.t @ self.instance.sigma_n)))


def qht_bound_rhs(inst: HypothesisInstance, trace_rho_t: float) -> float:
    """Lower bound on log tr(sigma^n T) for any test with tr(rho^n T) given.

    Returns -n D - 2 sqrt(n gamma log(1/tau)) + log(tau) with
    tau = trace_rho_t; tau = 0 yields -inf (the bound is vacuous).
    """
    if trace_rho_t < 0 or trace_rho_t > 1.0 + 1e-12:
        raise ParameterError("tr(rho^n T) must lie in [0, 1]")
    if trace_rho_t == 0:
        return -math.inf
    tau = min(float(trace_rho_t), 1.0)
    n, gamma, d = inst.n, inst.gamma, inst.rel_ent
    return -n * d - 2.0 * math.sqrt(n * gamma * math.log(1.0 / tau)) + math.log(tau)


def beta_lower_bound(inst: HypothesisInstance, epsilon: float) -> float:
    """Finite-blocklength lower bound on the optimal type-II error at level epsilon."""
    if not (0.0 < epsilon < 1.0):
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    n, gamma, d = inst.n, inst.gamma, inst.rel_ent
    exponent = -n * d - 2.0 * math.sqrt(n * gamma * math.log(1.0 / (1.0 - epsilon)))
    return (1.0 - epsilon) * math.exp(exponent)


def strong_converse_exponent_f(gamma: float, r: float, d: float) -> float:
    """Exponent forcing the type-I error to one when the type-II rate exceeds d.

    Returns (sqrt(gamma + (r - d)) - sqrt(gamma))^2; zero at r = d and
    strictly increasing in r.
    """
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    if r < d:
        raise ParameterError(f"rate r = {r} must be at least the divergence {d}")
    return (math.sqrt(gamma + (r - d)) - math.sqrt(gamma)) ** 2


def np_oracle(
    rho, sigma, n: int, epsilon: float, alpha_tol: float = 1e-10
) -> tuple[float, QuantumTest]:
    """Exact optimal type-II error via threshold tests.

    Bisects the threshold lambda of T = P_>(rho^n - lambda sigma^n) + c P_=
    until the type-I error equals epsilon: either the continuous part of
    alpha(lambda) crosses epsilon within ``alpha_tol``, or a jump is
    straddled and the boundary projector P_= (eigenvalue tolerance 1e-9,
    widened with the shrinking bracket) is randomized with c in [0, 1] to
    interpolate exactly.

    Returns (beta, test) with test achieving alpha = epsilon.
    """
    if not (0.0 < epsilon < 1.0):
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    inst = HypothesisInstance(rho, sigma, n)
    rho_n = inst.rho_n
    sigma_n = inst.sigma_n
    sigma_norm = float(np.linalg.norm(sigma_n, 2))
    target = 1.0 - epsilon  # want tr(T rho_n) = target

    lam_lo = 0.0
    lam_hi = gamma_infinity(rho_n, sigma_n) + 1.0

    def split(lam: float, ker_tol: float):
        delta = rho_n - lam * sigma_n
        w, v = eig_hermitian(delta)
        tol = max(ker_tol, 1e-9 * max(1.0, abs(w).max()))
        pos = w > tol
        zero = np.abs(w) <= tol
        p_pos = (v[:, pos] @ v[:, pos].conj().T) if pos.any() else np.zeros_like(delta)
        p_zero = (v[:, zero] @ v[:, zero].conj().T) if zero.any() else np.zeros_like(delta)
        g = float(np.real(np.trace(p_pos @ rho_n)))
        boundary = float(np.real(np.trace(p_zero @ rho_n)))
        return p_pos, p_zero, g, boundary

    for _ in range(300):
        width = lam_hi - lam_lo
        lam = 0.5 * (lam_lo + lam_hi)
        ker_tol = max(1e-9, 2.0 * width * sigma_norm) if width < 1e-6 else 1e-9
        p_pos, p_zero, g, boundary = split(lam, ker_tol)
        if abs(g - target) <= alpha_tol:
            t_opt = p_pos
            break
        if g <= target <= g + boundary:
            c = (target - g) / boundary
            t_opt = p_pos + c * p_zero
            break
        if g > target:
            lam_lo = lam
        else:
            lam_hi = lam
    else:
        raise DomainError(
            f"threshold bisection failed to reach alpha = {epsilon} "
            f"(bracket [{lam_lo}, {lam_hi}])"
        )

    test = QuantumTest(t_opt, inst)
    return test.beta, test


def alt_check(a, b, r: float) -> float:
    """Margin of the trace-power comparison tr(B^(1/2) A B^(1/2))^r versus
    tr(B^(r/2) A^r B^(r/2)) for r in [0, 1]; nonnegative up to tolerance."""
    if not (0.0 <= r <= 1.0):
        raise ParameterError(f"r must lie in [0, 1], got {r}")
    am = as_matrix(a)
    wb, vb = eig_hermitian(as_matrix(b))
    wb = np.clip(wb, 0.0, None)
    wa, va = eig_hermitian(am)
    wa = np.clip(wa, 0.0, None)
    b_half = (vb * np.sqrt(wb)) @ vb.conj().T
    inner = b_half @ am @ b_half
    wi, _ = eig_hermitian((inner + inner.conj().T) / 2.0)
    wi = np.clip(wi, 0.0, None)
    lhs = float(np.sum(wi**r))
    b_rhalf = (vb * wb ** (r / 2.0)) @ vb.conj().T
    a_r = (va * wa**r) @ va.conj().T
    rhs = float(np.real(np.trace(b_rhalf @ a_r @ b_rhalf)))
    return lhs - rhs


def mutual_information(outputs: Sequence, probs: Sequence[float]) -> float:
    """Mutual information of a classical-quantum ensemble in nats.

    Computed as H(average state) - sum_x P(x) H(state_x); equals the
    relative entropy between the joint and the product of marginals by
    block-diagonal reduction, and is additive over product ensembles.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or len(outputs) != probs.size:
        raise DimensionMismatchError("one probability per output state required")
    if probs.min() < -1e-12 or abs(probs.sum() - 1.0) > 1e-9:
        raise ParameterError("probabilities must be nonnegative and sum to one")
    states = [as_matrix(s) for s in outputs]
    avg = sum(p * s for p, s in zip(probs, states))
    cond = sum(p * von_neumann_entropy(s) for p, s in zip(probs, states) if p > 0)
    return von_neumann_entropy(avg) - cond


def random_test(dim: int, seed) -> np.ndarray:
    """Random two-outcome test: Haar basis with uniform eigenvalues in [0, 1]."""
    rng = as_generator(seed)
    u = random_unitary(dim, rng)
    w = rng.random(dim)
    return (u * w) @ u.conj().T


@dataclass
class CQCode:
    """A classical-quantum block code with an optional decoding POVM.

    ``outputs`` are the channel output states indexed by the alphabet,
    ``codewords`` are tuples of alphabet indices of common length n. The
    decoder POVM, when present, must be complete to 1e-9 and elementwise PSD;
    ``p_max`` is the maximum error probability over messages.
    """

    outputs: list
    codewords: list
    alphabet: list | None = None
    povm: list | None = None
    p_max: float | None = None

    def __post_init__(self):
        self.outputs = [
            s if isinstance(s, DensityMatrix) else DensityMatrix(s) for s in self.outputs
        ]
        if self.alphabet is None:
            self.alphabet = list(range(len(self.outputs)))
        if len(self.alphabet) != len(self.outputs):
            raise DimensionMismatchError("one output state per alphabet symbol")
        self.codewords = [tuple(int(i) for i in cw) for cw in self.codewords]
        if not self.codewords:
            raise ParameterError("a code needs at least one codeword")
        n = len(self.codewords[0])
        if any(len(cw) != n for cw in self.codewords):
            raise DimensionMismatchError("codewords must share a block length")
        if any(i < 0 or i >= len(self.outputs) for cw in self.codewords for i in cw):
            raise ParameterError("codeword symbol outside the alphabet")
        d = self.outputs[0].dim
        if d**n > MAX_DIM:
            raise ResourceLimitError(f"block output dimension {d ** n} exceeds {MAX_DIM}")
        if self.povm is not None:
            self._check_povm()

    def _check_povm(self):
        self.povm = [as_matrix(p) for p in self.povm]
        if len(self.povm) != self.message_count:
            raise DimensionMismatchError("one POVM element per message required")
        total = sum(self.povm)
        if np.abs(total - np.eye(total.shape[0])).max() > 1e-9:
            raise DomainError("decoding POVM is not complete")
        for p in self.povm:
            if np.linalg.eigvalsh((p + p.conj().T) / 2.0).min() < -1e-9:
                raise DomainError("POVM element is not PSD")
        if self.p_max is None:
            self.p_max = max(
                1.0 - float(np.real(np.trace(self.povm[m] @ self.codeword_state(m))))
                for m in range(self.message_count)
            )

    @property
    def message_count(self) -> int:
        return len(self.codewords)

    @property
    def n(self) -> int:
        return len(self.codewords[0])

    @property
    def rate(self) -> float:
        return math.log(self.message_count) / self.n

    def codeword_state(self, m: int) -> np.ndarray:
        state = self.outputs[self.codewords[m][0]].mat
        for i in self.codewords[m][1:]:
            state = np.kron(state, self.outputs[i].mat)
        return state


def pgm_decoder(code: CQCode) -> CQCode:
    """Equip a code with the pretty-good-measurement POVM and its p_max.

    Elements are S^(-1/2) rho_m S^(-1/2) with S the sum of codeword states
    and the inverse square root taken on the support of S; any rank
    deficiency of S is compensated by adding the complement projector to the
    first element so the POVM is complete.
    """
    states = [code.codeword_state(m) for m in range(code.message_count)]
    s = sum(states)
    w, v = eig_hermitian(s)
    w = np.clip(w, 0.0, None)
    support = w > 1e-12 * max(1.0, w.max())
    inv_half = np.zeros_like(w)
    inv_half[support] = w[support] ** -0.5
    s_inv_half = (v * inv_half) @ v.conj().T
    povm = [s_inv_half @ st @ s_inv_half for st in states]
    remainder = np.eye(s.shape[0]) - sum(povm)
    povm[0] = povm[0] + (remainder + remainder.conj().T) / 2.0
    p_max = max(
        1.0 - float(np.real(np.trace(povm[m] @ states[m])))
        for m in range(code.message_count)
    )
    return CQCode(
        outputs=code.outputs,
        codewords=code.codewords,
        alphabet=code.alphabet,
        povm=povm,
        p_max=p_max,
    )


def code_mutual_information(code: CQCode) -> float:
    """Mutual information of the uniform codeword ensemble in nats."""
    m = code.message_count
    states = [code.codeword_state(k) for k in range(m)]
    return mutual_information(states, np.full(m, 1.0 / m))


def cq_converse_check(code: CQCode) -> float:
    """Margin of the rate bound for a decoded code.

    With epsilon the code's maximum error probability and d the single-use
    output dimension, returns

        I(ensemble) - [log |M| - 2 sqrt(d n log(1/(1-eps))) - log(1/(1-eps))]

    which is nonnegative up to tolerance for every code. Returns +inf when
    epsilon = 1 (the bound is vacuous).
    """
    if code.povm is None or code.p_max is None:
        raise ParameterError("code must carry a decoder; run pgm_decoder first")
    eps = float(code.p_max)
    if eps >= 1.0 - 1e-15:
        return math.inf
    d = code.outputs[0].dim
    n = code.n
    log_term = math.log(1.0 / (1.0 - eps))
    rhs = math.log(code.message_count) - 2.0 * math.sqrt(d * n * log_term) - log_term
    return code_mutual_information(code) - rhs


def instance_to_doc(inst: HypothesisInstance) -> dict:
    return {
        "rho": matrix_to_doc(inst.rho.mat),
        "sigma": matrix_to_doc(inst.sigma.mat),
        "n": inst.n,
    }


def instance_from_doc(doc: dict) -> HypothesisInstance:
    try:
        return HypothesisInstance(
            DensityMatrix(matrix_from_doc(doc["rho"]), strict=True),
            DensityMatrix(matrix_from_doc(doc["sigma"]), strict=True),
            int(doc.get("n", 1)),
        )
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed instance document: {exc}") from exc


def code_from_doc(doc: dict) -> CQCode:
    """Parse {"alphabet": [...], "outputs": [...], "codewords": [[...]],
    "decoder": "pgm" | [POVM matrix documents]}."""
    try:
        alphabet = list(doc["alphabet"])
        outputs = [DensityMatrix(matrix_from_doc(m)) for m in doc["outputs"]]
        raw_codewords = doc["codewords"]
        decoder = doc.get("decoder", "pgm")
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed code document: {exc}") from exc
    index = {sym: i for i, sym in enumerate(alphabet)}
    codewords = []
    for cw in raw_codewords:
        codewords.append(
            tuple(index[sym] if sym in index else int(sym) for sym in cw)
        )
    code = CQCode(outputs=outputs, codewords=codewords, alphabet=alphabet)
    if decoder == "pgm":
        return pgm_decoder(code)
    code.povm = [matrix_from_doc(m) for m in decoder]
    code._check_povm()
    return code
