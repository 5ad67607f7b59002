"""Markov generators in the Heisenberg picture and their semigroups.

A generator L is stored as a dim^2 x dim^2 matrix acting on column-major
vectorized operators, together with the faithful state sigma annihilated by
its Schroedinger dual. The semigroup is exp(-t L); unitality L(I) = 0 and
stationarity L*(sigma) = 0 are enforced at construction, and primitivity
(one-dimensional kernel) is decided by numerical rank with borderline cases
rejected loudly.

Two notions of detailed balance appear: reversibility (self-adjointness
under the KMS inner product, equivalently conjugating by Gamma_sigma turns
L into its dual) and the stronger self-adjointness under the GNS inner
product tr(sigma X† Y). Strongly reversible generators commute with the
modular conjugation and admit a Kraus decomposition whose operators scale
sigma by fixed weights; that decomposition is computed here from the Choi
matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import (
    ContractViolationError,
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
)
from .rng import substream
from .weighted_lp import WeightedSpace, weighted_norm

__all__ = [
    "vec",
    "unvec",
    "apply_superop",
    "lift_superop",
    "LindbladGenerator",
    "KrausPair",
    "simple_generator",
    "davies_qubit_generator",
    "tensor_sum",
    "custom_generator",
    "adjoint_generator",
    "check_reversible",
    "check_strongly_reversible",
    "spectral_gap",
    "choi_kraus_decomposition",
    "contractivity_check",
    "generator_to_doc",
    "generator_from_doc",
]

UNITALITY_TOL = 1e-9
STATIONARITY_TOL = 1e-9
REVERSIBILITY_TOL = 1e-8
PRIMITIVITY_TOL = 1e-8
CHOI_COMMUTATION_TOL = 1e-6
KRAUS_TOL = 1e-9


def vec(x) -> np.ndarray:
    """Column-major vectorization."""
    return np.asarray(x, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Inverse of vec."""
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape((dim, dim), order="F")


def apply_superop(rep: np.ndarray, x) -> np.ndarray:
    """Apply a vectorized-superoperator matrix to an operator."""
    xm = as_matrix(x)
    return unvec(rep @ vec(xm), xm.shape[0])


def _kraus_term(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # rep of X -> A X B under column-major vec
    return np.kron(b.T, a)


def lift_superop(rep: np.ndarray, dims: Sequence[int], which: int) -> np.ndarray:
    """Lift a one-factor superoperator to the tensor product space.

    Acts as the given map on factor ``which`` and as the identity elsewhere.
    Built column-by-column on matrix units, so the vec convention is
    respected regardless of factor ordering.
    """
    dims = [int(d) for d in dims]
    n = len(dims)
    d = dims[which]
    if rep.shape != (d * d, d * d):
        raise DimensionMismatchError(
            f"factor rep has shape {rep.shape}, expected {(d * d, d * d)}"
        )
    big_d = int(np.prod(dims))
    out = np.zeros((big_d * big_d, big_d * big_d), dtype=complex)
    units = [np.zeros((dj, dj), dtype=complex) for dj in dims]
    for col in range(big_d * big_d):
        cflat, rflat = divmod(col, big_d)
        rows = np.unravel_index(rflat, dims)
        cols = np.unravel_index(cflat, dims)
        factors = []
        for j in range(n):
            e = units[j]
            e[:] = 0.0
            e[rows[j], cols[j]] = 1.0
            factors.append(apply_superop(rep, e) if j == which else e.copy())
        acc = factors[0]
        for f in factors[1:]:
            acc = np.kron(acc, f)
        out[:, col] = vec(acc)
    return out


def _gram_kms(sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(G, G^1/2, G^-1/2) for the KMS inner product on vectorized operators."""
    w, v = eig_hermitian(sigma)
    if w.min() <= 0:
        raise DomainError("stationary state must be positive definite")

    def pw(s):
        m = (v * w**s) @ v.conj().T
        return np.kron(m.T, m)

    return pw(0.5), pw(0.25), pw(-0.25)


def _gram_gns(sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(G1, G1^-1) for the GNS inner product tr(sigma X† Y)."""
    w, v = eig_hermitian(sigma)
    if w.min() <= 0:
        raise DomainError("stationary state must be positive definite")
    inv = (v / w) @ v.conj().T
    eye = np.eye(sigma.shape[0])
    return np.kron(sigma.T, eye), np.kron(inv.T, eye)


class LindbladGenerator:
    """A primitive Heisenberg-picture generator with its stationary state."""

    def __init__(self, rep: np.ndarray, sigma, kind: str = "custom"):
        rep = np.asarray(rep, dtype=complex)
        if not isinstance(sigma, DensityMatrix):
            sigma = DensityMatrix(sigma, strict=True)
        d = sigma.dim
        if rep.shape != (d * d, d * d):
            raise DimensionMismatchError(
                f"rep has shape {rep.shape}, expected {(d * d, d * d)}"
            )
        if d > MAX_DIM:
            raise ResourceLimitError(f"dimension {d} exceeds {MAX_DIM}")
        self.dim = d
        self.rep = rep
        self.rep.setflags(write=False)
        self.sigma = sigma
        self.kind = kind
        self._scale = max(1.0, float(np.abs(rep).max()))
        self._validate()
        self._propagators: dict[float, np.ndarray] = {}
        self._herm_eig: tuple | None = None
        self._gap: float | None = None
        self._reversible: bool | None = None
        self._strongly_reversible: bool | None = None

    # -- invariants ---------------------------------------------------------

    def _validate(self) -> None:
        d = self.dim
        resid_unital = np.abs(self.rep @ vec(np.eye(d))).max()
        if resid_unital > UNITALITY_TOL * self._scale:
            raise ContractViolationError(
                f"generator is not unital: |L(I)| = {resid_unital:.3e}"
            )
        resid_stat = np.abs(self.rep.conj().T @ vec(self.sigma.mat)).max()
        if resid_stat > STATIONARITY_TOL * self._scale:
            raise ContractViolationError(
                f"state is not stationary: |L*(sigma)| = {resid_stat:.3e}"
            )
        svals = np.linalg.svd(self.rep, compute_uv=False)
        tol = PRIMITIVITY_TOL * max(1.0, svals.max())
        kernel = int(np.sum(svals < tol))
        borderline = int(np.sum((svals >= tol) & (svals < 10 * tol)))
        if borderline:
            raise ContractViolationError(
                f"primitivity is borderline: {borderline} singular value(s) "
                f"within a decade of the rank tolerance {tol:.3e}"
            )
        if kernel != 1:
            raise ContractViolationError(
                f"generator is not primitive: kernel dimension {kernel}"
            )

    # -- basic actions ------------------------------------------------------

    def apply(self, x) -> np.ndarray:
        """L(X)."""
        return apply_superop(self.rep, x)

    def apply_adjoint(self, x) -> np.ndarray:
        """L*(X), the Schroedinger-picture dual action."""
        return apply_superop(self.rep.conj().T, x)

    @property
    def adjoint_rep(self) -> np.ndarray:
        return self.rep.conj().T

    # -- reversibility ------------------------------------------------------

    @property
    def is_reversible(self) -> bool:
        if self._reversible is None:
            self._reversible = check_reversible(self, self.sigma)
        return self._reversible

    @property
    def is_strongly_reversible(self) -> bool:
        if self._strongly_reversible is None:
            self._strongly_reversible = check_strongly_reversible(self, self.sigma)
        return self._strongly_reversible

    # -- evolution ----------------------------------------------------------

    def _hermitian_form(self):
        """Eigen-data of G^1/2 rep G^-1/2 when the generator is reversible."""
        if self._herm_eig is None:
            _, gh, ginv = _gram_kms(self.sigma.mat)
            s = gh @ self.rep @ ginv
            if np.abs(s - s.conj().T).max() > REVERSIBILITY_TOL * self._scale:
                self._herm_eig = (None, None, None, None)
            else:
                w, u = eig_hermitian((s + s.conj().T) / 2.0)
                self._herm_eig = (w, u, gh, ginv)
        return self._herm_eig

    def propagator(self, t: float) -> np.ndarray:
        """Matrix of exp(-t L) on vectorized operators."""
        if t < 0:
            raise ParameterError(f"evolution time must be nonnegative, got {t}")
        t = float(t)
        cached = self._propagators.get(t)
        if cached is not None:
            return cached
        w, u, gh, ginv = self._hermitian_form()
        if w is not None:
            core = (u * np.exp(-t * w)) @ u.conj().T
            prop = ginv @ core @ gh
        else:
            prop = scipy.linalg.expm(-t * self.rep)
        self._propagators[t] = prop
        return prop

    def evolve(self, t: float, x) -> np.ndarray:
        """Phi_t(X) = exp(-t L)(X)."""
        return apply_superop(self.propagator(t), x)

    @property
    def spectral_gap(self) -> float:
        if self._gap is None:
            self._gap = spectral_gap(self)
        return self._gap

    def __repr__(self):
        return f"LindbladGenerator(kind={self.kind!r}, dim={self.dim})"


def evolve(gen: LindbladGenerator, t: float, x) -> np.ndarray:
    """Functional form of Phi_t(X)."""
    return gen.evolve(t, x)


def simple_generator(sigma) -> LindbladGenerator:
    """Generalized depolarizing generator L(X) = X - tr(sigma X) I.

    Strongly reversible for any faithful sigma; the semigroup is
    Phi_t(X) = e^(-t) X + (1 - e^(-t)) tr(sigma X) I and L is a projector.
    """
    if not isinstance(sigma, DensityMatrix):
        sigma = DensityMatrix(sigma, strict=True)
    d = sigma.dim
    rep = np.eye(d * d, dtype=complex) - np.outer(
        vec(np.eye(d)), vec(sigma.mat).conj()
    )
    return LindbladGenerator(rep, sigma, kind="simple")


def davies_qubit_generator(
    sigma, gamma_10: float, dephase: float = 0.0
) -> LindbladGenerator:
    """Thermalizing qubit generator with balanced jump rates.

    Jumps |0><1| and |1><0| act in the eigenbasis of sigma = diag(s0, s1);
    the caller supplies the rate gamma_10 of |1><0| and the opposite rate is
    derived from the balance condition gamma_01 s1 = gamma_10 s0, which makes
    the generator strongly reversible. An optional dephasing jump diagonal in
    the sigma eigenbasis is added with the given rate.
    """
    if not isinstance(sigma, DensityMatrix):
        sigma = DensityMatrix(sigma, strict=True)
    if sigma.dim != 2:
        raise ParameterError("this factory builds qubit generators only")
    if gamma_10 < 0 or dephase < 0:
        raise ParameterError("rates must be nonnegative")
    s, v = sigma.eigenvalues, sigma.eigenvectors
    gamma_01 = gamma_10 * s[0] / s[1]
    ket0 = v[:, [0]]
    ket1 = v[:, [1]]
    jumps = [
        (gamma_01, ket0 @ ket1.conj().T),  # |0><1|
        (gamma_10, ket1 @ ket0.conj().T),  # |1><0|
    ]
    if dephase > 0:
        jumps.append((dephase, ket0 @ ket0.conj().T - ket1 @ ket1.conj().T))
    rep = np.zeros((4, 4), dtype=complex)
    eye = np.eye(2, dtype=complex)
    for rate, l_op in jumps:
        ll = l_op.conj().T @ l_op
        rep += rate * (
            0.5 * (_kraus_term(ll, eye) + _kraus_term(eye, ll))
            - _kraus_term(l_op.conj().T, l_op)
        )
    gen = LindbladGenerator(rep, sigma, kind="davies")
    gen._params = {"gamma_10": float(gamma_10), "dephase": float(dephase)}
    return gen


def tensor_sum(gens: Sequence[LindbladGenerator]) -> LindbladGenerator:
    """Independent-sum generator: each factor evolves under its own semigroup.

    The stationary state is the tensor product of the factor states and
    exp(-t K) factorizes as the tensor product of the factor semigroups.
    """
    gens = list(gens)
    if not gens:
        raise ParameterError("tensor_sum requires at least one generator")
    if len(gens) == 1:
        return gens[0]
    dims = [g.dim for g in gens]
    big_d = int(np.prod(dims))
    if big_d > MAX_DIM:
        raise ResourceLimitError(
            f"product dimension {big_d} exceeds supported maximum {MAX_DIM}"
        )
    rep = np.zeros((big_d * big_d, big_d * big_d), dtype=complex)
    for i, g in enumerate(gens):
        rep += lift_superop(g.rep, dims, i)
    sigma = gens[0].sigma.mat
    for g in gens[1:]:
        sigma = np.kron(sigma, g.sigma.mat)
    out = LindbladGenerator(rep, DensityMatrix(sigma, strict=True), kind="tensor_sum")
    out._factors = [generator_to_doc(g) for g in gens]
    return out


def custom_generator(rep: np.ndarray, sigma) -> LindbladGenerator:
    """Wrap an explicit superoperator matrix; all invariants are enforced."""
    return LindbladGenerator(np.asarray(rep, dtype=complex), sigma, kind="custom")


def adjoint_generator(gen: LindbladGenerator) -> np.ndarray:
    """Superoperator matrix of the Schroedinger dual L*.

    Returned as a raw rep: the dual is trace-preserving rather than unital,
    so it does not satisfy the LindbladGenerator invariants.
    """
    return gen.rep.conj().T


def check_reversible(gen: LindbladGenerator, sigma=None) -> bool:
    """Detailed balance: conjugation by Gamma_sigma maps L to its dual."""
    s = as_matrix(sigma if sigma is not None else gen.sigma)
    g, _, _ = _gram_kms(s)
    ginv = np.linalg.inv(g)
    resid = np.abs(g @ gen.rep @ ginv - gen.rep.conj().T).max()
    return bool(resid <= REVERSIBILITY_TOL * max(1.0, np.abs(gen.rep).max()))


def check_strongly_reversible(gen: LindbladGenerator, sigma=None) -> bool:
    """Self-adjointness under the GNS inner product tr(sigma X† Y)."""
    s = as_matrix(sigma if sigma is not None else gen.sigma)
    g1, g1inv = _gram_gns(s)
    resid = np.abs(g1 @ gen.rep @ g1inv - gen.rep.conj().T).max()
    return bool(resid <= REVERSIBILITY_TOL * max(1.0, np.abs(gen.rep).max()))


def spectral_gap(gen: LindbladGenerator) -> float:
    """Smallest nonzero eigenvalue of a reversible primitive generator.

    Computed from the Hermitian form of the rep in the KMS geometry; the
    kernel (spanned by the identity) must be one-dimensional.
    """
    if not gen.is_reversible:
        raise ContractViolationError("spectral gap requires a reversible generator")
    _, gh, ginv = _gram_kms(gen.sigma.mat)
    s = gh @ gen.rep @ ginv
    w, _ = eig_hermitian((s + s.conj().T) / 2.0)
    scale = max(1.0, abs(w).max())
    zeros = np.abs(w) < PRIMITIVITY_TOL * scale
    if int(zeros.sum()) != 1:
        raise ContractViolationError(
            f"expected a one-dimensional kernel, found {int(zeros.sum())} near-zeros"
        )
    nonzero = np.sort(w[~zeros])
    if nonzero[0] <= 0:
        raise ContractViolationError(
            f"generator has a negative mode {nonzero[0]:.3e}; not a reversible Lindbladian"
        )
    return float(nonzero[0])


@dataclass(frozen=True)
class KrausPair:
    """A Kraus operator together with its modular weight.

    The weight satisfies sigma R = omega R sigma, so R shifts the modular
    dynamics by a fixed factor.
    """

    r: np.ndarray
    omega: float

    def check(self, sigma: np.ndarray, tol: float = KRAUS_TOL) -> None:
        resid = np.abs(sigma @ self.r - self.omega * self.r @ sigma).max()
        scale = max(1.0, np.abs(self.r).max())
        if resid > tol * scale:
            raise ContractViolationError(
                f"Kraus operator violates the weight relation: residual {resid:.3e}"
            )


def choi_matrix(gen: LindbladGenerator, t: float) -> np.ndarray:
    """Choi matrix of Phi_t with the evolved system as the first factor."""
    d = gen.dim
    prop = gen.propagator(t)
    j = np.zeros((d * d, d * d), dtype=complex)
    for r in range(d):
        for c in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[r, c] = 1.0
            j += np.kron(apply_superop(prop, e), e)
    return j


def choi_kraus_decomposition(gen: LindbladGenerator, t: float) -> list[KrausPair]:
    """Kraus decomposition of Phi_t with modular weights.

    The Choi matrix of a strongly reversible semigroup commutes with
    sigma^(-1) (x) sigma^T, so both can be diagonalized together: the joint
    eigenvectors reshape into Kraus operators R_k = sqrt(lambda_k) V_k and
    the second spectrum fixes the weights omega_k. Joint eigenspaces are
    resolved blockwise: indices are grouped by the exactly known spectrum of
    sigma^(-1) (x) sigma^T and the Choi matrix is diagonalized within each
    group.

    Returns pairs satisfying sigma R_k = omega_k R_k sigma and
    sum_k R_k R_k† = I; sum_k R_k X R_k† reconstructs Phi_t(X).
    """
    if t <= 0:
        raise ParameterError("decomposition requires t > 0")
    if not gen.is_strongly_reversible:
        raise ContractViolationError(
            "Kraus decomposition with modular weights requires strong reversibility"
        )
    d = gen.dim
    j = choi_matrix(gen, t)
    s, v = gen.sigma.eigenvalues, gen.sigma.eigenvectors

    k_mat = np.kron(np.linalg.inv(gen.sigma.mat), gen.sigma.mat.T)
    comm = np.abs(j @ k_mat - k_mat @ j).max()
    if comm > CHOI_COMMUTATION_TOL * max(1.0, np.abs(k_mat).max()):
        raise ContractViolationError(
            f"Choi matrix does not commute with the modular weights "
            f"(residual {comm:.3e}); generator is not strongly reversible"
        )

    # group index pairs (a, b) by the ratio s_b / s_a
    ratios = {}
    for a in range(d):
        for b in range(d):
            ratio = s[b] / s[a]
            for key in ratios:
                if abs(key - ratio) <= 1e-8 * max(1.0, abs(key)):
                    ratios[key].append((a, b))
                    break
            else:
                ratios[ratio] = [(a, b)]

    pairs: list[KrausPair] = []
    lam_max = max(float(np.abs(np.diag(j)).max()), 1e-30)
    for ratio, idx in ratios.items():
        basis = np.column_stack(
            [np.kron(v[:, a], v[:, b].conj()) for (a, b) in idx]
        )
        block = basis.conj().T @ j @ basis
        lam, u = eig_hermitian((block + block.conj().T) / 2.0)
        omega = 1.0 / ratio
        for k in range(len(idx)):
            if lam[k] <= 1e-12 * lam_max:
                continue
            vk = basis @ u[:, k]
            r_op = np.sqrt(lam[k]) * vk.reshape(d, d)
            pair = KrausPair(r=r_op, omega=float(omega))
            pair.check(gen.sigma.mat)
            pairs.append(pair)

    completeness = sum(p.r @ p.r.conj().T for p in pairs) - np.eye(d)
    if np.abs(completeness).max() > KRAUS_TOL:
        raise ContractViolationError(
            f"Kraus completeness residual {np.abs(completeness).max():.3e}"
        )
    return pairs


def contractivity_check(
    gen: LindbladGenerator,
    p: float,
    t_grid: Sequence[float],
    sample_count: int = 100,
    seed: int = 0,
) -> float:
    """Minimum contraction margin of the weighted p-norm along the semigroup.

    For p >= 1 the margin is ||X||_p - ||Phi_t X||_p, for p < 1 it is the
    reverse; definite operands are sampled with varied spectral spreads.
    """
    space = WeightedSpace(gen.sigma)
    d = gen.dim
    worst = np.inf
    for ti, t in enumerate(t_grid):
        for k in range(sample_count):
            rng = substream(seed, ti, k)
            x = _random_definite(d, rng)
            nx = weighted_norm(space, x, p)
            ny = weighted_norm(space, gen.evolve(t, x), p)
            margin = (nx - ny) if p >= 1 else (ny - nx)
            worst = min(worst, margin)
    return float(worst)


def _random_definite(d: int, rng: np.random.Generator) -> np.ndarray:
    """Definite sample with a randomly chosen spectral spread."""
    scale = rng.choice([0.3, 1.0, 3.0])
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = scale * (g + g.conj().T) / 2.0
    w, v = np.linalg.eigh(h)
    return (v * np.exp(w)) @ v.conj().T


def generator_to_doc(gen: LindbladGenerator) -> dict:
    """Serialize a generator as a JSON-able document."""
    doc: dict = {"kind": gen.kind, "sigma": matrix_to_doc(gen.sigma.mat)}
    if gen.kind == "custom":
        doc["rep"] = matrix_to_doc(gen.rep)
    elif gen.kind == "davies":
        doc["params"] = dict(getattr(gen, "_params", {}))
    elif gen.kind == "tensor_sum":
        doc["params"] = {"factors": list(getattr(gen, "_factors", []))}
    return doc


def generator_from_doc(doc: dict) -> LindbladGenerator:
    """Build a generator from its JSON document.

    Kinds: "simple" (no params), "davies" (params gamma_10, dephase),
    "tensor_sum" (params factors: list of documents), "custom" (explicit rep).
    """
    try:
        kind = doc["kind"]
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed generator document: {exc}") from exc
    if kind == "tensor_sum":
        factors = doc.get("params", {}).get("factors") or doc.get("factors")
        if not factors:
            raise ParameterError("tensor_sum document requires a factors list")
        return tensor_sum([generator_from_doc(f) for f in factors])
    sigma = DensityMatrix(matrix_from_doc(doc["sigma"]), strict=True)
    if kind == "simple":
        return simple_generator(sigma)
    if kind == "davies":
        params = doc.get("params", {})
        gen = davies_qubit_generator(
            sigma,
            gamma_10=float(params.get("gamma_10", 1.0)),
            dephase=float(params.get("dephase", 0.0)),
        )
        gen._params = {"gamma_10": float(params.get("gamma_10", 1.0)),
                       "dephase": float(params.get("dephase", 0.0))}
        return gen
    if kind == "custom":
        return custom_generator(matrix_from_doc(doc["rep"]), sigma)
    raise ParameterError(f"unknown generator kind {kind!r}")
