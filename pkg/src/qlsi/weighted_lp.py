"""State-weighted L_p calculus.

For a fixed faithful state sigma this module provides the conjugation maps
Gamma_sigma^s, the weighted p-(quasi)norms for all real nonzero p, the power
operators I_{q,p} that transport between p- and q-spaces, the two inner
products, and numerical checks of the duality inequalities (Hoelder in the
convex range, reverse Hoelder and reverse Minkowski below p = 1).

p = 0 and p = +-inf are not implemented as norms: the zero-exponent norm has
no closed form in the non-commuting case, and the infinite limits are only
explored through sequences of finite p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .operator_core import (
    DEFINITE_TOL,
    DensityMatrix,
    as_matrix,
    eig_hermitian,
)
from .rng import as_generator

__all__ = [
    "WeightedSpace",
    "PExponent",
    "holder_conjugate",
    "gamma_power",
    "weighted_norm",
    "power_operator",
    "inner_sigma",
    "inner_one_sigma",
    "check_reverse_holder",
    "check_reverse_minkowski",
    "holder_variational_check",
]

_SINGULAR_TOL = 1e-14  # relative floor below which a spectrum counts as singular
                       # (eigenvalues smaller than this are eigh noise)


def holder_conjugate(p: float) -> float:
    """Conjugate exponent q with 1/p + 1/q = 1; p = 1 maps to +inf."""
    if p == 0:
        raise ParameterError("p = 0 has no conjugate exponent")
    if math.isinf(p):
        return 1.0
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


@dataclass(frozen=True)
class PExponent:
    """An exponent p != 0 together with its conjugate."""

    p: float
    hat_p: float = field(init=False)

    def __post_init__(self):
        if self.p == 0:
            raise ParameterError("exponent p must be nonzero")
        object.__setattr__(self, "hat_p", holder_conjugate(self.p))
        inv = 0.0 if math.isinf(self.p) else 1.0 / self.p
        inv_hat = 0.0 if math.isinf(self.hat_p) else 1.0 / self.hat_p
        assert abs(inv + inv_hat - 1.0) <= 1e-12


class WeightedSpace:
    """A faithful reference state with cached spectral data.

    Immutable after construction; fractional powers of sigma are memoized
    since the same exponents recur across a sweep.
    """

    def __init__(self, sigma):
        if not isinstance(sigma, DensityMatrix):
            sigma = DensityMatrix(sigma, strict=True)
        if sigma.eigenvalues[0] < DEFINITE_TOL:
            raise DomainError("reference state must be positive definite")
        self.sigma = sigma
        self.dim = sigma.dim
        self.sigma_eigenvalues = sigma.eigenvalues
        self.sigma_eigenvectors = sigma.eigenvectors
        self.s_min = float(sigma.eigenvalues[0])
        self._powers: dict[float, np.ndarray] = {}

    def sigma_power(self, s: float) -> np.ndarray:
        """sigma**s through the cached eigendecomposition."""
        s = float(s)
        cached = self._powers.get(s)
        if cached is None:
            w = self.sigma_eigenvalues**s
            v = self.sigma_eigenvectors
            cached = (v * w) @ v.conj().T
            self._powers[s] = cached
        return cached

    @property
    def log_sigma(self) -> np.ndarray:
        cached = self._powers.get("log")
        if cached is None:
            w = np.log(self.sigma_eigenvalues)
            v = self.sigma_eigenvectors
            cached = (v * w) @ v.conj().T
            self._powers["log"] = cached
        return cached

    def __repr__(self):
        return f"WeightedSpace(dim={self.dim}, s_min={self.s_min:.6g})"


def _as_exponent(p) -> float:
    """Accept a bare float or a PExponent."""
    if isinstance(p, PExponent):
        return p.p
    return float(p)


def gamma_power(space: WeightedSpace, x, s: float) -> np.ndarray:
    """Conjugation sigma^(s/2) X sigma^(s/2); s = 1 is the canonical map."""
    if s == 0:
        return np.array(as_matrix(x))
    half = space.sigma_power(s / 2.0)
    return half @ as_matrix(x) @ half


def _abs_decomposition(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spectral data (s, V) of |M| = V diag(s) V† with s >= 0 descending-free.

    Uses eigh when M is Hermitian (cheaper, and exact for the PSD pipeline),
    SVD otherwise.
    """
    if np.abs(m - m.conj().T).max() <= 1e-13 * max(1.0, np.abs(m).max()):
        w, v = eig_hermitian((m + m.conj().T) / 2.0)
        return np.abs(w), v
    _, s, vh = np.linalg.svd(m)
    return s, vh.conj().T


def weighted_norm(space: WeightedSpace, x, p: float) -> float:
    """Weighted p-norm: Schatten p-norm of sigma^(1/2p) X sigma^(1/2p).

    For p < 0 the operand must be positive definite. p in {0, +-inf} is
    rejected; explore those limits with sequences of finite p.
    """
    p = _as_exponent(p)
    if p == 0 or math.isinf(p):
        raise ParameterError(f"unsupported exponent p = {p}")
    m = gamma_power(space, x, 1.0 / p)
    s, _ = _abs_decomposition(m)
    if p < 0 and s.min() <= _SINGULAR_TOL * s.max():
        raise DomainError("negative exponent requires a positive definite operand")
    total = float(np.sum(s[s > 0] ** p)) if p > 0 else float(np.sum(s**p))
    return total ** (1.0 / p)


def power_operator(space: WeightedSpace, x, q: float, p: float) -> np.ndarray:
    """Power operator I_{q,p}: Gamma^(-1/q) of |Gamma^(1/p)(X)|^(p/q).

    Transports X between weighted spaces so that the q-norm of the image
    raised to q equals the p-norm of X raised to p.
    """
    p = _as_exponent(p)
    q = _as_exponent(q)
    if p == 0 or q == 0:
        raise ParameterError("power operator requires nonzero exponents")
    m = gamma_power(space, x, 1.0 / p)
    s, v = _abs_decomposition(m)
    expo = p / q
    if expo < 0 or expo != int(expo):
        if expo < 0 and s.min() <= _SINGULAR_TOL * s.max():
            raise DomainError(
                "singular intermediate under a negative fractional power"
            )
        s = np.where(s < 0, 0.0, s)
    with np.errstate(all="ignore"):
        powered = s**expo
    if not np.all(np.isfinite(powered)):
        raise DomainError("fractional power produced a non-finite eigenvalue")
    core = (v * powered) @ v.conj().T
    neg_half = space.sigma_power(-1.0 / (2.0 * q))
    return neg_half @ core @ neg_half


def inner_sigma(space: WeightedSpace, x, y) -> complex:
    """KMS-symmetric inner product tr(X† sigma^(1/2) Y sigma^(1/2))."""
    return complex(np.trace(as_matrix(x).conj().T @ gamma_power(space, y, 1.0)))


def inner_one_sigma(space: WeightedSpace, x, y) -> complex:
    """GNS inner product tr(sigma X† Y)."""
    return complex(np.trace(space.sigma.mat @ as_matrix(x).conj().T @ as_matrix(y)))


def check_reverse_holder(space: WeightedSpace, x, y, p: float) -> float:
    """Margin of the reverse Hoelder inequality for p < 1.

    Returns <X, Y>_sigma - ||X||_p ||Y||_p_hat, which is >= 0 for X >= 0 and
    Y > 0 up to numerical precision.
    """
    if p >= 1:
        raise ParameterError(f"reverse Hoelder requires p < 1, got {p}")
    hat = holder_conjugate(p)
    lhs = inner_sigma(space, x, y)
    if abs(lhs.imag) > 1e-9 * max(1.0, abs(lhs)):
        raise DomainError("inner product is not real; operands must be positive")
    return float(lhs.real - weighted_norm(space, x, p) * weighted_norm(space, y, hat))


def check_reverse_minkowski(space: WeightedSpace, x, y, p: float) -> float:
    """Margin of the reversed triangle inequality for p < 1.

    Below p = 1 the p-norm is superadditive on positive definite operands:
    ||X+Y||_p >= ||X||_p + ||Y||_p. Returns that difference, which is >= 0
    up to numerical precision and 0 when X and Y are proportional.
    """
    if p >= 1:
        raise ParameterError(f"reverse Minkowski requires p < 1, got {p}")
    xs = as_matrix(x)
    ys = as_matrix(y)
    return float(
        weighted_norm(space, xs + ys, p)
        - weighted_norm(space, xs, p)
        - weighted_norm(space, ys, p)
    )


def holder_variational_check(
    space: WeightedSpace, x, p: float, sample_count: int = 200, seed: int = 0
) -> bool:
    """Check the variational form of the p-norm for p >= 1.

    Samples Y and verifies |<X,Y>_sigma| / ||Y||_p_hat never exceeds ||X||_p
    (tolerance 1e-9), and that Y* = I_{p_hat, p}(X) attains the supremum for
    positive definite X.
    """
    if p < 1:
        raise ParameterError(f"variational check requires p >= 1, got {p}")
    hat = holder_conjugate(p)
    rng = as_generator(seed)
    norm_x = weighted_norm(space, x, p)
    d = space.dim

    def dual_norm(y):
        if math.isinf(hat):
            return float(np.linalg.norm(as_matrix(y), 2))
        return weighted_norm(space, y, hat)

    for _ in range(sample_count):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        ratio = abs(inner_sigma(space, g, x)) / dual_norm(g)
        if ratio > norm_x + 1e-9 * max(1.0, norm_x):
            return False

    xs = as_matrix(x)
    is_definite = (
        np.abs(xs - xs.conj().T).max() <= 1e-12
        and eig_hermitian(xs)[0][0] > DEFINITE_TOL
    )
    if is_definite:
        y_star = np.eye(d) if math.isinf(hat) else power_operator(space, xs, hat, p)
        attained = inner_sigma(space, y_star, x).real / dual_norm(y_star)
        if abs(attained - norm_x) > 1e-9 * max(1.0, norm_x):
            return False
    return True
