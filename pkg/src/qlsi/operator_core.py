"""Dense complex Hermitian linear algebra foundation.

Conventions used throughout the package:

* all logarithms are natural (values in nats);
* dense storage only, dimensions up to MAX_DIM = 64;
* Hermitian inputs are symmetrized at construction, eigenvalues of
  positive operators are clipped at CLIP_TOL so that downstream
  fractional powers never see tiny negative eigenvalues.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DecompositionError,
    DimensionMismatchError,
    DomainError,
    ParameterError,
)
from .rng import as_generator

__all__ = [
    "MAX_DIM",
    "CLIP_TOL",
    "HERM_TOL",
    "TRACE_TOL",
    "DEFINITE_TOL",
    "ComplexMatrix",
    "HermitianOperator",
    "PositiveOperator",
    "DensityMatrix",
    "as_matrix",
    "eig_hermitian",
    "mat_fn",
    "kron",
    "partial_trace",
    "random_hermitian",
    "random_unitary",
    "random_positive_definite",
    "random_density",
    "matrix_to_doc",
    "matrix_from_doc",
]

MAX_DIM = 64
CLIP_TOL = 1e-10     # negative eigenvalues above -CLIP_TOL are clipped to 0
HERM_TOL = 1e-12     # max-norm hermiticity residual after symmetrization
TRACE_TOL = 1e-10    # |tr - 1| tolerance for density matrices
DEFINITE_TOL = 1e-10  # smallest eigenvalue required of a definite operator


def _check_square(arr: np.ndarray) -> np.ndarray:
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise DimensionMismatchError("dimension must be >= 1")
    if arr.shape[0] > MAX_DIM:
        raise DimensionMismatchError(
            f"dimension {arr.shape[0]} exceeds supported maximum {MAX_DIM}"
        )
    return arr


class ComplexMatrix:
    """A dim x dim complex matrix; the common carrier of every operator."""

    __slots__ = ("mat",)

    def __init__(self, entries):
        arr = np.array(as_matrix(entries), dtype=complex)
        _check_square(arr)
        arr.setflags(write=False)
        self.mat = arr

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class HermitianOperator(ComplexMatrix):
    """Self-adjoint operator; symmetrized as (M + M†)/2 at construction."""

    __slots__ = ()

    def __init__(self, entries):
        arr = np.array(as_matrix(entries), dtype=complex)
        _check_square(arr)
        sym = (arr + arr.conj().T) / 2.0
        if np.abs(sym - sym.conj().T).max() > HERM_TOL:
            raise DomainError("symmetrization failed to produce a Hermitian matrix")
        super().__init__(sym)


class PositiveOperator(HermitianOperator):
    """Positive semidefinite operator with clipped spectrum.

    ``strict=True`` additionally requires the smallest eigenvalue to be at
    least DEFINITE_TOL (positive definite).
    """

    __slots__ = ("eigenvalues", "eigenvectors", "strict")

    def __init__(self, entries, strict: bool = False):
        sym = HermitianOperator(entries)
        w, v = eig_hermitian(sym)
        if w[0] < -CLIP_TOL * max(1.0, abs(w[-1])):
            raise DomainError(
                f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})"
            )
        if strict and w[0] < DEFINITE_TOL:
            raise DomainError(
                f"matrix is not positive definite (min eigenvalue {w[0]:.3e})"
            )
        w = np.clip(w, 0.0, None)
        rebuilt = (v * w) @ v.conj().T
        super().__init__((rebuilt + rebuilt.conj().T) / 2.0)
        self.eigenvalues = w
        self.eigenvalues.setflags(write=False)
        self.eigenvectors = v
        self.eigenvectors.setflags(write=False)
        self.strict = bool(strict)

    @property
    def is_definite(self) -> bool:
        return self.eigenvalues[0] >= DEFINITE_TOL


class DensityMatrix(PositiveOperator):
    """Unit-trace positive operator (a quantum state)."""

    __slots__ = ()

    def __init__(self, entries, strict: bool = False):
        super().__init__(entries, strict=strict)
        tr = float(np.trace(self.mat).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"trace {tr!r} differs from 1 by more than {TRACE_TOL}")


def as_matrix(x) -> np.ndarray:
    """Return the underlying ndarray of a wrapper, or the array itself."""
    if isinstance(x, ComplexMatrix):
        return x.mat
    return np.asarray(x, dtype=complex)


def eig_hermitian(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian operator.

    Returns (eigenvalues ascending, unitary eigenvector matrix V) with
    H = V diag(w) V†.
    """
    arr = as_matrix(h)
    _check_square(arr)
    try:
        w, v = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as exc:
        scale = np.abs(arr).max()
        raise DecompositionError(
            f"eigendecomposition failed to converge (dim={arr.shape[0]}, "
            f"max|entry|={scale:.3e}): {exc}"
        ) from exc
    return w, v


def mat_fn(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to a Hermitian operator through its spectrum.

    Returns V diag(f(w)) V†. Raises DomainError if f produces a non-finite
    value on any (clipped) eigenvalue, naming the offending eigenvalue.
    """
    if isinstance(a, PositiveOperator):
        w, v = a.eigenvalues, a.eigenvectors
    else:
        w, v = eig_hermitian(a)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if fw.shape != w.shape:
        raise ParameterError("scalar function must map the spectrum elementwise")
    bad = ~np.isfinite(fw)
    if bad.any():
        raise DomainError(
            f"function undefined at eigenvalue {w[bad][0]!r} of the operand"
        )
    return (v * fw) @ v.conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product of two operators."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(x, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out all tensor factors not listed in ``keep``.

    ``dims`` are the factor dimensions (their product must equal dim(x));
    ``keep`` is a set of factor indices, preserved in their original order.
    """
    arr = as_matrix(x)
    _check_square(arr)
    dims = [int(d) for d in dims]
    n = len(dims)
    if int(np.prod(dims)) != arr.shape[0]:
        raise DimensionMismatchError(
            f"factor dimensions {dims} do not multiply to {arr.shape[0]}"
        )
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatchError(f"keep indices {keep} out of range for {n} factors")
    t = arr.reshape(dims + dims)
    # trace out the complement, highest index first so positions stay valid
    traced = [j for j in range(n) if j not in keep]
    nleft = n
    for j in sorted(traced, reverse=True):
        t = np.trace(t, axis1=j, axis2=j + nleft)
        nleft -= 1
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def random_unitary(dim: int, seed) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fix."""
    rng = as_generator(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(dim: int, seed, scale: float = 1.0) -> HermitianOperator:
    """Gaussian Hermitian matrix, deterministic for a fixed seed."""
    if dim < 1:
        raise ParameterError("dim must be >= 1")
    rng = as_generator(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianOperator(scale * (g + g.conj().T) / 2.0)


def random_positive_definite(
    dim: int, seed, min_eig: float = 0.05, spread: float = 1.0
) -> PositiveOperator:
    """Random positive definite operator with spectrum in [min_eig, min_eig + spread].

    Built as a Haar-random unitary conjugation of a uniformly sampled spectrum,
    so the eigenvalue floor is exact by construction.
    """
    if dim < 1:
        raise ParameterError("dim must be >= 1")
    if min_eig <= 0:
        raise ParameterError("min_eig must be positive")
    rng = as_generator(seed)
    spec = min_eig + spread * rng.random(dim)
    u = random_unitary(dim, rng)
    return PositiveOperator((u * spec) @ u.conj().T, strict=min_eig >= DEFINITE_TOL)


def random_density(dim: int, seed, min_eig: float = 0.01) -> DensityMatrix:
    """Random faithful density matrix whose spectrum stays above min_eig.

    The spectrum is min_eig + (1 - dim*min_eig) * (uniform point of the
    simplex), so eigenvalues are >= min_eig and sum to one exactly.
    """
    if dim < 1:
        raise ParameterError("dim must be >= 1")
    if not (0.0 < min_eig < 1.0 / dim):
        raise ParameterError(f"min_eig must lie in (0, 1/dim) = (0, {1.0 / dim})")
    rng = as_generator(seed)
    simplex = rng.dirichlet(np.ones(dim))
    spec = min_eig + (1.0 - dim * min_eig) * simplex
    u = random_unitary(dim, rng)
    return DensityMatrix((u * spec) @ u.conj().T, strict=min_eig >= DEFINITE_TOL)


def matrix_to_doc(x) -> dict:
    """Serialize a matrix as {"dim": d, "re": [[...]], "im": [[...]]}."""
    arr = as_matrix(x)
    _check_square(arr)
    return {
        "dim": int(arr.shape[0]),
        "re": arr.real.tolist(),
        "im": arr.imag.tolist(),
    }


def matrix_from_doc(doc: dict) -> np.ndarray:
    """Parse the matrix JSON document, rejecting malformed arrays."""
    try:
        dim = int(doc["dim"])
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed matrix document: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise DimensionMismatchError(
            f"matrix document arrays have shapes {re.shape}, {im.shape}; "
            f"expected ({dim}, {dim})"
        )
    return re + 1j * im
