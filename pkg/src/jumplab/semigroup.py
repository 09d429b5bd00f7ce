"""Generator assembly, spectral decomposition, and the heat semigroup P_t.

The generator acts by (Lu)(x) = (1/m(x)) * sum_y J(x, y)(u(y) - u(x)); it is
m-symmetric, has zero row sums (conservative) and nonpositive spectrum.  All
P_t evaluations go through one spectral decomposition of the m-symmetrized
matrix, performed by a cyclic Jacobi sweep: hundreds of time points are needed
downstream, so one O(n^3) factorization buys O(n^2) applies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Model, as_state_function

__all__ = [
    "Generator",
    "Spectral",
    "EigensolverError",
    "assemble_generator",
    "spectral_decompose",
    "apply_pt",
    "heat_kernel",
    "vague_limit_residual",
]


class EigensolverError(RuntimeError):
    """Jacobi iteration failed to reach the requested off-diagonal norm."""


@dataclass(frozen=True)
class Generator:
    """Dense generator matrix together with the model it was built from."""

    matrix: np.ndarray
    model: Model


def assemble_generator(model: Model) -> Generator:
    """Build L with L[x, y] = J(x, y)/m(x) off the diagonal, zero row sums."""
    L = model.jumps / model.measure[:, None]
    np.fill_diagonal(L, 0.0)
    np.fill_diagonal(L, -L.sum(axis=1))
    L.setflags(write=False)
    return Generator(L, model)


def _jacobi_eigh(
    S: np.ndarray, tol: float, max_sweeps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Sweeps row by row, skipping pivots already below the per-element
    threshold; converged when the off-diagonal Frobenius mass drops under
    tol times the Frobenius norm of the input.
    """
    A = np.array(S, dtype=np.float64)
    n = A.shape[0]
    V = np.eye(n)
    fro = float(np.linalg.norm(A, "fro"))
    target = tol * fro
    if n < 2:
        return np.diag(A).copy(), V

    def off_norm() -> float:
        # Summed directly over off-diagonal entries: the difference-of-sums
        # form cancels catastrophically once the matrix is nearly diagonal.
        B = A.copy()
        np.fill_diagonal(B, 0.0)
        return float(np.linalg.norm(B, "fro"))

    for _ in range(max_sweeps):
        if off_norm() <= target:
            return np.diag(A).copy(), V
        # Skipping pivots below target/n keeps the final off-norm under target
        # even if a whole sweep performs no rotation.
        skip = target / n
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= skip:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                v_p, v_q = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * v_p - s * v_q
                V[:, q] = s * v_p + c * v_q

    off = off_norm()
    if off <= target:
        return np.diag(A).copy(), V
    raise EigensolverError(
        f"no convergence after {max_sweeps} sweeps: off-diagonal norm {off:.3e}"
        f" vs target {target:.3e}"
    )


@dataclass(frozen=True)
class Spectral:
    """Eigendecomposition of L in the m-weighted inner product.

    eigenvalues are sorted descending with 0 = lambda_0 >= lambda_1 >= ...;
    basis columns are m-orthonormal eigenvectors, so
    P_t u = basis @ (exp(eigenvalues * t) * (basis.T @ (m * u))).
    """

    eigenvalues: np.ndarray
    basis: np.ndarray
    model: Model

    @property
    def spectral_gap(self) -> float:
        """-lambda_1; zero iff the jump graph is disconnected or n = 1."""
        if self.eigenvalues.size < 2:
            return 0.0
        return float(-self.eigenvalues[1])

    @property
    def slowest_rate(self) -> float:
        """Smallest magnitude among the strictly negative eigenvalues (0 if none)."""
        negative = self.eigenvalues[self.eigenvalues < 0.0]
        return float(-negative.max()) if negative.size else 0.0


def spectral_decompose(
    gen: Generator,
    model: Model,
    *,
    tol: float = 1e-13,
    max_sweeps: int = 100,
) -> Spectral:
    """Diagonalize L via the symmetrization D^(1/2) L D^(-1/2), D = diag(m).

    Eigenvalues with magnitude below 1e-12 of the largest are snapped to
    exactly zero so that conservativeness holds exactly downstream.
    """
    sqrt_m = np.sqrt(model.measure)
    S = sqrt_m[:, None] * gen.matrix / sqrt_m[None, :]
    S = 0.5 * (S + S.T)
    eigs, Q = _jacobi_eigh(S, tol, max_sweeps)

    order = np.argsort(-eigs, kind="stable")
    eigs = eigs[order]
    Q = Q[:, order]
    scale = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    eigs[np.abs(eigs) <= 1e-12 * scale] = 0.0
    if np.any(eigs > 0.0):
        raise EigensolverError(
            f"positive eigenvalue {eigs[eigs > 0].max():.3e} after snapping;"
            " generator is not negative semidefinite"
        )
    basis = Q / sqrt_m[:, None]
    eigs.setflags(write=False)
    basis.setflags(write=False)
    return Spectral(eigs, basis, model)


def apply_pt(spec: Spectral, t: float, u) -> np.ndarray:
    """Evaluate P_t u = exp(tL) u through the spectral decomposition."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    u = as_state_function(spec.model, u)
    coeffs = spec.basis.T @ (spec.model.measure * u)
    return spec.basis @ (np.exp(spec.eigenvalues * t) * coeffs)


def heat_kernel(spec: Spectral, t: float) -> np.ndarray:
    """Symmetric kernel K[x, y] = m(x) P_t(x, {y}); rows sum to m(x)."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    W = spec.model.measure[:, None] * spec.basis
    return (W * np.exp(spec.eigenvalues * t)) @ W.T


def vague_limit_residual(spec: Spectral, model: Model, t: float) -> float:
    """max over x != y of |K_t[x, y]/t - J(x, y)|.

    On a finite space vague convergence of K_t/t to J is entrywise
    off-diagonal convergence; the kernel is smooth in t with derivative J at
    zero, so the residual decays at first order in t.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    R = np.abs(heat_kernel(spec, t) / t - model.jumps)
    np.fill_diagonal(R, 0.0)
    return float(R.max())
