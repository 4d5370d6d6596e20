"""Dense complex-matrix foundation: norms, inner products, and the spectral
calculus of unitaries.

Operators are plain square ``numpy`` arrays of ``complex128``.  Validation
helpers enforce the contracts (finite entries, unitarity within tolerance),
and :func:`spectral_decompose` produces a deterministic orthonormal
eigendecomposition on which every functional-calculus construction in the
package is built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

# Default tolerances.  Callers may override per operation.
TOL_UNITARY = 1e-10
TOL_SPECTRAL = 1e-8
CLUSTER_GAP = 1e-8

TWO_PI = 2.0 * np.pi


def as_operator(a) -> np.ndarray:
    """Validate and return ``a`` as a square complex matrix.

    Raises ``ValueError`` for non-square shapes, empty matrices, or
    non-finite entries.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("operator dimension must be at least 1")
    if not np.all(np.isfinite(a)):
        raise ValueError("operator entries must be finite")
    return a


def operator_norm(a) -> float:
    """Largest singular value of ``a``."""
    a = as_operator(a)
    return float(np.linalg.norm(a, 2))


def hs_norm(a) -> float:
    """Frobenius (Hilbert-Schmidt) norm of ``a``."""
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product trace(a† b), conjugate-linear in ``a``."""
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return complex(np.trace(a.conj().T @ b))


def unitarity_defect(u) -> float:
    """The measured distance ||u†u - I|| from exact unitarity."""
    u = as_operator(u)
    return operator_norm(u.conj().T @ u - np.eye(u.shape[0]))


def require_unitary(u, tol: float = TOL_UNITARY) -> np.ndarray:
    """Validate ``u`` as unitary within ``tol`` and return it as an array."""
    u = as_operator(u)
    defect = unitarity_defect(u)
    if defect > tol:
        raise ValueError(f"matrix is not unitary: defect {defect:.3e} exceeds {tol:.3e}")
    return u


def random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-like random unitary: QR orthonormalization of a random complex matrix."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(a)
    return q


def _normalize_angles(angles: np.ndarray) -> np.ndarray:
    # Eigenvalue arguments live on (-pi, pi]; the boundary point -pi is
    # represented as +pi so the principal-branch cut sits at a single point.
    out = np.where(angles <= -np.pi, angles + TWO_PI, angles)
    return out


def _cluster_indices(angles: np.ndarray, gap: float) -> list[list[int]]:
    """Group sorted angles into degeneracy clusters by circular distance."""
    n = len(angles)
    clusters: list[list[int]] = [[0]]
    for j in range(1, n):
        if angles[j] - angles[j - 1] < gap:
            clusters[-1].append(j)
        else:
            clusters.append([j])
    # Wraparound: the first and last clusters may meet across the +pi cut.
    if len(clusters) > 1:
        if (angles[clusters[0][0]] + TWO_PI) - angles[clusters[-1][-1]] < gap:
            clusters[0] = clusters.pop() + clusters[0]
    return clusters


@dataclass
class SpectralDecomposition:
    """Eigenangles on (-pi, pi] with an orthonormal eigenbasis of a unitary.

    ``angles`` are ascending; column ``j`` of ``vectors`` is the eigenvector
    for angle ``angles[j]``; ``clusters`` partitions the indices into
    degeneracy groups (angles closer than the clustering gap).
    """

    angles: np.ndarray
    vectors: np.ndarray
    clusters: list[list[int]]

    @property
    def dim(self) -> int:
        return len(self.angles)

    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def reconstruct(self) -> np.ndarray:
        """V diag(e^{i angle}) V†, the unitary this decomposition represents."""
        return (self.vectors * self.eigenvalues()) @ self.vectors.conj().T

    def cluster_projections(self) -> list[np.ndarray]:
        """Orthogonal projections onto the degeneracy eigenspaces."""
        out = []
        for idx in self.clusters:
            vc = self.vectors[:, idx]
            out.append(vc @ vc.conj().T)
        return out


def _canonical_cluster_basis(vectors: np.ndarray, clusters: list[list[int]]) -> np.ndarray:
    """Replace each cluster's eigenbasis by one obtained deterministically:
    project the standard basis onto the eigenspace and orthonormalize in
    index order.  Fixes all eigenvector phase/rotation freedom.
    """
    dim = vectors.shape[0]
    out = vectors.copy()
    for idx in clusters:
        vc = vectors[:, idx]
        proj = vc @ vc.conj().T
        chosen: list[np.ndarray] = []
        for j in range(dim):
            if len(chosen) == len(idx):
                break
            w = proj[:, j].copy()
            for _ in range(2):  # double orthogonalization for stability
                for c in chosen:
                    w -= (c.conj() @ w) * c
            nrm = np.linalg.norm(w)
            if nrm > 1e-10:
                chosen.append(w / nrm)
        if len(chosen) != len(idx):
            raise ArithmeticError("failed to span a degenerate eigenspace deterministically")
        for col, vec in zip(idx, chosen):
            out[:, col] = vec
    return out


def spectral_decompose(
    u,
    cluster_gap: float = CLUSTER_GAP,
    tol_unitary: float = TOL_UNITARY,
    tol_spectral: float = TOL_SPECTRAL,
) -> SpectralDecomposition:
    """Orthonormal eigendecomposition of a unitary.

    Uses the complex Schur form (diagonal for normal matrices) so the
    eigenbasis is orthonormal by construction, then sorts angles ascending
    and canonicalizes the basis within each degeneracy cluster against the
    standard basis.  Rejects inputs whose unitarity defect exceeds
    ``tol_unitary``; the output reproduces the input within ``tol_spectral``.
    """
    u = require_unitary(u, tol_unitary)
    t, z = la.schur(u, output="complex")
    eig = np.diag(t)
    eig = eig / np.abs(eig)
    angles = _normalize_angles(np.angle(eig))
    order = np.argsort(angles, kind="stable")
    angles = angles[order]
    vectors = z[:, order]
    clusters = _cluster_indices(angles, cluster_gap)
    vectors = _canonical_cluster_basis(vectors, clusters)
    dec = SpectralDecomposition(angles=angles, vectors=vectors, clusters=clusters)
    residual = operator_norm(dec.reconstruct() - u)
    if residual > tol_spectral:
        raise ArithmeticError(
            f"spectral reconstruction residual {residual:.3e} exceeds {tol_spectral:.3e}"
        )
    return dec


def apply_circle_function(dec: SpectralDecomposition, g) -> np.ndarray:
    """Evaluate a circle function on a decomposed unitary: V diag(g(angle)) V†.

    ``g`` maps angles in (-pi, pi] to complex scalars; it must be finite on
    every eigenangle of the decomposition.
    """
    values = np.asarray([g(float(a)) for a in dec.angles], dtype=complex)
    if not np.all(np.isfinite(values)):
        raise ValueError("circle function is not finite on every eigenangle")
    return (dec.vectors * values) @ dec.vectors.conj().T


def circle_function_fit(dec: SpectralDecomposition, x) -> np.ndarray:
    """Best approximation of ``x`` by a function of the decomposed unitary.

    Hilbert-Schmidt projection of ``x`` onto the span of the cluster
    projections: one scalar per degeneracy cluster.
    """
    x = as_operator(x)
    if x.shape[0] != dec.dim:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {dec.dim}")
    values = np.zeros(dec.dim, dtype=complex)
    for idx in dec.clusters:
        vc = dec.vectors[:, idx]
        block = vc.conj().T @ x @ vc
        values[idx] = np.trace(block) / len(idx)
    return (dec.vectors * values) @ dec.vectors.conj().T


def circle_function_distance(dec: SpectralDecomposition, x) -> float:
    """Relative distance from ``x`` to the algebra of functions of the unitary.

    Zero exactly when ``x`` commutes with every projection commuting with
    the decomposed unitary, i.e. when ``x`` is a circle function of it.
    """
    x = as_operator(x)
    fit = circle_function_fit(dec, x)
    return operator_norm(x - fit) / max(1.0, operator_norm(x))
