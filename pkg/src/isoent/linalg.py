"""Dense complex linear algebra and pure-state entanglement primitives.

Tensor ordering is fixed throughout the package: in ``kron(a, b)`` the left
factor carries the most significant index, so the computational basis state
``|j, k>`` of C^dA (x) C^dB sits at position ``j * dB + k``.  Every bipartite
reshape goes through :func:`coefficient_matrix`.
"""

import numpy as np

from .config import TOL

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


class NotNormalizedError(ValueError):
    pass


def kron(a, b):
    """Tensor product of two vectors or two square matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim:
        raise ValueError("kron operands must both be vectors or both be matrices")
    return np.kron(a, b)


def coefficient_matrix(psi, dims):
    """Reshape a bipartite state vector into its dA x dB coefficient matrix."""
    psi = np.asarray(psi, dtype=complex)
    d_a, d_b = dims
    if psi.shape != (d_a * d_b,):
        raise ValueError(f"state of shape {psi.shape} does not factor as {d_a}x{d_b}")
    return psi.reshape(d_a, d_b)


def projector(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def partial_trace(rho, dims, keep="A"):
    """Reduced density matrix of a bipartite operator.

    Parameters
    ----------
    rho : (dA*dB, dA*dB) array
    dims : (int, int)
    keep : {"A", "B"}
        Which subsystem survives the trace.
    """
    rho = np.asarray(rho, dtype=complex)
    d_a, d_b = dims
    n = d_a * d_b
    if rho.shape != (n, n):
        raise ValueError(f"operator of shape {rho.shape} does not match dims {dims}")
    t = rho.reshape(d_a, d_b, d_a, d_b)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def _check_normalized(psi, tol):
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise NotNormalizedError(f"state has norm {norm!r}")


def tangle(psi, tol=TOL.physical):
    """Tangle 2(1 - Tr rho_A^2) of a normalized two-qubit pure state."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4,):
        raise ValueError("tangle is defined here for two-qubit states (dim 4)")
    _check_normalized(psi, tol)
    m = coefficient_matrix(psi, (2, 2))
    rho_a = m @ m.conj().T
    purity = np.real(np.trace(rho_a @ rho_a))
    return float(min(max(2.0 * (1.0 - purity), 0.0), 1.0))


def tangles(basis):
    """Tangles of all columns of a 4x4 matrix, no normalization check.

    Uses the identity tangle = 4 |det M|^2 for the 2x2 coefficient matrix M,
    which is exact for unit vectors.
    """
    b = np.asarray(basis, dtype=complex)
    m = b.T.reshape(-1, 2, 2)
    det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    return 4.0 * np.abs(det) ** 2


def bloch_vector(rho):
    """Pauli expectations (x, y, z) of a qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("bloch_vector needs a 2x2 density matrix")
    return np.array([np.real(np.trace(rho @ p)) for p in PAULIS])


def density_from_bloch(v):
    x, y, z = v
    return 0.5 * (np.eye(2) + x * PAULI_X + y * PAULI_Y + z * PAULI_Z)


def reduction_bloch_vectors(basis):
    """Bloch vectors of both single-qubit reductions of every column.

    Returns two (n, 3) arrays for subsystems A and B.
    """
    b = np.asarray(basis, dtype=complex)
    m = b.T.reshape(-1, 2, 2)
    rho_a = m @ m.conj().transpose(0, 2, 1)
    rho_b = m.transpose(0, 2, 1) @ m.conj()

    def vecs(r):
        off = r[:, 1, 0]
        return np.stack([2 * off.real, 2 * off.imag, (r[:, 0, 0] - r[:, 1, 1]).real], axis=1)

    return vecs(rho_a), vecs(rho_b)


def schmidt_spectrum(psi, dims, tol=TOL.physical):
    """Schmidt coefficients of a normalized bipartite pure state, descending."""
    d_a, d_b = dims
    if d_a != d_b:
        raise ValueError("schmidt_spectrum expects a square bipartition")
    psi = np.asarray(psi, dtype=complex)
    _check_normalized(psi, tol)
    sv = np.linalg.svd(coefficient_matrix(psi, dims), compute_uv=False)
    # stable sort keeps the original index order among ties
    order = np.argsort(-sv, kind="stable")
    return sv[order]


def linear_entropy(spectrum):
    """2(1 - sum of fourth powers); equals the tangle for two qubits."""
    lam = np.asarray(spectrum, dtype=float)
    return float(2.0 * (1.0 - np.sum(lam**4)))


def orthonormality_residual(basis):
    """Max-norm of B^dagger B - I."""
    b = np.asarray(getattr(basis, "matrix", basis), dtype=complex)
    return float(np.max(np.abs(b.conj().T @ b - np.eye(b.shape[1]))))


def is_unitary(u, tol=TOL.physical):
    u = np.asarray(u, dtype=complex)
    return u.shape[0] == u.shape[1] and np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol


def su2(angles):
    """exp(-i (a sx + b sy + c sz)) for a real 3-vector of angles."""
    a = np.asarray(angles, dtype=float)
    theta = np.linalg.norm(a)
    if theta < 1e-300:
        return np.eye(2, dtype=complex)
    n = a / theta
    gen = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    return np.cos(theta) * np.eye(2) - 1j * np.sin(theta) * gen


SWAP = np.eye(4)[[0, 2, 1, 3]].astype(complex)
