"""Bases of C^d (x) C^d built from Latin squares and (robust) Hadamard matrices.

A shift-and-multiply basis is a family of d^2 operators X^{ij}, i, j in 0..d-1,
whose k-th column carries the single entry sqrt(d) M^j_{ik} at row lambda(j, k).
Vectorizing each operator gives a state of C^{d^2}; the Schmidt coefficients of
that state are the moduli |M^j_{ik}|, k = 0..d-1.
"""

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .linalg import is_unitary, linear_entropy, orthonormality_residual, schmidt_spectrum
from .sampling import make_rng


@dataclass(frozen=True, eq=False)
class LatinSquare:
    d: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=int)
        if self.d < 2 or t.shape != (self.d, self.d):
            raise ValueError(f"Latin square needs d >= 2 and a {self.d}x{self.d} table")
        ref = np.arange(self.d)
        for line in list(t) + list(t.T):
            if not np.array_equal(np.sort(line), ref):
                raise ValueError("every row and column must be a permutation of 0..d-1")
        object.__setattr__(self, "table", t)

    def __call__(self, j, k):
        return int(self.table[j, k])

    def to_csv(self):
        return "".join(",".join(str(int(x)) for x in row) + "\n" for row in self.table)


def latin_square(d, method="cyclic", seed=0):
    """cyclic: lambda(j, k) = (j + k) mod d.  seeded: the cyclic square with
    rows, columns and symbols shuffled by a seeded generator."""
    if d < 2:
        raise ValueError("d must be at least 2")
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    t = (j + k) % d
    if method == "cyclic":
        return LatinSquare(d, t)
    if method == "seeded":
        rng = make_rng(seed)
        rows, cols, syms = rng.permutation(d), rng.permutation(d), rng.permutation(d)
        return LatinSquare(d, syms[t[rows][:, cols]])
    raise ValueError(f"unknown method {method!r}; expected 'cyclic' or 'seeded'")


def flat_hadamard(d):
    """Fourier matrix with entries of modulus 1/sqrt(d)."""
    n = np.arange(d)
    return np.exp(2j * np.pi * np.outer(n, n) / d) / np.sqrt(d)


@dataclass(frozen=True, eq=False)
class RobustHadamard:
    d: int
    matrix: np.ndarray
    a: float
    b: float


def robust_hadamard(d, chi):
    """Circulant unitary e^{i chi} I + (1 - e^{i chi}) J / d.

    Its spectrum is (1, e^{i chi}, ..., e^{i chi}); every diagonal entry has
    squared modulus a and every off-diagonal one b, with a + (d - 1) b = 1.
    The flat point a = b needs cos(chi) = (2 - d) / 2, so it exists only for
    d <= 4.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    e = np.exp(1j * chi)
    m = e * np.eye(d) + (1 - e) / d * np.ones((d, d))
    a = abs(1 + (d - 1) * e) ** 2 / d**2
    b = abs(1 - e) ** 2 / d**2
    return RobustHadamard(d, m, float(a), float(b))


def _is_flat(m):
    return np.allclose(np.abs(m), 1 / np.sqrt(m.shape[0]), atol=TOL.physical)


@dataclass(frozen=True, eq=False)
class ShiftMultiplyBasis:
    d: int
    operators: np.ndarray  # (d, d, d, d): operators[i, j] is X^{ij}
    unitary_flag: bool

    def vectors(self):
        """d^2 x d^2 matrix whose column i*d + j is the vectorized X^{ij}."""
        d = self.d
        return np.stack([vectorize(self.operators[i, j]) for i in range(d) for j in range(d)], axis=1)

    def trace_gram(self):
        """tr(X^{ij dagger} X^{i'j'}) indexed by flattened (ij, i'j')."""
        x = self.operators.reshape(self.d**2, self.d, self.d)
        return np.einsum("anm,bnm->ab", x.conj(), x)


def shift_multiply(ls: LatinSquare, mats):
    """Operators with X^{ij}|k> = sqrt(d) M^j_{ik} |lambda(j, k)>.

    The sqrt(d) keeps tr(X^dagger X) = d when the M^j are unitary, so that the
    vectorized operators are normalized.
    """
    d = ls.d
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if len(mats) != d or any(m.shape != (d, d) for m in mats):
        raise ValueError(f"need {d} matrices of shape ({d}, {d})")
    ops = np.zeros((d, d, d, d), dtype=complex)
    k = np.arange(d)
    for j, m in enumerate(mats):
        rows = ls.table[j]
        for i in range(d):
            ops[i, j, rows, k] = np.sqrt(d) * m[i, k]
    return ShiftMultiplyBasis(d, ops, all(_is_flat(m) for m in mats))


def vectorize(x):
    """(1/sqrt(d)) sum_nm X_nm |n, m>."""
    x = np.asarray(x, dtype=complex)
    return x.reshape(-1) / np.sqrt(x.shape[0])


def conditional_product_basis(us):
    """Columns |i> (x) u_i|j> at position i*d + j."""
    us = [np.asarray(u, dtype=complex) for u in us]
    d = len(us)
    if any(u.shape != (d, d) for u in us):
        raise ValueError(f"need {d} unitaries of shape ({d}, {d})")
    if not all(is_unitary(u) for u in us):
        raise ValueError("conditional bases must be unitary")
    out = np.zeros((d * d, d * d), dtype=complex)
    for i, u in enumerate(us):
        out[i * d : (i + 1) * d, i * d : (i + 1) * d] = u
    return out


def schmidt_spectra(basis, d):
    b = np.asarray(basis, dtype=complex)
    return np.array([schmidt_spectrum(b[:, n], (d, d)) for n in range(b.shape[1])])


@dataclass
class HighdimReport:
    d: int
    construction: str
    orthonormality: float
    trace_orthogonality: float
    spectrum: list
    spectrum_spread: float
    linear_entropy: float

    def to_dict(self):
        return dict(self.__dict__)


def report(basis: ShiftMultiplyBasis, construction=""):
    """Orthonormality, trace orthogonality (unitary case) and Schmidt spectra."""
    v = basis.vectors()
    spectra = schmidt_spectra(v, basis.d)
    tg = basis.trace_gram()
    tr = float(np.max(np.abs(tg - basis.d * np.eye(basis.d**2)))) if basis.unitary_flag else float("nan")
    return HighdimReport(
        d=basis.d,
        construction=construction,
        orthonormality=orthonormality_residual(v),
        trace_orthogonality=tr,
        spectrum=[float(x) for x in spectra[0]],
        spectrum_spread=float(np.max(np.abs(spectra - spectra[0]))),
        linear_entropy=linear_entropy(spectra[0]),
    )
