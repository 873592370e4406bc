"""Brute-force reference machinery.

Random bases, product states inside two-dimensional subspaces, reduction of
an arbitrary orthonormal basis to the six-angle canonical form, a numerical
solver for the iso-entanglement constraints and a residual report over the
analytic solution cases.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import polar
from scipy.optimize import least_squares

from .config import TOL
from .equivalence import classify
from .families import (
    GeneralOrthParams,
    as_matrix,
    general_constraint_tau,
    general_matrix,
    gen_general,
    iso_conditions_closed_form,
    iso_residuals,
)
from .linalg import SWAP, coefficient_matrix, kron, orthonormality_residual, tangle, tangles
from .sampling import haar_unitary, make_rng


class DegenerateSubspace(ValueError):
    """No pairing of the basis reduces to the canonical form within tolerance."""


class NonConvergence(RuntimeError):
    def __init__(self, message, best_residual, basis=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.basis = basis


def random_basis(seed):
    """Haar-random orthonormal 4x4 basis (columns)."""
    return haar_unitary(4, make_rng(seed))


# product states in a 2-plane ------------------------------------------------

_QUAD_EPS = 1e-14


def _quadratic(psi, chi):
    p, c = coefficient_matrix(psi, (2, 2)), coefficient_matrix(chi, (2, 2))
    a = np.linalg.det(c)
    b = p[0, 0] * c[1, 1] + c[0, 0] * p[1, 1] - p[0, 1] * c[1, 0] - c[0, 1] * p[1, 0]
    return a, b, np.linalg.det(p)


def _span_roots(psi, chi):
    """Roots z of det(psi + z chi) = 0; ``np.inf`` stands for chi itself.

    Returns None when every state in the span is a product state.
    """
    a, b, c = _quadratic(psi, chi)
    scale = max(abs(a), abs(b), abs(c))
    if scale <= _QUAD_EPS:
        return None
    if abs(a) <= _QUAD_EPS:
        if abs(b) <= _QUAD_EPS:
            return [np.inf]
        return [-c / b, np.inf]
    d2 = b * b - 4 * a * c
    if abs(d2) <= 1e-10 * max(abs(b * b), abs(4 * a * c)):
        # a double root is only known to sqrt(eps) from the discriminant
        z = -b / (2 * a)
        return [z, z]
    disc = np.sqrt(d2 + 0j)
    sgn = 1 if (np.conj(b) * disc).real >= 0 else -1
    q = -(b + sgn * disc) / 2
    if abs(q) <= _QUAD_EPS:
        return [0j, 0j]
    return [q / a, c / q]


def _state_at(psi, chi, z):
    if np.isinf(z):
        return np.asarray(chi, dtype=complex).copy()
    v = psi + z * chi
    return v / np.linalg.norm(v)


def product_states_in_span(psi, chi):
    """All candidate product states of span{psi, chi} as (z, state) pairs.

    An everywhere-product span yields the two spanning vectors.
    """
    psi = np.asarray(psi, dtype=complex)
    chi = np.asarray(chi, dtype=complex)
    roots = _span_roots(psi, chi)
    if roots is None:
        roots = [0j, np.inf]
    return [(z, _state_at(psi, chi, z)) for z in roots]


def product_state_in_span(psi, chi):
    """A normalized product state cos(t) psi + e^{is} sin(t) chi.

    Among the roots of the quadratic, the one giving the smallest tangle wins;
    ties (within 1e-14) go to the smaller |z|.
    """
    cands = product_states_in_span(psi, chi)
    scored = [(tangle(v), abs(z), i) for i, (z, v) in enumerate(cands)]
    best = min(s[0] for s in scored)
    tied = [s for s in scored if s[0] <= best + 1e-14]
    return cands[min(tied, key=lambda s: s[1])[2]][1]


def _factor(v):
    """(a, b) with a (x) b closest to the product state v."""
    u, s, vh = np.linalg.svd(coefficient_matrix(v, (2, 2)))
    return u[:, 0], s[0] * vh[0, :]


def _to_zero(a):
    """Unitary sending the unit vector a to |0>."""
    a = a / np.linalg.norm(a)
    return np.array([[np.conj(a[0]), np.conj(a[1])], [-a[1], a[0]]])


# canonical form ---------------------------------------------------------------


@dataclass
class CanonicalizationResult:
    """(uA (x) uB) S B[:, permutation] equals skewed(tau) general_matrix(params)
    up to column phases, where S is the qubit swap when ``swapped`` is set.
    """

    params: GeneralOrthParams
    uA: np.ndarray
    uB: np.ndarray
    permutation: tuple
    residual: float
    swapped: bool = False

    def transformed(self, basis):
        b = as_matrix(basis)[:, list(self.permutation)]
        if self.swapped:
            b = SWAP @ b
        return kron(self.uA, self.uB) @ b

    def to_dict(self):
        p = self.params
        return {
            "params": {k: float(getattr(p, k)) for k in ("alpha", "delta", "theta", "gamma", "beta", "tau")},
            "uA": _complex_list(self.uA),
            "uB": _complex_list(self.uB),
            "permutation": [int(i) for i in self.permutation],
            "swapped": bool(self.swapped),
            "residual": float(self.residual),
        }


def _complex_list(m):
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m)]


def _phase_residual(target, got):
    """Max entry error after aligning each column's global phase."""
    err = 0.0
    for k in range(target.shape[1]):
        ov = np.vdot(got[:, k], target[:, k])
        ph = ov / abs(ov) if abs(ov) > 0 else 1.0
        err = max(err, float(np.max(np.abs(got[:, k] * ph - target[:, k]))))
    return err


def _pair_angles(x1, y1, x2, y2):
    """Angle and phase of the pair (s w - c e^{ip} e, c w + s e^{ip} e)."""
    ang = np.arctan2(abs(x1), abs(y1))
    if abs(x1 * y1) >= abs(x2 * y2):
        ph = np.angle(-y1 * np.conj(x1))
    else:
        ph = np.angle(y2 * np.conj(x2))
    return float(ang), float(ph)


def _reduce(b):
    """Canonical reduction for a fixed column order; returns None if a swap is needed."""
    # product state of span{b3, b4} with the largest overlap with b4 goes to |00>
    cands = product_states_in_span(b[:, 2], b[:, 3])
    v = max(cands, key=lambda c: abs(np.vdot(b[:, 3], c[1])))[1]
    a, bb = _factor(v)
    ua, ub = _to_zero(a), _to_zero(bb)
    b1 = kron(ua, ub) @ b
    # product state of span{b1, b2}: orthogonal to |00>, so |1>|chi> or |chi>|1>
    cands = product_states_in_span(b1[:, 0], b1[:, 1])
    v = max(cands, key=lambda c: abs(np.vdot(b1[:, 0], c[1])))[1]
    a, chi = _factor(v)
    if abs(a[0]) > abs(chi[0]):
        return None
    # make chi proportional to (sin tau, -cos tau), which is -phi_perp
    x0, x1 = chi / np.linalg.norm(chi)
    tau = float(np.arctan2(abs(x0), abs(x1)))
    ub = np.diag([1, -np.exp(1j * (np.angle(x0) - np.angle(x1)))]) @ ub
    c, s = np.cos(tau), np.sin(tau)
    frame = np.eye(4, dtype=complex)
    frame[2:, 2:] = [[c, -s], [s, c]]
    m = frame.conj().T @ kron(ua, ub) @ b
    # w spans span{m1, m2} orthogonal to |1, phi_perp>
    w = m[:, 0] * m[3, 1] - m[:, 1] * m[3, 0]
    w = w / np.linalg.norm(w)
    eta = np.angle(w[2] * np.conj(w[1]))
    ua = np.diag([1, np.exp(-1j * eta)]) @ ua
    m[2:] *= np.exp(-1j * eta)
    theta = float(np.arctan2(abs(w[2]), abs(w[1])))
    ct, st = np.cos(theta), np.sin(theta)
    wv = np.array([0, ct, st, 0])
    vv = np.array([0, -st, ct, 0])
    delta, beta = _pair_angles(wv @ m[:, 0], m[3, 0], wv @ m[:, 1], m[3, 1])
    alpha, gamma = _pair_angles(vv @ m[:, 2], m[0, 2], vv @ m[:, 3], m[0, 3])
    p = GeneralOrthParams(alpha, delta, theta, gamma, beta, tau)
    res = _phase_residual(general_matrix(alpha, delta, theta, gamma, beta), m)
    return p, ua, ub, res


_PAIRINGS = ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2))


def canonicalize(basis, tol=TOL.geometric):
    """Reduce an orthonormal basis to the six-angle canonical form.

    The product state of span{psi3, psi4} is rotated to |0,0>; the product
    state of span{psi1, psi2} then reads |1, phi_perp> and fixes tau; the
    remaining diagonal phases are spent making the |0,1>, |1,phi> amplitudes
    real.  Ties among product states go to the largest overlap with psi4
    (respectively psi1).  Column pairings are tried in a fixed order and the
    first one reducing within ``tol`` is returned.
    """
    b = as_matrix(basis)
    if b.shape != (4, 4) or orthonormality_residual(b) > TOL.geometric:
        raise ValueError("canonicalize expects an orthonormal 4x4 basis")
    best = None
    for perm in _PAIRINGS:
        for swapped in (False, True):
            bp = b[:, list(perm)]
            if swapped:
                bp = SWAP @ bp
            out = _reduce(bp)
            if out is None:
                continue
            p, ua, ub, res = out
            r = CanonicalizationResult(p, ua, ub, perm, res, swapped)
            if best is None or res < best.residual:
                best = r
            break
        if best is not None and best.residual <= tol:
            return best
    raise DegenerateSubspace(
        f"no pairing reduces to the canonical form (best residual {best.residual if best else float('nan'):.3e})"
    )


def canonical_basis(result: CanonicalizationResult):
    """The canonical basis the result refers to, computational frame."""
    return gen_general(result.params).computational().matrix


# constraint solver ------------------------------------------------------------


def _hermitian(x):
    h = np.zeros((4, 4), dtype=complex)
    iu = np.triu_indices(4, 1)
    h[iu] = x[:6] + 1j * x[6:12]
    h = h + h.conj().T
    h[np.diag_indices(4)] = x[12:]
    return h


def _retract(b0, x):
    u, _ = polar(b0 @ (np.eye(4) + 1j * _hermitian(x)))
    return u


def _pair_diffs(b):
    xi = tangles(b)
    return np.array([xi[i] - xi[j] for i in range(4) for j in range(i + 1, 4)])


def solve_iso_basis(seed, tol=1e-10, max_rounds=30):
    """Drive a random basis to equal tangles.

    Minimizes the sum of squared pairwise tangle differences; every step is
    pulled back onto the unitary group by the polar retraction and the
    expansion point is reset after each inner solve.
    """
    b = random_basis(seed)
    best = np.inf
    for _ in range(max_rounds):
        fit = least_squares(
            lambda x, b0=b: _pair_diffs(_retract(b0, x)),
            np.zeros(16),
            method="trf",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=400,
        )
        b = _retract(b, fit.x)
        res = max(abs(r) for r in iso_residuals(b))
        best = min(best, res)
        if res <= tol * 1e-3:
            break
    if best > tol:
        raise NonConvergence(f"seed {seed}: best iso residual {best:.3e} > {tol:.1e}", best, b)
    return b


@dataclass
class SolverRecord:
    seed: int
    residual: float
    label: str
    cost: Optional[float]  # Gram cost of the General fit; None when no fit ran

    def to_dict(self):
        return {"seed": self.seed, "residual": self.residual, "label": self.label, "cost": self.cost}


def completeness_report(seeds, tol=1e-10):
    """Solve and classify each seed; non-converged runs carry label 'non-convergence'."""
    out = []
    for s in seeds:
        try:
            b = solve_iso_basis(s, tol=tol)
        except NonConvergence as exc:
            out.append(SolverRecord(int(s), float(exc.best_residual), "non-convergence", None))
            continue
        label, rep = classify(b)
        cost = float(rep.cost) if rep is not None else None
        res = max(abs(r) for r in iso_residuals(b))
        out.append(SolverRecord(int(s), float(res), label, cost))
    return out


# analytic solution cases ------------------------------------------------------

SOLUTION_CASES = ("i", "ii", "iii.a", "iii.b", "iv")


def _case_points(case, g):
    ang = 0.1 + (np.arange(g) + 0.5) * (2 * np.pi / g)
    for u in ang:
        for v in ang:
            for w in ang:
                if case == "i":
                    yield GeneralOrthParams(u, v, np.pi / 2, w, 0.3 * u + 0.1, 0.7 * v)
                elif case == "ii":
                    yield GeneralOrthParams(np.pi / 4, np.pi / 4, u, v, w, 0.0)
                elif case == "iii.a":
                    yield GeneralOrthParams(u, u, 0.0, v, w, 0.5 * u + 0.3)
                elif case == "iii.b":
                    yield GeneralOrthParams(u, u, v, w, 0.4 * u + 0.2, np.pi / 2)
                elif case == "iv":
                    if abs(np.sin(2 * u)) < 1e-3 or abs(np.cos(w)) < 1e-3:
                        continue
                    tau = general_constraint_tau(u, v, w)
                    yield GeneralOrthParams(u, u, v, np.pi - w, w, tau)
                else:
                    raise ValueError(f"unknown case {case!r}; expected one of {SOLUTION_CASES}")


@dataclass
class CaseReport:
    case: str
    points: int
    max_iso_residual: float
    max_closed_form: float
    max_tangle: float

    def to_dict(self):
        return dict(self.__dict__)


def verify_solution_cases(grid=5, cases=SOLUTION_CASES):
    """Iso-entanglement residuals of the canonical matrix on each solution case.

    ``max_iso_residual`` comes from numerically computed tangles;
    ``max_closed_form`` evaluates the simplified conditions (alpha = +delta).
    """
    out = []
    for case in cases:
        n, iso, cf, tmax = 0, 0.0, 0.0, 0.0
        for p in _case_points(case, grid):
            m = gen_general(p).computational().matrix
            iso = max(iso, max(abs(r) for r in iso_residuals(m)))
            if np.isclose(np.cos(p.alpha - p.delta), 1):
                cf = max(cf, max(abs(e) for e in iso_conditions_closed_form(p.delta, p.theta, p.gamma, p.beta, p.tau)))
            tmax = max(tmax, float(np.max(tangles(m))))
            n += 1
        out.append(CaseReport(case, n, iso, cf, tmax))
    return out
