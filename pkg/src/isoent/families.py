"""Closed-form generators for two-qubit orthonormal and iso-entangled bases.

Bases are stored as 4x4 matrices whose columns are the basis vectors.  A
matrix is either written in the computational product basis or in the skewed
product frame |0,0>, |0,1>, |1,phi>, |1,phi_perp> with
phi = cos(tau)|0> + sin(tau)|1>; :class:`Basis` records which.
"""

from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Union

import numpy as np

from .config import TOL
from .linalg import tangles

TWO_PI = 2 * np.pi
_SINGULAR_EPS = 1e-13


class SingularConstraint(ValueError):
    """The tau relation of the General family has a vanishing denominator."""


class PhaseInfeasible(ValueError):
    """The canonical Bell-family phase relation has no real solution."""


def _wrap(x):
    return float(np.mod(float(x), TWO_PI))


def _wrap_angles(obj, names):
    for name in names:
        object.__setattr__(obj, name, _wrap(getattr(obj, name)))


def _check_sign(value, name):
    if value not in (1, -1):
        raise ValueError(f"{name} must be +1 or -1, got {value!r}")


@dataclass(frozen=True)
class GeneralOrthParams:
    """Six angles of the general orthonormal two-qubit basis (skewed frame)."""

    alpha: float = 0.0
    delta: float = 0.0
    theta: float = 0.0
    gamma: float = 0.0
    beta: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        _wrap_angles(self, ("alpha", "delta", "theta", "gamma", "beta", "tau"))


@dataclass(frozen=True)
class SkewedProduct:
    tau: float

    def __post_init__(self):
        _wrap_angles(self, ("tau",))


@dataclass(frozen=True)
class Elegant:
    theta: float
    zeta: float

    def __post_init__(self):
        _wrap_angles(self, ("theta", "zeta"))


@dataclass(frozen=True)
class Bell:
    delta: float
    zeta: float
    tau: float

    def __post_init__(self):
        _wrap_angles(self, ("delta", "zeta", "tau"))


@dataclass(frozen=True)
class General:
    """General family; tau is not a free parameter but follows from the others."""

    delta: float
    theta: float
    beta: float
    sign: int = 1

    def __post_init__(self):
        _wrap_angles(self, ("delta", "theta", "beta"))
        _check_sign(self.sign, "sign")


@dataclass(frozen=True)
class BellCanonical:
    x: float
    y: float
    z: float
    phase_sign: int = 1

    def __post_init__(self):
        _wrap_angles(self, ("x", "y", "z"))
        _check_sign(self.phase_sign, "phase_sign")


@dataclass(frozen=True)
class I5:
    """One-parameter family interpolating between the EJM (phi=0) and BSM (phi=pi/2)."""

    phi: float

    def __post_init__(self):
        _wrap_angles(self, ("phi",))


FamilyParams = Union[SkewedProduct, Elegant, Bell, General, BellCanonical, I5]

FAMILY_NAMES = {
    "skewed": SkewedProduct,
    "elegant": Elegant,
    "bell": Bell,
    "general": General,
    "bell-canonical": BellCanonical,
    "i5": I5,
}
EJM_PARAMS = Elegant(np.pi / 4, np.pi / 2)
BSM_PARAMS = Bell(np.pi / 4, 0.0, np.pi / 2)

_NAME_OF = {cls: name for name, cls in FAMILY_NAMES.items()}


@dataclass(frozen=True, eq=False)
class Basis:
    """Columns of ``matrix`` are basis vectors.

    ``tau is None`` means computational coefficients; otherwise the
    coefficients refer to the skewed product frame with that tau.
    """

    matrix: np.ndarray
    tau: Optional[float] = None
    params: Optional[object] = field(default=None, repr=False)

    @property
    def frame(self):
        return "computational" if self.tau is None else f"skewed({self.tau!r})"

    def computational(self) -> "Basis":
        if self.tau is None:
            return self
        return Basis(skewed_frame_matrix(self.tau) @ self.matrix, None, self.params)

    def columns(self):
        m = self.computational().matrix
        return [m[:, k] for k in range(m.shape[1])]


def as_matrix(basis):
    """Computational-frame matrix of a Basis or a raw array."""
    if isinstance(basis, Basis):
        return basis.computational().matrix
    return np.asarray(basis, dtype=complex)


def skewed_frame_matrix(tau):
    """Unitary whose columns are |0,0>, |0,1>, |1,phi>, |1,phi_perp>."""
    c, s = np.cos(tau), np.sin(tau)
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = [[c, -s], [s, c]]
    return m


def general_matrix(alpha, delta, theta, gamma, beta):
    """The six-parameter orthonormal matrix in the skewed frame (tau implicit)."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    cd, sd = np.cos(delta), np.sin(delta)
    ct, st = np.cos(theta), np.sin(theta)
    eg, eb = np.exp(1j * gamma), np.exp(1j * beta)
    return np.array(
        [
            [0, 0, -ca * eg, sa * eg],
            [sd * ct, cd * ct, -sa * st, -ca * st],
            [sd * st, cd * st, sa * ct, ca * ct],
            [-cd * eb, sd * eb, 0, 0],
        ],
        dtype=complex,
    )


def gen_general(params: GeneralOrthParams) -> Basis:
    p = params
    m = general_matrix(p.alpha, p.delta, p.theta, p.gamma, p.beta)
    return Basis(m, p.tau, p)


def _qtrig(x):
    """(sin x, cos x) with float multiples of pi/2 mapped to exact zeros.

    The tau constraint is a ratio of two small products near its singular
    set; plain np.cos(np.pi / 2) = 6e-17 would swamp it.
    """
    x = np.asarray(x, dtype=float)
    k = np.rint(x / (np.pi / 2))
    r = x - k * (np.pi / 2)
    q = np.mod(k, 4).astype(int)
    s, c = np.sin(r), np.cos(r)
    return np.choose(q, [s, c, -s, -c]), np.choose(q, [c, -s, -c, s])


def _tau_terms(delta, theta, beta):
    s2d, c2d = _qtrig(2 * np.asarray(delta, dtype=float))
    st, _ = _qtrig(theta)
    _, cb = _qtrig(beta)
    return c2d * st, s2d * cb


def general_constraint_tau(delta, theta, beta, eps=_SINGULAR_EPS):
    """tau solving tan(tau) = cos(2 delta) sin(theta) / (sin(2 delta) cos(beta)).

    Raises SingularConstraint when the denominator is within ``eps`` of zero.
    """
    num, den = _tau_terms(delta, theta, beta)
    if abs(den) <= eps:
        raise SingularConstraint(_singular_message(delta, beta, eps))
    return float(np.arctan2(num, den))


def _singular_message(delta, beta, eps=_SINGULAR_EPS):
    parts = []
    if abs(np.sin(2 * delta)) <= eps:
        parts.append("sin(2*delta) = 0: use the limit toward the skewed product family")
    if abs(np.cos(beta)) <= eps:
        parts.append("cos(beta) = 0: use the limit toward the Bell family")
    return "singular General-family constraint; " + "; ".join(parts)


def general_family_matrix(delta, theta, beta, sign=1):
    """General-family matrix in the computational frame, no singularity check.

    Used by optimizers that may wander onto the singular set, where the
    arctan2 convention atan2(0, 0) = 0 picks a finite tau.
    """
    tau = np.arctan2(*_tau_terms(delta, theta, beta))
    return skewed_frame_matrix(tau) @ _general_skewed(delta, theta, beta, sign)


def _general_skewed(delta, theta, beta, sign):
    cd, sd = np.cos(delta), np.sin(delta)
    ct, st = np.cos(theta), np.sin(theta)
    e_top = np.exp(sign * 1j * beta)
    eb = np.exp(1j * beta)
    return np.array(
        [
            [0, 0, cd * e_top, -sd * e_top],
            [sd * ct, cd * ct, -sd * st, -cd * st],
            [sd * st, cd * st, sd * ct, cd * ct],
            [-cd * eb, sd * eb, 0, 0],
        ],
        dtype=complex,
    )


def _elegant_matrix(theta, zeta):
    c, s = np.cos(theta), np.sin(theta)
    ez = np.exp(1j * zeta)
    return np.array(
        [[0, 0, -ez, ez], [c, c, -s, -s], [s, s, c, c], [1, -1, 0, 0]], dtype=complex
    ) / np.sqrt(2)


def _bell_matrix(delta, zeta, tau):
    cd, sd = np.cos(delta), np.sin(delta)
    ct, st = np.cos(tau), np.sin(tau)
    ez = np.exp(1j * zeta)
    return np.array(
        [
            [0, 0, -cd * ez, sd * ez],
            [sd, cd, 0, 0],
            [st * cd, -st * sd, ct * sd, ct * cd],
            [-ct * cd, ct * sd, st * sd, st * cd],
        ],
        dtype=complex,
    )


def _perp(v):
    return np.array([-np.conj(v[1]), np.conj(v[0])])


def bell_canonical_phase(x, y, z, phase_sign=1):
    """phi_1 with cos(phi_1) = -tan(2x) tan(2y) / sin(2z)."""
    s2z = np.sin(2 * z)
    num = -np.tan(2 * x) * np.tan(2 * y)
    if abs(s2z) <= _SINGULAR_EPS or abs(num / s2z) > 1 + 1e-12:
        raise PhaseInfeasible(
            f"|tan2x tan2y / sin2z| must be <= 1 (x={x}, y={y}, z={z})"
        )
    return phase_sign * float(np.arccos(np.clip(num / s2z, -1.0, 1.0)))


def _bell_canonical_matrix(x, y, z, phase_sign):
    phi1 = bell_canonical_phase(x, y, z, phase_sign)
    phases = np.exp(1j * np.array([phi1, -phi1, -phi1, phi1]))
    a1 = np.array([np.cos(x), np.sin(x)])
    a2 = np.array([np.cos(x), -np.sin(x)])
    b1 = np.array([np.cos(y), np.sin(y)])
    b2 = np.array([np.cos(y), -np.sin(y)])
    cz, sz = np.cos(z), np.sin(z)
    k = np.kron
    cols = [
        cz * k(a1, b1) + phases[0] * sz * k(_perp(a1), _perp(b1)),
        cz * k(_perp(a1), b2) + phases[1] * sz * k(a1, _perp(b2)),
        cz * k(a2, _perp(b1)) + phases[2] * sz * k(_perp(a2), b1),
        cz * k(_perp(a2), _perp(b2)) + phases[3] * sz * k(a2, b2),
    ]
    return np.array(cols, dtype=complex).T


def _i5_matrix(phi):
    i = 1j
    e = np.exp(i * phi)
    return np.array(
        [
            [1 + i, 1 - i, 1 - i, 1 + i],
            [-i * e - i, i * e - i, i - i * e, i * e + i],
            [i * e - i, -i * e - i, i * e + i, i - i * e],
            [1 - i, 1 + i, 1 + i, 1 - i],
        ],
        dtype=complex,
    ) / (2 * np.sqrt(2))


def gen_family(p: FamilyParams) -> Basis:
    """Generate the basis for one family member.

    General-family members come back in the skewed frame (tau is computed
    from the other angles); everything else is in the computational frame.
    """
    if isinstance(p, SkewedProduct):
        return Basis(skewed_frame_matrix(p.tau), None, p)
    if isinstance(p, Elegant):
        return Basis(_elegant_matrix(p.theta, p.zeta), None, p)
    if isinstance(p, Bell):
        return Basis(_bell_matrix(p.delta, p.zeta, p.tau), None, p)
    if isinstance(p, General):
        tau = general_constraint_tau(p.delta, p.theta, p.beta)
        return Basis(_general_skewed(p.delta, p.theta, p.beta, p.sign), tau, p)
    if isinstance(p, BellCanonical):
        return Basis(_bell_canonical_matrix(p.x, p.y, p.z, p.phase_sign), None, p)
    if isinstance(p, I5):
        return Basis(_i5_matrix(p.phi), None, p)
    raise TypeError(f"unknown family parameters {p!r}")


def general_tangle(delta, theta, beta):
    s2d, c2d = _qtrig(2 * np.asarray(delta, dtype=float))
    st, ct = _qtrig(theta)
    _, cb = _qtrig(beta)
    s2d2, c2d2, cb2 = s2d**2, c2d**2, cb**2
    num = s2d2 * cb2 + c2d2
    den = s2d2 * cb2 + c2d2 * st**2
    return (2 * st * ct) ** 2 * s2d2 / 4 * num / den


def closed_form_tangle(p: FamilyParams) -> float:
    if isinstance(p, SkewedProduct):
        return 0.0
    if isinstance(p, Elegant):
        return float(np.sin(2 * p.theta) ** 2 / 4)
    if isinstance(p, Bell):
        return float(np.sin(2 * p.delta) ** 2 * np.sin(p.tau) ** 2)
    if isinstance(p, General):
        general_constraint_tau(p.delta, p.theta, p.beta)
        return float(general_tangle(p.delta, p.theta, p.beta))
    if isinstance(p, BellCanonical):
        bell_canonical_phase(p.x, p.y, p.z, p.phase_sign)
        return float(np.sin(2 * p.z) ** 2)
    if isinstance(p, I5):
        return float((1 + 3 * np.sin(p.phi) ** 2) / 4)
    raise TypeError(f"unknown family parameters {p!r}")


def iso_residuals(basis):
    """(xi1 - xi2, xi3 - xi4, xi1 - xi3) from numerically computed tangles."""
    xi = tangles(as_matrix(basis))
    return (float(xi[0] - xi[1]), float(xi[2] - xi[3]), float(xi[0] - xi[2]))


def is_iso_entangled(basis, tol=TOL.physical):
    return max(abs(r) for r in iso_residuals(basis)) <= tol


def iso_conditions_closed_form(delta, theta, gamma, beta, tau):
    """Simplified iso-entanglement conditions on the alpha = +delta branch.

    Returns the three expressions for (1-2), (3-4), (1-3).  Each equals
    twice the corresponding tangle difference of ``general_matrix`` with
    alpha = delta in the computational frame.
    """
    k = 8 * np.cos(theta) ** 2 * np.sin(theta) * np.cos(tau)
    ct, st = np.cos(tau), np.sin(tau)
    c2d, s2d = np.cos(2 * delta), np.sin(2 * delta)
    e12 = -k * (ct * np.sin(theta) * c2d - st * s2d * np.cos(beta))
    e34 = -k * (ct * np.sin(theta) * c2d + st * s2d * np.cos(gamma))
    e13 = k * s2d * np.sin(delta) ** 2 * st * (np.cos(beta) + np.cos(gamma))
    return float(e12), float(e34), float(e13)


LIMIT_CASES = ("beta", "delta", "theta_delta", "beta_delta", "beta_theta")


def family4_limit(case, theta=0.0, delta=0.0, phi=0.0):
    """Limit values of the General-family tangle at its singular points.

    Cases:
      ``beta``         beta -> pi/2 at fixed (theta, delta): cos^2(theta) sin^2(2 delta)
      ``delta``        delta -> pi/4 at fixed theta: sin^2(2 theta)/4 (Elegant)
      ``theta_delta``  (theta, delta) -> 0: 0 (skewed product)
      ``beta_delta``   (beta, delta) -> (pi/2, pi/4) along
                       beta = pi/2 + t cos(phi), delta = pi/4 + t sin(phi)
      ``beta_theta``   (beta, theta) -> (pi/2, 0) with approach angle phi
                       measured from the theta axis; returns the sup over
                       delta, (1 + tan|phi|)^-2
    """
    if case == "beta":
        return float(np.cos(theta) ** 2 * np.sin(2 * delta) ** 2)
    if case == "delta":
        return float(np.sin(2 * theta) ** 2 / 4)
    if case == "theta_delta":
        return 0.0
    if case == "beta_delta":
        c2, s2 = np.cos(phi) ** 2, np.sin(phi) ** 2
        ratio = (c2 + 4 * s2) / (c2 + 4 * s2 * np.sin(theta) ** 2)
        return float(np.sin(2 * theta) ** 2 / 4 * ratio)
    if case == "beta_theta":
        return float((1 + np.tan(abs(phi))) ** -2)
    raise ValueError(f"unknown limit case {case!r}; expected one of {LIMIT_CASES}")


def params_to_dict(p: FamilyParams) -> dict:
    out = {"family": _NAME_OF[type(p)]}
    out.update(asdict(p))
    return out


def params_from_dict(d: dict) -> FamilyParams:
    d = dict(d)
    try:
        cls = FAMILY_NAMES[d.pop("family")]
    except KeyError as exc:
        raise ValueError(f"unknown or missing family in {d!r}") from exc
    allowed = {f.name for f in fields(cls)}
    unknown = set(d) - allowed
    if unknown:
        raise ValueError(f"unknown keys for {cls.__name__}: {sorted(unknown)}")
    return cls(**d)
