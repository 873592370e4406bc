"""Triangle network with two-qubit joint measurements at each node.

Three sources distribute two-qubit states on the edges AB, AC and BC.  Each
party holds one qubit from each of its two edges and measures both in a
fixed two-qubit basis, producing outcomes (a, b, c) in {0..3}^3.

Qubit labels in the source product rho_AB x rho_AC x rho_BC are
q0 = AB:A, q1 = AB:B, q2 = AC:A, q3 = AC:C, q4 = BC:B, q5 = BC:C.
A wiring is the permutation of those six qubits listed party by party:
A measures (order[0], order[1]), B (order[2], order[3]), C (order[4], order[5]).
"""

import itertools
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .config import TOL
from .families import EJM_PARAMS, GeneralOrthParams, as_matrix, gen_family, gen_general
from .linalg import orthonormality_residual, projector

WIRINGS = {
    # each party's first qubit comes from its lexicographically first edge
    "lexicographic": (0, 2, 1, 4, 3, 5),
    # A = (AB, AC), B = (BC, AB), C = (AC, BC): every party sees the same
    # "incoming, outgoing" pattern around the triangle
    "cyclic": (0, 2, 4, 1, 3, 5),
}

EDGE_STATES = {
    "phi+": np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
}

DEFAULT_WIRING = "cyclic"
DEFAULT_EDGE = "phi+"


def depolarize(rho, eps):
    """(1 - eps) rho + eps I/d."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"noise parameter must lie in [0, 1], got {eps!r}")
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return (1 - eps) * rho + eps * np.eye(d) / d


def _edge_density(edge):
    if isinstance(edge, str):
        try:
            return projector(EDGE_STATES[edge])
        except KeyError:
            raise ValueError(f"unknown edge state {edge!r}; expected one of {sorted(EDGE_STATES)}") from None
    e = np.asarray(edge, dtype=complex)
    if e.shape == (4,):
        if abs(np.linalg.norm(e) - 1) > TOL.physical:
            raise ValueError("edge state vector is not normalized")
        return projector(e)
    if e.shape != (4, 4):
        raise ValueError(f"edge state must be a 4-vector or 4x4 density matrix, got shape {e.shape}")
    if not np.allclose(e, e.conj().T, atol=TOL.physical) or abs(np.trace(e) - 1) > TOL.physical:
        raise ValueError("edge density matrix must be Hermitian with unit trace")
    if np.linalg.eigvalsh(e).min() < -TOL.physical:
        raise ValueError("edge density matrix is not positive semidefinite")
    return e


def _wiring_order(wiring):
    if isinstance(wiring, str):
        try:
            return WIRINGS[wiring]
        except KeyError:
            raise ValueError(f"unknown wiring {wiring!r}; expected one of {sorted(WIRINGS)}") from None
    order = tuple(int(i) for i in wiring)
    if sorted(order) != list(range(6)):
        raise ValueError(f"custom wiring must be a permutation of 0..5, got {order}")
    return order


def _epsilons(eps):
    e = np.broadcast_to(np.asarray(eps, dtype=float), (3,))
    for x in e:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"noise parameter must lie in [0, 1], got {x!r}")
    return tuple(float(x) for x in e)


@dataclass(frozen=True, eq=False)
class TriangleConfig:
    """Bases for parties A, B, C plus the shared edge state and noise.

    ``epsilon`` is one value for all edges or a triple ordered (AB, AC, BC).
    """

    bases: Sequence
    edge_state: Union[str, np.ndarray] = DEFAULT_EDGE
    epsilon: Union[float, Sequence[float]] = 0.0
    wiring: Union[str, Sequence[int]] = DEFAULT_WIRING

    def __post_init__(self):
        if len(self.bases) != 3:
            raise ValueError("need exactly three bases (A, B, C)")
        mats = tuple(as_matrix(b) for b in self.bases)
        for m in mats:
            if m.shape != (4, 4):
                raise ValueError(f"each basis must be 4x4, got {m.shape}")
            if orthonormality_residual(m) > TOL.physical:
                raise ValueError("party basis is not orthonormal")
        object.__setattr__(self, "bases", mats)
        _edge_density(self.edge_state)
        _wiring_order(self.wiring)
        _epsilons(self.epsilon)

    @property
    def order(self):
        return _wiring_order(self.wiring)

    def edge_densities(self):
        rho = _edge_density(self.edge_state)
        return [depolarize(rho, e) for e in _epsilons(self.epsilon)]


@dataclass(frozen=True, eq=False)
class TriangleDistribution:
    p: np.ndarray  # shape (4, 4, 4), indexed (a, b, c)

    def marginal(self, party):
        axes = tuple(i for i in range(3) if i != party)
        return self.p.sum(axis=axes)


def _source_state(cfg):
    r_ab, r_ac, r_bc = cfg.edge_densities()
    rho = np.kron(np.kron(r_ab, r_ac), r_bc)
    perm = list(cfg.order)
    t = rho.reshape((2,) * 12).transpose(perm + [6 + i for i in perm])
    return t.reshape(64, 64)


def triangle_distribution(cfg: TriangleConfig) -> TriangleDistribution:
    rho = _source_state(cfg)
    a, b, c = cfg.bases
    m = np.kron(np.kron(a, b), c)
    p = np.einsum("ij,ik,kj->j", m.conj(), rho, m).real
    return TriangleDistribution(p.reshape(4, 4, 4))


def _orbit_masks():
    idx = np.array(list(itertools.product(range(4), repeat=3)))
    distinct = np.array([len(set(t)) for t in idx])
    return {k: (distinct == n).reshape(4, 4, 4) for k, n in (("p1", 1), ("p2", 2), ("p3", 3))}


_ORBITS = _orbit_masks()


@dataclass(frozen=True)
class OPISummary:
    p1: float
    p2: float
    p3: float
    max_deviation: float

    def orbit_sum(self):
        return 4 * self.p1 + 36 * self.p2 + 24 * self.p3


def opi_summary(d: TriangleDistribution) -> OPISummary:
    """Orbit means: all outputs equal, exactly two equal, all distinct."""
    means, dev = {}, 0.0
    for k, mask in _ORBITS.items():
        vals = d.p[mask]
        means[k] = float(vals.mean())
        dev = max(dev, float(vals.max() - vals.min()))
    return OPISummary(means["p1"], means["p2"], means["p3"], dev)


def finner_margin(d: TriangleDistribution) -> float:
    """min over outcomes of sqrt(pA pB pC) - p; non-negative when satisfied."""
    pa, pb, pc = (np.clip(d.marginal(k), 0, None) for k in range(3))
    bound = np.sqrt(pa[:, None, None] * pb[None, :, None] * pc[None, None, :])
    return float((bound - d.p).min())


def elegant_opi_params(theta) -> GeneralOrthParams:
    gamma = 0.5 * np.arccos(np.clip(-np.sin(2 * theta), -1.0, 1.0))
    return GeneralOrthParams(
        alpha=np.pi / 4, delta=np.pi / 4, theta=theta, gamma=gamma, beta=gamma + np.pi / 2, tau=0.0
    )


def gen_elegant_opi(theta):
    """One-parameter slice of the Elegant family giving OPI distributions.

    theta = pi/4 reproduces the EJM up to local unitaries; theta = 0 gives
    uniform statistics on maximally entangled edges.
    """
    return gen_general(elegant_opi_params(theta))


def ejm_basis():
    return gen_family(EJM_PARAMS).computational()


CURVES = ("ejm_noise", "elegant_opi_subfamily")
CSV_HEADER = "param,p1,p2,p3,finner_margin,max_deviation"


@dataclass
class ScanRow:
    param: float
    p1: float
    p2: float
    p3: float
    finner_margin: float
    max_deviation: float

    def csv(self):
        vals = (self.param, self.p1, self.p2, self.p3, self.finner_margin, self.max_deviation)
        return ",".join(f"{v:.12g}" for v in vals)


def _row(param, cfg):
    d = triangle_distribution(cfg)
    s = opi_summary(d)
    return ScanRow(float(param), s.p1, s.p2, s.p3, finner_margin(d), s.max_deviation)


def scan_p1p3(curve, grid, edge_state=DEFAULT_EDGE, wiring=DEFAULT_WIRING):
    """(p1, p2, p3) along one of the two curves, rows ordered by parameter.

    ``ejm_noise`` sweeps the edge noise over [0, 1] with EJM at every node;
    ``elegant_opi_subfamily`` sweeps theta over [0, pi/4] without noise.
    """
    if grid < 2:
        raise ValueError("grid must have at least two points")
    if curve == "ejm_noise":
        b = ejm_basis()
        return [
            _row(e, TriangleConfig((b, b, b), edge_state, e, wiring)) for e in np.linspace(0.0, 1.0, grid)
        ]
    if curve == "elegant_opi_subfamily":
        rows = []
        for t in np.linspace(0.0, np.pi / 4, grid):
            b = gen_elegant_opi(t)
            rows.append(_row(t, TriangleConfig((b, b, b), edge_state, 0.0, wiring)))
        return rows
    raise ValueError(f"unknown curve {curve!r}; expected one of {CURVES}")


def scan_csv(rows):
    return "\n".join([CSV_HEADER] + [r.csv() for r in rows]) + "\n"


def config_to_dict(cfg: TriangleConfig) -> dict:
    return {
        "edge_state": cfg.edge_state if isinstance(cfg.edge_state, str) else "custom",
        "epsilon": list(_epsilons(cfg.epsilon)),
        "wiring": cfg.wiring if isinstance(cfg.wiring, str) else list(cfg.order),
    }
