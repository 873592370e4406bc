import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoent import oracle as orc
from isoent.equivalence import classify
from isoent.families import (
    EJM_PARAMS,
    I5,
    Bell,
    Elegant,
    General,
    SkewedProduct,
    gen_family,
    gen_general,
    iso_residuals,
)
from isoent.linalg import SWAP, kron, orthonormality_residual, tangle, tangles
from isoent.sampling import make_rng, random_local_unitaries

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def computational(p):
    return gen_family(p).computational().matrix


def random_member(rng):
    kind = rng.integers(5)
    u = rng.uniform(0, 2 * np.pi, 3)
    return [
        SkewedProduct(u[0]),
        Elegant(u[0], u[1]),
        Bell(*u),
        General(*u),
        I5(u[0]),
    ][kind]


def disguise(b, rng, swap=None, permute=True):
    ua, ub = random_local_unitaries(rng)
    out = kron(ua, ub) @ b
    if swap if swap is not None else rng.random() < 0.5:
        out = SWAP @ out
    if permute:
        out = out[:, rng.permutation(4)]
    return out * np.exp(1j * rng.uniform(0, 2 * np.pi, 4))


def test_random_basis_reproducible_and_orthonormal():
    np.testing.assert_array_equal(orc.random_basis(7), orc.random_basis(7))
    assert not np.allclose(orc.random_basis(7), orc.random_basis(8))
    assert max(orthonormality_residual(orc.random_basis(s)) for s in range(1000)) <= 1e-12


def test_random_bases_are_generically_not_iso():
    iso = sum(max(abs(r) for r in iso_residuals(orc.random_basis(s))) <= 1e-8 for s in range(1000))
    assert iso < 10


@given(seeds)
def test_product_state_in_random_span(seed):
    b = orc.random_basis(seed)
    v = orc.product_state_in_span(b[:, 0], b[:, 1])
    assert abs(np.linalg.norm(v) - 1) <= 1e-12
    assert tangle(v) <= 1e-10
    proj = b[:, :2] @ (b[:, :2].conj().T @ v)
    assert np.max(np.abs(proj - v)) <= 1e-12


def test_product_state_degenerate_quadratic():
    e = np.eye(4)
    v = orc.product_state_in_span(e[0], e[3])
    # z = 0 and z = inf both product; the smaller |z| wins
    np.testing.assert_allclose(v, e[0])


def test_product_state_bell_pair_span():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    chi = np.array([1, 0, 0, -1]) / np.sqrt(2)
    v = orc.product_state_in_span(psi, chi)
    assert tangle(v) <= 1e-20
    assert min(np.linalg.norm(v - np.eye(4)[k]) for k in (0, 3)) <= 1e-12


def test_product_state_everywhere_product_span():
    # span{|10>, |11>} = |1> (x) C^2
    e = np.eye(4)
    cands = orc.product_states_in_span(e[2], e[3])
    assert len(cands) == 2
    assert all(tangle(v) <= 1e-30 for _, v in cands)


def test_canonicalize_computational_basis():
    r = orc.canonicalize(np.eye(4))
    assert r.residual <= 1e-12
    assert r.params.tau == pytest.approx(0, abs=1e-12)


def test_canonicalize_ejm_lands_on_condition_ii():
    r = orc.canonicalize(computational(EJM_PARAMS))
    p = r.params
    assert r.residual <= 1e-12
    assert p.alpha == pytest.approx(np.pi / 4, abs=1e-8)
    assert p.delta == pytest.approx(np.pi / 4, abs=1e-8)
    assert abs(np.sin(p.tau)) <= 1e-8


@settings(max_examples=40)
@given(seeds)
def test_canonicalize_round_trip(seed):
    rng = make_rng(seed)
    b = computational(random_member(rng))
    d = disguise(b, rng)
    r = orc.canonicalize(d)
    assert r.residual <= 1e-8
    canon = orc.canonical_basis(r)
    np.testing.assert_allclose(np.sort(tangles(canon)), np.sort(tangles(b)), atol=1e-8)
    # the stored transform really maps the input onto the canonical matrix
    mapped = r.transformed(d)
    ov = np.abs(np.sum(canon.conj() * mapped, axis=0))
    np.testing.assert_allclose(ov, 1, atol=1e-8)


@settings(max_examples=20)
@given(seeds)
def test_canonical_tau_is_gauge_stable(seed):
    rng = make_rng(seed)
    b = computational(General(*rng.uniform(0.2, 1.3, 3)))
    t0 = orc.canonicalize(b).params.tau
    t1 = orc.canonicalize(disguise(b, rng, swap=False, permute=False)).params.tau
    assert t1 == pytest.approx(t0, abs=1e-8)


def test_canonicalize_rejects_non_orthonormal():
    with pytest.raises(ValueError):
        orc.canonicalize(np.ones((4, 4)))


def test_canonical_params_of_general_member_reproduce_it():
    r = orc.canonicalize(computational(General(0.4, 0.9, 1.2)))
    m = gen_general(r.params).computational().matrix
    assert orthonormality_residual(m) <= 1e-12
    assert max(abs(x) for x in iso_residuals(m)) <= 1e-10


def test_result_json_round_trip():
    d = orc.canonicalize(computational(Bell(0.3, 0.5, 0.9))).to_dict()
    assert json.loads(json.dumps(d)) == d
    assert set(d["params"]) == {"alpha", "delta", "theta", "gamma", "beta", "tau"}


@pytest.mark.parametrize("seed", range(8))
def test_solver_converges_and_classifies(seed):
    b = orc.solve_iso_basis(seed)
    assert orthonormality_residual(b) <= 1e-10
    assert max(abs(r) for r in iso_residuals(b)) <= 1e-10
    label, _ = classify(b)
    assert label in ("skewed-product", "elegant", "bell", "general")


def test_solver_reports_best_residual_on_failure():
    with pytest.raises(orc.NonConvergence) as exc:
        orc.solve_iso_basis(3, max_rounds=0)
    assert exc.value.best_residual == np.inf


def test_completeness_report_json():
    recs = orc.completeness_report([0, 1])
    out = json.loads(json.dumps([r.to_dict() for r in recs]))
    assert [r["seed"] for r in out] == [0, 1]
    assert all(r["label"] in ("skewed-product", "elegant", "bell", "general") for r in out)


def test_solution_cases_vanish():
    reports = {r.case: r for r in orc.verify_solution_cases(4)}
    assert set(reports) == set(orc.SOLUTION_CASES)
    for r in reports.values():
        assert r.points > 0
        assert r.max_iso_residual <= 1e-12
        assert r.max_closed_form <= 1e-12
    assert reports["i"].max_tangle <= 1e-12
    assert reports["iv"].max_tangle > 0.01
