import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoent import network as nw
from isoent.families import Elegant, gen_family, iso_residuals, tangles
from isoent.linalg import projector
from isoent.sampling import haar_unitary, make_rng

seeds = st.integers(min_value=0, max_value=2**32 - 1)
eps = st.floats(min_value=0, max_value=1)


def dist(bases, **kw):
    return nw.triangle_distribution(nw.TriangleConfig(bases, **kw))


@pytest.fixture
def ejm3():
    b = nw.ejm_basis()
    return (b, b, b)


def test_depolarize_examples():
    rho = projector(nw.EDGE_STATES["psi+"])
    np.testing.assert_allclose(nw.depolarize(rho, 0.0), rho)
    np.testing.assert_allclose(nw.depolarize(rho, 1.0), np.eye(4) / 4)
    ev = np.sort(np.linalg.eigvalsh(nw.depolarize(rho, 0.5)))
    np.testing.assert_allclose(ev, [1 / 8, 1 / 8, 1 / 8, 5 / 8], atol=1e-15)
    with pytest.raises(ValueError):
        nw.depolarize(rho, 1.5)


def test_config_validation(ejm3):
    with pytest.raises(ValueError):
        nw.TriangleConfig(ejm3[:2])
    with pytest.raises(ValueError):
        nw.TriangleConfig((np.ones((4, 4)),) * 3)
    with pytest.raises(ValueError):
        nw.TriangleConfig(ejm3, wiring=(0, 1, 2, 3, 4, 4))
    with pytest.raises(ValueError):
        nw.TriangleConfig(ejm3, edge_state="bogus")
    with pytest.raises(ValueError):
        nw.TriangleConfig(ejm3, epsilon=(0.1, 0.2, -0.1))


@pytest.mark.parametrize("wiring", ["cyclic", "lexicographic", (5, 4, 3, 2, 1, 0)])
def test_white_noise_gives_uniform(wiring):
    bases = tuple(haar_unitary(4, s) for s in range(3))
    d = dist(bases, epsilon=1.0, wiring=wiring)
    np.testing.assert_allclose(d.p, 1 / 64, atol=1e-12)


def test_computational_bases_share_common_bits():
    e = np.eye(4)
    d = dist((e, e, e), edge_state="phi+", epsilon=0.0, wiring="lexicographic")
    support = d.p > 1e-12
    assert support.sum() == 8
    np.testing.assert_allclose(d.p[support], 1 / 8, atol=1e-14)
    # A = (x_AB, x_AC), B = (x_AB, x_BC), C = (x_AC, x_BC)
    for a, b, c in zip(*np.nonzero(support)):
        assert a >> 1 == b >> 1 and a & 1 == c >> 1 and b & 1 == c & 1


@settings(max_examples=25)
@given(seeds, eps)
def test_distribution_valid_and_orbit_sum(seed, e):
    rng = make_rng(seed)
    bases = tuple(haar_unitary(4, rng) for _ in range(3))
    d = dist(bases, epsilon=e, wiring="lexicographic")
    assert d.p.min() >= -1e-12
    assert d.p.sum() == pytest.approx(1, abs=1e-10)
    assert nw.opi_summary(d).orbit_sum() == pytest.approx(1, abs=1e-10)


def test_ejm_opi_point(ejm3):
    s = nw.opi_summary(dist(ejm3))
    assert s.max_deviation <= 1e-10
    np.testing.assert_allclose([s.p1, s.p2, s.p3], np.array([25, 1, 5]) / 256, atol=1e-12)
    assert nw.finner_margin(dist(ejm3)) >= 0


@given(eps)
def test_ejm_stays_opi_under_noise(e):
    ejm3 = (nw.ejm_basis(),) * 3
    assert nw.opi_summary(dist(ejm3, epsilon=e)).max_deviation <= 1e-10


def test_lexicographic_psi_plus_breaks_ejm_opi(ejm3):
    s = nw.opi_summary(dist(ejm3, edge_state="psi+", wiring="lexicographic"))
    assert s.max_deviation > 1e-3


def test_uniform_summary_and_finner():
    d = nw.TriangleDistribution(np.full((4, 4, 4), 1 / 64))
    s = nw.opi_summary(d)
    assert (s.p1, s.p2, s.p3) == pytest.approx((1 / 64,) * 3)
    assert s.max_deviation == 0
    assert nw.finner_margin(d) == pytest.approx(7 / 64)


def test_finner_deterministic_boundary():
    p = np.zeros((4, 4, 4))
    p[0, 0, 0] = 1
    assert nw.finner_margin(nw.TriangleDistribution(p)) == pytest.approx(0, abs=1e-15)


def test_outcome_relabeling_preserves_orbit_means(ejm3):
    bases = tuple(haar_unitary(4, s) for s in (4, 5, 6))
    d = dist(bases, epsilon=0.2)
    s = nw.opi_summary(d)
    perm = [2, 0, 3, 1]
    relabeled = dist((bases[0][:, perm], bases[1][:, perm], bases[2][:, perm]), epsilon=0.2)
    np.testing.assert_allclose(relabeled.p, d.p[np.ix_(perm, perm, perm)], atol=1e-14)
    s2 = nw.opi_summary(relabeled)
    assert (s2.p1, s2.p2, s2.p3) == pytest.approx((s.p1, s.p2, s.p3), abs=1e-14)


def test_party_rotation_symmetry_of_cyclic_wiring():
    # rotating parties A->B->C with the edges AB->BC->CA maps the cyclic wiring to itself
    bases = tuple(haar_unitary(4, s) for s in (7, 8, 9))
    d = dist(bases, epsilon=0.1)
    rotated = dist((bases[2], bases[0], bases[1]), epsilon=0.1)
    np.testing.assert_allclose(rotated.p, np.transpose(d.p, (2, 0, 1)), atol=1e-13)


def test_multilinear_in_edge_noise():
    bases = tuple(haar_unitary(4, s) for s in (1, 2, 3))
    xs = np.linspace(0, 1, 4)
    vals = np.array([dist(bases, epsilon=(x, 0.3, 0.6)).p[1, 2, 3] for x in xs])
    coef = np.polyfit(xs, vals, 3)
    assert abs(coef[0]) < 1e-12 and abs(coef[1]) < 1e-12


@pytest.mark.parametrize("theta", np.linspace(0, np.pi / 2, 7))
def test_elegant_opi_members_are_iso_entangled(theta):
    b = nw.gen_elegant_opi(theta).computational().matrix
    assert max(abs(r) for r in iso_residuals(b)) <= 1e-10
    np.testing.assert_allclose(tangles(b), np.sin(2 * theta) ** 2 / 4, atol=1e-10)


def test_elegant_opi_subfamily_opi_and_noise_breaking():
    for t in np.linspace(0, np.pi / 4, 21):
        b = nw.gen_elegant_opi(t)
        assert nw.opi_summary(dist((b, b, b))).max_deviation <= 1e-9
    b = nw.gen_elegant_opi(np.pi / 6)
    assert nw.opi_summary(dist((b, b, b), epsilon=0.1)).max_deviation > 1e-6


def test_elegant_opi_endpoint_matches_ejm(ejm3):
    b = nw.gen_elegant_opi(np.pi / 4)
    np.testing.assert_allclose(dist((b, b, b)).p, dist(ejm3).p, atol=1e-12)


def test_scan_curves_anchor_at_ejm():
    noise = nw.scan_p1p3("ejm_noise", 5)
    sub = nw.scan_p1p3("elegant_opi_subfamily", 5)
    assert [r.param for r in noise] == sorted(r.param for r in noise)
    assert (noise[0].p1, noise[0].p3) == pytest.approx((sub[-1].p1, sub[-1].p3), abs=1e-12)
    assert (noise[-1].p1, noise[-1].p3) == pytest.approx((1 / 64, 1 / 64), abs=1e-12)
    assert all(r.finner_margin >= -1e-12 for r in noise + sub)


def test_scan_csv_format():
    text = nw.scan_csv(nw.scan_p1p3("ejm_noise", 3))
    lines = text.split("\n")
    assert lines[0] == nw.CSV_HEADER and text.endswith("\n") and "\r" not in text
    assert len(lines[1].split(",")) == 6
    with pytest.raises(ValueError):
        nw.scan_p1p3("ejm_noise", 1)
    with pytest.raises(ValueError):
        nw.scan_p1p3("nope", 3)


def test_orbit_sizes():
    counts = {k: int(m.sum()) for k, m in nw._ORBITS.items()}
    assert counts == {"p1": 4, "p2": 36, "p3": 24}
    assert sum(1 for t in itertools.product(range(4), repeat=3) if len(set(t)) == 2) == 36


def test_elegant_member_via_gen_family_runs():
    b = gen_family(Elegant(0.3, 0.2)).computational()
    d = dist((b, b, b), epsilon=(0.0, 0.5, 1.0))
    assert d.p.sum() == pytest.approx(1)
