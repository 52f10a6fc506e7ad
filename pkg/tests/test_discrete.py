import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmoments.discrete import (
    bruteforce_simplex_oracle,
    fixed_mean_moment,
    simplex_grid,
    strong_moment_discrete,
    support_points,
    two_atom_optimum,
    weak_moment_discrete,
    weak_moment_hermitian,
)
from cmoments.errors import NonRealSpectrumError, ResolutionTooHighError, TooManyAtomsError
from cmoments.polynomials import build, sup_norm
from cmoments.states import Certificate, witness_moment

CUBE_ROOTS = np.exp(2j * np.pi * np.arange(3) / 3)


def dirichlet_search(points, k, mode, samples=200_000, seed=0):
    """Random weights on the simplex; a lower bound independent of any grid or refinement."""
    rng = np.random.default_rng(seed)
    W = rng.dirichlet(np.full(len(points), 0.3), size=samples)
    mu = W @ points
    dev = points[None, :] - mu[:, None]
    if mode == "Strong":
        vals = np.sum(W * np.abs(dev) ** k, axis=1)
    else:
        vals = np.abs(np.sum(W * dev**k, axis=1))
    return vals.max() ** (1 / k)


def test_support_points_merge_and_order():
    pts = support_points([1j, 0, 1, 1 + 1e-13, 0])
    assert np.allclose(pts, [0, 1j, 1])


def test_simplex_grid():
    g = simplex_grid(3, 4)
    assert len(g) == 15 and np.allclose(g.sum(axis=1), 1) and g.min() >= 0


def test_cube_roots_strong_and_weak():
    s = strong_moment_discrete(CUBE_ROOTS, 2)
    assert s.value == pytest.approx(1.0, abs=1e-9)
    assert abs(s.mean) < 1e-6
    w = weak_moment_discrete(CUBE_ROOTS, 2)
    assert w.value == pytest.approx(np.sqrt(3) / 2, abs=1e-9)
    assert sorted(w.witness.weights) == pytest.approx([0.5, 0.5], abs=1e-6)


def test_diag_1_i_0():
    for k in (2, 3):
        assert strong_moment_discrete([1, 1j, 0], k).value == pytest.approx(np.sqrt(0.5), abs=1e-7)


def test_two_point_weak_k3_matches_sup_norm():
    expected = sup_norm(build(3, "p")).value ** (1 / 3)
    assert weak_moment_discrete([0, 1], 3).value == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(0.458243, abs=1e-6)


def test_hermitian_closed_form_agrees_with_search():
    rng = np.random.default_rng(8)
    spec = rng.standard_normal(8)
    for k in (2, 3, 4, 5):
        closed = weak_moment_hermitian(spec, k)
        search = weak_moment_discrete(spec, k)
        assert closed.certificate is Certificate.CLOSED_FORM
        assert closed.value == pytest.approx(search.value, abs=1e-7)
        assert witness_moment(closed) ** (1 / k) == pytest.approx(closed.value, abs=1e-12)


def test_hermitian_closed_form_rejects_complex():
    with pytest.raises(NonRealSpectrumError):
        weak_moment_hermitian([0, 1j], 2)


def test_bruteforce_oracle_examples_and_limits():
    assert bruteforce_simplex_oracle(CUBE_ROOTS, 2, "Weak", 200) == pytest.approx(np.sqrt(3) / 2, abs=1e-9)
    assert bruteforce_simplex_oracle([0, 1], 2, "Weak", 200) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(TooManyAtomsError):
        bruteforce_simplex_oracle(np.arange(5), 2)
    with pytest.raises(ResolutionTooHighError):
        bruteforce_simplex_oracle([0, 1], 2, resolution=401)


@pytest.mark.parametrize("mode", ["Strong", "Weak"])
@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_search_against_independent_oracles(mode, k):
    rng = np.random.default_rng(100 + k)
    pts = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    res = strong_moment_discrete(pts, k) if mode == "Strong" else weak_moment_discrete(pts, k)
    grid = bruteforce_simplex_oracle(pts, k, mode, 120)
    rand = dirichlet_search(pts, k, mode)
    # oracles are lower bounds; the search must reach them and not exceed them by much
    assert res.value >= grid - 1e-9 and res.value >= rand - 1e-9
    assert res.value - max(grid, rand) < 2e-3
    assert not res.info["flagged"]


@pytest.mark.parametrize("mode", ["Strong", "Weak"])
def test_fixed_mean_route_agrees(mode):
    rng = np.random.default_rng(5)
    pts = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    for k in (2, 3, 4):
        a = strong_moment_discrete(pts, k, cross_check=False) if mode == "Strong" else weak_moment_discrete(
            pts, k, cross_check=False)
        b = fixed_mean_moment(pts, k, mode)
        assert a.value == pytest.approx(b.value, abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10**6))
def test_weak_k2_concentrates_on_two_atoms(m, seed):
    # the weak variance is attained by a two-point law
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    assert weak_moment_discrete(pts, 2, cross_check=False).value == pytest.approx(
        two_atom_optimum(pts, 2, "Weak"), abs=1e-7)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6), st.integers(2, 5), st.sampled_from(["Strong", "Weak"]),
       st.complex_numbers(max_magnitude=3), st.floats(0, 2 * np.pi), st.floats(0.2, 5))
def test_invariances(m, seed, k, mode, shift, phase, scale):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    fn = strong_moment_discrete if mode == "Strong" else weak_moment_discrete
    base = fn(pts, k, cross_check=False).value
    moved = fn(scale * np.exp(1j * phase) * pts + shift, k, cross_check=False).value
    assert moved == pytest.approx(scale * base, rel=1e-6, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6), st.integers(1, 6), st.sampled_from(["Strong", "Weak"]))
def test_witness_reproduces_value(m, seed, k, mode):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    fn = strong_moment_discrete if mode == "Strong" else weak_moment_discrete
    res = fn(pts, k, cross_check=False)
    assert witness_moment(res) ** (1 / k) == pytest.approx(res.value, abs=1e-12)
    assert res.witness.mean() == pytest.approx(res.mean, abs=1e-12)
    assert len(res.witness.support) <= 3
    diam = np.abs(pts[:, None] - pts[None, :]).max()
    assert res.value <= diam + 1e-12


def test_single_point_spectrum():
    for fn in (strong_moment_discrete, weak_moment_discrete):
        assert fn([2 + 1j], 3).value == 0.0
