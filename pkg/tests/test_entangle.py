import numpy as np
import pytest
from scipy.stats import unitary_group

from rkkynav import entangle as en
from rkkynav.errors import BadDimension
from rkkynav.matkernel import sqrtm_psd
from rkkynav.states import bell_mixture, bell_states, custom_weighting


def random_state(rng, rank=None):
    rank = rank or rng.integers(1, 5)
    a = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    r = a @ a.conj().T
    return r / np.trace(r).real


def kappas_via_svd(rho):
    """Independent route: kappa are the singular values of sqrt(rho) sqrt(rho')."""
    a = sqrtm_psd(rho)
    b = sqrtm_psd(en.spin_flip(rho))
    return np.linalg.svd(a @ b, compute_uv=False)


def test_kappas_agree_with_svd_oracle():
    rng = np.random.default_rng(10)
    for _ in range(200):
        rho = random_state(rng)
        assert np.allclose(en.kappas(rho), kappas_via_svd(rho), atol=1e-7)


@pytest.mark.parametrize("i", range(4))
def test_bell_states_are_maximally_entangled(i):
    b = bell_states()[i]
    res = en.extended_concurrence(np.outer(b, b.conj()))
    assert res.c_extended == pytest.approx(1.0, abs=1e-12)
    assert res.concurrence == pytest.approx(1.0, abs=1e-12)


def test_maximally_mixed_state():
    res = en.extended_concurrence(np.eye(4) / 4)
    assert res.c_extended == pytest.approx(-0.5, abs=1e-12)
    assert res.concurrence == 0.0


def test_product_state_has_zero_concurrence():
    up = np.array([1, 0])
    plus = np.array([1, 1]) / np.sqrt(2)
    psi = np.kron(up, plus)
    assert en.extended_concurrence(np.outer(psi, psi)).c_extended == pytest.approx(0.0, abs=1e-12)


def test_bell_diagonal_formula():
    rng = np.random.default_rng(11)
    for _ in range(100):
        w = rng.dirichlet(np.ones(4))
        rho = bell_mixture(custom_weighting(w)).data
        assert en.extended_concurrence(rho).c_extended == pytest.approx(2 * w.max() - 1, abs=1e-10)


def test_local_unitary_invariance():
    rng = np.random.default_rng(12)
    for _ in range(50):
        rho = random_state(rng)
        u = np.kron(unitary_group.rvs(2, random_state=rng), unitary_group.rvs(2, random_state=rng))
        a = en.extended_concurrence(rho).c_extended
        b = en.extended_concurrence(u @ rho @ u.conj().T).c_extended
        assert abs(a - b) < 1e-9


def test_batched_matches_single():
    rng = np.random.default_rng(13)
    rhos = np.array([random_state(rng) for _ in range(20)])
    vals = en.concurrence_values(rhos)
    assert np.allclose(vals, [en.extended_concurrence(r).c_extended for r in rhos])


def test_ppt_agrees_with_sign_of_concurrence():
    rng = np.random.default_rng(14)
    checked = 0
    for _ in range(10_000):
        rho = random_state(rng)
        c = en.extended_concurrence(rho).c_extended
        if abs(c) <= 1e-8:
            continue
        assert en.ppt_entangled(rho) == (c > 0)
        checked += 1
    assert checked > 9000


def test_partial_transpose_and_negativity():
    b = bell_states()[0]
    rho = np.outer(b, b.conj())
    assert en.negativity(rho) == pytest.approx(0.5)
    assert en.min_pt_eigenvalue(rho) == pytest.approx(-0.5)
    # transposing both factors is the full transpose
    pt = en.partial_transpose(en.partial_transpose(rho, 0), 1)
    assert np.allclose(pt, rho.T)
    with pytest.raises(BadDimension):
        en.partial_transpose(rho, 2)


def test_purity_and_dimension_checks():
    assert en.purity(np.eye(4) / 4) == pytest.approx(0.25)
    with pytest.raises(BadDimension):
        en.kappas(np.eye(2) / 2)
