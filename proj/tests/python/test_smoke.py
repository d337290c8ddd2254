"""Smoke tests for the python bindings."""

import numpy as np
import pytest

import dcprox


def test_synthetic_texture_deterministic():
    a = dcprox.synthetic_texture(32, 32, seed=5)
    b = dcprox.synthetic_texture(32, 32, seed=5)
    c = dcprox.synthetic_texture(32, 32, seed=6)
    assert a.shape == (32, 32)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.min() >= 0.0 and a.max() <= 1.0


def test_discrete_gradient_adjoint_and_norm():
    D = dcprox.discrete_gradient(16, 16)
    rng = np.random.default_rng(0)
    x = rng.normal(size=(16, 16))
    y = rng.normal(size=(2, 16, 16))
    lhs = float((D.forward(x) * y).sum())
    rhs = float((x * D.adjoint(y)).sum())
    assert abs(lhs - rhs) <= 1e-12 * (np.linalg.norm(x) * np.linalg.norm(y))
    assert D.adjoint_defect(trials=50, seed=1) <= 1e-12
    assert D.power_norm(iters=200, seed=2) <= np.sqrt(8.0) + 1e-9


def test_prox_scad_conj_against_numpy_brute_force():
    lam, a, gamma = 1.0, 3.7, 0.5

    def h(t):
        t = np.abs(t)
        return np.where(
            t <= lam,
            0.0,
            np.where(t <= a * lam, (t - lam) ** 2 / (2 * (a - 1)), lam * t - (a + 1) * lam**2 / 2),
        )

    for z in [-3.0, -1.2, -0.2, 0.0, 0.4, 1.1, 2.9]:
        # Moreau: z = prox_{gamma h}(z) + gamma * prox_{h*/gamma}(z / gamma)
        grid = np.arange(z - gamma * lam - 0.01, z + gamma * lam + 0.01, 1e-5)
        brute = grid[np.argmin(gamma * h(grid) + 0.5 * (grid - z) ** 2)]
        conj = dcprox.prox_scad_conj_scalar(1.0 / gamma, z / gamma, lam, a)
        assert abs(z - (brute + gamma * conj)) <= 2e-5


def test_prox_zhang_conj_matches_soft_threshold_clamp():
    a, gamma = 1.5, 0.4
    z = np.linspace(-3, 3, 101).reshape((1, -1))
    p = dcprox.prox_zhang_conj(gamma, np.vstack([z, z]).reshape(2, 1, 101)[0], a)
    soft = np.sign(z) * np.maximum(np.abs(z) - gamma * a, 0.0)
    expected = np.clip(soft, -1.0 / a, 1.0 / a)
    assert np.allclose(p, expected[0].reshape(1, 101), atol=1e-14)


def test_prox_aniso_tv_certificate():
    rng = np.random.default_rng(3)
    b = np.clip(dcprox.synthetic_texture(12, 12, seed=4) + rng.normal(0, 0.1, (12, 12)), 0, 1)
    out = dcprox.prox_aniso_tv(0.1, b, inner_tol=1e-9, max_inner=100000)
    assert out["converged"]
    assert out["gap"] <= 1e-6
    assert out["x"].shape == (12, 12)
    assert np.abs(out["dual"]).max() <= 1.0 + 1e-15


def test_solve_descends_and_is_deterministic():
    x = dcprox.synthetic_texture(16, 16, seed=11)
    b = dcprox.degrade(x, blur_std=1.0, noise_std=0.1, seed=11)
    r1 = dcprox.solve(b, "lzox", mu=20.0, param=0.4, iterations=8, blur_std=1.0)
    r2 = dcprox.solve(b, "lzox", mu=20.0, param=0.4, iterations=8, blur_std=1.0)
    phi = r1["phi"]
    assert len(phi) == 8
    assert all(phi[i + 1] <= phi[i] + 1e-10 * (1 + abs(phi[i])) for i in range(len(phi) - 1))
    assert np.array_equal(r1["x"], r2["x"])
    assert r1["status"] == "max_iters"
    # the restoration should not be worse than the observation
    assert dcprox.isnr(x, b, r1["x"]) > -1.0


def test_solve_rejects_bad_penalty():
    b = dcprox.synthetic_texture(8, 8, seed=1)
    with pytest.raises(Exception):
        dcprox.solve(b, "bogus", mu=10.0, param=0.1, iterations=2)


def test_isnr_values():
    x = dcprox.synthetic_texture(8, 8, seed=2)
    obs = x.copy()
    obs[0, 0] += 1.0
    rest = x.copy()
    rest[0, 0] += 0.5
    assert dcprox.isnr(x, obs, obs) == pytest.approx(0.0)
    assert dcprox.isnr(x, obs, rest) == pytest.approx(10 * np.log10(4.0))


def test_fit_rate_geometric():
    delta = [0.5**n for n in range(1, 50)]
    out = dcprox.fit_rate(delta, window=30)
    assert out["regime"] == "linear"
    assert out["q_or_exponent"] == pytest.approx(0.5, abs=1e-6)
