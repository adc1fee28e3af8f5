import dataclasses

import numpy as np
import pytest

from decoh.entanglement import kernel_params, largest_eigenvalue
from decoh.kinematics import collision_params, initial_state, post_collision_state
from decoh.propagation import (
    GaussianWave2D,
    PropagatorSetup,
    fft_free_evolve,
    free_evolve_gaussian_1d,
    grid_for_wave,
    image_propagate,
    phase_aligned_l2,
    separation_check,
    transit_time,
)


def _setup(m=1.0, M=99.0, Sigma=0.3, sigma=1.0, k=6.0, x0=-8.0, periods=2.0):
    s = PropagatorSetup(m=m, M=M, Sigma=Sigma, sigma=sigma, k=k, x0=x0, t=0.0)
    return dataclasses.replace(s, t=periods * transit_time(s))


def _grid_norm(psi, grid):
    W = np.outer(np.full(grid.nX, grid.dX), np.full(grid.nx, grid.dx))
    W[0, :] *= 0.5
    W[-1, :] *= 0.5
    W[:, 0] *= 0.5
    W[:, -1] *= 0.5
    return float(np.sum(W * np.abs(psi) ** 2))


def test_separation_ratio_formula():
    s = PropagatorSetup(m=1.0, M=9.0, Sigma=1.0, sigma=1.0, k=5.0, x0=-10.0, t=0.0)
    assert separation_check(s) == pytest.approx(10.0 / (2.0 * 5.0 * 2.0), rel=1e-14)


def test_separation_vanishes_at_high_momentum():
    s = PropagatorSetup(m=1.0, M=9.0, Sigma=1.0, sigma=1.0, k=1e6, x0=-10.0, t=0.0)
    assert separation_check(s) < 1e-5


def test_separation_halves_when_sigma_doubles():
    """Fixed k sigma and fixed absolute offset: doubling the spreads doubles
    the spreading time faster than the traversal time."""
    a = PropagatorSetup(m=1.0, M=99.0, Sigma=1.0, sigma=1.0, k=5.0, x0=-10.0, t=0.0)
    b = PropagatorSetup(m=1.0, M=99.0, Sigma=2.0, sigma=2.0, k=2.5, x0=-10.0, t=0.0)
    assert separation_check(b) == pytest.approx(separation_check(a) / 2.0, rel=1e-14)


def test_separation_undefined_at_rest():
    s = PropagatorSetup(m=1.0, M=9.0, Sigma=1.0, sigma=1.0, k=0.0, x0=-10.0, t=0.0)
    with pytest.raises(ValueError):
        separation_check(s)
    with pytest.raises(ValueError):
        transit_time(s)


def test_setup_validation():
    with pytest.raises(ValueError):
        PropagatorSetup(m=-1.0, M=1.0, Sigma=1.0, sigma=1.0, k=1.0, x0=-5.0, t=0.0)
    with pytest.raises(ValueError):
        PropagatorSetup(m=1.0, M=1.0, Sigma=0.0, sigma=1.0, k=1.0, x0=-5.0, t=0.0)


def test_wave_matches_product_state():
    p = collision_params(1.0, 99.0)
    s = initial_state(0.3, 1.0, 6.0)
    w = GaussianWave2D.from_product_state(s, p, x_center=-8.0)
    g = grid_for_wave(w, n=128)
    xx, XX = g.meshes()
    direct = np.sqrt(s.norm) * np.exp(
        -(XX**2) / (4 * s.Sigma**2)
        - ((xx + 8.0) ** 2) / (4 * s.sigma**2)
        + 1j * s.k * (xx + 8.0)
    )
    np.testing.assert_allclose(w.evaluate(xx, XX), direct, atol=1e-12)


def test_mirror_is_involution():
    p = collision_params(1.0, 3.0)
    s = initial_state(0.5, 1.0, 2.0)
    w = GaussianWave2D.from_product_state(s, p, x_center=-4.0)
    back = w.mirror_u().mirror_u()
    np.testing.assert_allclose(back.A, w.A)
    np.testing.assert_allclose(back.b, w.b)


def test_free_evolution_preserves_norm():
    setup = _setup()
    res = image_propagate(setup, n=256)
    assert _grid_norm(res.psi, res.grid) == pytest.approx(1.0, abs=1e-7)


def test_short_time_evolution_is_identity():
    p = collision_params(1.0, 99.0)
    s = initial_state(0.3, 1.0, 6.0)
    w = GaussianWave2D.from_product_state(s, p, x_center=-8.0)
    g = grid_for_wave(w, n=96)
    xx, XX = g.meshes()
    drifted = w.free_evolve(1e-7)
    np.testing.assert_allclose(drifted.evaluate(xx, XX), w.evaluate(xx, XX), atol=1e-4)


def test_separation_warning_attached():
    slow = _setup(k=6.0)  # ratio 0.61
    res = image_propagate(slow, n=96)
    assert any("separation" in w for w in res.warnings)
    fast = _setup(k=40.0, x0=-6.0, Sigma=0.25)  # ratio 0.071
    res = image_propagate(fast, n=96)
    assert not res.warnings


def test_reflected_entanglement_matches_static_analysis():
    """F0 is invariant under free evolution, so the SVD of the evolved
    reflected wave must reproduce the static closed form."""
    setup = _setup(k=6.0)
    res = image_propagate(setup, n=256)
    sv = np.linalg.svd(res.psi * np.sqrt(res.grid.dx * res.grid.dX), compute_uv=False)
    sf = post_collision_state(initial_state(setup.Sigma, setup.sigma, setup.k), setup.params)
    f0 = largest_eigenvalue(kernel_params(sf).w)
    assert sv[0] ** 2 == pytest.approx(f0, abs=1e-3)


def test_image_term_against_fft_route():
    """Gaussian-algebra image term vs an FFT kinetic-step evolution of the
    sampled mirrored state."""
    setup = _setup(k=40.0, x0=-6.0, Sigma=0.25)
    assert separation_check(setup) < 0.1
    p = setup.params
    s0 = initial_state(setup.Sigma, setup.sigma, setup.k)
    mirrored = GaussianWave2D.from_product_state(s0, p, x_center=setup.x0).mirror_u()

    evolved = mirrored.free_evolve(setup.t)
    c0, cov0 = mirrored.center_cov()
    c1, cov1 = evolved.center_cov()
    kx, kX = evolved.phase_wavenumbers()
    sx = max(np.sqrt(cov0[0, 0].real), np.sqrt(cov1[0, 0].real))
    sX = max(np.sqrt(cov0[1, 1].real), np.sqrt(cov1[1, 1].real))
    from decoh.oracles import GridSpec, _axis_points

    x_lo = min(c0[0], c1[0]) - 8.5 * sx
    x_hi = max(c0[0], c1[0]) + 8.5 * sx
    X_lo = min(c0[1], c1[1]) - 8.5 * sX
    X_hi = max(c0[1], c1[1]) + 8.5 * sX
    grid = GridSpec(
        x_min=x_lo, x_max=x_hi, X_min=X_lo, X_max=X_hi,
        nx=_axis_points(x_hi - x_lo, kx, 512), nX=_axis_points(X_hi - X_lo, kX, 256),
    )
    res = image_propagate(setup, grid=grid)
    xx, XX = grid.meshes()
    via_fft = -fft_free_evolve(mirrored.evaluate(xx, XX), grid, setup.m, setup.M, setup.t)
    dist, _ = phase_aligned_l2(res.psi, via_fft, grid)
    assert dist < 1e-3


def test_fixed_wall_limit_factorizes():
    """Huge wall mass and a narrow wall packet: the reflected wave is the
    product of independently evolved 1-D factors (with the recoil phase on
    the wall sector)."""
    m, M, sigma, Sigma, k, x0 = 1.0, 1e11, 1.0, 1.06e-5, 40.0, -8.0
    setup = PropagatorSetup(m=m, M=M, Sigma=Sigma, sigma=sigma, k=k, x0=x0, t=0.0)
    setup = dataclasses.replace(setup, t=2.0 * transit_time(setup))
    p = setup.params
    res = image_propagate(setup, n=256)
    g = res.grid
    phi_x = free_evolve_gaussian_1d(g.x_nodes(), setup.t, center=-x0, spread=sigma,
                                    k=-k, mass=m)
    gam_X = free_evolve_gaussian_1d(g.X_nodes(), setup.t, center=0.0, spread=Sigma,
                                    k=2.0 * p.gamma * k, mass=M)
    ref = np.outer(gam_X, phi_x)
    dist, _ = phase_aligned_l2(res.psi, ref, g)
    assert dist < 1e-4


def test_equal_mass_bounce_matches_entangled_form():
    """At the symmetric instant the reflected wave overlaps the closed-form
    bounced state at better than 1 - 1e-3 (equal masses, fast bounce)."""
    setup = _setup(m=1.0, M=1.0, Sigma=1.0, sigma=1.0, k=80.0, x0=-8.0, periods=1.0)
    sf = post_collision_state(initial_state(1.0, 1.0, 80.0), setup.params)
    res = image_propagate(setup, n=256)
    g = res.grid
    xx, XX = g.meshes()
    W = np.outer(np.full(g.nX, g.dX), np.full(g.nx, g.dx))
    W[0, :] *= 0.5
    W[-1, :] *= 0.5
    W[:, 0] *= 0.5
    W[:, -1] *= 0.5
    overlap = abs(np.sum(W * np.conj(sf(xx, XX)) * res.psi))
    assert overlap > 1.0 - 1e-3


def test_full_mode_vanishes_on_wall_line():
    """Dirichlet condition: direct minus image vanishes at u = 0."""
    setup = _setup(k=6.0, periods=1.0)
    from decoh.oracles import GridSpec

    grid = GridSpec(x_min=-3.0, x_max=3.0, X_min=-3.0, X_max=3.0, nx=65, nX=65,
                    forced=True)
    res = image_propagate(setup, grid=grid, mode="full")
    diag = np.array([res.psi[i, i] for i in range(65)])  # x = X, i.e. u = 0
    off = abs(res.psi).max()
    assert np.abs(diag).max() < 1e-10 * max(off, 1e-30) + 1e-12


def test_free_evolve_gaussian_1d_norm_and_drift():
    x = np.linspace(-60.0, 80.0, 4096)
    psi = free_evolve_gaussian_1d(x, t=3.0, center=-5.0, spread=1.0, k=4.0, mass=1.0)
    norm = np.trapezoid(np.abs(psi) ** 2, x=x)
    assert norm == pytest.approx(1.0, abs=1e-10)
    mean = np.trapezoid(x * np.abs(psi) ** 2, x=x)
    assert mean == pytest.approx(-5.0 + 4.0 * 3.0, abs=1e-8)


def test_phase_aligned_l2_recovers_phase():
    setup = _setup(k=6.0)
    res = image_propagate(setup, n=96)
    rotated = res.psi * np.exp(1j * 0.9)
    dist, theta = phase_aligned_l2(rotated, res.psi, res.grid)
    assert dist < 1e-12
    assert theta == pytest.approx(0.9, abs=1e-9)


def test_image_propagate_rejects_unknown_mode():
    with pytest.raises(ValueError):
        image_propagate(_setup(), mode="sideways")
