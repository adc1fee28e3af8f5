import numpy as np
import pytest

from decoh.entanglement import (
    kernel_params,
    largest_eigenvalue,
    oscillator_kernel,
    oscillator_kernel_spectrum,
)
from decoh.kinematics import (
    collision_params,
    collision_params_from_delta,
    ideal_reflected_state,
    initial_state,
    post_collision_state,
)
from decoh.oracles import (
    GridError,
    GridSpec,
    grid_for_state,
    hermitian_kernel_eigenvalues,
    kernel_eigensolve,
    oscillator_grid,
    quadrature_overlap,
    schmidt_decompose,
    write_kernel_csv,
    write_wavefunction_csv,
)


def test_self_overlap_is_unity():
    s = initial_state(1.0, 1.0, 0.0)
    assert abs(quadrature_overlap(s, s).value - 1.0) < 1e-10


def test_trapezoid_and_gauss_legendre_agree(params_1_99):
    s = initial_state(0.8, 1.0, 1.5)
    sf = post_collision_state(s, params_1_99)
    t = ideal_reflected_state(s)
    a_tr = quadrature_overlap(t, sf, method="trapezoid").value
    a_gl = quadrature_overlap(t, sf, method="gauss-legendre").value
    assert abs(a_tr - a_gl) < 1e-10


def test_grid_contract_violations_raise():
    s = initial_state(1.0, 1.0, 6.0)
    tiny = GridSpec(x_min=-8, x_max=8, X_min=-8, X_max=8, nx=32, nX=32)
    with pytest.raises(GridError):
        quadrature_overlap(s, s, grid=tiny)
    coarse = GridSpec(x_min=-8, x_max=8, X_min=-8, X_max=8, nx=64, nX=64)
    with pytest.raises(GridError):  # dx * k = 1.5 > 0.3
        quadrature_overlap(s, s, grid=coarse)


def test_forced_grid_warns_instead():
    s = initial_state(1.0, 1.0, 6.0)
    forced = GridSpec(x_min=-8, x_max=8, X_min=-8, X_max=8, nx=64, nX=64, forced=True)
    res = quadrature_overlap(s, s, grid=forced)
    assert res.warnings
    assert abs(res.value - 1.0) < 1e-8  # still spectrally converged


def test_auto_grid_respects_phase_density():
    sf = post_collision_state(initial_state(0.1, 1.0, 10.0), collision_params_from_delta(0.01))
    g = grid_for_state(sf)
    kx, kX = sf.phase_wavenumbers()
    assert g.dx * kx <= 0.3 * (1 + 1e-9)
    assert g.dX * kX <= 0.3 * (1 + 1e-9)


def test_truncation_estimate_bounds_refinement():
    """Doubling the node count changes the result by less than the estimate."""
    p = collision_params_from_delta(0.05)
    s = initial_state(0.5, 1.0, 6.0)
    sf = post_collision_state(s, p)
    t = ideal_reflected_state(s)
    g96 = grid_for_state(sf, force_n=96)
    g192 = grid_for_state(sf, force_n=192)
    r96 = quadrature_overlap(t, sf, grid=g96, method="gauss-legendre")
    r192 = quadrature_overlap(t, sf, grid=g192, method="gauss-legendre")
    assert abs(r96.value - r192.value) <= r96.error_estimate + 1e-14


def test_oracles_deterministic(state_equal_spreads):
    sv1 = schmidt_decompose(state_equal_spreads, n=128).singular_values
    sv2 = schmidt_decompose(state_equal_spreads, n=128).singular_values
    np.testing.assert_array_equal(sv1, sv2)


def test_schmidt_product_state_rank_one():
    p = collision_params(1.0, 1.0)
    sf = post_collision_state(initial_state(0.7, 1.0, 1.0), p)
    sv = schmidt_decompose(sf, n=256).singular_values
    assert sv[0] ** 2 == pytest.approx(1.0, abs=1e-10)


def test_schmidt_spectrum_matches_closed_form(state_equal_spreads):
    kp = kernel_params(state_equal_spreads)
    sv = schmidt_decompose(state_equal_spreads).singular_values
    assert sv[0] ** 2 == pytest.approx(0.6318, abs=1e-4)
    assert sv[0] ** 2 == pytest.approx(largest_eigenvalue(kp.w), abs=1e-6)
    assert np.sum(sv**2) == pytest.approx(1.0, abs=1e-6)
    ratios = sv[1:5] ** 2 / sv[0:4] ** 2
    np.testing.assert_allclose(ratios, np.exp(-kp.u), atol=1e-4)


def test_schmidt_transposed_route_equivalent(state_equal_spreads):
    """Tracing out the wall or the particle gives the same top eigenvalue."""
    g = grid_for_state(state_equal_spreads, n=256)
    xx, XX = g.meshes()
    m = state_equal_spreads(xx, XX) * np.sqrt(g.dx * g.dX)
    sv_X = np.linalg.svd(m, compute_uv=False)
    sv_x = np.linalg.svd(m.T, compute_uv=False)
    assert abs(sv_X[0] ** 2 - sv_x[0] ** 2) < 1e-8


def test_kernel_eigensolve_matches_schmidt(state_equal_spreads):
    eig = kernel_eigensolve(state_equal_spreads).eigenvalues
    sv = schmidt_decompose(state_equal_spreads).singular_values
    np.testing.assert_allclose(eig[:5], sv[:5] ** 2, atol=1e-6)
    assert eig.sum() == pytest.approx(1.0, abs=1e-6)
    assert eig.min() >= -1e-10


def test_kernel_eigensolve_with_momentum_phase(params_1_99):
    """The kernel phase makes the matrix complex Hermitian; eigenvalues are
    unchanged by it."""
    sf0 = post_collision_state(initial_state(1.0, 1.0, 0.0), params_1_99)
    sf3 = post_collision_state(initial_state(1.0, 1.0, 3.0), params_1_99)
    e0 = kernel_eigensolve(sf0, n=256).eigenvalues
    e3 = kernel_eigensolve(sf3, n=256).eigenvalues
    np.testing.assert_allclose(e0[:6], e3[:6], atol=1e-10)


def test_discretized_kernel_hermitian_to_rounding(params_1_99):
    sf = post_collision_state(initial_state(1.0, 1.0, 2.0), params_1_99)
    from decoh.entanglement import reduced_kernel_eval

    nodes = grid_for_state(sf, n=256).x_nodes()
    K = reduced_kernel_eval(sf, x=nodes[None, :], x_prime=nodes[:, None]) * (
        nodes[1] - nodes[0]
    )
    assert np.abs(K - K.conj().T).max() < 1e-12


def test_schmidt_refinement_stability(state_equal_spreads):
    """Doubling the grid leaves the top squared singular value unchanged to
    well below every tolerance used against it."""
    f0_256 = schmidt_decompose(state_equal_spreads, n=256).singular_values[0] ** 2
    f0_512 = schmidt_decompose(state_equal_spreads, n=512).singular_values[0] ** 2
    assert abs(f0_512 - f0_256) < 1e-10


def test_non_hermitian_kernel_rejected():
    nodes = np.linspace(-5.0, 5.0, 64)
    with pytest.raises(RuntimeError, match="kernel bug"):
        hermitian_kernel_eigenvalues(
            lambda xp, x: np.exp(-(x - 0.3 * xp) ** 2), nodes
        )


@pytest.mark.parametrize("beta", [0.1, 10.0])
def test_oscillator_kernel_eigensolve(beta):
    u = 0.7
    nodes = oscillator_grid(beta, u, n=512)
    eigs = hermitian_kernel_eigenvalues(oscillator_kernel(beta, u), nodes)
    np.testing.assert_allclose(eigs[:5], oscillator_kernel_spectrum(beta, u, 5), atol=1e-6)


def test_oscillator_kernel_beta_independent_numerically():
    u = 0.7
    eigs = []
    for beta in (0.1, 10.0):
        nodes = oscillator_grid(beta, u, n=512)
        eigs.append(hermitian_kernel_eigenvalues(oscillator_kernel(beta, u), nodes)[:5])
    np.testing.assert_allclose(eigs[0], eigs[1], atol=1e-8)


def test_wavefunction_csv_roundtrip(tmp_path, state_equal_spreads):
    g = grid_for_state(state_equal_spreads, force_n=64)
    xx, XX = g.meshes()
    psi = state_equal_spreads(xx, XX)
    path = tmp_path / "wave.csv"
    write_wavefunction_csv(path, g, psi, metadata={"label": "test"})
    lines = path.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    assert any("nx=64" in c for c in comments)
    assert any("label=test" in c for c in comments)
    header = next(l for l in lines if not l.startswith("#"))
    assert header == "x,X,re,im"
    data = np.loadtxt(path, delimiter=",", skiprows=len(comments) + 1)
    assert data.shape == (64 * 64, 4)
    rebuilt = (data[:, 2] + 1j * data[:, 3]).reshape(64, 64)
    np.testing.assert_allclose(rebuilt, psi, atol=1e-11)


def test_kernel_csv_dump(tmp_path):
    nodes = np.linspace(-1.0, 1.0, 8)
    K = np.outer(nodes, nodes).astype(complex)
    path = tmp_path / "kernel.csv"
    write_kernel_csv(path, nodes, K)
    n_comments = sum(1 for l in path.read_text().splitlines() if l.startswith("#"))
    data = np.loadtxt(path, delimiter=",", skiprows=n_comments + 1)
    assert data.shape == (64, 4)
    assert data[-1, 2] == pytest.approx(1.0)
