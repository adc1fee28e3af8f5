"""Brute-force numerical verifiers for the closed-form results.

Everything here treats wave functions as plain evaluators psi(x, X) sampled
on a rectangular grid: tensor-product quadrature for overlap integrals, SVD
of the sampled state for Schmidt coefficients, and a dense Hermitian
eigensolve for discretized integral kernels.  All routines are pure
functions of their inputs and deterministic for a fixed grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridError",
    "GridSpec",
    "OverlapResult",
    "SchmidtResult",
    "KernelEigsResult",
    "grid_for_state",
    "validate_grid",
    "quadrature_overlap",
    "schmidt_decompose",
    "kernel_eigensolve",
    "hermitian_kernel_eigenvalues",
    "oscillator_grid",
    "write_wavefunction_csv",
    "write_kernel_csv",
]

# grid contract: at least this many sigmas covered, phase advance per step
# at most MAX_PHASE_STEP radians, and at least MIN_POINTS nodes per axis
COVER_SIGMAS = 8.0
MAX_PHASE_STEP = 0.3
MIN_POINTS = 64


class GridError(ValueError):
    """A grid fails the sampling contract for the states put on it."""


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sampling grid; x is the particle axis, X the wall axis.

    forced marks a grid requested explicitly by the caller: validation
    violations are then reported as warnings instead of raised.
    """

    x_min: float
    x_max: float
    X_min: float
    X_max: float
    nx: int
    nX: int
    forced: bool = False

    def x_nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def X_nodes(self) -> np.ndarray:
        return np.linspace(self.X_min, self.X_max, self.nX)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dX(self) -> float:
        return (self.X_max - self.X_min) / (self.nX - 1)

    def meshes(self):
        """Broadcastable (x, X) meshes of shape (nX, nx): rows index X."""
        return np.meshgrid(self.x_nodes(), self.X_nodes())


def _axis_points(width: float, k_eff: float, n: int) -> int:
    n = max(int(n), MIN_POINTS)
    if k_eff > 0.0:
        n = max(n, int(math.ceil(width * k_eff / MAX_PHASE_STEP)) + 1)
    return n


def grid_for_state(state, n: int = 512, extent_factor: float = COVER_SIGMAS,
                   force_n: int | None = None) -> GridSpec:
    """Size a grid to a state's envelope and oscillation content.

    Extents are extent_factor standard deviations either side of the state
    center per axis; point counts start at n and grow until the phase
    advances at most MAX_PHASE_STEP per step.  force_n pins both counts
    (marking the grid as forced, so downstream validation only warns).
    """
    sx, sX = state.position_spreads()
    kx, kX = state.phase_wavenumbers()
    cx, cX = state.centers()
    hx = extent_factor * sx
    hX = extent_factor * sX
    if force_n is not None:
        nx = nX = int(force_n)
        forced = True
    else:
        nx = _axis_points(2.0 * hx, kx, n)
        nX = _axis_points(2.0 * hX, kX, n)
        forced = False
    return GridSpec(
        x_min=cx - hx, x_max=cx + hx, X_min=cX - hX, X_max=cX + hX,
        nx=nx, nX=nX, forced=forced,
    )


def validate_grid(grid: GridSpec, state) -> list[str]:
    """List of contract violations of a grid for the given state."""
    problems: list[str] = []
    if grid.nx < MIN_POINTS or grid.nX < MIN_POINTS:
        problems.append(f"point counts ({grid.nx}, {grid.nX}) below minimum {MIN_POINTS}")
    sx, sX = state.position_spreads()
    kx, kX = state.phase_wavenumbers()
    cx, cX = state.centers()
    half = COVER_SIGMAS / 2.0
    if grid.x_min > cx - half * sx or grid.x_max < cx + half * sx:
        problems.append(
            f"x extent [{grid.x_min:g}, {grid.x_max:g}] covers fewer than "
            f"{COVER_SIGMAS:g} standard deviations"
        )
    if grid.X_min > cX - half * sX or grid.X_max < cX + half * sX:
        problems.append(
            f"X extent [{grid.X_min:g}, {grid.X_max:g}] covers fewer than "
            f"{COVER_SIGMAS:g} standard deviations"
        )
    slack = 1.0 + 1e-9
    if grid.dx * kx > MAX_PHASE_STEP * slack:
        problems.append(f"dx*k = {grid.dx * kx:.3g} exceeds {MAX_PHASE_STEP}")
    if grid.dX * kX > MAX_PHASE_STEP * slack:
        problems.append(f"dX*k = {grid.dX * kX:.3g} exceeds {MAX_PHASE_STEP}")
    return problems


def _joint_grid(a, b, n: int) -> GridSpec:
    """Grid adequate for both evaluators; phase content adds conservatively."""
    sax, saX = a.position_spreads()
    sbx, sbX = b.position_spreads()
    kax, kaX = a.phase_wavenumbers()
    kbx, kbX = b.phase_wavenumbers()
    cax, caX = a.centers()
    cbx, cbX = b.centers()
    x_min = min(cax - COVER_SIGMAS * sax, cbx - COVER_SIGMAS * sbx)
    x_max = max(cax + COVER_SIGMAS * sax, cbx + COVER_SIGMAS * sbx)
    X_min = min(caX - COVER_SIGMAS * saX, cbX - COVER_SIGMAS * sbX)
    X_max = max(caX + COVER_SIGMAS * saX, cbX + COVER_SIGMAS * sbX)
    nx = _axis_points(x_max - x_min, kax + kbx, n)
    nX = _axis_points(X_max - X_min, kaX + kbX, n)
    return GridSpec(x_min=x_min, x_max=x_max, X_min=X_min, X_max=X_max, nx=nx, nX=nX)


@dataclass(frozen=True)
class OverlapResult:
    """Quadrature value of an overlap integral with a refinement estimate."""

    value: complex
    error_estimate: float
    method: str
    grid: GridSpec
    warnings: tuple[str, ...] = ()


def _trapezoid_2d(values: np.ndarray, xs: np.ndarray, Xs: np.ndarray) -> complex:
    return complex(np.trapezoid(np.trapezoid(values, x=Xs, axis=0), x=xs))


def quadrature_overlap(a, b, grid: GridSpec | None = None, n: int = 512,
                       method: str = "trapezoid") -> OverlapResult:
    """Tensor-product quadrature of the overlap integral int int a* b dx dX.

    method is "trapezoid" (default; spectral accuracy for smooth decaying
    integrands) or "gauss-legendre".  The error estimate compares against a
    half-resolution evaluation.  A grid that breaks the sampling contract
    raises :class:`GridError` unless it was explicitly forced, in which case
    the violations are attached as warnings.
    """
    if grid is None:
        grid = _joint_grid(a, b, n)
    warnings: list[str] = []
    for state in (a, b):
        if not hasattr(state, "position_spreads"):
            continue
        problems = validate_grid(grid, state)
        if problems:
            if grid.forced:
                warnings.extend(problems)
            else:
                raise GridError("; ".join(problems))

    if method == "trapezoid":
        xs = grid.x_nodes()
        Xs = grid.X_nodes()
        xx, XX = grid.meshes()
        integrand = np.conj(a(xx, XX)) * b(xx, XX)
        full = _trapezoid_2d(integrand, xs, Xs)
        half = _trapezoid_2d(integrand[::2, ::2], xs[::2], Xs[::2])
    elif method == "gauss-legendre":
        full = _gauss_legendre_2d(a, b, grid, grid.nx, grid.nX)
        half = _gauss_legendre_2d(a, b, grid, max(grid.nx // 2, 2), max(grid.nX // 2, 2))
    else:
        raise ValueError(f"unknown quadrature method {method!r}")
    return OverlapResult(
        value=full,
        error_estimate=abs(full - half),
        method=method,
        grid=grid,
        warnings=tuple(warnings),
    )


def _gauss_legendre_2d(a, b, grid: GridSpec, nx: int, nX: int) -> complex:
    tx, wx = np.polynomial.legendre.leggauss(nx)
    tX, wX = np.polynomial.legendre.leggauss(nX)
    xs = 0.5 * (grid.x_max + grid.x_min) + 0.5 * (grid.x_max - grid.x_min) * tx
    Xs = 0.5 * (grid.X_max + grid.X_min) + 0.5 * (grid.X_max - grid.X_min) * tX
    wx = wx * 0.5 * (grid.x_max - grid.x_min)
    wX = wX * 0.5 * (grid.X_max - grid.X_min)
    xx, XX = np.meshgrid(xs, Xs)
    integrand = np.conj(a(xx, XX)) * b(xx, XX)
    return complex(wX @ integrand @ wx)


@dataclass(frozen=True)
class SchmidtResult:
    """Singular values of the sampled state; squares estimate the Schmidt
    spectrum of the continuum wave function."""

    singular_values: np.ndarray
    grid: GridSpec


def schmidt_decompose(state, grid: GridSpec | None = None, n: int = 512) -> SchmidtResult:
    """Schmidt coefficients of a two-body wave function by dense SVD.

    The state is sampled as a matrix (row = wall index, column = particle
    index) and scaled by sqrt(dx dX) so the squared singular values sum to
    the squared norm, 1 for a normalized state.
    """
    if grid is None:
        grid = grid_for_state(state, n=n)
    xx, XX = grid.meshes()
    m = state(xx, XX) * math.sqrt(grid.dx * grid.dX)
    try:
        sv = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"SVD failed on grid {grid}") from exc
    return SchmidtResult(singular_values=sv, grid=grid)


def hermitian_kernel_eigenvalues(kernel_fn, nodes: np.ndarray,
                                 herm_tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues (descending) of a discretized Hermitian integral kernel.

    Builds K[i, j] = kernel_fn(nodes[i], nodes[j]) * dx on a uniform grid.
    A Hermiticity defect beyond herm_tol means the kernel function itself is
    wrong, so that raises rather than being silently symmetrized away.
    """
    nodes = np.asarray(nodes, dtype=float)
    dx = nodes[1] - nodes[0]
    K = kernel_fn(nodes[:, None], nodes[None, :]) * dx
    defect = float(np.abs(K - K.conj().T).max())
    if defect > herm_tol:
        raise RuntimeError(
            f"discretized kernel is not Hermitian (defect {defect:.3e}): kernel bug"
        )
    eigs = np.linalg.eigvalsh(0.5 * (K + K.conj().T))
    return eigs[::-1]


@dataclass(frozen=True)
class KernelEigsResult:
    eigenvalues: np.ndarray
    grid: GridSpec


def kernel_eigensolve(state, grid: GridSpec | None = None, n: int = 512) -> KernelEigsResult:
    """Dense eigensolve of the discretized reduced kernel of a state.

    Uses the closed-form kernel on the grid's particle axis; eigenvalues
    come back sorted descending and should match the squared Schmidt
    coefficients of the same state.
    """
    from .entanglement import reduced_kernel_eval  # deferred: avoids import cycle

    if grid is None:
        grid = grid_for_state(state, n=n)

    def kernel_fn(xp, x):
        return reduced_kernel_eval(state, x=x, x_prime=xp)

    eigs = hermitian_kernel_eigenvalues(kernel_fn, grid.x_nodes())
    return KernelEigsResult(eigenvalues=eigs, grid=grid)


def oscillator_grid(beta: float, u: float, n: int = 512,
                    extent_factor: float = COVER_SIGMAS) -> np.ndarray:
    """Uniform nodes adapted to the oscillator kernel's diagonal width.

    G(x, x) falls off like exp(-2 beta tanh(u/2) x^2), giving an effective
    standard deviation 1/(2 sqrt(beta tanh(u/2))).
    """
    s = 0.5 / math.sqrt(beta * math.tanh(0.5 * u))
    half = extent_factor * s
    return np.linspace(-half, half, n)


def _write_csv(path, metadata: dict, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, val in metadata.items():
            fh.write(f"# {key}={val}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def write_wavefunction_csv(path, grid: GridSpec, psi: np.ndarray,
                           metadata: dict | None = None) -> None:
    """Dump sampled wave function values row-major as x, X, re, im columns."""
    meta = {
        "nx": grid.nx, "nX": grid.nX,
        "x_min": grid.x_min, "x_max": grid.x_max,
        "X_min": grid.X_min, "X_max": grid.X_max,
    }
    if metadata:
        meta.update(metadata)
    xs = grid.x_nodes()
    Xs = grid.X_nodes()
    rows = (
        (xs[j], Xs[i], psi[i, j].real, psi[i, j].imag)
        for i in range(grid.nX)
        for j in range(grid.nx)
    )
    _write_csv(path, meta, ["x", "X", "re", "im"], rows)


def write_kernel_csv(path, nodes: np.ndarray, K: np.ndarray,
                     metadata: dict | None = None) -> None:
    """Dump a discretized kernel matrix row-major as x, x_prime, re, im."""
    meta = {"n": len(nodes), "x_min": nodes[0], "x_max": nodes[-1]}
    if metadata:
        meta.update(metadata)
    n = len(nodes)
    rows = (
        (nodes[i], nodes[j], K[i, j].real, K[i, j].imag)
        for i in range(n)
        for j in range(n)
    )
    _write_csv(path, meta, ["x", "x_prime", "re", "im"], rows)
