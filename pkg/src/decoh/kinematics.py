"""Two-body kinematics of an elastic particle-wall collision.

A light particle (mass m, coordinate x) bounces off a heavy but fully
quantum wall (mass M, coordinate X).  Both start in Gaussian packets,

    Psi_I(x, X) = sqrt(N) exp(-X^2/4Sigma^2) exp(-x^2/4sigma^2 + i k x),

with N = 1/(2 pi sigma Sigma).  A hard-wall elastic collision reverses the
relative coordinate u = x - X while leaving the center of mass
R = (m x + M X)/(M + m) untouched, which entangles the two coordinates:

    Psi_F(x, X) = sqrt(N) exp{-Omega [X(1-2d) + 2d x]^2
                              -omega [x(1-2g) + 2g X]^2
                              + i k [x(1-2g) + 2g X]},

with Omega = 1/4Sigma^2, omega = 1/4sigma^2 and mass fractions
d = m/(M+m), g = M/(M+m).  Natural units, hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CollisionParams",
    "ComCoordinates",
    "GaussianProductState",
    "PostCollisionState",
    "IdealReflectedState",
    "collision_params",
    "collision_params_from_delta",
    "com_transform",
    "com_inverse",
    "initial_state",
    "post_collision_state",
    "ideal_reflected_state",
]


@dataclass(frozen=True)
class CollisionParams:
    """Masses of the particle-wall pair and the derived mass fractions.

    delta = m/(M+m) and gamma = M/(M+m) add to 1 by construction.
    """

    m: float
    M: float
    total_mass: float
    delta: float
    gamma: float


def collision_params(m: float, M: float) -> CollisionParams:
    """Build :class:`CollisionParams` from the two masses.

    Raises ValueError for non-positive or non-finite masses.  m > M is
    allowed; nothing below assumes the wall is the heavier body.
    """
    m = float(m)
    M = float(M)
    if not (np.isfinite(m) and m > 0.0):
        raise ValueError(f"particle mass must be positive and finite, got {m}")
    if not (np.isfinite(M) and M > 0.0):
        raise ValueError(f"wall mass must be positive and finite, got {M}")
    total = m + M
    return CollisionParams(m=m, M=M, total_mass=total, delta=m / total, gamma=M / total)


def collision_params_from_delta(delta: float) -> CollisionParams:
    """Params with a prescribed mass fraction delta, using total mass 1."""
    delta = float(delta)
    if not (0.0 < delta < 1.0):
        raise ValueError(f"mass fraction must lie in (0, 1), got {delta}")
    return collision_params(delta, 1.0 - delta)


@dataclass(frozen=True)
class ComCoordinates:
    """Center of mass R and relative coordinate u = x - X."""

    R: float | np.ndarray
    u: float | np.ndarray


def com_transform(x, X, p: CollisionParams) -> ComCoordinates:
    """Map lab coordinates (x, X) to (R, u).  Accepts broadcastable arrays."""
    return ComCoordinates(R=p.delta * x + p.gamma * X, u=x - X)


def com_inverse(coords: ComCoordinates, p: CollisionParams):
    """Invert :func:`com_transform`; returns (x, X)."""
    x = coords.R + p.gamma * coords.u
    X = coords.R - p.delta * coords.u
    return x, X


def _check_spreads(Sigma: float, sigma: float) -> tuple[float, float]:
    Sigma = float(Sigma)
    sigma = float(sigma)
    if not (np.isfinite(Sigma) and Sigma > 0.0):
        raise ValueError(f"wall spread must be positive and finite, got {Sigma}")
    if not (np.isfinite(sigma) and sigma > 0.0):
        raise ValueError(f"particle spread must be positive and finite, got {sigma}")
    return Sigma, sigma


@dataclass(frozen=True)
class GaussianProductState:
    """Pre-collision product state Gamma(X) Phi(x).

    Sigma and sigma are the position spreads of wall and particle, k is the
    particle wavenumber, norm is N = 1/(2 pi sigma Sigma) so that
    |Psi|^2 integrates to 1 over the plane.
    """

    Sigma: float
    sigma: float
    k: float
    norm: float

    def __call__(self, x, X) -> np.ndarray:
        env = -(X * X) / (4.0 * self.Sigma**2) - (x * x) / (4.0 * self.sigma**2)
        return np.sqrt(self.norm) * np.exp(env + 1j * self.k * x)

    # metadata used by the numeric oracles when sizing grids
    def position_spreads(self) -> tuple[float, float]:
        return self.sigma, self.Sigma

    def phase_wavenumbers(self) -> tuple[float, float]:
        return abs(self.k), 0.0

    def centers(self) -> tuple[float, float]:
        return 0.0, 0.0


def initial_state(Sigma: float, sigma: float, k: float = 0.0) -> GaussianProductState:
    """Centered Gaussian product state with wall/particle spreads and momentum k."""
    Sigma, sigma = _check_spreads(Sigma, sigma)
    return GaussianProductState(
        Sigma=Sigma, sigma=sigma, k=float(k), norm=1.0 / (2.0 * np.pi * sigma * Sigma)
    )


@dataclass(frozen=True)
class PostCollisionState:
    """Wave function after the elastic bounce, parameterized as in the module
    docstring.  Omega = 1/4Sigma^2 and omega = 1/4sigma^2 carry the spreads;
    norm is N = (2/pi) sqrt(Omega omega), identical to the initial norm.
    """

    Omega: float
    omega: float
    delta: float
    gamma: float
    k: float
    norm: float

    @property
    def Sigma(self) -> float:
        return 0.5 / np.sqrt(self.Omega)

    @property
    def sigma(self) -> float:
        return 0.5 / np.sqrt(self.omega)

    def wall_argument(self, x, X):
        """Argument of the wall factor, X(1-2 delta) + 2 delta x."""
        return X * (1.0 - 2.0 * self.delta) + 2.0 * self.delta * x

    def particle_argument(self, x, X):
        """Argument of the particle factor, x(1-2 gamma) + 2 gamma X."""
        return x * (1.0 - 2.0 * self.gamma) + 2.0 * self.gamma * X

    def __call__(self, x, X) -> np.ndarray:
        a = self.wall_argument(x, X)
        b = self.particle_argument(x, X)
        return np.sqrt(self.norm) * np.exp(
            -self.Omega * a * a - self.omega * b * b + 1j * self.k * b
        )

    def covariance(self) -> np.ndarray:
        """Position covariance matrix of |Psi_F|^2 in (x, X)."""
        p_vec = np.array([2.0 * self.delta, 1.0 - 2.0 * self.delta])
        q_vec = np.array([1.0 - 2.0 * self.gamma, 2.0 * self.gamma])
        S = 2.0 * self.Omega * np.outer(p_vec, p_vec) + 2.0 * self.omega * np.outer(q_vec, q_vec)
        return np.linalg.inv(S) / 2.0

    def position_spreads(self) -> tuple[float, float]:
        cov = self.covariance()
        return float(np.sqrt(cov[0, 0])), float(np.sqrt(cov[1, 1]))

    def phase_wavenumbers(self) -> tuple[float, float]:
        return abs(self.k * (1.0 - 2.0 * self.gamma)), abs(2.0 * self.gamma * self.k)

    def centers(self) -> tuple[float, float]:
        return 0.0, 0.0


def post_collision_state(s: GaussianProductState, p: CollisionParams) -> PostCollisionState:
    """Entangled state after the collision (relative coordinate reversed)."""
    Omega = 1.0 / (4.0 * s.Sigma**2)
    omega = 1.0 / (4.0 * s.sigma**2)
    return PostCollisionState(
        Omega=Omega,
        omega=omega,
        delta=p.delta,
        gamma=p.gamma,
        k=s.k,
        norm=(2.0 / np.pi) * np.sqrt(Omega * omega),
    )


@dataclass(frozen=True)
class IdealReflectedState:
    """Fixed-wall idealization Gamma(X) Phi(-x).

    This is what the outgoing wave would be if the wall were a static
    potential instead of a dynamical body: the particle packet is mirrored,
    the wall factor untouched.
    """

    Sigma: float
    sigma: float
    k: float
    norm: float

    def __call__(self, x, X) -> np.ndarray:
        env = -(X * X) / (4.0 * self.Sigma**2) - (x * x) / (4.0 * self.sigma**2)
        return np.sqrt(self.norm) * np.exp(env - 1j * self.k * x)

    def position_spreads(self) -> tuple[float, float]:
        return self.sigma, self.Sigma

    def phase_wavenumbers(self) -> tuple[float, float]:
        return abs(self.k), 0.0

    def centers(self) -> tuple[float, float]:
        return 0.0, 0.0


def ideal_reflected_state(s: GaussianProductState) -> IdealReflectedState:
    """Mirror the particle factor of a product state; norm is preserved."""
    return IdealReflectedState(Sigma=s.Sigma, sigma=s.sigma, k=s.k, norm=s.norm)
