"""The dashed-line model and its closed-form connecting orbits.

The model lives on the lattice line through khat = (-3,-2) with direction
p = (1,1); mode n carries the real cosine amplitude at khat + n*p and omega_p
the amplitude at p.  Couplings with chain index divisible by 5 are scaled by
the homotopy parameter epsilon ("dashing"), which at epsilon = 0 isolates the
block n = 1..4 whose connecting orbits are known in closed form:

    omega_p = G tanh(tau),    tau = kappa G t + tau0,
    r  = sqrt(A2/(A2-A1)) G sech(tau),  theta = -(A2/(2 kappa)) ln cosh(tau) + theta0,
    rho = sqrt(-A1/A2) r,     theta + vartheta fixed by the kappa branch,

with omega_1 = r cos(theta), omega_4 = r sin(theta), omega_2 = rho cos(vartheta),
omega_3 = rho sin(vartheta), plus driven auxiliaries omega_0 and omega_5.
The coupling constants A1 = A(p, khat+p) and A2 = A(p, khat+2p) are always
recomputed from coef_A, never hard-coded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NumericError, PreconditionError
from .fourier import coef_A

BASE_POINT = (-3, -2)
DIRECTION = (1, 1)
DASH_PERIOD = 5


def line_mode(n: int) -> tuple[int, int]:
    return (BASE_POINT[0] + n * DIRECTION[0], BASE_POINT[1] + n * DIRECTION[1])


def coupling(n: int) -> float:
    """A_n = A(p, khat + n*p)."""
    return coef_A(DIRECTION, line_mode(n))


def pair_coupling(m: int, n: int) -> float:
    """A_{m,n} = A(khat + m*p, khat + n*p)."""
    return coef_A(line_mode(m), line_mode(n))


def dash_factor(n: int, epsilon: float) -> float:
    return epsilon if n % DASH_PERIOD == 0 else 1.0


@dataclass
class DashedLineParams:
    """Model parameters plus the derived coupling tables.

    sub[i] and sup[i] multiply omega_p*omega[i-1] and omega_p*omega[i+1] in
    the equation for omega at chain index n = i - trunc; pair[i-1] enters the
    omega_p equation through the product omega[i-1]*omega[i].
    """

    gamma: float
    epsilon: float
    trunc: int
    sub: np.ndarray = field(init=False, repr=False)
    sup: np.ndarray = field(init=False, repr=False)
    pair: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.trunc < 1:
            raise PreconditionError("trunc must be >= 1")
        if self.epsilon < 0:
            raise PreconditionError("epsilon must be >= 0")
        nt = self.trunc
        ns = np.arange(-nt, nt + 1)
        self.sub = np.array(
            [dash_factor(n - 1, self.epsilon) * coupling(n - 1) for n in ns])
        self.sup = np.array(
            [dash_factor(n + 1, self.epsilon) * coupling(n + 1) for n in ns])
        self.pair = np.array(
            [dash_factor(n, self.epsilon) * dash_factor(n - 1, self.epsilon)
             * pair_coupling(n - 1, n) for n in ns[1:]])

    @property
    def size(self) -> int:
        return 2 * self.trunc + 1

    def index(self, n: int) -> int:
        if abs(n) > self.trunc:
            raise PreconditionError(f"chain index {n} outside truncation")
        return n + self.trunc


@dataclass
class DashedLineState:
    omega_p: float
    omega: np.ndarray

    def __post_init__(self) -> None:
        self.omega = np.asarray(self.omega, dtype=np.float64)
        if self.omega.ndim != 1 or self.omega.size % 2 == 0:
            raise PreconditionError("omega must be a 1D array of odd length")
        if not (np.isfinite(self.omega_p) and np.all(np.isfinite(self.omega))):
            raise PreconditionError("state must be finite")

    @classmethod
    def zero(cls, trunc: int) -> "DashedLineState":
        return cls(0.0, np.zeros(2 * trunc + 1))

    @classmethod
    def fixed_point(cls, params: DashedLineParams) -> "DashedLineState":
        """The stationary line omega_p = Gamma, omega_n = 0."""
        return cls(params.gamma, np.zeros(params.size))

    def get(self, params: DashedLineParams, n: int) -> float:
        return float(self.omega[params.index(n)])


def model_rhs(state: DashedLineState, params: DashedLineParams) -> DashedLineState:
    """Vector field of the model, Dirichlet beyond the truncation."""
    if state.omega.size != params.size:
        raise PreconditionError("state size does not match params truncation")
    dop, dom = kernels.dashed_rhs(state.omega_p, state.omega,
                                  params.sub, params.sup, params.pair)
    return DashedLineState(dop, dom)


def model_jacobian(state: DashedLineState, params: DashedLineParams) -> np.ndarray:
    """Analytic Jacobian, ordered (omega_p, omega_{-Nt}..omega_{Nt})."""
    L = params.size
    om = state.omega
    op = state.omega_p
    jac = np.zeros((L + 1, L + 1))
    sub, sup, pair = params.sub, params.sup, params.pair
    # d(dot omega_n)/d omega_p and /d omega_m
    for i in range(L):
        lower = om[i - 1] if i >= 1 else 0.0
        upper = om[i + 1] if i + 1 < L else 0.0
        jac[1 + i, 0] = sub[i] * lower - sup[i] * upper
        if i >= 1:
            jac[1 + i, i] = sub[i] * op  # column of omega_{n-1}
        if i + 1 < L:
            jac[1 + i, 2 + i] = -sup[i] * op
    # d(dot omega_p)/d omega_m: -(pair[i-1]*om[i] + pair[i]*om[i+1]) pattern
    for i in range(L):
        acc = 0.0
        if i >= 1:
            acc += pair[i - 1] * om[i - 1]
        if i + 1 < L:
            acc += pair[i] * om[i + 1]
        jac[0, 1 + i] = -acc
    return jac


@dataclass
class Trajectory:
    times: np.ndarray
    omega_p: np.ndarray
    omega: np.ndarray  # shape (n_samples, size)


def integrate(state0: DashedLineState, params: DashedLineParams, dt: float,
              steps: int, sample_every: int = 1) -> Trajectory:
    """Fixed-step RK4; raises NumericError with the step index on blow-up."""
    if dt <= 0:
        raise PreconditionError("dt must be positive")
    if sample_every < 1:
        raise PreconditionError("sample_every must be >= 1")
    if state0.omega.size != params.size:
        raise PreconditionError("state size does not match params truncation")
    op_s, om_s, blow = kernels.dashed_rk4(state0.omega_p, state0.omega,
                                          params.sub, params.sup, params.pair,
                                          dt, steps, sample_every)
    if blow >= 0:
        raise NumericError(f"dashed-line state became non-finite at step {blow}",
                           step=blow)
    times = dt * sample_every * np.arange(op_s.size)
    return Trajectory(times=times, omega_p=op_s, omega=om_s)


# -- closed-form connecting orbits -------------------------------------------


@dataclass(frozen=True)
class HeteroclinicParams:
    tau0: float
    theta0: float
    kappa_sign: int = 1

    def __post_init__(self) -> None:
        if self.kappa_sign not in (-1, 1):
            raise PreconditionError("kappa_sign must be +1 or -1")


def block_couplings() -> tuple[float, float]:
    """(A1, A2) recomputed from the interaction coefficient."""
    return coupling(1), coupling(2)


def kappa_value(sign: int) -> float:
    a1, a2 = block_couplings()
    prod = -a1 * a2
    disc = 1.0 + a2 / (4.0 * a1)
    if prod <= 0 or disc < 0:
        raise PreconditionError("kappa is not real for these couplings")
    return sign * math.sqrt(prod) * math.sqrt(disc)


def phase_sum_constant(sign: int) -> float:
    """The constant value of theta + vartheta on the chosen branch."""
    a1, a2 = block_couplings()
    x = 0.5 * math.sqrt(a2 / (-a1))
    return -math.asin(x) if sign > 0 else math.pi + math.asin(x)


def analytic_heteroclinic(t: float, het: HeteroclinicParams, gamma: float,
                          trunc: int = 10) -> DashedLineState:
    """Closed-form connecting orbit embedded in a truncated state.

    Modes 0..5 follow the explicit formulas (the block plus the two driven
    auxiliaries); every other chain amplitude is zero, which is exact for
    the epsilon = 0 dashing.
    """
    if trunc < 5:
        raise PreconditionError("trunc must be >= 5 to hold the block")
    a1, a2 = block_couplings()
    kap = kappa_value(het.kappa_sign)
    tau = kap * gamma * t + het.tau0
    sech = 1.0 / math.cosh(tau)
    lncosh = math.log(math.cosh(tau))

    beta = -a2 / (2.0 * kap)
    theta = beta * lncosh + het.theta0
    r = math.sqrt(a2 / (a2 - a1)) * gamma * sech
    rho = math.sqrt(-a1 / a2) * r
    vartheta = phase_sum_constant(het.kappa_sign) - theta
    alpha = -a1 * gamma / kap * math.sqrt(a2 / (a2 - a1))
    aux = alpha * beta / (1.0 + beta * beta) * sech
    omega0 = aux * (math.sin(theta) - math.cos(theta) / beta)
    omega5 = aux * (math.cos(theta) + math.sin(theta) / beta)

    state = DashedLineState(gamma * math.tanh(tau), np.zeros(2 * trunc + 1))
    base = trunc  # index of chain position n = 0
    state.omega[base + 0] = omega0
    state.omega[base + 1] = r * math.cos(theta)
    state.omega[base + 2] = rho * math.cos(vartheta)
    state.omega[base + 3] = rho * math.sin(vartheta)
    state.omega[base + 4] = r * math.sin(theta)
    state.omega[base + 5] = omega5
    return state


_STENCILS = {
    3: ([-1, 1], [-0.5, 0.5]),
    5: ([-2, -1, 1, 2], [1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12]),
    7: ([-3, -2, -1, 1, 2, 3],
        [-1.0 / 60, 9.0 / 60, -45.0 / 60, 45.0 / 60, -9.0 / 60, 1.0 / 60]),
}


def orbit_residual(het: HeteroclinicParams, gamma: float,
                   t_samples: np.ndarray, fd_step: float = 1e-4,
                   stencil: int = 5, trunc: int = 10) -> float:
    """Sup defect between the model field and the analytic orbit derivative.

    The time derivative of the closed-form orbit is taken by a central finite
    difference (default 5-point) and compared against model_rhs evaluated on
    the orbit with epsilon = 0.
    """
    if stencil not in _STENCILS:
        raise PreconditionError(f"stencil must be one of {sorted(_STENCILS)}")
    offsets, weights = _STENCILS[stencil]
    params = DashedLineParams(gamma=gamma, epsilon=0.0, trunc=trunc)
    worst = 0.0
    for t in np.asarray(t_samples, dtype=float):
        state = analytic_heteroclinic(t, het, gamma, trunc)
        rhs = model_rhs(state, params)
        fd_p = 0.0
        fd_om = np.zeros(params.size)
        for off, wgt in zip(offsets, weights):
            s = analytic_heteroclinic(t + off * fd_step, het, gamma, trunc)
            fd_p += wgt * s.omega_p
            fd_om += wgt * s.omega
        fd_p /= fd_step
        fd_om /= fd_step
        worst = max(worst,
                    abs(rhs.omega_p - fd_p),
                    float(np.max(np.abs(rhs.omega - fd_om))))
    return worst


def quadratic_invariant(state: DashedLineState) -> float:
    """omega_p^2 + sum omega_n^2, measured (not asserted) along trajectories."""
    return float(state.omega_p ** 2 + np.sum(state.omega ** 2))


def flow_map(params: DashedLineParams, dt: float, steps: int):
    """Time-(dt*steps) flow map with the exact variational RK4 Jacobian.

    Returns (map, jacobian) callables on stacked vectors
    (omega_p, omega_{-Nt}..omega_{Nt}); suitable for the shadowing tools.
    """
    size = params.size

    def unpack(x):
        return DashedLineState(float(x[0]), np.array(x[1:]))

    def rhs_vec(x):
        st = unpack(x)
        d = model_rhs(st, params)
        return np.concatenate(([d.omega_p], d.omega))

    def jac_vec(x):
        return model_jacobian(unpack(x), params)

    def fmap(x):
        y = np.array(x, dtype=float)
        for _ in range(steps):
            k1 = rhs_vec(y)
            k2 = rhs_vec(y + 0.5 * dt * k1)
            k3 = rhs_vec(y + 0.5 * dt * k2)
            k4 = rhs_vec(y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return y

    def fjac(x):
        y = np.array(x, dtype=float)
        jac = np.eye(size + 1)
        for _ in range(steps):
            k1 = rhs_vec(y); a1 = jac_vec(y) @ jac
            k2 = rhs_vec(y + 0.5 * dt * k1); a2 = jac_vec(y + 0.5 * dt * k1) @ (jac + 0.5 * dt * a1)
            k3 = rhs_vec(y + 0.5 * dt * k2); a3 = jac_vec(y + 0.5 * dt * k2) @ (jac + 0.5 * dt * a2)
            k4 = rhs_vec(y + dt * k3); a4 = jac_vec(y + dt * k3) @ (jac + dt * a3)
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            jac = jac + (dt / 6.0) * (a1 + 2 * a2 + 2 * a3 + a4)
        return jac

    return fmap, fjac
