"""Perturbed discrete cubic NLS lattice and the continuum saddle formulas.

The lattice state q_n (n = 0..N-1, h = 1/N) evolves by

    i dq_n/dt = h^-2 (q_{n+1} - 2 q_n + q_{n-1}) + |q_n|^2 (q_{n+1} + q_{n-1})
                - 2 w^2 q_n + i eps [ -alpha q_n + h^-2 (...) + beta ]

with periodic and even (q_{N-n} = q_n) symmetry.  The continuum-regime
closed forms for the uniform saddle and its linearization eigenvalues take
plain scalar parameters since the lattice window N tan(pi/N) < w never
overlaps the continuum window w in (1/2, 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NumericError, PreconditionError


@dataclass
class NLSParams:
    """Lattice parameters; the spectral window is validated by default."""

    N: int
    omega: float
    alpha: float
    beta: float
    epsilon: float
    require_window: bool = True

    def __post_init__(self) -> None:
        if self.N < 3:
            raise PreconditionError("N must be >= 3")
        if self.alpha <= 0 or self.beta <= 0:
            raise PreconditionError("alpha and beta must be positive")
        if self.epsilon < 0:
            raise PreconditionError("epsilon must be >= 0")
        if self.require_window and not self.in_window():
            raise PreconditionError(
                f"omega={self.omega} outside the lattice window {self.window()}")

    def window(self) -> tuple[float, float]:
        lo = self.N * math.tan(math.pi / self.N)
        hi = math.inf if self.N == 3 else self.N * math.tan(2 * math.pi / self.N)
        return lo, hi

    def in_window(self) -> bool:
        lo, hi = self.window()
        return lo < self.omega < hi

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def M(self) -> int:
        """Number of independent modes minus one under evenness."""
        return self.N // 2 if self.N % 2 == 0 else (self.N - 1) // 2

    def max_stable_dt(self) -> float:
        return 0.1 * self.h * self.h


def make_even(q: np.ndarray) -> np.ndarray:
    """Symmetrize under n -> N - n."""
    q = np.asarray(q, dtype=np.complex128)
    refl = np.roll(q[::-1], 1)
    return 0.5 * (q + refl)


def evenness_defect(q: np.ndarray) -> float:
    q = np.asarray(q)
    refl = np.roll(q[::-1], 1)
    return float(np.max(np.abs(q - refl)))


@dataclass
class NLSLatticeState:
    """Even periodic lattice vector; evenness is enforced on construction."""

    q: np.ndarray

    def __post_init__(self) -> None:
        self.q = make_even(self.q)

    @classmethod
    def uniform(cls, N: int, value: complex) -> "NLSLatticeState":
        return cls(np.full(N, value, dtype=np.complex128))

    @classmethod
    def from_even_modes(cls, N: int, amplitudes: dict[int, complex]) -> "NLSLatticeState":
        """State sum_k a_k cos(2 pi k n / N)."""
        n = np.arange(N)
        q = np.zeros(N, dtype=np.complex128)
        for k, a in amplitudes.items():
            q += a * np.cos(2.0 * np.pi * k * n / N)
        return cls(q)

    @property
    def N(self) -> int:
        return self.q.size


def pdnls_rhs(state, params: NLSParams) -> np.ndarray:
    """dq/dt for a state (NLSLatticeState or raw array)."""
    q = state.q if isinstance(state, NLSLatticeState) else np.asarray(state)
    return kernels.pdnls_rhs(q, params.N ** 2, 2.0 * params.omega ** 2,
                             params.alpha, params.beta, params.epsilon)


# -- continuum closed forms ---------------------------------------------------


@dataclass
class SaddleInfo:
    I: float
    theta: float
    eigenvalues: list[tuple[int, complex, complex]] | None = None

    def to_json_dict(self) -> dict:
        out = {"I": self.I, "theta": self.theta}
        if self.eigenvalues is not None:
            out["eigenvalues"] = [
                {"n": n, "plus": [lp.real, lp.imag], "minus": [lm.real, lm.imag]}
                for n, lp, lm in self.eigenvalues]
        return out


def continuum_saddle(omega: float, alpha: float, beta: float,
                     epsilon: float) -> SaddleInfo:
    """Leading-order amplitude and phase of the uniform saddle.

    I = w^2 - eps*(1/(2w))*sqrt(beta^2 - alpha^2 w^2), theta = arccos(alpha
    sqrt(I)/beta) in (0, pi/2).  Requires alpha*w < beta.
    """
    if omega <= 0:
        raise PreconditionError("omega must be positive")
    rad = beta * beta - alpha * alpha * omega * omega
    if rad <= 0:
        raise PreconditionError("continuum saddle needs alpha*omega < beta")
    I = omega * omega - epsilon * math.sqrt(rad) / (2.0 * omega)
    if I <= 0:
        raise PreconditionError("saddle amplitude collapsed (epsilon too large)")
    c = alpha * math.sqrt(I) / beta
    if c >= 1.0:
        raise PreconditionError("phase formula needs alpha*sqrt(I) < beta")
    return SaddleInfo(I=I, theta=math.acos(c))


def mollifier(n: int, n_cut: int, variant: str = "regular") -> float:
    """Damping weight xi_n: mollified above n_cut, or identically 1."""
    if variant == "singular":
        return 1.0
    if variant != "regular":
        raise PreconditionError("variant must be 'regular' or 'singular'")
    return 1.0 if n <= n_cut else 8.0 / (n * n)


def continuum_eigenvalues(n: int, omega: float, alpha: float, epsilon: float,
                          I: float, n_cut: int = 10,
                          variant: str = "regular") -> tuple[complex, complex]:
    """Linearization eigenvalue pair of mode n at the saddle.

    lam_n^+- = -eps*(alpha + xi_n n^2) +- 2*sqrt((n^2/2 + w^2 - I)(3I - w^2 -
    n^2/2)); a negative radicand gives the imaginary pair.
    """
    if n < 0:
        raise PreconditionError("mode index must be >= 0")
    xi = mollifier(n, n_cut, variant) if n > 0 else 1.0
    damp = -epsilon * (alpha + xi * n * n)
    half_nsq = 0.5 * n * n
    rad = (half_nsq + omega * omega - I) * (3.0 * I - omega * omega - half_nsq)
    root = 2.0 * cmath.sqrt(rad)
    return (damp + root, damp - root)


def eigenvalue_table(omega: float, alpha: float, beta: float, epsilon: float,
                     n_max: int = 6, n_cut: int = 10,
                     variant: str = "regular") -> tuple[SaddleInfo, list]:
    """Saddle data plus (n, lam+, lam-) for n = 0..n_max."""
    info = continuum_saddle(omega, alpha, beta, epsilon)
    table = []
    for n in range(n_max + 1):
        lp, lm = continuum_eigenvalues(n, omega, alpha, epsilon, info.I,
                                       n_cut=n_cut, variant=variant)
        table.append((n, lp, lm))
    info.eigenvalues = table
    return info, table


@dataclass
class SilnikovReport:
    two_unstable: bool
    mode2_slowest_decay: bool
    silnikov_inequality: bool

    def all_hold(self) -> bool:
        return self.two_unstable and self.mode2_slowest_decay and self.silnikov_inequality


def silnikov_check(tagged_eigs, tol: float = 1e-12) -> SilnikovReport:
    """Saddle-type ordering flags on mode-tagged eigenvalues.

    ``tagged_eigs`` is an iterable of (mode_index, eigenvalue) pairs.  Checks:
    exactly two eigenvalues with positive real part; |Re| of the mode-2
    eigenvalues is smallest among the decaying ones; that value is below the
    positive mode-0 rate.
    """
    entries = [(int(n), complex(z)) for n, z in tagged_eigs]
    pos = [z for _, z in entries if z.real > 0]
    neg = [z for _, z in entries if z.real < 0]
    two_unstable = len(pos) == 2

    neg2 = [abs(z.real) for n, z in entries if n == 2 and z.real < 0]
    mode2_slowest = bool(neg2) and min(abs(z.real) for z in neg) >= min(neg2) - tol

    pos0 = [z.real for n, z in entries if n == 0 and z.real > 0]
    inequality = bool(neg2) and bool(pos0) and min(neg2) < max(pos0)
    return SilnikovReport(two_unstable, mode2_slowest, inequality)


# -- discrete saddle and linearization ---------------------------------------


def _saddle_residual(Q: complex, p: NLSParams) -> complex:
    return (-2j * (abs(Q) ** 2 - p.omega ** 2) * Q
            + p.epsilon * (-p.alpha * Q + p.beta))


def solve_uniform_saddle(p: NLSParams, tol: float = 1e-13,
                         max_iter: int = 60) -> complex:
    """Uniform fixed point q_n = Q = R e^{i theta} by a 2D real Newton.

    Writing the fixed-point condition in amplitude and phase gives

        beta cos(theta) = alpha R,    2 (w^2 - R^2) R = eps beta sin(theta),

    which stays well conditioned through the epsilon -> 0 circle degeneracy
    and pins the theta in (0, pi/2) branch, the limit of the perturbed phase
    condition.  The Cartesian residual is verified before returning.
    """
    c = p.alpha * p.omega / p.beta
    if c >= 1.0:
        raise PreconditionError("saddle needs alpha*omega < beta")
    r, th = p.omega, math.acos(c)
    for _ in range(max_iter):
        h = np.array([p.beta * math.cos(th) - p.alpha * r,
                      2.0 * (p.omega ** 2 - r * r) * r
                      - p.epsilon * p.beta * math.sin(th)])
        jac = np.array([
            [-p.alpha, -p.beta * math.sin(th)],
            [2.0 * p.omega ** 2 - 6.0 * r * r, -p.epsilon * p.beta * math.cos(th)],
        ])
        try:
            dx = np.linalg.solve(jac, -h)
        except np.linalg.LinAlgError as exc:
            raise NumericError("saddle Newton hit a singular Jacobian",
                               last_iterate=r * cmath.exp(1j * th)) from exc
        r, th = r + dx[0], th + dx[1]
        if np.max(np.abs(dx)) < tol * max(1.0, r):
            Q = r * cmath.exp(1j * th)
            if not (0.0 < th < 0.5 * math.pi):
                raise NumericError("saddle Newton left the (0, pi/2) phase branch",
                                   last_iterate=Q)
            if abs(_saddle_residual(Q, p)) > 1e4 * tol * max(1.0, abs(Q)):
                raise NumericError("saddle residual check failed", last_iterate=Q)
            return Q
    raise NumericError("saddle Newton did not converge",
                       last_iterate=r * cmath.exp(1j * th))


def pdnls_jacobian_full(q: np.ndarray, p: NLSParams) -> np.ndarray:
    """Analytic 2N x 2N real Jacobian of the lattice vector field."""
    N = p.N
    q = np.asarray(q, dtype=np.complex128)
    h2 = float(N * N)
    lap = np.zeros((N, N), dtype=np.complex128)
    idx = np.arange(N)
    lap[idx, idx] = -2.0
    lap[idx, (idx + 1) % N] = 1.0
    lap[idx, (idx - 1) % N] = 1.0

    neigh = np.roll(q, -1) + np.roll(q, 1)
    a = np.zeros((N, N), dtype=np.complex128)  # d rhs / d q
    a += -1j * h2 * lap + p.epsilon * h2 * lap
    a[idx, idx] += -1j * (np.conj(q) * neigh - 2.0 * p.omega ** 2) - p.epsilon * p.alpha
    hop = -1j * (np.abs(q) ** 2)
    a[idx, (idx + 1) % N] += hop
    a[idx, (idx - 1) % N] += hop
    b = np.zeros((N, N), dtype=np.complex128)  # d rhs / d conj(q)
    b[idx, idx] = -1j * q * neigh

    apb, amb = a + b, a - b
    top = np.hstack([apb.real, -amb.imag])
    bot = np.hstack([apb.imag, amb.real])
    return np.vstack([top, bot])


def even_sector_basis(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Embedding E and restriction P between the even sector and the lattice.

    The even sector stacks (Re q_0..Re q_M, Im q_0..Im q_M); the half-period
    translation symmetry of the full lattice doubles interior modes, so
    saddle-type counts are taken in this sector.
    """
    M = N // 2 if N % 2 == 0 else (N - 1) // 2
    dim_red, dim_full = M + 1, N
    E1 = np.zeros((dim_full, dim_red))
    for n in range(N):
        src = n if n <= M else N - n
        E1[n, src] = 1.0
    P1 = np.zeros((dim_red, dim_full))
    for m in range(dim_red):
        P1[m, m] = 1.0
    Z = np.zeros_like(E1)
    E = np.block([[E1, Z], [Z, E1]])
    Zp = np.zeros_like(P1)
    P = np.block([[P1, Zp], [Zp, P1]])
    return E, P


@dataclass
class DiscreteSaddle:
    """Uniform saddle with both linearization views.

    ``eigenvalues`` (and ``unstable_count``) refer to the even sector, the
    phase space of the symmetric system; the full-lattice Jacobian carries
    one extra unstable direction per interior unstable mode (its odd-parity
    translate) and is kept for completeness.
    """

    Q: complex
    state: NLSLatticeState
    jacobian_even: np.ndarray
    eigenvalues: np.ndarray
    jacobian_full: np.ndarray
    eigenvalues_full: np.ndarray

    def unstable_count(self, tol: float = 1e-4) -> int:
        return int(np.sum(self.eigenvalues.real > tol))


def discrete_saddle(p: NLSParams) -> DiscreteSaddle:
    """Uniform saddle of the lattice with its linearization spectra."""
    Q = solve_uniform_saddle(p)
    q = np.full(p.N, Q, dtype=np.complex128)
    jac_full = pdnls_jacobian_full(q, p)
    E, P = even_sector_basis(p.N)
    jac_even = P @ jac_full @ E
    return DiscreteSaddle(Q=Q, state=NLSLatticeState(q),
                          jacobian_even=jac_even,
                          eigenvalues=np.linalg.eigvals(jac_even),
                          jacobian_full=jac_full,
                          eigenvalues_full=np.linalg.eigvals(jac_full))


# -- simulation ----------------------------------------------------------------


@dataclass
class NLSTrajectory:
    times: np.ndarray
    samples: np.ndarray  # (n_samples, N) complex


def simulate(state0: NLSLatticeState, p: NLSParams, dt: float, steps: int,
             sample_every: int = 1, enforce_dt_bound: bool = True) -> NLSTrajectory:
    """Fixed-step RK4 lattice trajectory.

    The explicit step bound dt <= 0.1 h^2 guards the stiff lattice Laplacian;
    blow-up raises NumericError with the failing step index.
    """
    if dt <= 0:
        raise PreconditionError("dt must be positive")
    if enforce_dt_bound and dt > p.max_stable_dt() * (1 + 1e-12):
        raise PreconditionError(
            f"dt={dt} above the stability bound 0.1*h^2={p.max_stable_dt():.3e}")
    if state0.N != p.N:
        raise PreconditionError("state size does not match params")
    samples, blow = kernels.pdnls_rk4(state0.q, p.N ** 2, 2.0 * p.omega ** 2,
                                      p.alpha, p.beta, p.epsilon,
                                      dt, steps, sample_every)
    if blow >= 0:
        raise NumericError(f"lattice state blew up at step {blow}", step=blow)
    times = dt * sample_every * np.arange(samples.shape[0])
    return NLSTrajectory(times=times, samples=samples)


def flow_map(p: NLSParams, dt: float, steps: int):
    """Stroboscopic (time dt*steps) map on stacked real vectors, with the
    variational-RK4 Jacobian; for use with the shadowing tools."""
    N = p.N

    def to_c(x):
        return x[:N] + 1j * x[N:]

    def to_r(q):
        return np.concatenate([q.real, q.imag])

    def rhs_r(x):
        return to_r(pdnls_rhs(to_c(x), p))

    def jac_r(x):
        return pdnls_jacobian_full(to_c(x), p)

    def fmap(x):
        y = np.array(x, dtype=float)
        for _ in range(steps):
            k1 = rhs_r(y)
            k2 = rhs_r(y + 0.5 * dt * k1)
            k3 = rhs_r(y + 0.5 * dt * k2)
            k4 = rhs_r(y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return y

    def fjac(x):
        y = np.array(x, dtype=float)
        jac = np.eye(2 * N)
        for _ in range(steps):
            k1 = rhs_r(y); a1 = jac_r(y) @ jac
            k2 = rhs_r(y + 0.5 * dt * k1); a2 = jac_r(y + 0.5 * dt * k1) @ (jac + 0.5 * dt * a1)
            k3 = rhs_r(y + 0.5 * dt * k2); a3 = jac_r(y + 0.5 * dt * k2) @ (jac + 0.5 * dt * a2)
            k4 = rhs_r(y + dt * k3); a4 = jac_r(y + dt * k3) @ (jac + dt * a3)
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            jac = jac + (dt / 6.0) * (a1 + 2 * a2 + 2 * a3 + a4)
        return jac

    return fmap, fjac


# -- symbol extraction ----------------------------------------------------------


def half_period_translate(samples: np.ndarray) -> np.ndarray:
    """Shift every profile by half the spatial period (even N only)."""
    samples = np.atleast_2d(samples)
    N = samples.shape[1]
    if N % 2 != 0:
        raise PreconditionError("half-period translation needs even N")
    return np.roll(samples, N // 2, axis=1)


def classify_profile(q: np.ndarray, flat_tol: float = 1e-12) -> str:
    """'C' for a hump at the center, 'W' at the boundary, '?' if ambiguous.

    All sites attaining the exact maximum are classified by their circular
    distance to the center N/2 versus the boundary 0; disagreement among the
    maximizing sites, exact ties, or a flat profile give '?'.  The rule
    commutes exactly with the half-period translation (classes swap).
    """
    u = np.abs(np.asarray(q))
    mx = float(u.max())
    if mx <= 0.0 or (mx - float(u.min())) <= flat_tol * mx:
        return "?"
    N = u.size
    labels = set()
    for i in np.flatnonzero(u == mx):
        dc = min((i - N / 2.0) % N, (N / 2.0 - i) % N)
        dw = min(i % N, (-i) % N)
        if dc < dw:
            labels.add("C")
        elif dw < dc:
            labels.add("W")
        else:
            labels.add("?")
    return labels.pop() if len(labels) == 1 else "?"


@dataclass
class CenterWingEncoding:
    per_sample: str
    symbols: str
    n_ambiguous: int


def center_wing_encode(samples: np.ndarray, min_run: int = 5) -> CenterWingEncoding:
    """Two-symbol encoding of hump jumping with hysteresis compression.

    A symbol is emitted only when the hump basin changes and the new basin
    persists for at least ``min_run`` consecutive unambiguous samples;
    ambiguous samples break the candidate run and are excluded from the
    statistics.
    """
    if min_run < 1:
        raise PreconditionError("min_run must be >= 1")
    per = "".join(classify_profile(q) for q in np.atleast_2d(samples))
    emitted = []
    current: str | None = None
    cand: str | None = None
    run = 0
    for ch in per:
        if ch == "?" or ch == current:
            cand, run = None, 0
            continue
        if ch == cand:
            run += 1
        else:
            cand, run = ch, 1
        if run >= min_run:
            emitted.append(ch)
            current = ch
            cand, run = None, 0
    return CenterWingEncoding(per_sample=per, symbols="".join(emitted),
                              n_ambiguous=per.count("?"))


def swap_symbols(s: str) -> str:
    return s.translate(str.maketrans("CW", "WC"))


def second_measurement(alpha: float, omega: float, delta_gamma: float) -> float:
    """Right-hand side of the phase-matching zero condition,
    alpha*omega*dg / (2*sin(dg/2)); poles at dg = 2*pi*k."""
    s = math.sin(0.5 * delta_gamma)
    if abs(s) < 1e-12:
        raise PreconditionError("delta_gamma at a pole (multiple of 2*pi)")
    return alpha * omega * delta_gamma / (2.0 * s)
