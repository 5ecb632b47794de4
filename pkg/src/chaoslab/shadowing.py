"""Pseudo-orbits, segment assembly, shadow solving, and shift machinery.

Maps are supplied as plain callables so the same tools serve synthetic test
maps, the dashed-line flow map, and the lattice stroboscopic map.  All
distances between states are sup-norms over components, and all claims are
made on finite windows: doubly infinite symbol sequences are represented by
a finite window plus a declared extension rule, and hyperbolicity data are
finite-time surrogates, never certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Callable

import numpy as np

from .errors import NumericError, PreconditionError


@dataclass
class MapSystem:
    dimension: int
    map: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None

    def iterate(self, x: np.ndarray, n: int) -> np.ndarray:
        y = np.asarray(x, dtype=float)
        for _ in range(n):
            y = self.map(y)
        return y

    def orbit(self, x: np.ndarray, length: int) -> np.ndarray:
        out = np.empty((length, self.dimension))
        y = np.asarray(x, dtype=float)
        out[0] = y
        for j in range(1, length):
            y = self.map(y)
            out[j] = y
        return out

    def validate_jacobian(self, points, rtol: float = 1e-5,
                          fd_step: float = 1e-6) -> float:
        """Worst relative mismatch between the Jacobian and finite differences."""
        if self.jacobian is None:
            raise PreconditionError("system has no jacobian")
        worst = 0.0
        for x in points:
            x = np.asarray(x, dtype=float)
            jac = self.jacobian(x)
            fd = np.empty_like(jac)
            for j in range(self.dimension):
                e = np.zeros(self.dimension)
                e[j] = fd_step
                fd[:, j] = (self.map(x + e) - self.map(x - e)) / (2 * fd_step)
            scale = max(np.max(np.abs(jac)), 1e-30)
            worst = max(worst, float(np.max(np.abs(jac - fd)) / scale))
        if worst > rtol:
            raise PreconditionError(
                f"jacobian mismatches finite differences by {worst:.2e}")
        return worst


def linear_map_system(matrix: np.ndarray) -> MapSystem:
    """The linear test map x -> M x."""
    m = np.asarray(matrix, dtype=float)
    return MapSystem(dimension=m.shape[0], map=lambda x: m @ x,
                     jacobian=lambda x: m)


def rk4_flow_system(rhs, jacobian, dimension: int, dt: float,
                    steps: int) -> MapSystem:
    """Time-(dt*steps) map of a smooth flow as a MapSystem.

    The Jacobian is the exact derivative of the numerical map (variational
    RK4 with the same stages), so validate_jacobian holds to roundoff.
    """

    def fmap(x):
        y = np.array(x, dtype=float)
        for _ in range(steps):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * dt * k1)
            k3 = rhs(y + 0.5 * dt * k2)
            k4 = rhs(y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return y

    def fjac(x):
        y = np.array(x, dtype=float)
        jac = np.eye(dimension)
        for _ in range(steps):
            k1 = rhs(y); a1 = jacobian(y) @ jac
            y2 = y + 0.5 * dt * k1
            k2 = rhs(y2); a2 = jacobian(y2) @ (jac + 0.5 * dt * a1)
            y3 = y + 0.5 * dt * k2
            k3 = rhs(y3); a3 = jacobian(y3) @ (jac + 0.5 * dt * a2)
            y4 = y + dt * k3
            k4 = rhs(y4); a4 = jacobian(y4) @ (jac + dt * a3)
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            jac = jac + (dt / 6.0) * (a1 + 2 * a2 + 2 * a3 + a4)
        return jac

    return MapSystem(dimension=dimension, map=fmap, jacobian=fjac)


def step_defects(points: np.ndarray, system: MapSystem) -> np.ndarray:
    """Sup-norm gaps |y_{j+1} - f(y_j)| along a candidate pseudo-orbit."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 2:
        raise PreconditionError("need at least two points")
    gaps = np.empty(points.shape[0] - 1)
    for j in range(points.shape[0] - 1):
        gaps[j] = np.max(np.abs(points[j + 1] - system.map(points[j])))
    return gaps


def is_pseudo_orbit(points: np.ndarray, system: MapSystem,
                    delta: float) -> tuple[bool, float]:
    """(within delta, max defect) for a finite window of states."""
    defect = float(step_defects(points, system).max())
    return defect <= delta, defect


@dataclass
class PseudoOrbit:
    points: np.ndarray
    delta: float

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] < 2:
            raise PreconditionError("a pseudo-orbit needs at least two points")
        if self.delta < 0:
            raise PreconditionError("delta must be >= 0")

    @classmethod
    def verified(cls, points: np.ndarray, system: MapSystem,
                 delta: float | None = None) -> "PseudoOrbit":
        """Construct with the defect bound checked (or measured)."""
        defect = float(step_defects(points, system).max())
        if delta is None:
            delta = defect
        elif defect > delta:
            raise PreconditionError(
                f"measured defect {defect:.3e} exceeds declared delta {delta:.3e}")
        return cls(np.asarray(points, dtype=float), delta)

    def __len__(self) -> int:
        return self.points.shape[0]


def shadow_distance(orbit_start: np.ndarray, pseudo: PseudoOrbit,
                    system: MapSystem) -> float:
    """sup_j |f^j(x) - y_j| over the pseudo-orbit window."""
    x = np.asarray(orbit_start, dtype=float)
    worst = 0.0
    for j in range(len(pseudo)):
        if j > 0:
            x = system.map(x)
        worst = max(worst, float(np.max(np.abs(x - pseudo.points[j]))))
    return worst


def palmer_assembly(x0: np.ndarray, y_segment: np.ndarray, word,
                    system: MapSystem) -> PseudoOrbit:
    """Concatenate saddle and homoclinic-segment blocks along a binary word.

    Block 0 repeats the saddle x0 2m+1 times; block 1 is the provided true
    orbit segment of odd length 2m+1 centered on the homoclinic point.  The
    measured defect comes entirely from the block joints and shrinks as the
    segment endpoints approach the saddle.
    """
    x0 = np.asarray(x0, dtype=float)
    seg = np.asarray(y_segment, dtype=float)
    if seg.ndim != 2 or seg.shape[0] % 2 == 0:
        raise PreconditionError("segment must contain an odd number of states")
    letters = [int(ch) for ch in (word.window if isinstance(word, SymbolSequence) else word)]
    if not letters or any(ch not in (0, 1) for ch in letters):
        raise PreconditionError("word must be a nonempty binary sequence")
    block0 = np.tile(x0, (seg.shape[0], 1))
    blocks = [block0 if a == 0 else seg for a in letters]
    points = np.vstack(blocks)
    defect = float(step_defects(points, system).max())
    return PseudoOrbit(points=points, delta=defect)


@dataclass
class ShadowResult:
    orbit: np.ndarray
    start: np.ndarray
    epsilon: float
    residual_history: list[float]


def find_shadow(pseudo: PseudoOrbit, system: MapSystem, tol: float = 1e-12,
                max_iter: int = 60) -> ShadowResult:
    """Newton solve of the stacked orbit equations x_{j+1} = f(x_j).

    The linearized system is underdetermined by one copy of the state space;
    each Newton step takes the minimum-norm least-squares correction, so the
    solver selects the true orbit nearest the pseudo-orbit in the stacked
    2-norm.  Raises NumericError with the residual history on stagnation.
    """
    if system.jacobian is None:
        raise PreconditionError("find_shadow needs a jacobian")
    L, d = pseudo.points.shape
    x = pseudo.points.copy()
    history: list[float] = []
    scale = max(1.0, float(np.max(np.abs(pseudo.points))))
    for _ in range(max_iter):
        fx = np.empty((L - 1, d))
        for j in range(L - 1):
            fx[j] = system.map(x[j])
        res = x[1:] - fx
        rnorm = float(np.max(np.abs(res)))
        history.append(rnorm)
        if rnorm < tol * scale:
            eps = float(np.max(np.abs(x - pseudo.points)))
            return ShadowResult(orbit=x, start=x[0].copy(), epsilon=eps,
                                residual_history=history)
        if len(history) > 3 and rnorm > 0.5 * history[-3]:
            raise NumericError("shadow Newton stagnated", history=history)
        jac = np.zeros(((L - 1) * d, L * d))
        for j in range(L - 1):
            jac[j * d:(j + 1) * d, (j + 1) * d:(j + 2) * d] = np.eye(d)
            jac[j * d:(j + 1) * d, j * d:(j + 1) * d] = -system.jacobian(x[j])
        step, *_ = np.linalg.lstsq(jac, -res.ravel(), rcond=None)
        x = x + step.reshape(L, d)
    raise NumericError("shadow Newton did not converge", history=history)


# -- symbol sequences -----------------------------------------------------------


@dataclass(frozen=True)
class SymbolSequence:
    """Finite window of a doubly infinite sequence with an extension rule.

    ``window[i]`` is the symbol at index ``start + i``; outside the window
    the sequence continues by the nearest window value ("constant") or
    periodically ("periodic").
    """

    window: tuple
    start: int = 0
    extension: str = "constant"

    def __post_init__(self) -> None:
        if len(self.window) == 0:
            raise PreconditionError("window must be nonempty")
        if self.extension not in ("constant", "periodic"):
            raise PreconditionError("extension must be 'constant' or 'periodic'")

    @classmethod
    def from_word(cls, word: str, start: int = 0,
                  extension: str = "constant") -> "SymbolSequence":
        return cls(tuple(word), start, extension)

    def value_at(self, k: int):
        i = k - self.start
        n = len(self.window)
        if self.extension == "periodic":
            return self.window[i % n]
        return self.window[min(max(i, 0), n - 1)]


def shift_map(seq: SymbolSequence) -> SymbolSequence:
    """The shift b_k = a_{k+1}."""
    return SymbolSequence(seq.window, seq.start - 1, seq.extension)


def _comparison_reach(a: SymbolSequence, b: SymbolSequence) -> int:
    pa = len(a.window) if a.extension == "periodic" else 1
    pb = len(b.window) if b.extension == "periodic" else 1
    lcm = pa * pb // gcd(pa, pb)
    reach = max(abs(a.start) + len(a.window), abs(b.start) + len(b.window))
    return reach + min(lcm, 4096) + 1


def cylinder_distance(a: SymbolSequence, b: SymbolSequence) -> float:
    """2^{-j*} with j* the largest j such that the sequences agree on |k| < j.

    Returns 0.0 when they agree everywhere (decidable from the windows and
    extension rules).
    """
    reach = _comparison_reach(a, b)
    if a.value_at(0) != b.value_at(0):
        return 1.0
    for j in range(1, reach + 1):
        if a.value_at(j) != b.value_at(j) or a.value_at(-j) != b.value_at(-j):
            return 2.0 ** (-j)
    return 0.0


# -- finite-time dichotomy surrogates -------------------------------------------


@dataclass
class DichotomyReport:
    rates: np.ndarray                 # per-step exponents, full-window average
    tail_rates: np.ndarray            # second-half average; alignment transient
                                      # telescopes away, so these converge
                                      # exponentially on saturated products
    expansion_rate: float
    contraction_rate: float
    bound_surrogate: float            # K: transient bulge above the fitted rates
    angle_min: float                  # smallest principal angle between subspaces
    hyperbolic: bool
    details: dict = field(default_factory=dict)


def _qr_exponents(jacs: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Lyapunov exponents by repeated orthonormalization.

    Returns (rates, cumulative log diagonals) for the product J_{L-1}...J_0.
    """
    d = jacs[0].shape[0]
    q = np.eye(d)
    logs = np.zeros((len(jacs), d))
    for j, jac in enumerate(jacs):
        q, r = np.linalg.qr(jac @ q)
        diag = np.abs(np.diag(r))
        diag = np.where(diag > 0, diag, 1e-300)
        signs = np.sign(np.diag(r))
        q = q * np.where(signs == 0, 1.0, signs)[None, :]
        logs[j] = np.log(diag)
    return logs.sum(axis=0) / len(jacs), logs


def hyperbolicity_estimate(orbit: np.ndarray, system: MapSystem,
                           rate_tol: float = 1e-3) -> DichotomyReport:
    """Finite-time expansion/contraction rates and subspace separation.

    Forward QR along the orbit estimates the most-expanding directions;
    the same procedure on inverse transposes running backward estimates the
    most-contracting ones.  The K surrogate is the exponential of the
    largest deviation of the cumulative growth from its fitted linear rate.
    These are window statistics, not certificates.
    """
    if system.jacobian is None:
        raise PreconditionError("hyperbolicity_estimate needs a jacobian")
    orbit = np.atleast_2d(np.asarray(orbit, dtype=float))
    jacs = [np.asarray(system.jacobian(x), dtype=float) for x in orbit]
    d = jacs[0].shape[0]
    rates, logs = _qr_exponents(jacs)
    order = np.argsort(rates)[::-1]
    rates_sorted = rates[order]
    half = len(jacs) // 2
    tail = logs[half:].sum(axis=0) / max(len(jacs) - half, 1)
    tail_sorted = np.sort(tail)[::-1]

    # backward product of inverse transposes has exponents -rates reversed;
    # its dominant subspace estimates the contracting directions.
    inv_jacs = [np.linalg.inv(j).T for j in reversed(jacs)]
    n_unstable = int(np.sum(rates_sorted > rate_tol))
    n_stable = int(np.sum(rates_sorted < -rate_tol))

    angle = np.pi / 2.0
    if 0 < n_unstable < d and n_stable > 0:
        qf = np.linalg.qr(np.column_stack(
            [_power_subspace(jacs, n_unstable)]))[0]
        qb = np.linalg.qr(np.column_stack(
            [_power_subspace(inv_jacs, n_stable)]))[0]
        sv = np.linalg.svd(qf.T @ qb, compute_uv=False)
        angle = float(np.arccos(np.clip(sv.max(), -1.0, 1.0)))

    cum = np.cumsum(logs[:, 0])
    steps = np.arange(1, len(jacs) + 1)
    bulge = float(np.exp(np.max(np.abs(cum - steps * rates[0]))))
    hyperbolic = (rates_sorted[0] > rate_tol and rates_sorted[-1] < -rate_tol
                  and angle > rate_tol)
    return DichotomyReport(rates=rates_sorted,
                           tail_rates=tail_sorted,
                           expansion_rate=float(tail_sorted[0]),
                           contraction_rate=float(tail_sorted[-1]),
                           bound_surrogate=bulge,
                           angle_min=angle,
                           hyperbolic=hyperbolic,
                           details={"n_unstable": n_unstable,
                                    "n_stable": n_stable})


def _power_subspace(jacs: list[np.ndarray], k: int) -> np.ndarray:
    """Orthonormal basis of the dominant k-dimensional subspace of a product.

    The start basis is generic (seeded) rather than coordinate axes, which
    can be exact non-dominant eigenvectors and stall the power iteration.
    """
    d = jacs[0].shape[0]
    rng = np.random.default_rng(0x5EED)
    q, _ = np.linalg.qr(rng.standard_normal((d, k)))
    for jac in jacs:
        q, _ = np.linalg.qr(jac @ q)
    return q
