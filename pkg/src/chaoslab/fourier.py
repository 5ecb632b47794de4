"""Wavevector lattice arithmetic and the truncated vorticity system.

Conventions used package-wide:

* A wavevector is a pair of integers ``(k1, k2)``; the origin is never a
  valid mode index.
* A coefficient field stores the full square box ``|k1|,|k2| <= box`` of
  complex amplitudes with the conjugate pairing ``w[-k] == conj(w[k])``
  enforced on every write, and nothing at the origin.
* The quadratic vector field is the ordered-pair convolution
  ``dw[k] = sum_{p+q=k} A(p,q) w[p] w[q]`` restricted to the box (sharp
  Galerkin truncation), which reproduces minus the grid bracket of the
  stream function with the vorticity for fields that fit in half the box.
* Periodic grids sample ``[0, 2*pi)^2`` uniformly; products computed on the
  grid are dealiased with the 2/3 rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import PreconditionError

Vec = tuple[int, int]


def _check_nonzero(v: Vec, name: str) -> None:
    if v[0] == 0 and v[1] == 0:
        raise PreconditionError(f"{name} must be a nonzero lattice vector")


def norm_sq(v: Vec) -> int:
    return v[0] * v[0] + v[1] * v[1]


def det2(p: Vec, q: Vec) -> int:
    """Integer determinant p1*q2 - p2*q1."""
    return p[0] * q[1] - p[1] * q[0]


def coef_A(p: Vec, q: Vec) -> float:
    """Interaction coefficient of the quadratic mode coupling.

    A(p,q) = (1/2) * (|q|^-2 - |p|^-2) * (p1*q2 - p2*q1).  The determinant
    is evaluated in integer arithmetic before the floating-point bracket.
    """
    _check_nonzero(p, "p")
    _check_nonzero(q, "q")
    d = det2(p, q)
    if d == 0:
        return 0.0
    return 0.5 * (1.0 / norm_sq(q) - 1.0 / norm_sq(p)) * d


def zeta(p: Vec) -> int:
    """Number of nonzero lattice points strictly inside the disk of radius
    |p| that are not parallel to p."""
    _check_nonzero(p, "p")
    n2 = norm_sq(p)
    r = int(np.floor(np.sqrt(n2)))
    count = 0
    for q1 in range(-r, r + 1):
        for q2 in range(-r, r + 1):
            if q1 == 0 and q2 == 0:
                continue
            if q1 * q1 + q2 * q2 >= n2:
                continue
            if det2(p, (q1, q2)) == 0:
                continue
            count += 1
    return count


@dataclass(frozen=True)
class ClassIndex:
    """A lattice line khat + n*p along which the linearized system decouples."""

    khat: Vec
    p: Vec

    def __post_init__(self) -> None:
        _check_nonzero(self.p, "p")
        _check_nonzero(self.khat, "khat")

    def member(self, n: int) -> Vec:
        return (self.khat[0] + n * self.p[0], self.khat[1] + n * self.p[1])

    def is_degenerate(self) -> bool:
        """True when khat is parallel to p, which zeroes every coupling."""
        return det2(self.p, self.khat) == 0


def class_members(cls: ClassIndex, n_min: int, n_max: int) -> list[tuple[int, Vec]]:
    """Members khat + n*p for n in [n_min, n_max], skipping the origin."""
    out = []
    for n in range(n_min, n_max + 1):
        k = cls.member(n)
        if k != (0, 0):
            out.append((n, k))
    return out


def class_intersects_disk(cls: ClassIndex) -> bool:
    """Whether the class meets the closed disk of radius |p|.

    |khat + n*p|^2 <= |p|^2 is quadratic in n, so only a bounded range of n
    needs scanning.
    """
    p2 = norm_sq(cls.p)
    bound = int(np.ceil(np.sqrt(norm_sq(cls.khat) / p2))) + 2
    for n in range(-bound, bound + 1):
        k = cls.member(n)
        if k != (0, 0) and norm_sq(k) <= p2:
            return True
    return False


class CoefficientField:
    """Truncated vorticity coefficients on the box |k1|,|k2| <= box.

    The full box is stored densely; set_mode writes a coefficient together
    with its conjugate at -k so the reality pairing is an enforced invariant
    rather than a storage convention.
    """

    def __init__(self, box: int, data: np.ndarray | None = None):
        if box < 1:
            raise PreconditionError("box half-width must be >= 1")
        self.box = box
        side = 2 * box + 1
        if data is None:
            data = np.zeros((side, side), dtype=np.complex128)
        else:
            data = np.asarray(data, dtype=np.complex128)
            if data.shape != (side, side):
                raise PreconditionError(f"data must have shape {(side, side)}")
            data = data.copy()
            data[box, box] = 0.0
        self._data = data

    # -- indexing -----------------------------------------------------------

    def _idx(self, k: Vec) -> tuple[int, int]:
        if abs(k[0]) > self.box or abs(k[1]) > self.box:
            raise PreconditionError(f"mode {k} outside box {self.box}")
        return (k[0] + self.box, k[1] + self.box)

    def __getitem__(self, k: Vec) -> complex:
        return complex(self._data[self._idx(k)])

    def set_mode(self, k: Vec, value: complex) -> None:
        _check_nonzero(k, "k")
        self._data[self._idx(k)] = value
        self._data[self._idx((-k[0], -k[1]))] = np.conj(value)

    @property
    def data(self) -> np.ndarray:
        """Dense coefficient array (read-only view)."""
        view = self._data.view()
        view.flags.writeable = False
        return view

    def modes(self) -> list[tuple[Vec, complex]]:
        """Nonzero modes as (k, amplitude) pairs."""
        out = []
        for i in range(2 * self.box + 1):
            for j in range(2 * self.box + 1):
                if self._data[i, j] != 0:
                    out.append(((i - self.box, j - self.box), complex(self._data[i, j])))
        return out

    def copy(self) -> "CoefficientField":
        return CoefficientField(self.box, self._data)

    def embedded(self, box: int) -> "CoefficientField":
        """The same field stored in a (possibly larger) box."""
        if box < self.box:
            raise PreconditionError("cannot embed into a smaller box")
        out = CoefficientField(box)
        lo, hi = box - self.box, box + self.box + 1
        out._data[lo:hi, lo:hi] = self._data
        return out

    # -- invariants and diagnostics ----------------------------------------

    def reality_defect(self) -> float:
        flipped = np.conj(self._data[::-1, ::-1])
        return float(np.max(np.abs(self._data - flipped)))

    def energy(self) -> float:
        """Sum of |w_k|^2 / |k|^2 over every stored nonzero mode.

        Both members of a +-k pair are counted (doubling convention).
        """
        k = np.arange(-self.box, self.box + 1)
        k2 = k[:, None] ** 2 + k[None, :] ** 2
        k2f = np.where(k2 > 0, k2, 1).astype(float)
        return float(np.sum(np.abs(self._data) ** 2 / k2f))

    def enstrophy(self) -> float:
        """Sum of |w_k|^2 over every stored nonzero mode."""
        return float(np.sum(np.abs(self._data) ** 2))

    # -- construction helpers -----------------------------------------------

    @classmethod
    def from_modes(cls, box: int, modes: dict[Vec, complex]) -> "CoefficientField":
        out = cls(box)
        for k, v in modes.items():
            out.set_mode(k, v)
        return out

    @classmethod
    def single_pair(cls, box: int, p: Vec, gamma: complex) -> "CoefficientField":
        """The one-mode steady state w_p = gamma, w_{-p} = conj(gamma)."""
        return cls.from_modes(box, {p: gamma})

    @classmethod
    def random(cls, box: int, rng: np.random.Generator,
               decay: float = 0.0) -> "CoefficientField":
        """Random field with the reality pairing, optional |k|^2 decay."""
        out = cls(box)
        for k1 in range(-box, box + 1):
            for k2 in range(-box, box + 1):
                k = (k1, k2)
                if k == (0, 0) or (k1, k2) < (-k1, -k2):
                    continue
                amp = rng.standard_normal() + 1j * rng.standard_normal()
                if decay > 0.0:
                    amp *= np.exp(-decay * norm_sq(k))
                out.set_mode(k, amp)
        return out

    def scaled(self, c: float) -> "CoefficientField":
        return CoefficientField(self.box, self._data * c)

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        """Half-lattice JSON form; the loader reconstructs conjugates."""
        modes = []
        for (k, v) in self.modes():
            if k > (-k[0], -k[1]):  # lexicographically positive representative
                modes.append({"k": [k[0], k[1]], "re": v.real, "im": v.imag})
        modes.sort(key=lambda m: (m["k"][0], m["k"][1]))
        return {"box": self.box, "modes": modes}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CoefficientField":
        out = cls(int(obj["box"]))
        for m in obj["modes"]:
            out.set_mode((int(m["k"][0]), int(m["k"][1])), complex(m["re"], m["im"]))
        return out

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path) -> "CoefficientField":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def galerkin_rhs(state: CoefficientField) -> CoefficientField:
    """Time derivative of the truncated vorticity system.

    Ordered-pair convolution over the box; conserves energy and enstrophy
    algebraically and preserves the reality pairing.
    """
    rhs = kernels.galerkin_rhs(state._data, state.box)
    out = CoefficientField(state.box)
    out._data[:, :] = rhs
    out._data[state.box, state.box] = 0.0
    return out


def energy_derivative(state: CoefficientField) -> float:
    """d(energy)/dt along galerkin_rhs, by direct summation."""
    rhs = galerkin_rhs(state)
    k = np.arange(-state.box, state.box + 1)
    k2 = k[:, None] ** 2 + k[None, :] ** 2
    k2f = np.where(k2 > 0, k2, 1).astype(float)
    return float(np.sum(np.real(np.conj(state._data) * rhs._data) / k2f))


def enstrophy_derivative(state: CoefficientField) -> float:
    rhs = galerkin_rhs(state)
    return float(np.sum(np.real(np.conj(state._data) * rhs._data)))


def integrate_galerkin(state: CoefficientField, dt: float, steps: int,
                       observer=None) -> CoefficientField:
    """Fixed-step RK4 on the coefficient box.

    ``observer(step, state_array)`` is invoked after every accepted step when
    given; the returned field is the final state.
    """
    if dt <= 0:
        raise PreconditionError("dt must be positive")
    w = state._data.copy()
    box = state.box
    for step in range(1, steps + 1):
        k1 = kernels.galerkin_rhs(w, box)
        k2 = kernels.galerkin_rhs(w + 0.5 * dt * k1, box)
        k3 = kernels.galerkin_rhs(w + 0.5 * dt * k2, box)
        k4 = kernels.galerkin_rhs(w + dt * k3, box)
        w = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if observer is not None:
            observer(step, w)
    out = CoefficientField(box)
    out._data[:, :] = w
    return out


@dataclass
class RealCosineField:
    """Real cosine-transform coefficients, one representative per +-k pair."""

    coefficients: dict[Vec, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        normalized: dict[Vec, float] = {}
        for k, v in self.coefficients.items():
            _check_nonzero(k, "k")
            rep = k if k > (-k[0], -k[1]) else (-k[0], -k[1])
            normalized[rep] = normalized.get(rep, 0.0) + float(v)
        self.coefficients = normalized

    def to_coefficient_field(self, box: int) -> CoefficientField:
        """Complex coefficients of sum_k a_k cos(k.X): a_k/2 at both +-k."""
        out = CoefficientField(box)
        for k, v in self.coefficients.items():
            out.set_mode(k, 0.5 * v)
        return out


# -- periodic grids ----------------------------------------------------------


class GridField2D:
    """Uniform periodic-grid samples of a scalar field, period 2*pi."""

    def __init__(self, values: np.ndarray):
        values = np.asarray(values)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise PreconditionError("grid values must be a square 2D array")
        n = values.shape[0]
        if n < 16 or (n & (n - 1)) != 0:
            raise PreconditionError("grid resolution must be a power of two >= 16")
        if not np.iscomplexobj(values):
            values = values.astype(np.float64)
        self.values = values

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    @staticmethod
    def coordinates(n: int) -> tuple[np.ndarray, np.ndarray]:
        x = 2.0 * np.pi * np.arange(n) / n
        return np.meshgrid(x, x, indexing="ij")

    @classmethod
    def from_function(cls, n: int, fn) -> "GridField2D":
        x, y = cls.coordinates(n)
        return cls(fn(x, y))


def _wavenumbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n)


def _require_same_resolution(f: GridField2D, g: GridField2D) -> int:
    if f.resolution != g.resolution:
        raise PreconditionError("grid resolution mismatch")
    return f.resolution


def _spectral_gradient(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = values.shape[0]
    k = _wavenumbers(n)
    fhat = np.fft.fft2(values)
    dx = np.fft.ifft2(1j * k[:, None] * fhat)
    dy = np.fft.ifft2(1j * k[None, :] * fhat)
    if not np.iscomplexobj(values):
        dx, dy = dx.real, dy.real
    return dx, dy


def dealias_two_thirds(values: np.ndarray) -> np.ndarray:
    """Zero every mode with |k1| or |k2| above resolution/3."""
    n = values.shape[0]
    k = np.abs(_wavenumbers(n))
    keep = (k[:, None] <= n / 3.0) & (k[None, :] <= n / 3.0)
    fhat = np.fft.fft2(values) * keep
    out = np.fft.ifft2(fhat)
    return out if np.iscomplexobj(values) else out.real


def grid_bracket(f: GridField2D, g: GridField2D) -> GridField2D:
    """{f, g} = f_x g_y - f_y g_x with spectral derivatives, dealiased."""
    _require_same_resolution(f, g)
    fx, fy = _spectral_gradient(f.values)
    gx, gy = _spectral_gradient(g.values)
    return GridField2D(dealias_two_thirds(fx * gy - fy * gx))


def laplacian(f: GridField2D) -> GridField2D:
    n = f.resolution
    k = _wavenumbers(n)
    k2 = k[:, None] ** 2 + k[None, :] ** 2
    out = np.fft.ifft2(-k2 * np.fft.fft2(f.values))
    return GridField2D(out if np.iscomplexobj(f.values) else out.real)


def invert_laplacian(f):
    """Solve lap(psi) = f for zero-mean f; works on grids and coefficients.

    Grid inputs with a mean above 1e-10 of the field scale are rejected; the
    coefficient form never stores a mean so it needs no check.
    """
    if isinstance(f, CoefficientField):
        out = CoefficientField(f.box)
        k = np.arange(-f.box, f.box + 1)
        k2 = (k[:, None] ** 2 + k[None, :] ** 2).astype(float)
        k2[f.box, f.box] = 1.0
        out._data[:, :] = f._data / (-k2)
        out._data[f.box, f.box] = 0.0
        return out
    n = f.resolution
    fhat = np.fft.fft2(f.values)
    scale = np.max(np.abs(f.values)) or 1.0
    if abs(fhat[0, 0]) / (n * n) > 1e-10 * scale:
        raise PreconditionError("invert_laplacian requires a zero-mean field")
    k = _wavenumbers(n)
    k2 = k[:, None] ** 2 + k[None, :] ** 2
    k2[0, 0] = 1.0
    psi = fhat / (-k2)
    psi[0, 0] = 0.0
    out = np.fft.ifft2(psi)
    return GridField2D(out if np.iscomplexobj(f.values) else out.real)


def coefficients_to_grid(field_: CoefficientField, n: int) -> GridField2D:
    """Sample sum_k w_k exp(i k.X) on an n x n grid (real by the pairing)."""
    if n < 2 * field_.box + 2:
        raise PreconditionError("grid too coarse for the coefficient box")
    fhat = np.zeros((n, n), dtype=np.complex128)
    b = field_.box
    for k1 in range(-b, b + 1):
        for k2 in range(-b, b + 1):
            v = field_._data[k1 + b, k2 + b]
            if v != 0:
                fhat[k1 % n, k2 % n] = v * n * n
    vals = np.fft.ifft2(fhat)
    return GridField2D(vals.real)


def grid_to_coefficients(grid: GridField2D, box: int) -> CoefficientField:
    """Project grid samples onto the coefficient box.

    Rejects fields with a significant mean; content outside the box is
    discarded (sharp truncation).
    """
    n = grid.resolution
    fhat = np.fft.fft2(grid.values) / (n * n)
    scale = np.max(np.abs(fhat)) or 1.0
    if abs(fhat[0, 0]) > 1e-10 * scale:
        raise PreconditionError("grid field has a nonzero mean")
    out = CoefficientField(box)
    for k1 in range(-box, box + 1):
        for k2 in range(-box, box + 1):
            if (k1, k2) != (0, 0):
                out._data[k1 + box, k2 + box] = fhat[k1 % n, k2 % n]
    out._data[box, box] = 0.0
    return out
