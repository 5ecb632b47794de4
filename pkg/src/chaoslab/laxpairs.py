"""Lax pair operators on periodic grids and their consistency batteries.

2D: L phi = {Omega, phi}, A phi = {Psi, phi} with Psi the stream function;
the compatibility of the pair with the vorticity evolution reduces to the
Jacobi identity of the bracket plus the transport of the evolution residual.
The Rossby variant subtracts beta * d phi/dx from L.  3D: the scalar pair
L phi = (Omega . grad) phi, A phi = (u . grad) phi, and the vector pair with
the extra (phi . grad) terms.  All spectra and residuals are reported on
sharp truncations; isospectrality defects of non-steady flows are reported,
not asserted, since truncation does not commute with the evolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .fourier import (CoefficientField, GridField2D, coefficients_to_grid, det2,
                      galerkin_rhs, grid_bracket, integrate_galerkin,
                      invert_laplacian)
from .util import hausdorff_distance, sup_norm

ScalarField2D = GridField2D


@dataclass
class LaxReport:
    residuals: dict[str, float] = field(default_factory=dict)
    spectra: dict[str, list] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        # non-finite residuals (e.g. an empty mask overlap) become null so
        # the report stays strict JSON
        out: dict = {"residuals": {
            k: (float(v) if np.isfinite(v) else None)
            for k, v in self.residuals.items()}}
        if self.spectra:
            out["spectra"] = {k: [[z.real, z.imag] for z in v]
                              for k, v in self.spectra.items()}
        return out


def lax_L_2d(omega: GridField2D, phi: GridField2D) -> GridField2D:
    """L phi = {Omega, phi}."""
    return grid_bracket(omega, phi)


def lax_A_2d(psi: GridField2D, phi: GridField2D) -> GridField2D:
    """A phi = {Psi, phi}."""
    return grid_bracket(psi, phi)


def rossby_L(omega: GridField2D, beta_param: float, phi: GridField2D) -> GridField2D:
    """L phi = {Omega, phi} - beta * d(phi)/dx."""
    bracket = grid_bracket(omega, phi)
    n = phi.resolution
    k = np.fft.fftfreq(n, d=1.0 / n)
    dx = np.fft.ifft2(1j * k[:, None] * np.fft.fft2(phi.values))
    if not np.iscomplexobj(phi.values):
        dx = dx.real
    return GridField2D(bracket.values - beta_param * dx)


def jacobi_defect(f: GridField2D, g: GridField2D, h: GridField2D) -> float:
    """Sup norm of {f,{g,h}} + {g,{h,f}} + {h,{f,g}}."""
    total = (grid_bracket(f, grid_bracket(g, h)).values
             + grid_bracket(g, grid_bracket(h, f)).values
             + grid_bracket(h, grid_bracket(f, g)).values)
    return sup_norm(total)


def compatibility_residual_2d(omega: CoefficientField,
                              phi_samples: list[GridField2D],
                              resolution: int = 64,
                              time_derivative=None) -> LaxReport:
    """Jacobi and transport residuals of the 2D pair.

    ``time_derivative`` maps the coefficient field to its time derivative and
    defaults to the truncated quadratic vector field; the Galerkin box is
    doubled before differentiation so the bracket closure is untruncated and
    the transport residual {dOmega/dt + {Psi, Omega}, phi} vanishes exactly
    for the true evolution.  A non-Euler rule makes it visibly nonzero.
    """
    if time_derivative is None:
        time_derivative = lambda w: galerkin_rhs(w.embedded(2 * w.box))
    omega_grid = coefficients_to_grid(omega, resolution)
    psi_grid = invert_laplacian(omega_grid)
    dometa = time_derivative(omega)
    dom_grid = coefficients_to_grid(dometa, resolution)
    transport_src = GridField2D(
        dom_grid.values + grid_bracket(psi_grid, omega_grid).values)

    report = LaxReport()
    for i, phi in enumerate(phi_samples):
        jac = (grid_bracket(omega_grid, grid_bracket(psi_grid, phi)).values
               - grid_bracket(psi_grid, grid_bracket(omega_grid, phi)).values
               - grid_bracket(grid_bracket(omega_grid, psi_grid), phi).values)
        report.residuals[f"jacobi_{i}"] = sup_norm(jac)
        report.residuals[f"transport_{i}"] = sup_norm(
            grid_bracket(transport_src, phi).values)
    report.residuals["jacobi_max"] = max(
        report.residuals[f"jacobi_{i}"] for i in range(len(phi_samples)))
    report.residuals["transport_max"] = max(
        report.residuals[f"transport_{i}"] for i in range(len(phi_samples)))
    return report


def bracket_operator_matrix(omega: CoefficientField, box: int) -> np.ndarray:
    """Matrix of phi -> {Omega, phi} on the truncated exponential basis.

    Basis vectors are the nonzero modes of the size-``box`` square; the entry
    coupling basis mode q into row k is -det(k, q) * omega_{k-q}.
    """
    modes = [(k1, k2) for k1 in range(-box, box + 1)
             for k2 in range(-box, box + 1) if (k1, k2) != (0, 0)]
    index = {k: i for i, k in enumerate(modes)}
    dim = len(modes)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    b = omega.box
    for q in modes:
        jq = index[q]
        for (m, w) in omega.modes():
            k = (m[0] + q[0], m[1] + q[1])
            if k in index:
                mat[index[k], jq] = -det2(k, q) * w
    return mat


def isospectrality_check(omega0: CoefficientField, T: float, dt: float,
                         box: int | None = None) -> LaxReport:
    """Hausdorff drift of the truncated bracket-operator spectrum.

    Evolves the vorticity by the truncated quadratic field over [0, T] and
    compares eig({Omega(0), .}) against eig({Omega(T), .}) on the same basis.
    Steady states must give distances at roundoff; for general data the
    distance is a truncation measurement, reported rather than asserted.
    """
    if box is None:
        box = omega0.box
    if box > 6:
        raise PreconditionError("operator box above 6 (matrix growth)")
    steps = max(1, int(round(T / dt)))
    omega_T = integrate_galerkin(omega0, dt, steps)
    m0 = bracket_operator_matrix(omega0, box)
    m1 = bracket_operator_matrix(omega_T, box)
    e0 = np.linalg.eigvals(m0)
    e1 = np.linalg.eigvals(m1)
    report = LaxReport()
    report.residuals["hausdorff"] = hausdorff_distance(e0, e1)
    report.spectra["initial"] = list(e0)
    report.spectra["final"] = list(e1)
    return report


# -- 3D fields and pairs -------------------------------------------------------


def _deriv3(values: np.ndarray, axis: int) -> np.ndarray:
    n = values.shape[axis]
    k = np.fft.fftfreq(n, d=1.0 / n)
    shape = [1, 1, 1]
    shape[axis] = n
    out = np.fft.ifftn(1j * k.reshape(shape) * np.fft.fftn(values))
    return out if np.iscomplexobj(values) else out.real


class VectorField3D:
    """Three periodic scalar components on an n^3 grid, period 2*pi."""

    def __init__(self, components: np.ndarray):
        components = np.asarray(components, dtype=np.float64)
        if components.ndim != 4 or components.shape[0] != 3:
            raise PreconditionError("expected shape (3, n, n, n)")
        n = components.shape[1]
        if components.shape[1:] != (n, n, n):
            raise PreconditionError("grid must be cubic")
        self.components = components

    @property
    def resolution(self) -> int:
        return self.components.shape[1]

    @staticmethod
    def coordinates(n: int):
        x = 2.0 * np.pi * np.arange(n) / n
        return np.meshgrid(x, x, x, indexing="ij")

    @classmethod
    def from_functions(cls, n: int, fx, fy, fz) -> "VectorField3D":
        x, y, z = cls.coordinates(n)
        return cls(np.stack([fx(x, y, z), fy(x, y, z), fz(x, y, z)]))

    @classmethod
    def abc_flow(cls, n: int, a: float = 1.0, b: float = 1.0,
                 c: float = 1.0) -> "VectorField3D":
        """The ABC velocity field, an eigenfield of curl (curl u = u)."""
        return cls.from_functions(
            n,
            lambda x, y, z: a * np.sin(z) + c * np.cos(y),
            lambda x, y, z: b * np.sin(x) + a * np.cos(z),
            lambda x, y, z: c * np.sin(y) + b * np.cos(x),
        )

    @classmethod
    def uniform(cls, n: int, vec) -> "VectorField3D":
        comp = np.zeros((3, n, n, n))
        for i in range(3):
            comp[i] = vec[i]
        return cls(comp)

    def divergence(self) -> np.ndarray:
        return sum(_deriv3(self.components[i], i) for i in range(3))

    def curl(self) -> "VectorField3D":
        cx = _deriv3(self.components[2], 1) - _deriv3(self.components[1], 2)
        cy = _deriv3(self.components[0], 2) - _deriv3(self.components[2], 0)
        cz = _deriv3(self.components[1], 0) - _deriv3(self.components[0], 1)
        return VectorField3D(np.stack([cx, cy, cz]))

    def divergence_defect(self) -> float:
        return sup_norm(self.divergence())


def directional_derivative(w: VectorField3D, phi: np.ndarray) -> np.ndarray:
    """(w . grad) phi for scalar phi."""
    return sum(w.components[i] * _deriv3(phi, i) for i in range(3))


def _check_pair(omega: VectorField3D, u: VectorField3D, curl_tol: float,
                div_tol: float) -> None:
    if omega.resolution != u.resolution:
        raise PreconditionError("resolution mismatch between vorticity and velocity")
    div = u.divergence_defect()
    if div > div_tol:
        raise PreconditionError(f"velocity divergence defect {div:.2e} above {div_tol}")
    defect = max(sup_norm(u.curl().components[i] - omega.components[i])
                 for i in range(3))
    if defect > curl_tol:
        raise PreconditionError(f"curl(u) mismatch {defect:.2e} above {curl_tol}")


def lax_3d_scalar(omega: VectorField3D, u: VectorField3D, phi: np.ndarray,
                  curl_tol: float = 1e-8, div_tol: float = 1e-10):
    """Scalar pair (L phi, A phi) = ((Omega.grad) phi, (u.grad) phi)."""
    _check_pair(omega, u, curl_tol, div_tol)
    return directional_derivative(omega, phi), directional_derivative(u, phi)


def lax_3d_vector(omega: VectorField3D, u: VectorField3D, phi: VectorField3D,
                  curl_tol: float = 1e-8, div_tol: float = 1e-10):
    """Vector pair L phi = (Omega.grad) phi - (phi.grad) Omega and the same
    combination with u for A."""
    _check_pair(omega, u, curl_tol, div_tol)

    def lie(w: VectorField3D, v: VectorField3D) -> VectorField3D:
        out = np.stack([
            directional_derivative(w, v.components[i])
            - directional_derivative(v, w.components[i])
            for i in range(3)
        ])
        return VectorField3D(out)

    return lie(omega, phi), lie(u, phi)
