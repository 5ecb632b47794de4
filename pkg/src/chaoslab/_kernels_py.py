"""Pure numpy implementations of the hot kernels.

These mirror the compiled extension in chaoslab._kernels exactly; the
backend is chosen once at import time in chaoslab.kernels.  Everything here
is vectorized so the fallback stays usable, but the compiled path is an
order of magnitude faster on the long lattice runs.
"""

import numpy as np

BACKEND = "python"

# Cached interaction tables for the box convolution, keyed by box half-width.
_TABLES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _interaction_tables(box: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrix C[k,q] = A(k-q, q) and gather index G[k,q] of k-q.

    Entries are zero outside the admissible set (k, q, k-q all nonzero and
    inside the box).  Flat index convention: i = (k1+box)*(2*box+1)+(k2+box).
    """
    cached = _TABLES.get(box)
    if cached is not None:
        return cached
    side = 2 * box + 1
    k = np.arange(-box, box + 1)
    k1 = np.repeat(k, side)
    k2 = np.tile(k, side)
    p1 = k1[:, None] - k1[None, :]
    p2 = k2[:, None] - k2[None, :]
    q1 = k1[None, :]
    q2 = k2[None, :]
    np2 = (p1 * p1 + p2 * p2).astype(np.float64)
    nq2 = (q1 * q1 + q2 * q2).astype(np.float64)
    nk2 = k1 * k1 + k2 * k2
    det = (p1 * q2 - p2 * q1).astype(np.float64)
    valid = (
        (np2 > 0)
        & (nq2 > 0)
        & (nk2[:, None] > 0)
        & (np.abs(p1) <= box)
        & (np.abs(p2) <= box)
    )
    with np.errstate(divide="ignore"):
        bracket = 0.5 * (1.0 / np.where(nq2 > 0, nq2, 1.0) - 1.0 / np.where(np2 > 0, np2, 1.0))
    coef = np.where(valid, bracket * det, 0.0)
    gather = np.where(valid, (p1 + box) * side + (p2 + box), 0).astype(np.intp)
    _TABLES[box] = (coef, gather)
    return coef, gather


def galerkin_rhs(w: np.ndarray, box: int) -> np.ndarray:
    """Quadratic box convolution of the truncated vorticity system.

    rhs[k] = sum over ordered pairs p+q=k (all modes in the box, origin
    excluded) of A(p,q) * w[p] * w[q].
    """
    coef, gather = _interaction_tables(box)
    wf = np.ascontiguousarray(w, dtype=np.complex128).ravel()
    rhs = (coef * wf[gather]) @ wf
    return rhs.reshape(w.shape)


def pdnls_rhs(q, h2inv, two_omega_sq, alpha, beta, eps):
    """Right-hand side of the perturbed discrete cubic NLS lattice.

    The neighbor sum is formed before the Laplacian so the evaluation is
    mirror-symmetric and evenness is preserved exactly, not just to roundoff.
    """
    neigh = np.roll(q, -1) + np.roll(q, 1)
    lap = neigh - 2.0 * q
    conservative = h2inv * lap + (q.real**2 + q.imag**2) * neigh - two_omega_sq * q
    return -1j * conservative + eps * (-alpha * q + h2inv * lap + beta)


def pdnls_rk4(q0, h2inv, two_omega_sq, alpha, beta, eps, dt, steps, sample_every):
    """Fixed-step RK4 trajectory of the lattice; returns sampled states.

    Returns (samples, blowup_step); blowup_step is -1 on success, else the
    first step index at which the state became non-finite.
    """
    q = np.array(q0, dtype=np.complex128)
    n_samples = steps // sample_every + 1
    samples = np.empty((n_samples, q.size), dtype=np.complex128)
    samples[0] = q
    idx = 1
    args = (h2inv, two_omega_sq, alpha, beta, eps)
    # overflow is expected on the way to blow-up detection
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, steps + 1):
            k1 = pdnls_rhs(q, *args)
            k2 = pdnls_rhs(q + 0.5 * dt * k1, *args)
            k3 = pdnls_rhs(q + 0.5 * dt * k2, *args)
            k4 = pdnls_rhs(q + dt * k3, *args)
            q = q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            # same blow-up rule as the compiled kernel: huge counts as gone
            if not (np.all(np.abs(q.real) < 1e150)
                    and np.all(np.abs(q.imag) < 1e150)):
                return samples[:idx], step
            if step % sample_every == 0:
                samples[idx] = q
                idx += 1
    return samples[:idx], -1


def dashed_rhs(op, om, sub, sup, pair):
    """Dashed-line model vector field.

    dom[i] = op*(sub[i]*om[i-1] - sup[i]*om[i+1]) with zero Dirichlet ends,
    dop    = -sum_i pair[i-1]*om[i-1]*om[i].
    """
    dom = np.empty_like(om)
    dom[1:] = sub[1:] * om[:-1]
    dom[0] = 0.0
    dom[:-1] -= sup[:-1] * om[1:]
    dom *= op
    dop = -float(pair @ (om[:-1] * om[1:]))
    return dop, dom


def dashed_rk4(op0, om0, sub, sup, pair, dt, steps, sample_every):
    """RK4 trajectory of the dashed-line model; mirrors pdnls_rk4."""
    op = float(op0)
    om = np.array(om0, dtype=np.float64)
    n_samples = steps // sample_every + 1
    op_samples = np.empty(n_samples)
    om_samples = np.empty((n_samples, om.size))
    op_samples[0] = op
    om_samples[0] = om
    idx = 1
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, steps + 1):
            a1, b1 = dashed_rhs(op, om, sub, sup, pair)
            a2, b2 = dashed_rhs(op + 0.5 * dt * a1, om + 0.5 * dt * b1,
                                sub, sup, pair)
            a3, b3 = dashed_rhs(op + 0.5 * dt * a2, om + 0.5 * dt * b2,
                                sub, sup, pair)
            a4, b4 = dashed_rhs(op + dt * a3, om + dt * b3, sub, sup, pair)
            op = op + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            om = om + (dt / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            if not (abs(op) < 1e150 and np.all(np.abs(om) < 1e150)):
                return op_samples[:idx], om_samples[:idx], step
            if step % sample_every == 0:
                op_samples[idx] = op
                om_samples[idx] = om
                idx += 1
    return op_samples[:idx], om_samples[:idx], -1
