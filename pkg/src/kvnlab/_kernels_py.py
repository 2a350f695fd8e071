"""Pure-numpy versions of the hot loops; same signatures as ``_kernels``."""
import numpy as np


def _mirror(idx, n):
    period = 2 * (n - 1)
    idx = np.abs(idx) % period
    return np.where(idx >= n, period - idx, idx)


def _bspline_taps(f, n):
    i = np.floor(f).astype(np.intp)
    t = f - i
    t2 = t * t
    t3 = t2 * t
    w = np.stack([
        (1 - t)**3 / 6,
        (3 * t3 - 6 * t2 + 4) / 6,
        (-3 * t3 + 3 * t2 + 3 * t + 1) / 6,
        t3 / 6,
    ], axis=-1)
    idx = _mirror(i[:, None] + np.arange(-1, 3), n)
    return idx, w


def _inside(fq, fs, nq, ns, tol):
    return (fq >= -tol) & (fq <= nq - 1 + tol) & (fs >= -tol) & (fs <= ns - 1 + tol)


def sample_bicubic(coef, fq, fs, tol=1e-9):
    """Evaluate a 2-D cubic B-spline (mirror boundaries) at fractional indices.

    Points outside the node range by more than ``tol`` get 0.
    """
    nq, ns = coef.shape
    inside = _inside(fq, fs, nq, ns, tol)
    out = np.zeros(fq.shape, dtype=complex)
    fq = np.clip(fq[inside], 0, nq - 1)
    fs = np.clip(fs[inside], 0, ns - 1)
    iq, wq = _bspline_taps(fq, nq)
    is_, ws = _bspline_taps(fs, ns)
    acc = np.zeros(fq.shape, dtype=complex)
    for a in range(4):
        for b in range(4):
            acc += wq[:, a] * ws[:, b] * coef[iq[:, a], is_[:, b]]
    out[inside] = acc
    return out


def sample_bilinear(data, fq, fs, tol=1e-9):
    nq, ns = data.shape
    inside = _inside(fq, fs, nq, ns, tol)
    out = np.zeros(fq.shape, dtype=complex)
    fq = np.clip(fq[inside], 0, nq - 1)
    fs = np.clip(fs[inside], 0, ns - 1)
    iq = np.minimum(np.floor(fq).astype(np.intp), nq - 2)
    is_ = np.minimum(np.floor(fs).astype(np.intp), ns - 2)
    tq = fq - iq
    ts = fs - is_
    out[inside] = ((1 - tq) * (1 - ts) * data[iq, is_] + tq * (1 - ts) * data[iq + 1, is_]
                   + (1 - tq) * ts * data[iq, is_ + 1] + tq * ts * data[iq + 1, is_ + 1])
    return out


def backward_flow_quadratic(q, p, t, m, k, nsteps):
    """RK4 for qdot = -p/m, pdot = k q (backward flow of p**2/2m + k q**2/2)."""
    q = np.array(q, dtype=float)
    p = np.array(p, dtype=float)
    h = t / nsteps
    for _ in range(nsteps):
        k1q, k1p = -p / m, k * q
        q2, p2 = q + 0.5 * h * k1q, p + 0.5 * h * k1p
        k2q, k2p = -p2 / m, k * q2
        q3, p3 = q + 0.5 * h * k2q, p + 0.5 * h * k2p
        k3q, k3p = -p3 / m, k * q3
        q4, p4 = q + h * k3q, p + h * k3p
        k4q, k4p = -p4 / m, k * q4
        q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
        p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
    return q, p


def chirp_sum(x_out, x_nodes, w_nodes, c, block=256):
    """sum_j w_j exp(i c (x - x_j)**2) for every x in ``x_out``."""
    out = np.empty(len(x_out), dtype=complex)
    for start in range(0, len(x_out), block):
        xb = x_out[start:start + block, None]
        out[start:start + block] = np.exp(1j * c * (xb - x_nodes)**2) @ w_nodes
    return out
