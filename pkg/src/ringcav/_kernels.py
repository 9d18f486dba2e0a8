"""Hot numeric kernels.

Written in the numpy subset numba understands; :func:`ringcav._accel.jit`
compiles them unless ``RINGCAV_NO_NUMBA`` is set.  Keep these free of Python
objects, keyword arguments and exceptions carrying data.
"""
import numpy as np

from ._accel import jit

# Dormand-Prince 5(4) tableau.
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176,
                           -5103 / 18656)
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (-71 / 57600, 71 / 16695, -71 / 1920, 17253 / 339200,
                          -22 / 525, 1 / 40)

# Continuous extension: b_i(x) = sum_j P[i, j] x**(j+1).  Row for k2 is zero.
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


@jit
def bloch_rhs(t, y, offsets, delta0, chirp, rabi, gamma):
    """Optical Bloch equations for a batch of detuning classes, y is (n, 3)."""
    d = delta0 + chirp * t + offsets
    u = y[:, 0]
    v = y[:, 1]
    w = y[:, 2]
    out = np.empty_like(y)
    half = 0.5 * gamma
    out[:, 0] = d * v - half * u
    out[:, 1] = -d * u + rabi * w - half * v
    out[:, 2] = -rabi * v - gamma * (w - 1.0)
    return out


@jit
def _dense(y, h, k1, k3, k4, k5, k6, k7, x):
    x2 = x * x
    x3 = x2 * x
    x4 = x3 * x
    b1 = P[0, 0] * x + P[0, 1] * x2 + P[0, 2] * x3 + P[0, 3] * x4
    b3 = P[2, 1] * x2 + P[2, 2] * x3 + P[2, 3] * x4
    b4 = P[3, 1] * x2 + P[3, 2] * x3 + P[3, 3] * x4
    b5 = P[4, 1] * x2 + P[4, 2] * x3 + P[4, 3] * x4
    b6 = P[5, 1] * x2 + P[5, 2] * x3 + P[5, 3] * x4
    b7 = P[6, 1] * x2 + P[6, 2] * x3 + P[6, 3] * x4
    return y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6 + b7 * k7)


@jit
def integrate_bloch(y0, offsets, delta0, chirp, rabi, gamma, t_end, t_samples,
                    tol, max_step, fixed, max_steps):
    """Integrate a batch of swept two-level systems from t = 0 to ``t_end``.

    Step control uses the worst class, so every class individually meets the
    tolerance.  The tolerance is spread over the sweep (error per unit step).
    ``fixed`` switches to constant steps of ``max_step``.

    Returns ``(samples, n_steps, status, t_stop)`` with ``samples`` of shape
    (len(t_samples), n, 3) filled from the continuous extension.
    """
    n = y0.shape[0]
    ns = t_samples.shape[0]
    out = np.full((ns, n, 3), np.nan)
    y = y0.copy()
    t = 0.0
    j = 0
    while j < ns and t_samples[j] <= 0.0:
        out[j] = y
        j += 1

    k1 = bloch_rhs(t, y, offsets, delta0, chirp, rabi, gamma)
    if fixed:
        h = max_step
    else:
        dmax = max(abs(delta0), abs(delta0 + chirp * t_end)) + np.max(np.abs(offsets))
        h = min(max_step, 0.01 / (dmax + gamma + abs(rabi) + 1e-300), t_end)
    h_min = 1e-14 * t_end
    n_steps = 0
    status = STATUS_OK
    while t < t_end:
        if n_steps >= max_steps:
            status = STATUS_MAX_STEPS
            break
        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True
        k2 = bloch_rhs(t + C2 * h, y + h * (A21 * k1),
                       offsets, delta0, chirp, rabi, gamma)
        k3 = bloch_rhs(t + C3 * h, y + h * (A31 * k1 + A32 * k2),
                       offsets, delta0, chirp, rabi, gamma)
        k4 = bloch_rhs(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3),
                       offsets, delta0, chirp, rabi, gamma)
        k5 = bloch_rhs(t + C5 * h,
                       y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
                       offsets, delta0, chirp, rabi, gamma)
        k6 = bloch_rhs(t + h,
                       y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
                       offsets, delta0, chirp, rabi, gamma)
        y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        k7 = bloch_rhs(t + h, y_new, offsets, delta0, chirp, rabi, gamma)

        fac = 1.0
        if not fixed:
            err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
            # error per unit step: a step of length h may use the fraction
            # h / t_end of the tolerance, so the errors summed over the whole
            # sweep stay of order tol instead of growing with the step count
            scale = (tol + tol * np.maximum(np.abs(y), np.abs(y_new))) * (h / t_end)
            ratio = err_vec / scale
            err = np.sqrt(np.max((ratio * ratio).sum(axis=1)) / 3.0)
            if err > 1.0:
                h *= max(0.2, 0.9 * err ** -0.25)
                if h < h_min:
                    status = STATUS_UNDERFLOW
                    break
                continue
            if err == 0.0:
                fac = 5.0
            else:
                fac = min(5.0, 0.9 * err ** -0.25)

        t_next = t_end if last else t + h
        while j < ns and t_samples[j] <= t_next:
            x = (t_samples[j] - t) / h
            out[j] = _dense(y, h, k1, k3, k4, k5, k6, k7, x)
            j += 1
        t = t_next
        y = y_new
        k1 = k7
        n_steps += 1
        if not fixed:
            h = min(h * fac, max_step)
    return out, n_steps, status, t


@jit
def hermite(order, x):
    """Physicists' Hermite polynomial H_order(x) by upward recurrence."""
    h_prev = np.ones_like(x)
    if order == 0:
        return h_prev
    h = 2.0 * x
    for k in range(1, order):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h


@jit
def hermite_gauss_grid(m, n, x, y, waist_h, waist_v, scale):
    """Intensity of TEM_mn on the outer-product grid of ``x`` and ``y``."""
    hx = hermite(m, np.sqrt(2.0) * x / waist_h)
    hy = hermite(n, np.sqrt(2.0) * y / waist_v)
    gx = hx * hx * np.exp(-2.0 * x * x / (waist_h * waist_h))
    gy = hy * hy * np.exp(-2.0 * y * y / (waist_v * waist_v))
    out = np.empty((y.shape[0], x.shape[0]))
    for i in range(y.shape[0]):
        out[i, :] = scale * gy[i] * gx
    return out
