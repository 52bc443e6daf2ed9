# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled closed-loop integrator (hot path).

Mirrors ``_loop_py.run_closed_loop`` statement for statement; keep the two
in sync.  Parameters and defenders arrive packed as flat arrays (see
``simulate._pack_params`` / ``simulate._pack_defenders``).
"""

from libc.math cimport atan2, cos, exp, fabs, fmod, hypot, log, pow, sin, sqrt
from libc.math cimport INFINITY, NAN, M_PI

import numpy as np

from . import _columns as C

cdef int _INTERCEPTED = 1
cdef int _EZ_VIOLATION = 2
cdef int _TIMEOUT = 3
cdef int _INVALID_START = 4

OUTCOME_INTERCEPTED = _INTERCEPTED
OUTCOME_EZ_VIOLATION = _EZ_VIOLATION
OUTCOME_TIMEOUT = _TIMEOUT
OUTCOME_INVALID_START = _INVALID_START

cdef double ACCEL_CLAMP_SLACK = 1e-12
cdef double SAT_DENOM_FLOOR = 1e-6
cdef double SIGMOID_CLAMP = 500.0

cdef int MAX_DEFENDERS = 64


cdef inline double _wrap(double a) noexcept nogil:
    # Same arithmetic as geometry.wrap_angle (Python-style modulo).
    a = fmod(a, 2.0 * M_PI)
    if a < 0.0:
        a += 2.0 * M_PI
    if a > M_PI:
        a -= 2.0 * M_PI
    return a


cdef struct Params:
    double safety_gain
    double intercept_gain
    double tracking_gain
    double smoothing
    double safety_margin
    double switch_center
    double switch_width
    double switch_threshold
    double accel_limit
    double sat_exponent
    double sat_leak
    double discontinuous
    double sign_layer
    double denom_floor


cdef inline double _sat_rate(double accel, double command, Params* p) noexcept nogil:
    cdef double frac = pow(accel / p.accel_limit, p.sat_exponent)
    return (1.0 - frac) * command - p.sat_leak * accel


cdef inline double _switch_alpha(double h, Params* p) noexcept nogil:
    cdef double arg
    if p.discontinuous != 0.0:
        return 1.0 if h < p.switch_threshold else 0.0
    arg = (h - p.switch_center) / p.switch_width
    if arg > SIGMOID_CLAMP:
        return 0.0
    if arg < -SIGMOID_CLAMP:
        return 1.0
    return 1.0 / (1.0 + exp(arg))


cdef inline double _sign_smooth(double z, double width) noexcept nogil:
    cdef double s = z / width
    if s > 1.0:
        return 1.0
    if s < -1.0:
        return -1.0
    return s


cdef struct StepOut:
    double intercept
    double safe
    double alpha
    double desired
    double desired_rate
    double commanded
    double tracking_error
    double aggregate
    double degenerate
    double r_target
    double sigma_target


cdef struct Context:
    bint have_prev
    double prev_desired
    double prev_intercept
    double prev_safe
    bint have_prev_safe
    double rate_filter


cdef void _guidance_step(
    double x, double y, double heading, double accel,
    double tx, double ty,
    double[:, :] dfs, int n_def,
    double speed, Params* p, Context* ctx, double dt,
    StepOut* out,
    double* r_def, double* sigma_def, double* b_def,
    double* rho_def, double* grad_def, double* w_def,
) noexcept nogil:
    cdef double dx, dy, r_t, sigma_t, a_t
    cdef double mu, R, c, cs, reach, inner, rho, grad
    cdef double b_min, total, h, alpha, a_b, a_d, coupling
    cdef double denom, drift, w, sig
    cdef double raw, tau, d_safe, d_int, z, numer, sden
    cdef int i, i_max
    cdef bint degenerate = False

    dx = tx - x
    dy = ty - y
    r_t = hypot(dx, dy)
    sigma_t = _wrap(heading - atan2(dy, dx))
    a_t = -p.intercept_gain * speed * sigma_t - speed * speed * sin(sigma_t) / r_t

    if n_def > 0:
        for i in range(n_def):
            dx = dfs[i, 0] - x
            dy = dfs[i, 1] - y
            r_def[i] = hypot(dx, dy)
            sigma_def[i] = _wrap(heading - atan2(dy, dx))
            R = dfs[i, 2]
            c = dfs[i, 3]
            mu = dfs[i, 4]
            reach = (R + c) / (mu * R)
            cs = cos(sigma_def[i])
            inner = sqrt(cs * cs - 1.0 + reach * reach)
            rho = mu * R * (cs + inner)
            grad = -mu * R * sin(sigma_def[i]) * (1.0 + cs / inner)
            rho_def[i] = rho
            grad_def[i] = grad
            b_def[i] = r_def[i] - rho - p.safety_margin

        b_min = b_def[0]
        for i in range(1, n_def):
            if b_def[i] < b_min:
                b_min = b_def[i]
        total = 0.0
        for i in range(n_def):
            w_def[i] = exp(-(b_def[i] - b_min) / p.smoothing)
            total += w_def[i]
        h = b_min - p.smoothing * log(total)
        for i in range(n_def):
            w_def[i] /= total

        alpha = _switch_alpha(h, p)
        denom = 0.0
        drift = 0.0
        for i in range(n_def):
            sig = sigma_def[i]
            denom += w_def[i] * grad_def[i]
            drift += w_def[i] * (cos(sig) + grad_def[i] / r_def[i] * sin(sig))
        if fabs(denom) < p.denom_floor:
            degenerate = True
            i_max = 0
            for i in range(1, n_def):
                if w_def[i] > w_def[i_max]:
                    i_max = i
            a_b = p.accel_limit if sigma_def[i_max] >= 0.0 else -p.accel_limit
        else:
            a_b = (speed * p.safety_gain * h - speed * speed * drift) / denom
        a_d = alpha * a_b + (1.0 - alpha) * a_t
        coupling = 0.0
        for i in range(n_def):
            coupling += w_def[i] * grad_def[i]
        coupling *= h
    else:
        h = INFINITY
        alpha = 0.0
        a_b = NAN
        a_d = a_t
        coupling = 0.0

    if not ctx.have_prev:
        raw = 0.0
    elif p.discontinuous != 0.0:
        d_safe = 0.0
        if a_b == a_b and ctx.have_prev_safe:
            d_safe = (a_b - ctx.prev_safe) / dt
        d_int = (a_t - ctx.prev_intercept) / dt
        raw = alpha * d_safe + (1.0 - alpha) * d_int
    else:
        raw = (a_d - ctx.prev_desired) / dt
    tau = 10.0 * dt
    ctx.rate_filter += (raw - ctx.rate_filter) * (dt / (tau + dt))
    ctx.prev_desired = a_d
    ctx.have_prev = True
    ctx.prev_intercept = a_t
    if a_b == a_b:
        ctx.prev_safe = a_b
        ctx.have_prev_safe = True
    else:
        ctx.have_prev_safe = False

    z = accel - a_d
    numer = (
        p.sat_leak * accel
        + ctx.rate_filter
        + (alpha - 1.0) * sigma_t / speed
        + alpha * coupling / speed
        - p.tracking_gain * _sign_smooth(z, p.sign_layer)
    )
    sden = 1.0 - pow(accel / p.accel_limit, p.sat_exponent)
    if sden < SAT_DENOM_FLOOR:
        sden = SAT_DENOM_FLOOR
    out.intercept = a_t
    out.safe = a_b
    out.alpha = alpha
    out.desired = a_d
    out.desired_rate = ctx.rate_filter
    out.commanded = numer / sden
    out.tracking_error = z
    out.aggregate = h
    out.degenerate = 1.0 if degenerate else 0.0
    out.r_target = r_t
    out.sigma_target = sigma_t


cdef void _rk4(
    double* x, double* y, double* heading, double* accel,
    double dt, double command, double speed, Params* p,
) noexcept nogil:
    cdef double g0 = heading[0]
    cdef double a0 = accel[0]
    cdef double k1x, k1y, k1g, k1a, k2x, k2y, k2g, k2a
    cdef double k3x, k3y, k3g, k3a, k4x, k4y, k4g, k4a
    cdef double g, a, sixth, limit

    k1x = speed * cos(g0); k1y = speed * sin(g0)
    k1g = a0 / speed; k1a = _sat_rate(a0, command, p)
    g = g0 + 0.5 * dt * k1g; a = a0 + 0.5 * dt * k1a
    k2x = speed * cos(g); k2y = speed * sin(g)
    k2g = a / speed; k2a = _sat_rate(a, command, p)
    g = g0 + 0.5 * dt * k2g; a = a0 + 0.5 * dt * k2a
    k3x = speed * cos(g); k3y = speed * sin(g)
    k3g = a / speed; k3a = _sat_rate(a, command, p)
    g = g0 + dt * k3g; a = a0 + dt * k3a
    k4x = speed * cos(g); k4y = speed * sin(g)
    k4g = a / speed; k4a = _sat_rate(a, command, p)

    sixth = dt / 6.0
    x[0] += sixth * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    y[0] += sixth * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    heading[0] = _wrap(g0 + sixth * (k1g + 2.0 * k2g + 2.0 * k3g + k4g))
    a = a0 + sixth * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    # Numerical guard only; the dynamics themselves repel the bound.
    limit = p.accel_limit - ACCEL_CLAMP_SLACK
    if a > limit:
        a = limit
    elif a < -limit:
        a = -limit
    accel[0] = a


def run_closed_loop(
    double x0, double y0, double heading0, double accel0,
    double speed, double tx, double ty,
    double[:, :] defenders, double[:] params,
    double dt, int n_steps, double capture_radius,
):
    """Integrate until an event fires; returns (rows, outcome, defender_idx).

    Same contract as ``_loop_py.run_closed_loop`` with the target and the
    parameter set passed as flat numeric arrays.
    """
    cdef int n_def = defenders.shape[0]
    if n_def > MAX_DEFENDERS:
        raise ValueError(f"at most {MAX_DEFENDERS} defenders supported")

    cdef Params p
    p.safety_gain = params[0]
    p.intercept_gain = params[1]
    p.tracking_gain = params[2]
    p.smoothing = params[3]
    p.safety_margin = params[4]
    p.switch_center = params[5]
    p.switch_width = params[6]
    p.switch_threshold = params[7]
    p.accel_limit = params[8]
    p.sat_exponent = params[9]
    p.sat_leak = params[10]
    p.discontinuous = params[11]
    p.sign_layer = params[12]
    p.denom_floor = params[13]

    cdef int ncol = C.n_columns(n_def)
    cdef int flag_col = C.flag_column(n_def)
    out_arr = np.empty((n_steps + 1, ncol))
    cdef double[:, :] data = out_arr

    cdef double r_def[64]
    cdef double sigma_def[64]
    cdef double b_def[64]
    cdef double rho_def[64]
    cdef double grad_def[64]
    cdef double w_def[64]

    cdef double x = x0, y = y0, heading = heading0, accel = accel0
    cdef Context ctx
    ctx.have_prev = False
    ctx.prev_desired = 0.0
    ctx.prev_intercept = 0.0
    ctx.prev_safe = 0.0
    ctx.have_prev_safe = False
    ctx.rate_filter = 0.0

    cdef StepOut so
    cdef int outcome = _TIMEOUT
    cdef int hit_defender = -1
    cdef int rows = 0
    cdef int k, i, base, violated
    cdef bint done = False

    with nogil:
        for k in range(n_steps + 1):
            _guidance_step(
                x, y, heading, accel, tx, ty, defenders, n_def,
                speed, &p, &ctx, dt, &so,
                r_def, sigma_def, b_def, rho_def, grad_def, w_def,
            )
            data[k, 0] = k * dt
            data[k, 1] = x
            data[k, 2] = y
            data[k, 3] = heading
            data[k, 4] = accel
            data[k, 5] = so.intercept
            data[k, 6] = so.safe
            data[k, 7] = so.alpha
            data[k, 8] = so.desired
            data[k, 9] = so.desired_rate
            data[k, 10] = so.commanded
            data[k, 11] = so.tracking_error
            data[k, 12] = so.aggregate
            data[k, 13] = so.r_target
            data[k, 14] = so.sigma_target
            for i in range(n_def):
                base = 15 + 3 * i
                data[k, base] = r_def[i]
                data[k, base + 1] = sigma_def[i]
                data[k, base + 2] = b_def[i]
            data[k, flag_col] = so.degenerate
            rows = k + 1

            if so.r_target <= capture_radius:
                outcome = _INTERCEPTED
                done = True
                break
            violated = -1
            for i in range(n_def):
                if r_def[i] - rho_def[i] <= 0.0:
                    violated = i
                    break
            if violated >= 0:
                outcome = _INVALID_START if k == 0 else _EZ_VIOLATION
                hit_defender = violated
                done = True
                break
            if k == n_steps:
                outcome = _TIMEOUT
                done = True
                break

            _rk4(&x, &y, &heading, &accel, dt, so.commanded, speed, &p)

    return out_arr[:rows].copy(), outcome, hit_defender
