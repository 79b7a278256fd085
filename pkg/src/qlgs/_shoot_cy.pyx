# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixed-step integrator for the radial profile equation.

Hot kernel: the amplitude bisection drives tens of RK4 marches per solve and
refinement studies multiply the step counts, so this loop dominates runtime.
Semantics match _shoot_py.integrate exactly.
"""

from libc.math cimport fabs, isfinite, pow

cdef enum:
    _REACHED_END = 0
    _CROSSED_ZERO = 1
    _TURNED_UP = 2
    _STAGNATED = 3
    _NONFINITE = 4

REACHED_END = _REACHED_END
CROSSED_ZERO = _CROSSED_ZERO
TURNED_UP = _TURNED_UP
STAGNATED = _STAGNATED
NONFINITE = _NONFINITE

cdef double _HUGE = 1e150


cdef inline double _accel(double r, double u, double v, double dim, double nm1,
                          double em1, double omega, bint quasilinear) noexcept nogil:
    cdef double au = fabs(u)
    cdef double pw = 0.0
    cdef double g
    if au > 0.0:
        pw = pow(au, em1) * u
    if quasilinear:
        g = (omega * u - pw - 2.0 * u * v * v) / (1.0 + 2.0 * u * u)
    else:
        g = omega * u - pw
    if r <= 0.0:
        return g / dim
    return g - nm1 * v / r


def integrate(double amplitude, int dim, double expo, double omega,
              double h, int n_steps, bint quasilinear,
              double tail_threshold, double stag_eps, int stag_run,
              double[::1] u_out, double[::1] v_out):
    """See _shoot_py.integrate; returns (status, stop_index)."""
    cdef double nm1 = dim - 1.0
    cdef double em1 = expo - 1.0
    cdef double ddim = dim
    cdef double u = amplitude
    cdef double v = 0.0
    cdef double r, u2, v2, u3, v3, u4, v4
    cdef double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v
    cdef double half = 0.5 * h
    cdef double sixth = h / 6.0
    cdef int j, i
    cdef int stag = 0
    cdef int status = _REACHED_END
    cdef int stop = n_steps

    u_out[0] = u
    v_out[0] = v
    with nogil:
        for j in range(n_steps):
            r = j * h
            k1u = v
            k1v = _accel(r, u, v, ddim, nm1, em1, omega, quasilinear)
            u2 = u + half * k1u
            v2 = v + half * k1v
            k2u = v2
            k2v = _accel(r + half, u2, v2, ddim, nm1, em1, omega, quasilinear)
            u3 = u + half * k2u
            v3 = v + half * k2v
            k3u = v3
            k3v = _accel(r + half, u3, v3, ddim, nm1, em1, omega, quasilinear)
            u4 = u + h * k3u
            v4 = v + h * k3v
            k4u = v4
            k4v = _accel(r + h, u4, v4, ddim, nm1, em1, omega, quasilinear)
            u = u + sixth * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            v = v + sixth * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            i = j + 1
            u_out[i] = u
            v_out[i] = v
            if (not (isfinite(u) and isfinite(v))) or fabs(u) > _HUGE or fabs(v) > _HUGE:
                status = _NONFINITE
                stop = i
                break
            if u < 0.0:
                status = _CROSSED_ZERO
                stop = i
                break
            if v > 0.0:
                status = _TURNED_UP
                stop = i
                break
            if v >= -stag_eps and u > tail_threshold:
                stag += 1
                if stag >= stag_run:
                    status = _STAGNATED
                    stop = i
                    break
            else:
                stag = 0
    return status, stop
