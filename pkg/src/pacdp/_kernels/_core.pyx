# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the censored-Gaussian likelihood and its sampler.

Mirror of ``_pure.py``: same algorithms, same operation order, same libm
calls, so the two backends agree bit-for-bit.  Any change here must be made
in the pure module as well.
"""

from libc.math cimport exp, fabs, floor, log, log1p, sqrt

cdef double LOG_SQRT_2PI = 0.9189385332046727417803297364056176
cdef double INV_SQRT2 = 0.7071067811865475244008443621048490
cdef double SCALE_MIN = 1e-12
cdef double SCALE_MAX = 1e12
cdef double INV_SQRT_PI = 5.6418958354775628695e-1

cdef double[5] ERF_A = [3.16112374387056560e00, 1.13864154151050156e02,
                        3.77485237685302021e02, 3.20937758913846947e03,
                        1.85777706184603153e-1]
cdef double[4] ERF_B = [2.36012909523441209e01, 2.44024637934444173e02,
                        1.28261652607737228e03, 2.84423683343917062e03]
cdef double[9] ERF_C = [5.64188496988670089e-1, 8.88314979438837594e00,
                        6.61191906371416295e01, 2.98635138197400131e02,
                        8.81952221241769090e02, 1.71204761263407058e03,
                        2.05107837782607147e03, 1.23033935479799725e03,
                        2.15311535474403846e-8]
cdef double[8] ERF_D = [1.57449261107098347e01, 1.17693950891312499e02,
                        5.37181101862009858e02, 1.62138957456669019e03,
                        3.29079923573345963e03, 4.36261909014324716e03,
                        3.43936767414372164e03, 1.23033935480374942e03]
cdef double[6] ERF_P = [3.05326634961232344e-1, 3.60344899949804439e-1,
                        1.25781726111229246e-1, 1.60837851487422766e-2,
                        6.58749161529837803e-4, 1.63153871373020978e-2]
cdef double[5] ERF_Q = [2.56852019228982242e00, 1.87295284992346047e00,
                        5.27905102951428412e-1, 6.05183413124413191e-2,
                        2.33520497626869185e-3]


cdef double _erfc(double x) noexcept nogil:
    cdef double y = fabs(x)
    cdef double ysq, xnum, xden, result, dely
    cdef int i
    if y <= 0.46875:
        ysq = y * y if y > 1.11e-16 else 0.0
        xnum = ERF_A[4] * ysq
        xden = ysq
        for i in range(3):
            xnum = (xnum + ERF_A[i]) * ysq
            xden = (xden + ERF_B[i]) * ysq
        result = 1.0 - x * (xnum + ERF_A[3]) / (xden + ERF_B[3])
        return result
    if y <= 4.0:
        xnum = ERF_C[8] * y
        xden = y
        for i in range(7):
            xnum = (xnum + ERF_C[i]) * y
            xden = (xden + ERF_D[i]) * y
        result = (xnum + ERF_C[7]) / (xden + ERF_D[7])
        ysq = floor(y * 16.0) / 16.0
        dely = (y - ysq) * (y + ysq)
        result = exp(-ysq * ysq) * exp(-dely) * result
    elif y < 26.543:
        ysq = 1.0 / (y * y)
        xnum = ERF_P[5] * ysq
        xden = ysq
        for i in range(4):
            xnum = (xnum + ERF_P[i]) * ysq
            xden = (xden + ERF_Q[i]) * ysq
        result = ysq * (xnum + ERF_P[4]) / (xden + ERF_Q[4])
        result = (INV_SQRT_PI - result) / y
        ysq = floor(y * 16.0) / 16.0
        dely = (y - ysq) * (y + ysq)
        result = exp(-ysq * ysq) * exp(-dely) * result
    else:
        result = 0.0
    if x < 0.0:
        result = 2.0 - result
    return result


cdef double _log_ndtr(double x) noexcept nogil:
    cdef double z, r, series
    if x > 0.0:
        # log1p avoids cancellation where Phi(x) is near 1
        return log1p(-0.5 * _erfc(x * INV_SQRT2))
    if x > -37.0:
        return log(0.5 * _erfc(-x * INV_SQRT2))
    z = x * x
    r = 1.0 / z
    series = 1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 + r * (
        -945.0 + r * (10395.0 + r * -135135.0))))))
    return -0.5 * z - LOG_SQRT_2PI - log(-x) + log(series)


cdef double _norm_logpdf(double x) noexcept nogil:
    return -0.5 * x * x - LOG_SQRT_2PI


cdef double _mills_lower(double a) noexcept nogil:
    return exp(_norm_logpdf(a) - _log_ndtr(a))


cdef double _mills_upper(double b) noexcept nogil:
    return exp(_norm_logpdf(b) - _log_ndtr(-b))


cdef double _loglik(double theta, double sigma2, double lower, double upper,
                    double s1, double s2, double n_lo, double n_hi,
                    double n_parts) noexcept nogil:
    cdef double sigma = sqrt(sigma2)
    cdef double n_in = n_parts - n_lo - n_hi
    cdef double ll = 0.0
    if n_lo != 0.0:
        ll += n_lo * _log_ndtr((lower - theta) / sigma)
    if n_hi != 0.0:
        ll += n_hi * _log_ndtr(-((upper - theta) / sigma))
    ll += (-0.5 * n_in * log(sigma2) - 0.5 * s2 / sigma2
           + theta * s1 / sigma2 - 0.5 * n_in * theta * theta / sigma2)
    return ll


def erfc(double x):
    return _erfc(x)


def log_ndtr(double x):
    return _log_ndtr(x)


def norm_logpdf(double x):
    return _norm_logpdf(x)


def mills_lower(double a):
    return _mills_lower(a)


def mills_upper(double b):
    return _mills_upper(b)


def censored_loglik(double theta, double sigma2, double lower, double upper,
                    double s1, double s2, double n_lo, double n_hi,
                    double n_parts):
    return _loglik(theta, sigma2, lower, upper, s1, s2, n_lo, n_hi, n_parts)


def censored_dll_dtheta(double theta, double sigma2, double lower, double upper,
                        double s1, double s2, double n_lo, double n_hi,
                        double n_parts):
    cdef double sigma = sqrt(sigma2)
    cdef double n_in = n_parts - n_lo - n_hi
    cdef double g = 0.0
    if n_lo != 0.0:
        g += -n_lo * _mills_lower((lower - theta) / sigma) / sigma
    if n_hi != 0.0:
        g += n_hi * _mills_upper((upper - theta) / sigma) / sigma
    g += (s1 - n_in * theta) / sigma2
    return g


def censored_d2ll_dtheta2(double theta, double sigma2, double lower, double upper,
                          double s1, double s2, double n_lo, double n_hi,
                          double n_parts):
    cdef double sigma = sqrt(sigma2)
    cdef double n_in = n_parts - n_lo - n_hi
    cdef double h = -n_in / sigma2
    cdef double a, b, ha, hb
    if n_lo != 0.0:
        a = (lower - theta) / sigma
        ha = _mills_lower(a)
        h += -n_lo * (ha * ha + a * ha) / sigma2
    if n_hi != 0.0:
        b = (upper - theta) / sigma
        hb = _mills_upper(b)
        h += -n_hi * (hb * hb - b * hb) / sigma2
    return h


def mh_chain(double lower, double upper, double s1, double s2,
             double n_lo, double n_hi, double n_parts,
             double theta0, double v0, double scale_theta, double scale_v,
             int burn_in, int adapt_every, double target_rate,
             double[::1] norm_t, double[::1] norm_v,
             double[::1] unif_t, double[::1] unif_v,
             double[::1] out_theta):
    cdef int n_iter = norm_t.shape[0]
    cdef int n_keep = n_iter - burn_in
    cdef double theta = theta0
    cdef double v = v0
    cdef double st = scale_theta
    cdef double sv = scale_v
    cdef double ll = _loglik(theta, exp(v), lower, upper, s1, s2,
                             n_lo, n_hi, n_parts)
    cdef int win_t = 0
    cdef int win_v = 0
    cdef int kept_t = 0
    cdef int kept_v = 0
    cdef int i
    cdef double theta_prop, v_prop, ll_prop
    with nogil:
        for i in range(n_iter):
            theta_prop = theta + st * norm_t[i]
            ll_prop = _loglik(theta_prop, exp(v), lower, upper,
                              s1, s2, n_lo, n_hi, n_parts)
            if ll_prop - ll > log(unif_t[i]):
                theta = theta_prop
                ll = ll_prop
                win_t += 1
                if i >= burn_in:
                    kept_t += 1
            v_prop = v + sv * norm_v[i]
            if fabs(v_prop) <= 700.0:
                ll_prop = _loglik(theta, exp(v_prop), lower, upper,
                                  s1, s2, n_lo, n_hi, n_parts)
                if ll_prop - ll > log(unif_v[i]):
                    v = v_prop
                    ll = ll_prop
                    win_v += 1
                    if i >= burn_in:
                        kept_v += 1
            if i < burn_in and (i + 1) % adapt_every == 0:
                st = st * exp((<double>win_t) / adapt_every - target_rate)
                sv = sv * exp((<double>win_v) / adapt_every - target_rate)
                if st < SCALE_MIN:
                    st = SCALE_MIN
                elif st > SCALE_MAX:
                    st = SCALE_MAX
                if sv < SCALE_MIN:
                    sv = SCALE_MIN
                elif sv > SCALE_MAX:
                    sv = SCALE_MAX
                win_t = 0
                win_v = 0
            if i >= burn_in:
                out_theta[i - burn_in] = theta
    return (<double>kept_t) / n_keep, (<double>kept_v) / n_keep, st, sv
