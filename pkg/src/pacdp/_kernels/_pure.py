"""Pure-Python kernels for the censored-Gaussian likelihood and its sampler.

This module and ``_core.pyx`` implement the same algorithms with the same
operation order; both call libm transcendentals, so their outputs agree
bit-for-bit.  Keep every arithmetic expression here in sync with the
compiled version.
"""

from math import exp, fabs, floor, log, log1p, sqrt

LOG_SQRT_2PI = 0.9189385332046727417803297364056176  # log(sqrt(2*pi))
INV_SQRT2 = 0.7071067811865475244008443621048490
SCALE_MIN = 1e-12
SCALE_MAX = 1e12

# Rational-approximation coefficients for erfc (W. J. Cody, 1969/1993 scheme;
# three regimes, relative error near machine precision for doubles).
_ERF_A = (3.16112374387056560e00, 1.13864154151050156e02,
          3.77485237685302021e02, 3.20937758913846947e03,
          1.85777706184603153e-1)
_ERF_B = (2.36012909523441209e01, 2.44024637934444173e02,
          1.28261652607737228e03, 2.84423683343917062e03)
_ERF_C = (5.64188496988670089e-1, 8.88314979438837594e00,
          6.61191906371416295e01, 2.98635138197400131e02,
          8.81952221241769090e02, 1.71204761263407058e03,
          2.05107837782607147e03, 1.23033935479799725e03,
          2.15311535474403846e-8)
_ERF_D = (1.57449261107098347e01, 1.17693950891312499e02,
          5.37181101862009858e02, 1.62138957456669019e03,
          3.29079923573345963e03, 4.36261909014324716e03,
          3.43936767414372164e03, 1.23033935480374942e03)
_ERF_P = (3.05326634961232344e-1, 3.60344899949804439e-1,
          1.25781726111229246e-1, 1.60837851487422766e-2,
          6.58749161529837803e-4, 1.63153871373020978e-2)
_ERF_Q = (2.56852019228982242e00, 1.87295284992346047e00,
          5.27905102951428412e-1, 6.05183413124413191e-2,
          2.33520497626869185e-3)
_INV_SQRT_PI = 5.6418958354775628695e-1


def erfc(x):
    y = fabs(x)
    if y <= 0.46875:
        ysq = y * y if y > 1.11e-16 else 0.0
        xnum = _ERF_A[4] * ysq
        xden = ysq
        for i in range(3):
            xnum = (xnum + _ERF_A[i]) * ysq
            xden = (xden + _ERF_B[i]) * ysq
        result = 1.0 - x * (xnum + _ERF_A[3]) / (xden + _ERF_B[3])
        return result
    if y <= 4.0:
        xnum = _ERF_C[8] * y
        xden = y
        for i in range(7):
            xnum = (xnum + _ERF_C[i]) * y
            xden = (xden + _ERF_D[i]) * y
        result = (xnum + _ERF_C[7]) / (xden + _ERF_D[7])
        # split exp(-y^2) to keep accuracy for moderate y
        ysq = floor(y * 16.0) / 16.0
        dely = (y - ysq) * (y + ysq)
        result = exp(-ysq * ysq) * exp(-dely) * result
    elif y < 26.543:
        ysq = 1.0 / (y * y)
        xnum = _ERF_P[5] * ysq
        xden = ysq
        for i in range(4):
            xnum = (xnum + _ERF_P[i]) * ysq
            xden = (xden + _ERF_Q[i]) * ysq
        result = ysq * (xnum + _ERF_P[4]) / (xden + _ERF_Q[4])
        result = (_INV_SQRT_PI - result) / y
        ysq = floor(y * 16.0) / 16.0
        dely = (y - ysq) * (y + ysq)
        result = exp(-ysq * ysq) * exp(-dely) * result
    else:
        result = 0.0
    if x < 0.0:
        result = 2.0 - result
    return result


def log_ndtr(x):
    """log of the standard normal CDF, accurate over the whole real line."""
    if x > 0.0:
        # log1p avoids cancellation where Phi(x) is near 1
        return log1p(-0.5 * erfc(x * INV_SQRT2))
    if x > -37.0:
        return log(0.5 * erfc(-x * INV_SQRT2))
    # deep lower tail: Phi(x) = phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - ...)
    z = x * x
    r = 1.0 / z
    series = 1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 + r * (
        -945.0 + r * (10395.0 + r * -135135.0))))))
    return -0.5 * z - LOG_SQRT_2PI - log(-x) + log(series)


def norm_logpdf(x):
    return -0.5 * x * x - LOG_SQRT_2PI


def mills_lower(a):
    """phi(a) / Phi(a), computed in log space."""
    return exp(norm_logpdf(a) - log_ndtr(a))


def mills_upper(b):
    """phi(b) / (1 - Phi(b)), computed in log space."""
    return exp(norm_logpdf(b) - log_ndtr(-b))


def censored_loglik(theta, sigma2, lower, upper, s1, s2, n_lo, n_hi, n_parts):
    """Log-likelihood of (theta, sigma2) given doubly censored Gaussian data
    summarized by tail counts (n_lo, n_hi) at thresholds (lower, upper) and the
    sum / sum of squares (s1, s2) of the interior values.  The additive
    constant is dropped.
    """
    sigma = sqrt(sigma2)
    n_in = n_parts - n_lo - n_hi
    ll = 0.0
    if n_lo != 0.0:
        ll += n_lo * log_ndtr((lower - theta) / sigma)
    if n_hi != 0.0:
        ll += n_hi * log_ndtr(-((upper - theta) / sigma))
    ll += (-0.5 * n_in * log(sigma2) - 0.5 * s2 / sigma2
           + theta * s1 / sigma2 - 0.5 * n_in * theta * theta / sigma2)
    return ll


def censored_dll_dtheta(theta, sigma2, lower, upper, s1, s2, n_lo, n_hi, n_parts):
    sigma = sqrt(sigma2)
    n_in = n_parts - n_lo - n_hi
    g = 0.0
    if n_lo != 0.0:
        g += -n_lo * mills_lower((lower - theta) / sigma) / sigma
    if n_hi != 0.0:
        g += n_hi * mills_upper((upper - theta) / sigma) / sigma
    g += (s1 - n_in * theta) / sigma2
    return g


def censored_d2ll_dtheta2(theta, sigma2, lower, upper, s1, s2, n_lo, n_hi, n_parts):
    sigma = sqrt(sigma2)
    n_in = n_parts - n_lo - n_hi
    h = -n_in / sigma2
    if n_lo != 0.0:
        a = (lower - theta) / sigma
        ha = mills_lower(a)
        h += -n_lo * (ha * ha + a * ha) / sigma2
    if n_hi != 0.0:
        b = (upper - theta) / sigma
        hb = mills_upper(b)
        h += -n_hi * (hb * hb - b * hb) / sigma2
    return h


def mh_chain(lower, upper, s1, s2, n_lo, n_hi, n_parts,
             theta0, v0, scale_theta, scale_v,
             burn_in, adapt_every, target_rate,
             norm_t, norm_v, unif_t, unif_v, out_theta):
    """Component-wise random-walk Metropolis over (theta, v = log sigma2).

    With the scale-invariant prior ~ 1/sigma2, the log target in (theta, v)
    coordinates is exactly the censored log-likelihood (the Jacobian of the
    v-transform cancels the prior).  Proposal scales adapt toward
    ``target_rate`` during burn-in only, every ``adapt_every`` iterations.

    The caller supplies all random draws (one normal and one uniform per
    coordinate per iteration) and a pre-allocated output buffer for the
    post-burn-in theta draws.  Returns (accept rate theta, accept rate v,
    final scale theta, final scale v), rates over the post-burn-in stretch.
    """
    n_iter = len(norm_t)
    n_keep = n_iter - burn_in
    theta = theta0
    v = v0
    st = scale_theta
    sv = scale_v
    ll = censored_loglik(theta, exp(v), lower, upper, s1, s2, n_lo, n_hi, n_parts)
    win_t = 0
    win_v = 0
    kept_t = 0
    kept_v = 0
    for i in range(n_iter):
        theta_prop = theta + st * norm_t[i]
        ll_prop = censored_loglik(theta_prop, exp(v), lower, upper,
                                  s1, s2, n_lo, n_hi, n_parts)
        if ll_prop - ll > log(unif_t[i]):
            theta = theta_prop
            ll = ll_prop
            win_t += 1
            if i >= burn_in:
                kept_t += 1
        v_prop = v + sv * norm_v[i]
        if fabs(v_prop) <= 700.0:  # keep exp(v) finite and nonzero
            ll_prop = censored_loglik(theta, exp(v_prop), lower, upper,
                                      s1, s2, n_lo, n_hi, n_parts)
            if ll_prop - ll > log(unif_v[i]):
                v = v_prop
                ll = ll_prop
                win_v += 1
                if i >= burn_in:
                    kept_v += 1
        if i < burn_in and (i + 1) % adapt_every == 0:
            st = st * exp(win_t / adapt_every - target_rate)
            sv = sv * exp(win_v / adapt_every - target_rate)
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
    return kept_t / n_keep, kept_v / n_keep, st, sv
