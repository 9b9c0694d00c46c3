"""Numba-compiled inner loops.

These kernels are the hot paths: the stochastic state-diffusion stepper,
the classical fixed-step integrator, and Wigner grid evaluation. Everything
here operates on raw arrays; the public modules own validation and types.
"""

import cmath
import math

import numpy as np
from numba import njit, prange

CHI_CONSTANT = 0
CHI_SINUSOIDAL = 1
F_CONSTANT = 0
F_COMPLEX_EXPONENTIAL = 1
F_SINUSOIDAL = 2

CHI_KIND_CODES = {"constant": CHI_CONSTANT, "sinusoidal": CHI_SINUSOIDAL}
F_KIND_CODES = {
    "constant": F_CONSTANT,
    "complex_exponential": F_COMPLEX_EXPONENTIAL,
    "sinusoidal": F_SINUSOIDAL,
}


@njit(cache=True)
def _f_value(kind, f0, f1, sdelta, t):
    if kind == F_COMPLEX_EXPONENTIAL:
        return f0 + f1 * cmath.exp(1j * sdelta * t)
    if kind == F_SINUSOIDAL:
        return f0 + f1 * math.sin(sdelta * t)
    return f0


@njit(cache=True)
def _chi_value(kind, chi0, chi1, Omega, t):
    if kind == CHI_SINUSOIDAL:
        return chi0 + chi1 * math.sin(Omega * t)
    return chi0


# ---------------------------------------------------------------------------
# quantum state diffusion stepper
# ---------------------------------------------------------------------------

@njit(cache=True)
def qsd_advance(psi, t0, dt, nsteps, delta, chi0, chi1, Omega, chi_kind,
                f0, f1, sdelta, f_kind, g1sq, g2sq, noise, renorm):
    """Advance the trajectory state in place by nsteps.

    One step: Ito-Euler update of the drive coupling, the nonlinear
    expectation feedback and the noise term, followed by the exact
    propagator of the diagonal part (detuning, Kerr phase and the
    L^dag L damping), then renormalization.

    noise has shape (nsteps, 4): standard normals for the two complex
    Wiener increments. Returns the pre-renormalization norm defect of the
    last step (NaN signals divergence).
    """
    dim = psi.shape[0]
    sq = np.empty(dim)
    for n in range(dim):
        sq[n] = math.sqrt(n)
    # exact diagonal propagator with the constant part of chi
    ebase = np.empty(dim, dtype=np.complex128)
    for n in range(dim):
        d = -1j * (delta * n + chi0 * n * n) - 0.5 * (g1sq * n + g2sq * (n + 1))
        ebase[n] = cmath.exp(dt * d)
    av = np.empty(dim, dtype=np.complex128)
    cr = np.empty(dim, dtype=np.complex128)
    s1 = math.sqrt(g1sq)
    s2 = math.sqrt(g2sq)
    amp = math.sqrt(0.5 * dt)
    defect = 0.0
    for k in range(nsteps):
        t = t0 + k * dt
        for n in range(dim - 1):
            av[n] = sq[n + 1] * psi[n + 1]
        av[dim - 1] = 0.0
        cr[0] = 0.0
        for n in range(1, dim):
            cr[n] = sq[n] * psi[n - 1]
        ea = 0.0 + 0.0j
        for n in range(dim):
            ea += psi[n].conjugate() * av[n]
        eac = ea.conjugate()
        ea2 = (ea * eac).real
        f = _f_value(f_kind, f0, f1, sdelta, t)
        dxi1 = amp * complex(noise[k, 0], noise[k, 1])
        dxi2 = amp * complex(noise[k, 2], noise[k, 3])
        c_av = (-1j * f.conjugate() + g1sq * eac) * dt + s1 * dxi1
        c_cr = (-1j * f + g2sq * ea) * dt + s2 * dxi2
        c_id = 1.0 - 0.5 * (g1sq + g2sq) * ea2 * dt - s1 * ea * dxi1 - s2 * eac * dxi2
        if chi_kind == CHI_SINUSOIDAL:
            # e^{-i theta n^2} by phase recurrence: (n+1)^2 - n^2 = 2n+1
            theta = dt * chi1 * math.sin(Omega * t)
            w = cmath.exp(-1j * theta)
            r = w * w
            v = 1.0 + 0.0j
            for n in range(dim):
                phi = c_id * psi[n] + c_av * av[n] + c_cr * cr[n]
                psi[n] = ebase[n] * v * phi
                v = v * w
                w = w * r
        else:
            for n in range(dim):
                phi = c_id * psi[n] + c_av * av[n] + c_cr * cr[n]
                psi[n] = ebase[n] * phi
        s = 0.0
        for n in range(dim):
            s += psi[n].real * psi[n].real + psi[n].imag * psi[n].imag
        nrm = math.sqrt(s)
        defect = abs(nrm - 1.0)
        if not math.isfinite(nrm) or nrm == 0.0:
            return math.nan
        if renorm:
            inv = 1.0 / nrm
            for n in range(dim):
                psi[n] = psi[n] * inv
        elif defect > 0.1:
            return math.nan
    return defect


@njit(cache=True)
def state_moments(psi):
    """(<n>, <a>, <n^2>, top-decile population) of a normalized state."""
    dim = psi.shape[0]
    mean_n = 0.0
    mean_n2 = 0.0
    mean_a = 0.0 + 0.0j
    for n in range(dim):
        pop = psi[n].real * psi[n].real + psi[n].imag * psi[n].imag
        mean_n += n * pop
        mean_n2 += n * n * pop
        if n + 1 < dim:
            mean_a += psi[n].conjugate() * math.sqrt(n + 1.0) * psi[n + 1]
    start = min(dim - 1, int(math.floor(0.9 * dim)))
    leak = 0.0
    for n in range(start, dim):
        leak += psi[n].real * psi[n].real + psi[n].imag * psi[n].imag
    return mean_n, mean_a, mean_n2, leak


# ---------------------------------------------------------------------------
# classical amplitude dynamics
# ---------------------------------------------------------------------------

@njit(cache=True)
def _classical_rhs(a, t, gamma, delta, chi0, chi1, Omega, chi_kind,
                   f0, f1, sdelta, f_kind):
    chi = _chi_value(chi_kind, chi0, chi1, Omega, t)
    aa = a.real * a.real + a.imag * a.imag
    return -(0.5 * gamma) * a - 1j * (delta + chi * (1.0 + 2.0 * aa)) * a \
        - 1j * _f_value(f_kind, f0, f1, sdelta, t)


@njit(cache=True)
def _classical_rk4(a, t, dt, gamma, delta, chi0, chi1, Omega, chi_kind,
                   f0, f1, sdelta, f_kind):
    k1 = _classical_rhs(a, t, gamma, delta, chi0, chi1, Omega, chi_kind, f0, f1, sdelta, f_kind)
    k2 = _classical_rhs(a + 0.5 * dt * k1, t + 0.5 * dt, gamma, delta, chi0, chi1, Omega,
                        chi_kind, f0, f1, sdelta, f_kind)
    k3 = _classical_rhs(a + 0.5 * dt * k2, t + 0.5 * dt, gamma, delta, chi0, chi1, Omega,
                        chi_kind, f0, f1, sdelta, f_kind)
    k4 = _classical_rhs(a + dt * k3, t + dt, gamma, delta, chi0, chi1, Omega,
                        chi_kind, f0, f1, sdelta, f_kind)
    return a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit(cache=True)
def classical_advance(a0, t0, dt, nsteps, stride, out,
                      gamma, delta, chi0, chi1, Omega, chi_kind,
                      f0, f1, sdelta, f_kind):
    """Fixed-step RK4; records the state after every `stride` steps into out.

    Returns the final amplitude; NaN components signal |alpha| blow-up.
    """
    a = a0
    j = 0
    for k in range(nsteps):
        a = _classical_rk4(a, t0 + k * dt, dt, gamma, delta, chi0, chi1, Omega,
                           chi_kind, f0, f1, sdelta, f_kind)
        if abs(a.real) > 1e6 or abs(a.imag) > 1e6 or not (math.isfinite(a.real) and math.isfinite(a.imag)):
            return complex(math.nan, math.nan)
        if stride > 0 and (k + 1) % stride == 0 and j < out.shape[0]:
            out[j] = a
            j += 1
    return a


@njit(cache=True)
def benettin_lyapunov(a0, t0, dt, steps_per_renorm, n_renorms, d0,
                      gamma, delta, chi0, chi1, Omega, chi_kind,
                      f0, f1, sdelta, f_kind):
    """Two-trajectory Benettin estimate of the largest Lyapunov exponent.

    The companion trajectory starts offset by d0 and is rescaled back to
    separation d0 every steps_per_renorm steps. Returns the accumulated
    sum of log stretching factors (divide by total time outside).
    """
    a = a0
    b = a0 + d0
    t = t0
    acc = 0.0
    for _ in range(n_renorms):
        for k in range(steps_per_renorm):
            a = _classical_rk4(a, t, dt, gamma, delta, chi0, chi1, Omega,
                               chi_kind, f0, f1, sdelta, f_kind)
            b = _classical_rk4(b, t, dt, gamma, delta, chi0, chi1, Omega,
                               chi_kind, f0, f1, sdelta, f_kind)
            t += dt
        d = abs(b - a)
        if d == 0.0 or not math.isfinite(d):
            return math.nan
        acc += math.log(d / d0)
        b = a + (b - a) * (d0 / d)
    return acc


# ---------------------------------------------------------------------------
# Wigner function evaluation
# ---------------------------------------------------------------------------

@njit(cache=True, parallel=True)
def wigner_eval(rho, r, theta, out_re, out_im):
    """W(r_i, theta_i) = sum_nm rho_nm W_mn for each node i.

    Uses the scaled associated-Laguerre recurrence on
    phi_n^k(r) = sqrt(n!/(n+k)!) (2r)^k exp(-2r^2) L_n^k(4r^2), which stays
    bounded for any truncation, so no log-space bookkeeping is needed past
    the phi_0^k seed.
    """
    dim = rho.shape[0]
    two_over_pi = 2.0 / math.pi
    for i in prange(r.shape[0]):
        rr = r[i]
        x = 4.0 * rr * rr
        acc = 0.0 + 0.0j
        for k in range(dim):
            if k == 0:
                phi = math.exp(-0.5 * x)
            elif rr == 0.0:
                break  # phi_n^k(0) = 0 for all k > 0
            else:
                lg = -0.5 * math.lgamma(k + 1.0) + k * math.log(2.0 * rr) - 0.5 * x
                phi = math.exp(lg)
            eik = cmath.exp(1j * k * theta[i])
            c = two_over_pi * eik
            phi_prev = 0.0
            sign = 1.0
            for n in range(dim - k):
                m = n + k
                w_mn = c * (sign * phi)
                if k == 0:
                    acc += rho[n, n] * w_mn
                else:
                    acc += rho[n, m] * w_mn + rho[m, n] * w_mn.conjugate()
                # phi_{n+1} from (phi_n, phi_{n-1})
                an = (2.0 * n + k + 1.0 - x) / math.sqrt((n + 1.0) * (n + k + 1.0))
                bn = math.sqrt(n * (n + k) / ((n + 1.0) * (n + k + 1.0)))
                phi_next = an * phi - bn * phi_prev
                phi_prev = phi
                phi = phi_next
                sign = -sign
        out_re[i] = acc.real
        out_im[i] = acc.imag
