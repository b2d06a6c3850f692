"""Dipole-coupled proton pairs in a common acoustic phonon bath.

Concrete model behind the generic kernels: the dipolar coupling sets the
per-level interaction strengths, longitudinal acoustic phonons supply
the bath, and the kernels admit both a discrete k-sum and a closed
continuum limit.  Rate constants and the free-evolution reduced matrix
live here too.
"""

from __future__ import annotations

import cmath
import math
import warnings
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .core import CONSTANTS, KAPPA_VALUES, ConfigError, coth, kappa_of


def dipolar_coupling(d, theta=0.0, constants=CONSTANTS):
    """Secular dipolar coupling strength of one proton pair, rad/s.

    Omega0 = mu0 gamma_p^2 hbar/(8 pi) * (1 - 3 cos^2 theta)/d^3

    Negative for theta below the magic angle; zero exactly at it.
    """
    if d <= 0:
        raise ConfigError("d > 0 violated")
    factor = 1.0 - 3.0 * math.cos(theta) ** 2
    if abs(factor) < 1e-14:  # magic angle up to rounding of cos
        factor = 0.0
    c = constants
    return (c.mu_0 * c.gamma_p**2 * c.hbar / (8.0 * math.pi)
            * factor / d**3)


def lambda_coefficient(cfg, level):
    """Per-level gradient coefficient multiplying the mode amplitude.

    lambda_m / g_k = -(3/2) (Omega0/d) kappa_m, in rad/(s m): the
    derivative of the dipolar coupling along the pair axis.
    """
    omega0 = dipolar_coupling(cfg.d, cfg.theta, cfg.constants)
    return -1.5 * (omega0 / cfg.d) * kappa_of(level)


def level_energy(cfg, level):
    """Unperturbed level energy E_m = (Omega0/2) kappa_m, rad/s."""
    omega0 = dipolar_coupling(cfg.d, cfg.theta, cfg.constants)
    return 0.5 * omega0 * kappa_of(level)


def acoustic_coupling(k, cfg):
    """Acoustic-branch displacement amplitude g_k, complex meters.

    g_k = -2 u_k i sin(k d/2), u_k = sqrt(hbar/(2 w_k m_p N l_M)),
    l_M = 2 ions per cell, w_k = v_s |k|.  Purely imaginary and odd in
    k, so g_{-k} = -g_k^* = g_k^*... i.e. conj antisymmetry holds.
    k = 0 returns 0 (the uniform translation couples to nothing).
    """
    if abs(k) > math.pi / cfg.a * (1.0 + 1e-12):
        raise ConfigError("|k| <= pi/a violated")
    if k == 0:
        return 0j
    c = cfg.constants
    omega_k = cfg.v_s * abs(k)
    u_k = math.sqrt(c.hbar / (2.0 * omega_k * c.m_p * cfg.N * 2.0))
    return -2.0j * u_k * math.sin(k * cfg.d / 2.0)


OpticalRatio = namedtuple("OpticalRatio", ["ratio", "condition_holds"])


def optical_acoustic_ratio(k, omega_o, cfg):
    """Optical-to-acoustic weight ratio of the kernel integrand.

    ratio = 4 v_s^3 |k| / (w_o^3 d^2); the optical branch is negligible
    when |k| a < 2 (d/a)^2 (w_o/w_a)^3 with w_a = 2 v_s/a, reported as
    the boolean.
    """
    if omega_o <= 0:
        raise ConfigError("omega_o > 0 violated")
    if k == 0:
        raise ConfigError("k != 0 required")
    ratio = 4.0 * cfg.v_s**3 * abs(k) / (omega_o**3 * cfg.d**2)
    omega_a = 2.0 * cfg.v_s / cfg.a
    condition = abs(k) * cfg.a < 2.0 * (cfg.d / cfg.a) ** 2 \
        * (omega_o / omega_a) ** 3
    return OpticalRatio(ratio=ratio, condition_holds=bool(condition))


def _window_check(cfg, t, op_name):
    if t < 0:
        raise ValueError("t >= 0 required")
    lower = 10.0 * cfg.a / (2.0 * cfg.v_s)
    if 0.0 < t < lower:
        warnings.warn(
            f"{op_name}: t = {t:g} s below the continuum window "
            f"(t >= {lower:g} s); the linear kernel forms degrade",
            stacklevel=3,
        )


def closed_kernels(cfg, t):
    """Continuum-limit kernels (gamma, epsilon), units m^2 s^2.

    gamma(T,t) = d^2 K_B T a/(4 v_s^3 m_p) t  (high-T, linear regime)
    epsilon(t) = -d^2 hbar/(4 v_s^2 m_p) t

    Valid for t well above a/(2 v_s) (warned) and below the finite-size
    recurrence time N1 a/v_s of any discrete comparison.
    """
    _window_check(cfg, t, "closed_kernels")
    c = cfg.constants
    gamma = cfg.d**2 * c.k_B * cfg.T * cfg.a / (4.0 * cfg.v_s**3 * c.m_p) * t
    epsilon = -cfg.d**2 * c.hbar / (4.0 * cfg.v_s**2 * c.m_p) * t
    return gamma, epsilon


def phi_step(x, t, v_s):
    """Retardation step (pi/2)[sgn(v_s t + x) + sgn(v_s t - x)].

    pi inside the sound cone |x| < v_s t, pi/2 on it, 0 outside; 0 at
    t = 0.
    """
    if t < 0:
        raise ValueError("t >= 0 required")
    return (math.pi / 2.0) * (_sgn(float(v_s * t + x))
                              + _sgn(float(v_s * t - x)))


def _sgn(value):
    return (value > 0) - (value < 0)


def sinc_weight(x, a):
    """sin(pi x/a)/(pi x/a), the axial geometry weight; 1 at x = 0."""
    if a <= 0:
        raise ConfigError("a > 0 violated")
    return float(np.sinc(x / a))


def zeta_closed(cfg, x, t):
    """Continuum-limit cross kernel, units m^2 s^2.

    zeta = d^2 hbar a/(2 v_s^3 m_p) [phi(x,t)/(2 pi)
                                     - (v_s/a) t sinc(x/a)]

    Exactly zero for x on a nonzero lattice site outside the sound cone.
    """
    _window_check(cfg, t, "zeta_closed")
    c = cfg.constants
    scale = cfg.d**2 * c.hbar * cfg.a / (2.0 * cfg.v_s**3 * c.m_p)
    return scale * (phi_step(x, t, cfg.v_s) / (2.0 * math.pi)
                    - (cfg.v_s / cfg.a) * t * sinc_weight(x, cfg.a))


@dataclass(frozen=True)
class RateConstants:
    """Characteristic rates and widths of the pair-phonon model.

    Omega0 rad/s (signed); nu0, nuD in Hz (nu0 signed); times in
    seconds; the widths are dimensionless standard deviations of the
    bath-site eigenvalue sums (sigma_X over the contributing plane of
    N^{2/3} sites, sigma_Xprime over all N).
    """

    Omega0: float
    nu0: float
    nuD: float
    tau_gamma: float
    tau_gamma_min: float
    sigma_X: float
    sigma_Xprime: float
    tau_X: float

    @property
    def nu0_hat(self):
        """Observable oscillation frequency 3|nu0|, Hz."""
        return 3.0 * abs(self.nu0)

    @property
    def tau_X_hat(self):
        """Observable decay time tau_X/3 (kappa difference 3), s."""
        return self.tau_X / 3.0


def rate_constants(cfg):
    """Rate constants from the sample geometry.

    nu_D = 9 Omega0^2 hbar/(32 pi v_s^2 m_p)        [Hz]
    nu_0 = -Omega0/(4 pi)                           [Hz]
    1/tau_gamma = 9 Omega0^2 K_B T a/(16 v_s^3 m_p) [1/s]
    tau_X = [2 sqrt(2) pi nu_D sigma_X]^{-1}        [s]

    At the magic angle Omega0 = 0 and the times are infinite, not an
    error.  The equivalent tau_X form via nu0_hat is cross-checked.
    """
    c = cfg.constants
    omega0 = dipolar_coupling(cfg.d, cfg.theta, cfg.constants)
    nu_d = 9.0 * omega0**2 * c.hbar / (32.0 * math.pi * cfg.v_s**2 * c.m_p)
    nu_0 = -omega0 / (4.0 * math.pi)
    sigma_x = math.sqrt(1.5 * cfg.N ** (2.0 / 3.0))
    sigma_xp = math.sqrt(1.5 * cfg.N)
    if omega0 == 0.0:
        tau_g = math.inf
        tau_x = math.inf
    else:
        inv_tau_g = (9.0 * omega0**2 * c.k_B * cfg.T * cfg.a
                     / (16.0 * cfg.v_s**3 * c.m_p))
        tau_g = 1.0 / inv_tau_g
        tau_x = 1.0 / (2.0 * math.sqrt(2.0) * math.pi * nu_d * sigma_x)
        # equivalent form in terms of the observable frequency
        nu_hat = 3.0 * abs(nu_0)
        alt = 1.0 / (math.sqrt(2.0) * math.pi**2 * nu_hat**2 * c.hbar
                     * sigma_x / (cfg.v_s**2 * c.m_p))
        if abs(alt - tau_x) > 1e-9 * tau_x:
            raise AssertionError("tau_X cross-check failed")
    return RateConstants(
        Omega0=omega0, nu0=nu_0, nuD=nu_d,
        tau_gamma=tau_g, tau_gamma_min=tau_g / 9.0,
        sigma_X=sigma_x, sigma_Xprime=sigma_xp, tau_X=tau_x,
    )


def ix_matrix():
    """Collective I_x of the pair over the triplet-singlet basis.

    Nonzero elements 1/sqrt(2) connect TPlus<->TZero and TZero<->TMinus
    only; the singlet is dark.
    """
    ix = np.zeros((4, 4))
    s = 1.0 / math.sqrt(2.0)
    ix[0, 1] = ix[1, 0] = s
    ix[1, 2] = ix[2, 1] = s
    return ix


def initial_after_pulse(omega0_larmor, T, constants=CONSTANTS):
    """Deviation matrix right after a saturating pi/2 pulse.

    Delta sigma(0) = -(hbar w0 / K_B T) I_x: traceless, Hermitian, with
    weight only on the single-quantum triplet coherences.
    """
    if T <= 0:
        raise ConfigError("T > 0 violated")
    amp = -constants.hbar * omega0_larmor / (constants.k_B * T)
    return amp * ix_matrix().astype(complex)


def _gprime(rates, cfg, dk):
    """Residual bath-average factor of the unapproximated path."""
    arg = (math.sqrt(2.0) * math.pi * rates.nuD * dk
           * rates.sigma_Xprime * cfg.a / cfg.v_s)
    return math.exp(-(arg**2))


def free_sigma(cfg, sigma0, t, exact_path=False):
    """Free evolution of the deviation matrix.

    Default: sigma_mn(t) = sigma_mn(0) exp(i 2 pi nu0 (km-kn) t)
    exp(-[(km-kn) t / tau_X]^2).  The exact path keeps the slow
    exp(-(km-kn)^2 t/tau_gamma) decay, the quadratic nu_D phase and the
    near-unity residual factor G'.
    """
    if t < 0:
        raise ValueError("t >= 0 required")
    sigma0 = np.asarray(sigma0, dtype=complex)
    if sigma0.shape != (4, 4):
        raise ValueError("sigma0 must be 4x4")
    rates = rate_constants(cfg)
    kappa = np.array(KAPPA_VALUES, dtype=float)
    dk = np.subtract.outer(kappa, kappa)
    if not exact_path:
        # the dropped factor must actually be negligible
        worst = _gprime(rates, cfg, np.max(np.abs(dk)))
        if not (1.0 - 1e-6 <= worst <= 1.0):
            raise AssertionError(
                f"G' = {worst:.9g} outside [1-1e-6, 1]; exact path required"
            )
    phase = np.exp(2.0j * math.pi * rates.nu0 * dk * t)
    envelope = (np.exp(-((dk * t / rates.tau_X) ** 2))
                if math.isfinite(rates.tau_X) else np.ones_like(dk))
    out = sigma0 * phase * envelope
    if exact_path:
        ksq = np.subtract.outer(kappa**2, kappa**2)
        out = out * np.exp(2.0j * math.pi * rates.nuD * ksq * t)
        if math.isfinite(rates.tau_gamma):
            out = out * np.exp(-(dk**2) * t / rates.tau_gamma)
        gp = np.vectorize(lambda e: _gprime(rates, cfg, abs(e)))(dk)
        out = out * gp
    return out


def discrete_kernel_sums(cfg, t, x=0.0):
    """Direct mode sums for (gamma, epsilon, zeta), units m^2 s^2.

    Sums over the 1-D grid k_q = 2 pi q/(N1 a), q = +-1..+-N1/2, with
    each grid mode standing for N/N1 of the full bath.  Valid inside the
    window a/v_s << t << N1 a/v_s (warned outside); this is the oracle
    for the closed kernels.
    """
    if cfg.N1 < 2:
        raise ConfigError("N1 >= 2 violated")
    if t < 0:
        raise ValueError("t >= 0 required")
    lower = cfg.a / cfg.v_s
    upper = cfg.N1 * cfg.a / cfg.v_s
    if not lower * 10.0 <= t <= upper / 10.0:
        warnings.warn(
            f"discrete_kernel_sums: t = {t:g} s outside the window "
            f"({lower:g}, {upper:g}) s; finite-size artifacts dominate",
            stacklevel=2,
        )
    half = cfg.N1 // 2
    q = np.concatenate([np.arange(-half, 0), np.arange(1, half + 1)])
    k = 2.0 * math.pi * q / (cfg.N1 * cfg.a)
    omega = cfg.v_s * np.abs(k)
    c = cfg.constants
    u2 = c.hbar / (2.0 * omega * c.m_p * cfg.N * 2.0)
    g2 = 4.0 * u2 * np.sin(k * cfg.d / 2.0) ** 2       # |g_k|^2
    weight = cfg.N / cfg.N1
    wt = omega * t
    osc = np.sin(wt) - wt
    coth_f = 1.0 / np.tanh(cfg.beta * omega / 2.0)
    base = g2 / omega**2
    gamma = weight * float(np.sum(2.0 * base * np.sin(wt / 2.0) ** 2 * coth_f))
    epsilon = weight * float(np.sum(base * osc))
    # cross kernel with partner displaced by x along the axis:
    # g^A g^{A'*} = |g|^2 exp(-i k x)
    zeta = weight * float(np.sum(
        2.0 * base * (np.cos(k * x) * osc + np.sin(k * x) * (1.0 - np.cos(wt)))
    ))
    return gamma, epsilon, zeta
