"""Physical constants, configuration handling and the spin-pair basis.

Everything downstream (kernels, rate constants, oracles, CLI) pulls its
units and its 4-level basis from here.  SI units throughout; angular
frequencies are carried in rad/s internally, linear frequencies (Hz/kHz)
appear only at reporting boundaries.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Raised for malformed or physically invalid configurations."""


@dataclass(frozen=True)
class FundamentalConstants:
    """CODATA 2018 values, pinned so golden files stay deterministic."""

    hbar: float = 1.054571817e-34      # J s
    k_B: float = 1.380649e-23          # J/K
    mu_0: float = 1.25663706212e-6     # H/m
    gamma_p: float = 2.6752218744e8    # rad/(s T), proton
    m_p: float = 1.67262192369e-27     # kg

    def __post_init__(self):
        for name in ("hbar", "k_B", "mu_0", "gamma_p", "m_p"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"constant {name} must be positive")

    def beta(self, T):
        """Inverse temperature in time units, beta = hbar/(k_B T), seconds."""
        if T <= 0:
            raise ConfigError("T > 0 violated")
        return self.hbar / (self.k_B * T)


CONSTANTS = FundamentalConstants()


class PairLevel(enum.Enum):
    """Triplet-singlet basis of one spin pair, in fixed matrix order."""

    T_PLUS = 0
    T_ZERO = 1
    T_MINUS = 2
    SINGLET = 3


#: Integer eigenvalue kappa of the secular dipolar tensor per level.
KAPPA = {
    PairLevel.T_PLUS: 1,
    PairLevel.T_ZERO: -2,
    PairLevel.T_MINUS: 1,
    PairLevel.SINGLET: 0,
}

#: Levels in matrix order (index = position in any 4x4 pair matrix).
LEVELS = (PairLevel.T_PLUS, PairLevel.T_ZERO, PairLevel.T_MINUS,
          PairLevel.SINGLET)

#: kappa values in matrix order.
KAPPA_VALUES = tuple(KAPPA[lv] for lv in LEVELS)


def kappa_of(level):
    """kappa table lookup for a PairLevel."""
    if not isinstance(level, PairLevel):
        raise ConfigError(f"unknown level {level!r}")
    return KAPPA[level]


# Larmor frequency only scales the initial-state amplitude; the default
# corresponds to protons in a 1 T field.
_DEFAULT_OMEGA0 = CONSTANTS.gamma_p * 1.0


@dataclass(frozen=True)
class PhysicalConfig:
    """Sample geometry and bath parameters for the pair-phonon model.

    d       intra-pair proton distance, m
    a       lattice spacing along the pair axis, m
    v_s     sound speed, m/s
    T       bath temperature, K
    N       number of pairs in the sample
    theta   angle between pair axis and field axis, rad
    omega0_larmor  Larmor angular frequency, rad/s (initial amplitude only)
    N1      modes along the pair axis used by the discrete k-sums
    """

    d: float
    a: float
    v_s: float
    T: float
    N: float
    theta: float = 0.0
    omega0_larmor: float = _DEFAULT_OMEGA0
    N1: int = 100000
    constants: FundamentalConstants = field(default=CONSTANTS, repr=False)

    def __post_init__(self):
        checks = [
            (self.d > 0, "d > 0 violated"),
            (self.a > 0, "a > 0 violated"),
            (self.v_s > 0, "v_s > 0 violated"),
            (self.T > 0, "T > 0 violated"),
            (self.N >= 1, "N >= 1 violated"),
            (self.N1 >= 2, "N1 >= 2 violated"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        # small-angle treatment of pi*d/(2a) requires d < a
        if not self.d < self.a:
            raise ConfigError("d < a violated")

    @property
    def beta(self):
        """hbar/(k_B T) in seconds."""
        return self.constants.beta(self.T)


#: Gypsum-like reference sample used throughout the examples.
GYPSUM = dict(d=0.153e-9, a=0.8e-9, v_s=4570.0, T=300.0, N=1e23)


def gypsum_config(**overrides):
    """PhysicalConfig at the reference sample parameters."""
    params = dict(GYPSUM)
    params.update(overrides)
    return PhysicalConfig(**params)


# Config-file schema: one `key = value` per line, `#` comments.
_CONFIG_KEYS = {
    "d_m": "d",
    "a_m": "a",
    "v_s_mps": "v_s",
    "T_K": "T",
    "N": "N",
    "theta_rad": "theta",
    "omega0_larmor_radps": "omega0_larmor",
    "N1": "N1",
}
_REQUIRED_KEYS = ("d_m", "a_m", "v_s_mps", "T_K", "N")


def parse_config(text):
    """Parse a flat key=value config document into a PhysicalConfig.

    Unknown keys are rejected; missing required keys, non-numeric values
    and invariant violations raise ConfigError naming the offender.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, rhs = line.partition("=")
        key = key.strip()
        rhs = rhs.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key}")
        try:
            values[key] = float(rhs)
        except ValueError:
            raise ConfigError(
                f"line {lineno}: non-numeric value for {key}: {rhs!r}"
            ) from None
    for key in _REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"missing key {key}")
    kwargs = {_CONFIG_KEYS[k]: v for k, v in values.items()}
    if "N1" in kwargs:
        n1 = kwargs["N1"]
        if n1 != int(n1):
            raise ConfigError("N1 must be an integer")
        kwargs["N1"] = int(n1)
    return PhysicalConfig(**kwargs)


@dataclass(frozen=True)
class ModeSpec:
    """One bath mode: wavenumber, frequency and complex coupling amplitude."""

    k: float          # 1/m
    omega: float      # rad/s
    g: complex        # coupling amplitude, m

    def __post_init__(self):
        if self.omega < 0:
            raise ConfigError("omega >= 0 violated")


def max_beta_omega(cfg):
    """beta*omega at the top of the acoustic band, omega_max = 2 v_s/a.

    Stays <= 0.3 at the reference sample, which underwrites the high-T
    expansion of coth used by the closed kernels.
    """
    return cfg.beta * 2.0 * cfg.v_s / cfg.a


def coth(x):
    """coth(x) for x > 0, evaluated directly.

    Loses relative precision for x below ~1e-8 where coth ~ 1/x dwarfs
    the remaining series; callers stay well above that regime.
    """
    if x <= 0:
        raise ValueError("coth argument must be positive")
    return 1.0 / math.tanh(x)
