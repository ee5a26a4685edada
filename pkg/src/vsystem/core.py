"""Parameter model, units and the reduced density-matrix representation.

All rates, Rabi frequencies and detunings are angular frequencies expressed
in units of the half decay rate Γ₁ of the fast level |1⟩.  Level |3⟩ is the
common ground state; |1⟩ (fast, cooling transition) and |2⟩ (slow, clock
transition) are the two excited states.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import NonPositiveRate, ParameterError

#: Order of the eight real components of a :class:`BlochState`.
STATE_LABELS = ("rho11", "rho22", "re_rho12", "im_rho12",
                "re_rho13", "im_rho13", "re_rho23", "im_rho23")

#: In⁺-like defaults: ν/Γ₁ from 2ν = 2π·0.82 Hz against 2Γ₁ = 2π·360 kHz.
IN_PLUS_NU = 0.41 / 180e3
DEFAULT_NU = 2.28e-6
DEFAULT_GAMMA_L = 1e-4


@dataclass(frozen=True)
class SystemParams:
    gamma1: float = 1.0
    nu: float = DEFAULT_NU
    gamma_l: float = DEFAULT_GAMMA_L
    eps1: float = 1.0
    eps2: float = 0.0
    delta1: float = 0.0
    delta2: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not np.isfinite(value):
                raise ParameterError(f"{f.name} must be finite, got {value!r}")
            object.__setattr__(self, f.name, value)
        if self.gamma_l < 0:
            raise ParameterError(f"gamma_l must be >= 0, got {self.gamma_l}")
        if self.eps1 < 0 or self.eps2 < 0:
            raise ParameterError("Rabi frequencies eps1, eps2 must be >= 0")

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)


def normalize(raw: SystemParams) -> SystemParams:
    """Rescale every field by ``raw.gamma1`` so that the result has gamma1 == 1."""
    if not raw.gamma1 > 0:
        raise NonPositiveRate(f"gamma1 must be > 0, got {raw.gamma1}")
    if not raw.nu > 0:
        raise NonPositiveRate(f"nu must be > 0, got {raw.nu}")
    if raw.gamma1 == 1.0:
        return raw
    g = raw.gamma1
    return SystemParams(gamma1=1.0, nu=raw.nu / g, gamma_l=raw.gamma_l / g,
                        eps1=raw.eps1 / g, eps2=raw.eps2 / g,
                        delta1=raw.delta1 / g, delta2=raw.delta2 / g)


@dataclass(frozen=True)
class LimitWarning:
    """One violated clause of the strong/intermediate/weak rate hierarchy."""
    clause: str
    ratio: float
    factor: float

    def __str__(self):
        return f"{self.clause} violated: ratio {self.ratio:.3g} < {self.factor:g}"


def check_limit_hierarchy(p: SystemParams, factor: float = 10.0) -> list[LimitWarning]:
    """Check Γ₁, ε₁ ≫ γ_l, ε₂ ≫ ν at the given ratio ``factor``.

    The strong side is max(Γ₁, ε₁): either a fast decay or a strong pump is
    enough to dominate the clock-laser scales.  A clause whose smaller side is
    exactly zero (γ_l = 0 or ε₂ = 0) is treated as satisfied, since the
    corresponding term is then absent from the equations of motion.
    """
    strong = max(p.gamma1, p.eps1)
    clauses = [
        ("max(Gamma1, eps1) >> gamma_l", strong, p.gamma_l, p.gamma_l),
        ("max(Gamma1, eps1) >> eps2", strong, p.eps2, p.eps2),
        ("gamma_l >> nu", p.gamma_l, p.nu, p.gamma_l),
        ("eps2 >> nu", p.eps2, p.nu, p.eps2),
    ]
    out = []
    for name, big, small, present in clauses:
        if present == 0:
            continue
        ratio = big / small
        if ratio < factor:
            out.append(LimitWarning(name, ratio, factor))
    return out


class Regime(enum.Enum):
    ATS = "ATS"
    CIC = "CIC"
    CRITICAL = "Critical"

    @classmethod
    def from_b_squared(cls, b_squared: float, tol: float = 1e-12) -> "Regime":
        if b_squared < -tol:
            return cls.ATS
        if b_squared > tol:
            return cls.CIC
        return cls.CRITICAL


@dataclass(frozen=True, eq=False)
class BlochState:
    """Eight real numbers [ρ₁₁, ρ₂₂, Re ρ₁₂, Im ρ₁₂, Re ρ₁₃, Im ρ₁₃, Re ρ₂₃, Im ρ₂₃]."""
    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(8)
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    def __eq__(self, other):
        return isinstance(other, BlochState) and np.array_equal(self.x, other.x)

    def __hash__(self):
        return hash(self.x.tobytes())

    @property
    def rho11(self) -> float:
        return float(self.x[0])

    @property
    def rho22(self) -> float:
        return float(self.x[1])

    @property
    def rho33(self) -> float:
        return 1.0 - (float(self.x[0]) + float(self.x[1]))

    @property
    def rho12(self) -> complex:
        return complex(self.x[2], self.x[3])

    @property
    def rho13(self) -> complex:
        return complex(self.x[4], self.x[5])

    @property
    def rho23(self) -> complex:
        return complex(self.x[6], self.x[7])

    def as_dict(self) -> dict:
        d = dict(zip(STATE_LABELS, map(float, self.x)))
        d["rho33"] = self.rho33
        return d

    @classmethod
    def ground(cls) -> "BlochState":
        return cls(np.zeros(8))

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "BlochState":
        rho = np.asarray(rho)
        return cls([rho[0, 0].real, rho[1, 1].real,
                    rho[0, 1].real, rho[0, 1].imag,
                    rho[0, 2].real, rho[0, 2].imag,
                    rho[1, 2].real, rho[1, 2].imag])


def reconstruct(s: BlochState | np.ndarray) -> np.ndarray:
    """Full 3×3 Hermitian density matrix with ρ₃₃ restored from the trace.

    ρ₃₃ = 1 − (ρ₁₁ + ρ₂₂) makes the trace come out as exactly 1.0 whenever
    the population sum lies in [0, 2].
    """
    x = s.x if isinstance(s, BlochState) else np.asarray(s, dtype=float)
    rho = np.empty((3, 3), dtype=complex)
    rho[0, 0] = x[0]
    rho[1, 1] = x[1]
    rho[2, 2] = 1.0 - (x[0] + x[1])
    rho[0, 1] = complex(x[2], x[3])
    rho[0, 2] = complex(x[4], x[5])
    rho[1, 2] = complex(x[6], x[7])
    rho[1, 0] = rho[0, 1].conjugate()
    rho[2, 0] = rho[0, 2].conjugate()
    rho[2, 1] = rho[1, 2].conjugate()
    return rho


def random_physical_state(rng: np.random.Generator) -> BlochState:
    """A random mixed state, drawn as W W†/tr with complex Gaussian W."""
    w = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = w @ w.conj().T
    return BlochState.from_matrix(rho / np.trace(rho).real)


_PARAM_KEYS = ("gamma1", "nu", "gamma_l", "eps1", "eps2", "delta1", "delta2")


def convert_mapping(data: Mapping[str, float]) -> dict:
    """Translate a flat parameter mapping into Γ₁ units, keeping only given keys.

    Plain keys (``nu``, ``eps1`` …) are already in units of Γ₁.  A key with an
    ``_hz`` suffix is a physical frequency and is divided by ``gamma1_hz``,
    which must then be present.  A unitless ``gamma1`` other than 1 rescales
    the remaining keys.
    """
    gamma1_hz = data.get("gamma1_hz")
    if gamma1_hz is not None and not float(gamma1_hz) > 0:
        raise NonPositiveRate(f"gamma1_hz must be > 0, got {gamma1_hz}")
    out = {}
    for key, value in data.items():
        if key == "gamma1_hz":
            continue
        name, hz = (key[:-3], True) if key.endswith("_hz") else (key, False)
        if name not in _PARAM_KEYS:
            raise ParameterError(f"unknown parameter key {key!r}")
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ParameterError(f"{key} must be a number, got {value!r}") from None
        if hz:
            if gamma1_hz is None:
                raise ParameterError(f"{key} given in Hz but gamma1_hz is missing")
            value /= float(gamma1_hz)
        out[name] = value
    if gamma1_hz is not None:
        out["gamma1"] = 1.0
    g = out.pop("gamma1", 1.0)
    if not g > 0:
        raise NonPositiveRate(f"gamma1 must be > 0, got {g}")
    return {k: v / g for k, v in out.items()}


def params_from_mapping(data: Mapping[str, float], base: SystemParams | None = None) -> SystemParams:
    """Normalized parameters from a flat mapping layered over ``base``."""
    values = (base or SystemParams()).as_dict()
    values.update(convert_mapping(data))
    values["gamma1"] = 1.0
    return normalize(SystemParams(**values))


def read_mapping(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read parameter file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ParameterError(f"{path}: expected a flat JSON object")
    return data


def load_params(path: str | Path, base: SystemParams | None = None) -> SystemParams:
    return params_from_mapping(read_mapping(path), base)
