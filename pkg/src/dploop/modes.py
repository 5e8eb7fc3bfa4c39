"""Physical parameter validation and per-mode derived quantities.

Each mode of a solution is a wavenumber k, a diagonal sign (+1 smooth,
-1 loop) and a phase offset y0.  The admissible bands are disjoint:
loop modes need kappa*k > 2, smooth modes 0 < kappa*k < 1.  Inside
[1, 2] the amplitude coefficient a is zero or imaginary and at
kappa*k = 1 the velocity has a pole, so those inputs are rejected
rather than extrapolated.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import (
    DegenerateModes,
    ImaginaryCoefficient,
    InvalidRegime,
    ParameterError,
    VelocityPole,
)

LOOP_THRESHOLD = 2.0  # kappa*k above this: loop band
SMOOTH_THRESHOLD = 1.0  # kappa*k below this: smooth band


class Regime(Enum):
    LOOP = "loop"
    SMOOTH = "smooth"


@dataclass(frozen=True)
class ModeSpec:
    """One mode: wavenumber k > 0, diagonal sign epsilon, phase offset y0."""

    k: float
    epsilon: int
    y0: float = 0.0

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise ParameterError(f"wavenumber must be positive and finite, got {self.k}")
        if self.epsilon not in (+1, -1):
            raise ParameterError(f"sign must be +1 or -1, got {self.epsilon}")
        if not math.isfinite(self.y0):
            raise ParameterError(f"phase offset must be finite, got {self.y0}")


def velocity(kappa: float, k: float) -> float:
    """Mode velocity 3 kappa^4 / (kappa^2 k^2 - 1).

    Positive for kappa*k > 1 (loop band), negative for kappa*k < 1
    (smooth band).
    """
    if kappa * k == 1.0:
        raise VelocityPole(f"kappa*k = 1 (kappa={kappa}, k={k})")
    return 3.0 * kappa**4 / (kappa**2 * k**2 - 1.0)


def coefficient_a(kappa: float, k: float) -> float:
    """Amplitude coefficient a = sqrt((1 - (kappa k)^2/4) / (1 - (kappa k)^2)).

    Real and positive only outside [1, 2] in kappa*k: between 0 and 1/2
    for loop modes, above 1 for smooth modes.  The boundary kappa*k = 2
    (a = 0) is rejected because 1/a enters every closed form.
    """
    kk = kappa * k
    if SMOOTH_THRESHOLD <= kk <= LOOP_THRESHOLD:
        raise ImaginaryCoefficient(
            f"kappa*k = {kk:g} lies in [1, 2]; amplitude coefficient zero or imaginary"
        )
    return math.sqrt((1.0 - kk * kk / 4.0) / (1.0 - kk * kk))


def amplitude_pq(kappa: float, k: float) -> tuple[complex, complex]:
    """Amplitude parameters (p, q) = (k/2)(1 +- (2/(kappa k)) sqrt((1 - (kappa k)^2/4)/3)).

    Returned as complex numbers: for kappa*k > 2 the inner radicand is
    negative and p, q form a conjugate pair; below they are real (zero
    imaginary part).  p + q = k exactly and p*q = (k^2 - kappa^-2)/3.
    """
    kk = kappa * k
    root = cmath.sqrt((1.0 - kk * kk / 4.0) / 3.0)
    p = (k / 2.0) * (1.0 + (2.0 / kk) * root)
    q = (k / 2.0) * (1.0 - (2.0 / kk) * root)
    return p, q


def classify_mode(kappa: float, mode: ModeSpec) -> Regime:
    """Classify a mode as LOOP or SMOOTH, rejecting everything else.

    Total on {kappa > 0, k > 0, epsilon in +-1}: exactly one of LOOP,
    SMOOTH, InvalidRegime or VelocityPole results for every input.
    """
    if not (kappa > 0 and math.isfinite(kappa)):
        raise ParameterError(f"kappa must be positive and finite, got {kappa}")
    kk = kappa * mode.k
    if kk == SMOOTH_THRESHOLD:
        raise VelocityPole(f"kappa*k = 1 (kappa={kappa}, k={mode.k})")
    if mode.epsilon == -1:
        if kk <= LOOP_THRESHOLD:
            raise InvalidRegime(
                f"loop sign requires kappa*k > 2, got kappa*k = {kk:g}"
            )
        return Regime.LOOP
    if kk >= SMOOTH_THRESHOLD:
        raise InvalidRegime(
            f"smooth sign requires kappa*k < 1, got kappa*k = {kk:g}"
        )
    return Regime.SMOOTH


@dataclass(frozen=True)
class DerivedMode:
    """Velocity, amplitude coefficient and amplitude parameters of one mode."""

    c: float
    a: float
    p: complex
    q_amp: complex
    regime: Regime


def derive_mode(kappa: float, mode: ModeSpec) -> DerivedMode:
    regime = classify_mode(kappa, mode)
    p, q = amplitude_pq(kappa, mode.k)
    return DerivedMode(
        c=velocity(kappa, mode.k),
        a=coefficient_a(kappa, mode.k),
        p=p,
        q_amp=q,
        regime=regime,
    )


@dataclass(frozen=True)
class SolitonSpec:
    """A validated solution specification: kappa, 1 or 2 modes, map constant d."""

    kappa: float
    modes: tuple[ModeSpec, ...]
    d: float = 0.0

    def __init__(self, kappa, modes, d=0.0):
        object.__setattr__(self, "kappa", float(kappa))
        object.__setattr__(self, "modes", tuple(modes))
        object.__setattr__(self, "d", float(d))
        self._validate()

    def _validate(self):
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ParameterError(f"kappa must be positive and finite, got {self.kappa}")
        if not 1 <= len(self.modes) <= 2:
            raise ParameterError(f"1 or 2 modes supported, got {len(self.modes)}")
        for mode in self.modes:
            classify_mode(self.kappa, mode)
        if len(self.modes) == 2:
            m1, m2 = self.modes
            if m1.k == m2.k:
                # equal wavenumbers zero the interaction constant delta
                raise DegenerateModes(
                    f"two modes with equal wavenumber k = {m1.k:g} collapse the solution"
                )

    @property
    def n(self) -> int:
        return len(self.modes)

    def derived(self) -> tuple[DerivedMode, ...]:
        return tuple(derive_mode(self.kappa, m) for m in self.modes)
