"""Analytic line spectra of sinusoidal FM/PM.

First order: sidebands at fc + n*fm weighted J_n(z). Second order: every
sideband of the modulated modulator acts as an independent phase-modulation
component with index z1*J_k(z0); the output spectrum is the convolution of
the component series. Negative frequencies fold onto positive ones by cosine
symmetry, with signed amplitudes so coincident lines interfere coherently.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_row

MERGE_FREQ_EPS = 1e-9  # Hz; closer lines are treated as coincident
MERGE_AMP_EPS = 1e-14  # amplitudes this small after merging are dropped
EXPANSION_BUDGET = 10_000_000


class BudgetExceededError(RuntimeError):
    """The truncated expansion grew past the term budget; raise the floor."""


@dataclass
class LineSpectrum:
    """Sorted cosine-phase partials: non-negative frequencies, signed amplitudes."""

    freqs: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=np.float64)
        self.amps = np.asarray(self.amps, dtype=np.float64)
        if len(self.freqs) != len(self.amps):
            raise ValueError("freqs and amps must have equal length")
        if len(self.freqs) and self.freqs[0] < 0:
            raise ValueError("line frequencies must be non-negative")
        if len(self.freqs) > 1 and np.any(np.diff(self.freqs) <= 0):
            raise ValueError("line frequencies must be strictly increasing")

    def total_power(self) -> float:
        """Mean-square power: amp^2/2 per line, amp^2 for a DC line."""
        power = 0.0
        for f, a in zip(self.freqs, self.amps):
            power += a * a if f == 0.0 else 0.5 * a * a
        return power

    def amplitude_at(self, freq_hz: float, tol_hz: float = 1e-6) -> float:
        """Signed amplitude of the line at freq_hz, or 0.0 if absent."""
        idx = np.flatnonzero(np.abs(self.freqs - freq_hz) <= tol_hz)
        return float(self.amps[idx[0]]) if len(idx) else 0.0

    def scaled(self, gain: float) -> "LineSpectrum":
        return LineSpectrum(self.freqs.copy(), self.amps * gain)


@dataclass
class TruncationPolicy:
    """Sideband count for the inner expansion plus the pruning floor."""

    sidebands: int
    amplitude_floor: float = 1e-6

    def __post_init__(self):
        if self.sidebands < 0:
            raise ValueError("sideband count must be >= 0")
        if self.amplitude_floor < 0:
            raise ValueError("amplitude floor must be >= 0")

    @classmethod
    def for_index(cls, z0: float) -> "TruncationPolicy":
        return cls(sidebands=_sideband_count(z0))


def _sideband_count(z: float) -> int:
    # Carson-style significant-sideband rule with safety margin
    return int(math.ceil(abs(z))) + 8


def _merge_signed(freqs: np.ndarray, amps: np.ndarray, floor: float):
    """Sum amplitudes of coincident signed frequencies; drop lines below floor."""
    if len(freqs) == 0:
        return np.asarray(freqs, dtype=np.float64), np.asarray(amps, dtype=np.float64)
    order = np.argsort(freqs, kind="stable")
    freqs = freqs[order]
    amps = amps[order]
    starts = np.flatnonzero(np.concatenate(([True], np.diff(freqs) > MERGE_FREQ_EPS)))
    merged = np.add.reduceat(amps, starts)
    keep = (np.abs(merged) >= floor) & (np.abs(merged) >= MERGE_AMP_EPS)
    return freqs[starts[keep]], merged[keep]


def merge_and_fold(raw_lines) -> LineSpectrum:
    """Fold negative-frequency cosine lines onto positive frequencies and merge.

    Cosine symmetry keeps the signed amplitude unchanged under folding;
    frequencies equal within 1e-9 Hz are summed, exact cancellations pruned.
    """
    lines = list(raw_lines)
    if not lines:
        return LineSpectrum(np.empty(0), np.empty(0))
    freqs = np.abs(np.array([f for f, _ in lines], dtype=np.float64))
    amps = np.array([a for _, a in lines], dtype=np.float64)
    f, a = _merge_signed(freqs, amps, 0.0)
    return LineSpectrum(f, a)


def predict_first_order(
    fc: float,
    fm: float,
    z: float,
    max_sideband: int | None = None,
    amplitude_floor: float = 0.0,
) -> LineSpectrum:
    """Sideband lines of single-modulator FM/PM: J_n(z) at fc + n*fm."""
    if fm <= 0:
        raise ValueError("modulation frequency must be positive")
    if z < 0:
        raise ValueError("modulation index must be >= 0")
    if max_sideband is None:
        max_sideband = _sideband_count(z)
    row = bessel_row(max_sideband, z)
    lines = []
    for n in range(-max_sideband, max_sideband + 1):
        a = row[abs(n)]
        if n < 0 and (n & 1):
            a = -a
        if abs(a) < amplitude_floor:
            continue
        lines.append((fc + n * fm, a))
    return merge_and_fold(lines)


def _component_weights(zeta: float, n_max: int) -> np.ndarray:
    """J_n(zeta) for n in [-n_max, n_max], parity handling signed zeta."""
    row = bessel_row(n_max, abs(zeta))
    n = np.arange(-n_max, n_max + 1)
    w = row[np.abs(n)].copy()
    odd = (np.abs(n) & 1) == 1
    if zeta >= 0:
        w[odd & (n < 0)] *= -1.0
    else:
        w[odd & (n > 0)] *= -1.0
    return w


def predict_second_order(
    fc: float,
    fm0: float,
    fm1: float,
    z0: float,
    z1: float,
    policy: TruncationPolicy | None = None,
) -> LineSpectrum:
    """Truncated line spectrum of a two-stage modulation stack.

    The modulated modulator contributes components at fm1 + k*fm0 with
    effective indices z1*J_k(z0); their Jacobi-Anger series are convolved,
    pruning amplitudes below the policy floor as the expansion grows.
    """
    if fm0 <= 0 or fm1 <= 0:
        raise ValueError("modulation frequencies must be positive")
    if z0 < 0 or z1 < 0:
        raise ValueError("modulation indices must be >= 0")
    if policy is None:
        policy = TruncationPolicy.for_index(z0)
    k_max = policy.sidebands
    floor = policy.amplitude_floor

    inner = bessel_row(k_max, z0)
    freqs = np.array([fc])
    amps = np.array([1.0])
    expanded_terms = 0
    for k in range(-k_max, k_max + 1):
        jk = inner[abs(k)]
        if k < 0 and (k & 1):
            jk = -jk
        zeta = z1 * jk
        nu = fm1 + k * fm0  # component frequency; may be negative
        n_max = _sideband_count(zeta)
        weights = _component_weights(zeta, n_max)
        n_values = np.arange(-n_max, n_max + 1)
        keep = weights != 0.0
        weights = weights[keep]
        n_values = n_values[keep]
        expanded_terms += len(freqs) * len(weights)
        if expanded_terms > EXPANSION_BUDGET:
            raise BudgetExceededError(
                f"expansion grew past {EXPANSION_BUDGET} terms; "
                "raise the amplitude floor or reduce the sideband count"
            )
        cand_f = (freqs[:, None] + n_values[None, :] * nu).ravel()
        cand_a = (amps[:, None] * weights[None, :]).ravel()
        freqs, amps = _merge_signed(cand_f, cand_a, floor)
    f, a = _merge_signed(np.abs(freqs), amps, 0.0)
    return LineSpectrum(f, a)
