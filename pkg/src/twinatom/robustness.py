"""Monte Carlo study of Zeeman-phase fluctuations.

Each sample multiplies the left and right phases by independent random
factors.  Sample ``k`` draws from its own generator seeded by
``(seed, k)``, so results do not depend on evaluation order or chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from . import interferometer as ifm
from . import twinstate
from .errors import InvalidArgumentError

PERCENTILES = (5, 25, 50, 75, 95)
TRUNCATION_SIGMAS = 3.0
_CHUNK = 64


@dataclass(frozen=True)
class NoiseSpec:
    """Relative phase noise.

    ``uniform``: each phase factor is uniform on ``[1 - a, 1 + a]``.
    ``gaussian``: relative standard deviation ``a``, truncated at 3 sigma.
    """

    rel_amplitude: float = 0.15
    distribution: Literal["uniform", "gaussian"] = "uniform"
    n_samples: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.rel_amplitude < 1.0):
            raise InvalidArgumentError(
                f"rel_amplitude must lie in [0, 1), got {self.rel_amplitude!r}"
            )
        if self.distribution not in ("uniform", "gaussian"):
            raise InvalidArgumentError(f"unknown distribution {self.distribution!r}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise InvalidArgumentError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if not (0 <= int(self.seed) < 2**64):
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


def sample_rng(seed: int, sample_index: int) -> np.random.Generator:
    """Independent generator for one sample, keyed on ``(seed, sample_index)``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(sample_index),)))


def phase_factors(noise: NoiseSpec, sample_index: int) -> tuple[float, float]:
    """Multiplicative factors ``(f_left, f_right)`` for one sample."""
    if not (0 <= sample_index < noise.n_samples):
        raise InvalidArgumentError(
            f"sample_index must lie in [0, {noise.n_samples}), got {sample_index!r}"
        )
    a = noise.rel_amplitude
    rng = sample_rng(noise.seed, sample_index)
    if noise.distribution == "uniform":
        z = rng.uniform(-1.0, 1.0, size=2)
    else:
        z = np.empty(2)
        for i in range(2):
            draw = rng.standard_normal()
            while abs(draw) > TRUNCATION_SIGMAS:
                draw = rng.standard_normal()
            z[i] = draw
    return 1.0 + a * float(z[0]), 1.0 + a * float(z[1])


def all_phase_factors(noise: NoiseSpec) -> np.ndarray:
    """``(n_samples, 2)`` array of per-sample factors, in sample order."""
    return np.array([phase_factors(noise, k) for k in range(noise.n_samples)])


def perturbed_signal(lam: float, phases, noise: NoiseSpec, sample_index: int) -> float:
    ph = ifm.as_phases(phases)
    f_l, f_r = phase_factors(noise, sample_index)
    return ifm.signal(lam, (ph.phi_l * f_l, ph.phi_r * f_r))


@dataclass(frozen=True)
class EnsembleStats:
    lam: float
    phi_l: float
    grid: np.ndarray
    noise: NoiseSpec
    #: shape ``(len(PERCENTILES), len(grid))``
    percentiles: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    #: per-sample peak asymmetry at right phases pi/2 and 3 pi/2
    asymmetry: np.ndarray = field(repr=False)

    def band(self, lo: int = 5, hi: int = 95) -> np.ndarray:
        return self.percentiles[PERCENTILES.index(hi)] - self.percentiles[PERCENTILES.index(lo)]

    def band_area(self) -> float:
        return float(np.trapezoid(self.band(), self.grid))


def ensemble_scan(lam: float, phi_l: float, grid, noise: NoiseSpec) -> EnsembleStats:
    """Percentile bands of noisy scans and the spread of the peak asymmetry."""
    lam = twinstate.validate_lambda(lam)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidArgumentError("grid must be a nonempty 1-D sequence")
    factors = all_phase_factors(noise)
    f_l, f_r = factors[:, :1], factors[:, 1:]

    curves = np.empty((noise.n_samples, grid.size))
    for start in range(0, noise.n_samples, _CHUNK):
        sl = slice(start, start + _CHUNK)
        curves[sl] = ifm.signal_many(lam, phi_l * f_l[sl], grid[None, :] * f_r[sl])

    peaks = np.array([math.pi / 2, 3 * math.pi / 2])
    at_peaks = ifm.signal_many(lam, phi_l * f_l, peaks[None, :] * f_r)
    asym = ifm.asymmetry(at_peaks[:, 0], at_peaks[:, 1])

    return EnsembleStats(
        lam=lam,
        phi_l=float(phi_l),
        grid=grid,
        noise=noise,
        percentiles=np.percentile(curves, PERCENTILES, axis=0),
        mean=curves.mean(axis=0),
        std=curves.std(axis=0),
        asymmetry=asym,
    )


class SeparationReport(NamedTuple):
    #: 5th percentile of the higher asymmetry sample minus 95th of the lower
    gap: float
    distinguishable: bool


def separation_report(stats_a: EnsembleStats, stats_b: EnsembleStats) -> SeparationReport:
    """Whether two ensembles' asymmetry distributions have disjoint 5-95% ranges."""
    if stats_a.grid.shape != stats_b.grid.shape or not np.array_equal(stats_a.grid, stats_b.grid):
        raise InvalidArgumentError("ensembles were computed on different grids")
    if stats_a.noise != stats_b.noise or stats_a.phi_l != stats_b.phi_l:
        raise InvalidArgumentError("ensembles were computed with different settings")
    lo, hi = sorted((stats_a.asymmetry, stats_b.asymmetry), key=np.median)
    gap = float(np.percentile(hi, 5) - np.percentile(lo, 95))
    return SeparationReport(gap, gap > 0)
