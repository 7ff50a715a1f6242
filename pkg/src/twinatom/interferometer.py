"""Double Stern-Gerlach twin-atom interferometer on a side-resolved space.

Each atom carries a two-valued side label (Left for x < 0, Right for x > 0)
next to its spin-1 state.  The single-atom space is ordered
``side (L=0, R=1) x spin (+1, 0, -1)``, giving 6 states, and the two-atom
space is ``atom1 x atom2`` with flat index ``6 * a1 + a2`` (36 states).

Propagation between devices is ignored, so the device chain reduces to a
polarizer projector followed by the side-dependent phase object.  The
coincidence count is the expectation of the projector on the symmetrised
detection state (left detector on ``m_z = +1``, right detector on
``m_z = -1``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import spinops, twinstate
from .errors import DegenerateStateError, FitFailureError, InvalidArgumentError

TWO_PI = 2.0 * math.pi
SQRT_HALF = math.sqrt(0.5)


class Side(enum.IntEnum):
    LEFT = 0
    RIGHT = 1


@dataclass(frozen=True)
class PhaseSettings:
    """Zeeman phases (radians) imprinted on the left and right arms."""

    phi_l: float
    phi_r: float

    def __post_init__(self):
        if not (math.isfinite(self.phi_l) and math.isfinite(self.phi_r)):
            raise InvalidArgumentError(f"phases must be finite, got {self!r}")

    def canonical(self) -> PhaseSettings:
        """Same phases reduced to [0, 2 pi)."""
        return PhaseSettings(self.phi_l % TWO_PI, self.phi_r % TWO_PI)


def as_phases(phases) -> PhaseSettings:
    if isinstance(phases, PhaseSettings):
        return phases
    phi_l, phi_r = phases
    return PhaseSettings(float(phi_l), float(phi_r))


# ---------------------------------------------------------------------------
# states and operators


def side_ket(side: Side) -> np.ndarray:
    ket = np.zeros(2)
    ket[int(side)] = 1.0
    return ket


def atom_ket(side: Side, m: int) -> np.ndarray:
    """Single-atom 6-vector ``|side> |m>``."""
    return np.kron(side_ket(side), spinops.basis_ket(m))


def side_assignment_state() -> np.ndarray:
    """``(|L R> + |R L>) / sqrt 2`` over (side1, side2): the symmetric
    outgoing pair with one fragment in each arm."""
    left, right = side_ket(Side.LEFT), side_ket(Side.RIGHT)
    return SQRT_HALF * (np.kron(left, right) + np.kron(right, left))


def _to_sided_order(mat: np.ndarray) -> np.ndarray:
    """Reorder a (side1 side2) x (spin1 spin2) operator to (side1 spin1 side2 spin2)."""
    t = mat.reshape(2, 2, 3, 3, 2, 2, 3, 3)
    return t.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(36, 36)


def embed_spin_state(spin_state: np.ndarray) -> np.ndarray:
    """Attach the symmetric side assignment to a two-atom spin vector."""
    vec = np.kron(side_assignment_state(), np.asarray(spin_state, dtype=complex))
    return vec.reshape(2, 2, 3, 3).transpose(0, 2, 1, 3).reshape(36)


def initial_state(lam: float) -> np.ndarray:
    """Side-resolved initial density: side assignment (x) ``rho0(lam)``."""
    chi = side_assignment_state()
    return _to_sided_order(np.kron(np.outer(chi, chi), twinstate.rho0(lam)))


def partial_trace_sides(rho: np.ndarray) -> np.ndarray:
    """Trace out both side labels of a 36x36 operator, leaving the 9x9 spin part."""
    t = np.asarray(rho).reshape(2, 3, 2, 3, 2, 3, 2, 3)
    return np.einsum("aibjakbl->ijkl", t).reshape(9, 9)


def joint_exchange_operator() -> np.ndarray:
    """Swap of the two atoms, exchanging side and spin labels together."""
    swap = np.zeros((36, 36))
    for a in range(6):
        for b in range(6):
            swap[6 * b + a, 6 * a + b] = 1.0
    return swap


def single_polarizer() -> np.ndarray:
    """Per-atom filter: left arm removes ``m_z = +1``, right arm removes ``m_z = -1``."""
    keep_left = np.diag([0.0, 1.0, 1.0])
    keep_right = np.diag([1.0, 1.0, 0.0])
    return np.kron(np.diag([1.0, 0.0]), keep_left) + np.kron(np.diag([0.0, 1.0]), keep_right)


def polarizer_operator() -> np.ndarray:
    q = single_polarizer()
    return np.kron(q, q)


def single_phase_object(phases) -> np.ndarray:
    ph = as_phases(phases)
    return (
        np.kron(np.diag([1.0, 0.0]), spinops.exp_i_fx(ph.phi_l))
        + np.kron(np.diag([0.0, 1.0]), spinops.exp_i_fx(ph.phi_r))
    )


def phase_object_operator(phases) -> np.ndarray:
    o = single_phase_object(phases)
    return np.kron(o, o)


def detection_state() -> np.ndarray:
    """Symmetrised coincidence state: +1 detected on the left, -1 on the right."""
    a = atom_ket(Side.LEFT, 1)
    b = atom_ket(Side.RIGHT, -1)
    return SQRT_HALF * (np.kron(a, b) + np.kron(b, a)).astype(complex)


# ---------------------------------------------------------------------------
# pipeline


class Evolved(NamedTuple):
    rho: np.ndarray
    #: trace after the polarizer, before renormalisation
    survival: float


def _filtered_initial(lam: float):
    p = polarizer_operator()
    rho = p @ initial_state(lam) @ p.conj().T
    return rho, float(np.trace(rho).real)


def evolve(lam: float, phases) -> Evolved:
    """Final normalised density matrix after polarizer and phase object."""
    rho, survival = _filtered_initial(lam)
    if survival < 1e-14:
        raise DegenerateStateError("no population survives the polarizers")
    o = phase_object_operator(phases)
    return Evolved(o @ rho @ o.conj().T / survival, survival)


def coincidence(rho: np.ndarray) -> float:
    det = detection_state()
    return float(np.real(det.conj() @ np.asarray(rho) @ det))


def signal(lam: float, phases) -> float:
    """Coincidence rate from the full 36x36 pipeline."""
    return coincidence(evolve(lam, phases).rho)


def signal_many(lam: float, phi_l, phi_r) -> np.ndarray:
    """Vectorised :func:`signal` over broadcast arrays of phases.

    Uses ``<det| O rho O^dag |det> = w^dag rho w`` with ``w = O^dag |det>``,
    where ``O^dag`` acts on the product terms of the detection state atom by
    atom.  Equal to :func:`signal` to rounding.
    """
    rho, survival = _filtered_initial(lam)
    if survival < 1e-14:
        raise DegenerateStateError("no population survives the polarizers")
    phi_l, phi_r = np.broadcast_arrays(np.asarray(phi_l, float), np.asarray(phi_r, float))
    shape = phi_l.shape
    u_l = spinops.exp_i_fx(phi_l.ravel())
    u_r = spinops.exp_i_fx(phi_r.ravel())
    n = u_l.shape[0]
    # O^dag |L,+1> and O^dag |R,-1> for each phase pair
    a = np.zeros((n, 6), dtype=complex)
    b = np.zeros((n, 6), dtype=complex)
    a[:, 0:3] = u_l.conj().transpose(0, 2, 1)[:, :, spinops.m_index(1)]
    b[:, 3:6] = u_r.conj().transpose(0, 2, 1)[:, :, spinops.m_index(-1)]
    w = SQRT_HALF * (
        np.einsum("ni,nj->nij", a, b) + np.einsum("ni,nj->nij", b, a)
    ).reshape(n, 36)
    vals = np.sum((w.conj() @ rho) * w, axis=1).real / survival
    return vals.reshape(shape)


def analytic_signal(lam: float, phi_l, phi_r, C: float = 1.0):
    """Closed-form coincidence rate, up to the constant ``C``.

    ``C sin^2(phi_l/2) sin^2(phi_r/2) [4 lam sin phi_l sin phi_r
    + cos phi_l (5 cos phi_r + 3) + 3 cos phi_r + 5]``.  Broadcasts.
    """
    lam = twinstate.validate_lambda(lam)
    phi_l = np.asarray(phi_l, dtype=float)
    phi_r = np.asarray(phi_r, dtype=float)
    envelope = np.sin(phi_l / 2) ** 2 * np.sin(phi_r / 2) ** 2
    fringe = (
        4 * lam * np.sin(phi_l) * np.sin(phi_r)
        + np.cos(phi_l) * (5 * np.cos(phi_r) + 3)
        + 3 * np.cos(phi_r)
        + 5
    )
    out = C * envelope * fringe
    return float(out) if out.ndim == 0 else out


def _analytic_parts(phi_l: float, phi_r: np.ndarray):
    """Split the C=1 closed form into lam-independent and lam-linear parts."""
    envelope = np.sin(phi_l / 2) ** 2 * np.sin(phi_r / 2) ** 2
    base = envelope * (math.cos(phi_l) * (5 * np.cos(phi_r) + 3) + 3 * np.cos(phi_r) + 5)
    slope = envelope * 4 * math.sin(phi_l) * np.sin(phi_r)
    return base, slope


def evolved_overlap(phases) -> float:
    """Normalised overlap of the evolved ``psi0`` and ``psi1`` branches.

    Zero means the apparatus maps the two initial spin states onto
    orthogonal states.  Because the polarizer is diagonal in ``m_z`` and the
    phase object is unitary, this holds at every phase setting; the
    setting-dependent loss of coherence shows up only in the coincidence
    channel, see :func:`coincidence_visibility`.
    """
    u = phase_object_operator(phases) @ polarizer_operator()
    v0 = u @ embed_spin_state(twinstate.psi0())
    v1 = u @ embed_spin_state(twinstate.psi1())
    n0, n1 = np.linalg.norm(v0), np.linalg.norm(v1)
    if n0 < 1e-14 or n1 < 1e-14:
        raise DegenerateStateError("an evolved branch has vanishing norm")
    return float(min(1.0, abs(np.vdot(v0, v1)) / (n0 * n1)))


def coincidence_amplitudes(phases) -> tuple[complex, complex]:
    """Detection amplitudes ``<det| O P |psi_k>`` of the two spin branches."""
    u = phase_object_operator(phases) @ polarizer_operator()
    det = detection_state()
    return tuple(
        complex(np.vdot(det, u @ embed_spin_state(s)))
        for s in (twinstate.psi0(), twinstate.psi1())
    )


def coincidence_visibility(phases) -> float:
    """Largest possible coherent share of the coincidence rate, in [0, 1].

    With branch weights ``p0 = 1/3``, ``p1 = 2/3`` and amplitudes ``a0, a1``
    this is ``2 sqrt(p0 p1) |a0 a1| / (p0 |a0|^2 + p1 |a1|^2)``, i.e. the
    ratio of the interference term at ``lam = 1`` to the incoherent part.
    It vanishes where the detector cannot see both branches, e.g.
    ``phi_r = pi``.
    """
    a0, a1 = coincidence_amplitudes(phases)
    p0, p1 = 1 / 3, 2 / 3
    incoherent = p0 * abs(a0) ** 2 + p1 * abs(a1) ** 2
    if incoherent < 1e-28:
        raise DegenerateStateError("no coincidences at these phases")
    return float(min(1.0, 2 * math.sqrt(p0 * p1) * abs(a0 * a1) / incoherent))


# ---------------------------------------------------------------------------
# scans, peaks and estimation


def phase_grid(n: int = 512) -> np.ndarray:
    """``n`` equispaced right-arm phases covering [0, 2 pi] inclusive."""
    if n < 2:
        raise InvalidArgumentError("grid needs at least two points")
    return np.linspace(0.0, TWO_PI, n)


@dataclass(frozen=True)
class ScanResult:
    phi_l: float
    lam: float
    phi_r: np.ndarray
    intensity: np.ndarray
    #: least-squares factor relating ``intensity`` to the C=1 closed form
    normalization: float

    @property
    def analytic(self) -> np.ndarray:
        return analytic_signal(self.lam, self.phi_l, self.phi_r, C=1.0)

    def __len__(self):
        return len(self.phi_r)


def scan(lam: float, phi_l: float, phi_r_grid) -> ScanResult:
    """Coincidence rate across a right-arm phase scan at fixed ``phi_l``."""
    lam = twinstate.validate_lambda(lam)
    grid = np.asarray(phi_r_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidArgumentError("phi_r grid must be a nonempty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise InvalidArgumentError("phi_r grid must be strictly increasing")
    if grid[0] < 0 or grid[-1] > TWO_PI:
        raise InvalidArgumentError("phi_r grid must lie within [0, 2 pi]")
    if not math.isfinite(phi_l):
        raise InvalidArgumentError(f"phi_l must be finite, got {phi_l!r}")
    intensity = signal_many(lam, phi_l, grid)
    model = analytic_signal(lam, phi_l, grid, C=1.0)
    mm = float(model @ model)
    norm = float(intensity @ model) / mm if mm > 0 else float("nan")
    return ScanResult(float(phi_l), lam, grid, intensity, norm)


class Peak(NamedTuple):
    position: float
    height: float


def refine_peak(x: np.ndarray, y: np.ndarray, i: int) -> Peak:
    """Three-point parabolic refinement of the sampled maximum at index ``i``."""
    if i <= 0 or i >= len(x) - 1:
        return Peak(float(x[i]), float(y[i]))
    xs, ys = x[i - 1 : i + 2], y[i - 1 : i + 2]
    a, b, c = np.polyfit(xs - xs[1], ys, 2)
    if a >= 0:
        return Peak(float(x[i]), float(y[i]))
    dx = -b / (2 * a)
    return Peak(float(xs[1] + dx), float(c - b * b / (4 * a)))


def local_maxima(y: np.ndarray) -> np.ndarray:
    """Indices of interior samples not exceeded by either neighbour (rising into them)."""
    y = np.asarray(y)
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])
    return np.flatnonzero(inner) + 1


def lobe_peaks(result: ScanResult) -> tuple[Peak, Peak]:
    """Refined maxima of the first (phi_r < pi) and second (phi_r > pi) lobes.

    Each lobe is the highest local maximum on its side of pi, so a curve
    still falling from the first lobe past pi does not count as the second.
    """
    x, y = result.phi_r, result.intensity
    maxima = local_maxima(y)
    peaks = []
    for idx in (maxima[x[maxima] < math.pi], maxima[x[maxima] > math.pi]):
        if idx.size == 0:
            raise InvalidArgumentError("scan has no local maximum on one side of pi")
        peaks.append(refine_peak(x, y, int(idx[np.argmax(y[idx])])))
    return peaks[0], peaks[1]


def asymmetry(i_first: float, i_second: float) -> float:
    """Normalised peak-height difference ``(I1 - I2) / (I1 + I2)``."""
    return (i_first - i_second) / (i_first + i_second)


class LambdaEstimate(NamedTuple):
    lam: float
    out_of_range: bool


def estimate_lambda_from_ratio(i_first: float, i_second: float) -> LambdaEstimate:
    """Coherence from the rates at right-arm phases pi/2 and 3 pi/2 (left at pi/2).

    At those angles the asymmetry equals ``4 lam / 5``.  The estimate is
    clamped to [0, 1] and flagged if clamping was needed.
    """
    if not (i_first > 0 and i_second > 0):
        raise InvalidArgumentError("peak intensities must be positive")
    raw = 1.25 * asymmetry(i_first, i_second)
    lam = min(1.0, max(0.0, raw))
    return LambdaEstimate(lam, lam != raw)


class FitResult(NamedTuple):
    lam: float
    C: float
    residual: float


def fit_lambda(result: ScanResult, xtol: float = 1e-10) -> FitResult:
    """Least-squares fit of ``(lam, C)`` of the closed form to a scan.

    ``C`` is eliminated in closed form for each trial ``lam``; the remaining
    scalar problem is solved by bounded search on [0, 1] and then compared
    against the endpoints and the unconstrained linear solution.
    """
    x = np.asarray(result.phi_r, dtype=float)
    y = np.asarray(result.intensity, dtype=float)
    if x.size < 8:
        raise InvalidArgumentError("fit needs at least 8 scan points")
    if np.all(np.abs(y) < 1e-14):
        raise FitFailureError("scan intensities are all zero")
    base, slope = _analytic_parts(result.phi_l, x)

    def solve(lam):
        model = base + lam * slope
        mm = float(model @ model)
        if mm == 0.0:
            return math.inf, 0.0
        c = float(y @ model) / mm
        r = y - c * model
        return float(r @ r), c

    candidates = [0.0, 1.0]
    opt = minimize_scalar(
        lambda t: solve(t)[0], bounds=(0.0, 1.0), method="bounded", options={"xatol": xtol}
    )
    candidates.append(float(opt.x))
    design = np.stack([base, slope], axis=1)
    (c0, c1), *_ = np.linalg.lstsq(design, y, rcond=None)
    if c0 > 0 and 0.0 <= c1 / c0 <= 1.0:
        candidates.append(float(c1 / c0))

    best = min(candidates, key=lambda t: solve(t)[0])
    residual, c = solve(best)
    if not math.isfinite(residual) or c <= 0:
        raise FitFailureError("no positive normalisation fits the scan")
    return FitResult(best, c, residual)
