"""Spin-1 operator algebra.

All matrices live in the single-atom ``m_z`` basis ordered ``(+1, 0, -1)``,
i.e. row/column index 0 is ``m_z = +1`` and index 2 is ``m_z = -1``.
Angular momenta are dimensionless (units of hbar).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

#: magnetic quantum numbers in basis order
M_VALUES = (1, 0, -1)

#: Sign applied to the angle of :func:`wigner_d1` to obtain the axis rotation
#: ``D(beta)`` that carries the O_z quantization axis onto O_x.  ``-1`` means
#: the axis rotation is passive: ``D(beta) = d1(-beta) = exp(+i beta F_y)``,
#: which is the choice making ``D(-pi/2) F_z D(pi/2) = F_x`` hold.
AXIS_ROTATION_SIGN = -1

_SQRT2 = math.sqrt(2.0)


def m_index(m: int) -> int:
    """Basis index of magnetic quantum number ``m``."""
    if m not in M_VALUES:
        raise InvalidArgumentError(f"m must be one of {M_VALUES}, got {m!r}")
    return 1 - m


def basis_ket(m: int) -> np.ndarray:
    ket = np.zeros(3, dtype=complex)
    ket[m_index(m)] = 1.0
    return ket


def f_z() -> np.ndarray:
    return np.diag([1.0, 0.0, -1.0]).astype(complex)


def f_plus() -> np.ndarray:
    """Raising operator F_+ = F_x + i F_y."""
    return np.array([[0, _SQRT2, 0], [0, 0, _SQRT2], [0, 0, 0]], dtype=complex)


def f_minus() -> np.ndarray:
    return f_plus().T.copy()


def f_x() -> np.ndarray:
    return np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / _SQRT2


def f_y() -> np.ndarray:
    return np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / _SQRT2


def wigner_d1(beta: float) -> np.ndarray:
    """Small Wigner matrix ``d^1(beta) = exp(-i beta F_y)``.

    Active rotation by ``beta`` about O_y.  The result is real and
    orthogonal; it is returned as a float array.
    """
    beta = float(beta)
    if not math.isfinite(beta):
        raise InvalidArgumentError(f"rotation angle must be finite, got {beta!r}")
    c, s = math.cos(beta), math.sin(beta)
    r = s / _SQRT2
    return np.array(
        [
            [(1 + c) / 2, -r, (1 - c) / 2],
            [r, c, -r],
            [(1 - c) / 2, r, (1 + c) / 2],
        ]
    )


def axis_rotation(beta: float) -> np.ndarray:
    """Rotation ``D(beta)`` of the quantization axis by ``beta`` about O_y.

    ``D(pi/2)`` takes the O_z basis to the O_x basis, so that
    ``D(-pi/2) @ f_z() @ D(pi/2) == f_x()``.
    """
    return wigner_d1(AXIS_ROTATION_SIGN * beta)


def exp_i_fz(phi):
    """Diagonal of ``exp(i phi F_z)``; broadcasts over array ``phi``.

    Returns an array of shape ``phi.shape + (3,)``.
    """
    phi = np.asarray(phi, dtype=float)[..., None]
    return np.exp(1j * phi * np.array([1.0, 0.0, -1.0]))


def exp_i_fx(phi) -> np.ndarray:
    """``exp(i phi F_x)`` built as ``D(-pi/2) exp(i phi F_z) D(pi/2)``.

    ``phi`` may be a scalar or an array; array input yields a stack of
    3x3 matrices with shape ``phi.shape + (3, 3)``.
    """
    back = axis_rotation(-math.pi / 2)
    forth = axis_rotation(math.pi / 2)
    diag = exp_i_fz(phi)
    return np.einsum("ij,...j,jk->...ik", back, diag, forth)


def _check_cg_args(m1, m2, F, M):
    for name, m in (("m1", m1), ("m2", m2)):
        if m not in M_VALUES:
            raise InvalidArgumentError(f"{name} must be in {{-1, 0, 1}}, got {m!r}")
    if F not in (0, 1, 2):
        raise InvalidArgumentError(f"F must be in {{0, 1, 2}}, got {F!r}")
    if not isinstance(M, (int, np.integer)) or abs(M) > F:
        raise InvalidArgumentError(f"M must be an integer in [-{F}, {F}], got {M!r}")


def clebsch_gordan_11(m1: int, m2: int, F: int, M: int) -> float:
    """Clebsch-Gordan coefficient ``<1 m1; 1 m2 | F M>`` (Condon-Shortley).

    Evaluated with the Racah closed form specialised to ``j1 = j2 = 1``.
    """
    _check_cg_args(m1, m2, F, M)
    if m1 + m2 != M:
        return 0.0
    fact = math.factorial
    j1 = j2 = 1
    pref = (2 * F + 1) * fact(F + j1 - j2) * fact(F - j1 + j2) * fact(j1 + j2 - F)
    pref /= fact(j1 + j2 + F + 1)
    pref *= (
        fact(F + M) * fact(F - M)
        * fact(j1 - m1) * fact(j1 + m1)
        * fact(j2 - m2) * fact(j2 + m2)
    )
    total = 0.0
    for k in range(0, j1 + j2 + F + 1):
        args = (
            k,
            j1 + j2 - F - k,
            j1 - m1 - k,
            j2 + m2 - k,
            F - j2 + m1 + k,
            F - j1 - m2 + k,
        )
        if min(args) < 0:
            continue
        denom = 1
        for a in args:
            denom *= fact(a)
        total += (-1) ** k / denom
    return math.sqrt(pref) * total


def coupled_state(F: int, M: int) -> np.ndarray:
    """Two-atom vector ``|F M>`` over the product basis ``|m1 m2>``.

    Index convention ``3 * m_index(m1) + m_index(m2)``.
    """
    vec = np.zeros(9)
    for m1 in M_VALUES:
        for m2 in M_VALUES:
            if m1 + m2 == M:
                vec[3 * m_index(m1) + m_index(m2)] = clebsch_gordan_11(m1, m2, F, M)
    return vec


@dataclass(frozen=True)
class PhysicalBeamParams:
    """Beam and magnet parameters in SI units.

    ``field_integral`` is the integral of B over the phase-object zone (T*m).
    """

    p0: float
    atom_mass: float
    g_factor: float
    field_integral: float
    bohr_magneton: float = 9.2740100783e-24
    hbar: float = 1.054571817e-34

    def __post_init__(self):
        if not (self.p0 > 0):
            raise InvalidArgumentError(f"p0 must be positive, got {self.p0!r}")
        if not (self.atom_mass > 0):
            raise InvalidArgumentError(f"atom_mass must be positive, got {self.atom_mass!r}")

    @property
    def kinetic_energy(self) -> float:
        return self.p0**2 / (2 * self.atom_mass)

    @property
    def displacement(self) -> float:
        """Zeeman shift in wave-packet position, in metres.

        ``g mu_B int(B dx) / (2 E)`` with ``E = p0**2 / (2 m)``.
        """
        return self.g_factor * self.bohr_magneton * self.field_integral / (2 * self.kinetic_energy)


def zeeman_phase(params: PhysicalBeamParams) -> float:
    """Phase ``(p0 / hbar) * displacement`` imprinted by one phase object.

    Equals ``m g mu_B int(B dx) / (hbar p0)``, the Zeeman energy integrated
    over the transit time.
    """
    return params.p0 / params.hbar * params.displacement
