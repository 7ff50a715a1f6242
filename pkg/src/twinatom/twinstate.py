"""Two-atom spin states and the coherence-parametrised initial density matrix.

Two-atom vectors use the product basis ``|m1 m2>`` with flat index
``3 * i1 + i2``, where ``i`` follows the single-atom ordering of
:mod:`twinatom.spinops` (``m_z = +1, 0, -1``).

Only the indistinguishable-boson case is modelled.  For distinguishable
fragments the admissible space would be the three states
``|0 0>, |1 -1>, |-1 1>`` rather than the two symmetric ones used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spinops
from .errors import InvalidArgumentError

POSITIVITY_TOL = 1e-10


def product_ket(m1: int, m2: int) -> np.ndarray:
    ket = np.zeros(9, dtype=complex)
    ket[3 * spinops.m_index(m1) + spinops.m_index(m2)] = 1.0
    return ket


def psi0() -> np.ndarray:
    """Both atoms with zero projection: ``|0 0>``."""
    return product_ket(0, 0)


def psi1() -> np.ndarray:
    """Symmetric opposite-projection state ``(|1 -1> + |-1 1>) / sqrt 2``."""
    return (product_ket(1, -1) + product_ket(-1, 1)) / math.sqrt(2)


def singlet() -> np.ndarray:
    """Total angular momentum zero state of two spin-1 atoms."""
    return -math.sqrt(1 / 3) * psi0() + math.sqrt(2 / 3) * psi1()


def exchange_operator() -> np.ndarray:
    """Permutation ``|m1 m2> -> |m2 m1>`` on the 9-dimensional space."""
    swap = np.zeros((9, 9))
    for i in range(3):
        for j in range(3):
            swap[3 * j + i, 3 * i + j] = 1.0
    return swap


def total_fz() -> np.ndarray:
    eye = np.eye(3)
    return np.kron(spinops.f_z(), eye) + np.kron(eye, spinops.f_z())


def validate_lambda(lam: float) -> float:
    lam = float(lam)
    if not (0.0 <= lam <= 1.0):
        raise InvalidArgumentError(f"coherence parameter must lie in [0, 1], got {lam!r}")
    return lam


def rho0(lam: float) -> np.ndarray:
    """Initial spin density matrix with coherence ``lam`` in [0, 1].

    ``lam = 1`` gives the pure singlet projector; ``lam = 0`` the
    incoherent mixture ``|psi0><psi0| / 3 + 2 |psi1><psi1| / 3``.
    """
    lam = validate_lambda(lam)
    a, b = psi0(), psi1()
    coherence = np.outer(a, b.conj()) + np.outer(b, a.conj())
    return (
        np.outer(a, a.conj()) / 3
        + 2 * np.outer(b, b.conj()) / 3
        - lam * math.sqrt(2) / 3 * coherence
    )


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho)
    # Tr(rho^2) without forming the product; rho is Hermitian
    return float(np.real(np.sum(rho * rho.T)))


def linear_entropy(rho: np.ndarray) -> float:
    return 1.0 - purity(rho)


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    """Bloch vector of ``rho`` restricted to the two-level space {psi0, psi1}.

    Components are taken with respect to the Pauli matrices in the ordered
    basis ``(psi0, psi1)``; the restricted block is renormalised to unit trace.
    """
    basis = np.stack([psi0(), psi1()], axis=1)
    block = basis.conj().T @ np.asarray(rho) @ basis
    tr = np.trace(block).real
    if tr <= 0:
        raise InvalidArgumentError("state has no weight on span{psi0, psi1}")
    block = block / tr
    return np.array(
        [2 * block[0, 1].real, -2 * block[0, 1].imag, (block[0, 0] - block[1, 1]).real]
    )


@dataclass(frozen=True)
class DensityReport:
    """Outcome of :func:`is_physical_density`; truthy when every check passes."""

    hermitian: bool
    unit_trace: bool
    positive: bool
    hermiticity_error: float
    trace: complex
    min_eigenvalue: float

    @property
    def physical(self) -> bool:
        return self.hermitian and self.unit_trace and self.positive

    def __bool__(self) -> bool:
        return self.physical


def is_physical_density(rho, tolerance: float = 1e-12) -> DensityReport:
    """Check Hermiticity, unit trace and positivity of a square matrix.

    Hermiticity and trace are compared at ``tolerance``; eigenvalues may dip
    to ``-max(tolerance, POSITIVITY_TOL)`` to absorb eigensolver noise.
    Never raises for unphysical input.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {rho.shape}")
    herm_err = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    tr = complex(np.trace(rho))
    # eigenvalues of the Hermitian part; anti-Hermitian part is reported above
    evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    min_eig = float(evals.min()) if evals.size else 0.0
    return DensityReport(
        hermitian=herm_err <= tolerance,
        unit_trace=abs(tr - 1.0) <= tolerance,
        positive=min_eig >= -max(tolerance, POSITIVITY_TOL),
        hermiticity_error=herm_err,
        trace=tr,
        min_eigenvalue=min_eig,
    )
