"""Invariant checks run by ``twinatom selftest``.

Every check returns ``(passed, detail)``.  Module functions are looked up
through their modules at call time so that a patched implementation is
what gets checked.
"""

from __future__ import annotations

import math
import time
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import expm

from . import interferometer as ifm
from . import spinops, twinstate

TOL = 1e-12


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str
    seconds: float


def _maxdiff(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def check_commutators():
    fx, fy, fz = spinops.f_x(), spinops.f_y(), spinops.f_z()
    errs = [
        _maxdiff(fx @ fy - fy @ fx, 1j * fz),
        _maxdiff(fy @ fz - fz @ fy, 1j * fx),
        _maxdiff(fz @ fx - fx @ fz, 1j * fy),
        _maxdiff(fx @ fx + fy @ fy + fz @ fz, 2 * np.eye(3)),
    ]
    return max(errs) < TOL, f"max error {max(errs):.2e}"


def check_d1_group():
    rng = np.random.default_rng(1234)
    worst = 0.0
    for a, b in rng.uniform(-2 * math.pi, 2 * math.pi, size=(100, 2)):
        d = spinops.wigner_d1(a) @ spinops.wigner_d1(b)
        worst = max(worst, _maxdiff(d, spinops.wigner_d1(a + b)))
        m = spinops.wigner_d1(a)
        worst = max(worst, _maxdiff(m @ m.T, np.eye(3)), abs(np.linalg.det(m) - 1))
    return worst < TOL, f"max error {worst:.2e}"


def check_d1_generator():
    worst = max(
        _maxdiff(spinops.wigner_d1(b), expm(-1j * b * spinops.f_y()))
        for b in np.linspace(-math.pi, math.pi, 17)
    )
    return worst < TOL, f"max error vs expm {worst:.2e}"


def check_axis_switch():
    d = spinops.axis_rotation
    err = _maxdiff(d(-math.pi / 2) @ spinops.f_z() @ d(math.pi / 2), spinops.f_x())
    for phi in np.linspace(0, 2 * math.pi, 32, endpoint=False):
        lhs = d(-math.pi / 2) @ np.diag(np.exp(1j * phi * np.array([1, 0, -1]))) @ d(math.pi / 2)
        err = max(err, _maxdiff(lhs, expm(1j * phi * spinops.f_x())))
    return err < TOL, f"max error {err:.2e}"


def check_cg_completeness():
    states = np.array([spinops.coupled_state(F, M) for F in (0, 1, 2) for M in range(-F, F + 1)])
    err = _maxdiff(states.T @ states, np.eye(9))
    return err < TOL, f"max error {err:.2e}"


def check_singlet_cg():
    ov = abs(np.vdot(spinops.coupled_state(0, 0), twinstate.singlet()))
    return abs(ov - 1) < TOL, f"|overlap| = {ov:.15f}"


def check_purity_formula():
    errs = []
    for lam in np.linspace(0, 1, 11):
        rho = twinstate.rho0(lam)
        errs.append(abs(twinstate.purity(rho) - (5 + 4 * lam**2) / 9))
        errs.append(abs(twinstate.linear_entropy(rho) - 4 * (1 - lam**2) / 9))
    return max(errs) < TOL, f"max error {max(errs):.2e}"


def check_projector():
    p = ifm.polarizer_operator()
    err = max(_maxdiff(p @ p, p), _maxdiff(p, p.conj().T))
    return err < TOL, f"max error {err:.2e}"


def check_unitarity():
    rng = np.random.default_rng(99)
    err = 0.0
    for phases in rng.uniform(0, 2 * math.pi, size=(20, 2)):
        o = ifm.phase_object_operator(phases)
        err = max(err, _maxdiff(o @ o.conj().T, np.eye(36)))
    return err < TOL, f"max error {err:.2e}"


def check_positivity():
    rng = np.random.default_rng(7)
    bad = []
    for lam, a, b in zip(np.linspace(0, 1, 6), *rng.uniform(0, 2 * math.pi, size=(2, 6))):
        report = twinstate.is_physical_density(ifm.evolve(lam, (a, b)).rho)
        if not report:
            bad.append(f"lam={lam:.2f}: {report}")
    return not bad, "; ".join(bad) or "all evolved states physical"


def check_exchange():
    x = ifm.joint_exchange_operator()
    mats = [ifm.polarizer_operator(), ifm.initial_state(0.3)]
    mats += [ifm.phase_object_operator(p) for p in ((0.7, 2.1), (math.pi / 2, 5.0))]
    err = max(_maxdiff(x @ m, m @ x) for m in mats)
    return err < TOL, f"max commutator {err:.2e}"


def check_lr_symmetry():
    rng = np.random.default_rng(5)
    err = 0.0
    for a, b, lam in zip(*rng.uniform(0, 2 * math.pi, size=(2, 50)), rng.uniform(0, 1, 50)):
        err = max(err, abs(ifm.signal(lam, (a, b)) - ifm.signal(lam, (b, a))))
    return err < TOL, f"max difference {err:.2e}"


def check_survival():
    vals = [ifm.evolve(lam, (1.0, 2.0)).survival for lam in np.linspace(0, 1, 11)]
    err = max(abs(v - 2 / 3) for v in vals)
    return err < TOL, f"max deviation from 2/3 {err:.2e}"


def check_oracle():
    grid = np.linspace(0, 2 * math.pi, 64, endpoint=False)
    pl, pr = np.meshgrid(grid, grid, indexing="ij")
    consts = []
    worst_spread = 0.0
    for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
        ref = ifm.analytic_signal(lam, pl, pr)
        mask = ref > 1e-6
        ratio = ifm.signal_many(lam, pl, pr)[mask] / ref[mask]
        worst_spread = max(worst_spread, (ratio.max() - ratio.min()) / abs(ratio.mean()))
        consts.append(ratio.mean())
    spot = max(
        abs(ifm.signal(lam, (a, b)) - ifm.signal_many(lam, a, b))
        for lam, a, b in ((0.3, 1.0, 2.0), (1.0, 4.0, 0.5))
    )
    lam_spread = (max(consts) - min(consts)) / abs(np.mean(consts))
    ok = worst_spread < 1e-9 and lam_spread < 1e-9 and spot < TOL
    return ok, f"C = {np.mean(consts):.15f}, spread {worst_spread:.1e}, across lambda {lam_spread:.1e}"


def check_lambda_insensitivity():
    phi_l = np.linspace(0, 2 * math.pi, 32)
    diff = np.abs(ifm.signal_many(0.0, phi_l, math.pi) - ifm.signal_many(1.0, phi_l, math.pi))
    scale = max(ifm.signal_many(lam, phi_l, math.pi).max() for lam in (0.0, 1.0))
    return diff.max() < TOL * scale, f"max difference {diff.max():.2e}"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("spin-1 commutators and Casimir", check_commutators),
    ("d1 orthogonality and group property", check_d1_group),
    ("d1 equals exp(-i beta Fy)", check_d1_generator),
    ("axis-switch identity D(-pi/2) Fz D(pi/2) = Fx", check_axis_switch),
    ("Clebsch-Gordan completeness", check_cg_completeness),
    ("singlet matches coupled |0 0>", check_singlet_cg),
    ("purity and linear entropy of rho0", check_purity_formula),
    ("polarizer projector idempotent", check_projector),
    ("phase object unitary", check_unitarity),
    ("density positivity through pipeline", check_positivity),
    ("exchange symmetry commutation", check_exchange),
    ("left-right signal symmetry", check_lr_symmetry),
    ("survival probability 2/3 for all lambda", check_survival),
    ("pipeline matches closed-form signal", check_oracle),
    ("lambda-insensitivity at phi_r = pi", check_lambda_insensitivity),
]


def run_all() -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail, time.perf_counter() - t0))
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  result  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}")
    return "\n".join(lines)
