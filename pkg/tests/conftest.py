import numpy as np
import pytest


def expm_taylor(a, terms=30):
    """Scaling-and-squaring Taylor exponential; independent of the package."""
    a = np.asarray(a, dtype=complex)
    norm = np.abs(a).sum(axis=1).max()
    s = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    b = a / 2**s
    out = np.eye(len(a), dtype=complex)
    term = np.eye(len(a), dtype=complex)
    for k in range(1, terms):
        term = term @ b / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def lowering_cg_table():
    """Coupled |F M> states of 1 x 1 built by lowering from stretched states.

    Returns ``{(F, M): 9-vector}`` over ``|m1 m2>`` with index
    ``3 * (1 - m1) + (1 - m2)``, Condon-Shortley phases fixed by requiring
    ``<1 1; 1 F-1 | F F> > 0``.
    """
    s2 = np.sqrt(2.0)
    lower1 = np.array([[0, 0, 0], [s2, 0, 0], [0, s2, 0]])
    eye = np.eye(3)
    lower = np.kron(lower1, eye) + np.kron(eye, lower1)
    mz = np.kron(np.diag([1, 0, -1]), eye) + np.kron(eye, np.diag([1, 0, -1]))
    table = {}
    for F in (2, 1, 0):
        # top state: in the M=F eigenspace, orthogonal to higher-F states
        space = [i for i in range(9) if mz[i, i] == F]
        cand = np.zeros(9)
        for i in space:
            e = np.zeros(9)
            e[i] = 1
            for (G, M), v in table.items():
                if M == F:
                    e = e - (v @ e) * v
            if np.linalg.norm(e) > 1e-8:
                cand = e / np.linalg.norm(e)
                break
        idx = 3 * 0 + (1 - (F - 1))  # |m1=1, m2=F-1>
        if cand[idx] < 0:
            cand = -cand
        v = cand
        for M in range(F, -F - 1, -1):
            table[(F, M)] = v
            w = lower @ v
            if np.linalg.norm(w) > 1e-12:
                v = w / np.linalg.norm(w)
    return table


@pytest.fixture(scope="session")
def cg_table():
    return lowering_cg_table()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
