import numpy as np
import pytest

from hnormal import conjugate_pair, random_h_unitary

# criterion number -> (passed, detail); filled by test_acceptance, printed at the end
_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


def conjugated(pair, seed, magnitude=0.5):
    """Random H-unitary conjugate of ``pair``."""
    return conjugate_pair(pair, random_h_unitary(pair.H, seed, magnitude))


def d(n):
    """Ones on the secondary diagonal."""
    return np.fliplr(np.eye(n))


def impossible_frame(n, seed):
    """A neutral frame with ``dim S0 = 1`` whose size no H-normal block can have.

    ``n = 6`` carries an indecomposable four-dimensional internal operator,
    ``n = 7`` a decomposable five-dimensional one.  Coupling blocks are random.
    """
    from hnormal.decomp import TriSplit
    from hnormal.families import FamilyTag
    from hnormal.genfuzz import SampleSpec, sample_canonical
    from hnormal.matcore import IndefinitePair, block_diag, frame_h

    rng = np.random.default_rng(seed)
    lam = complex(rng.normal(), rng.normal())
    if n == 6:
        inner, _ = sample_canonical(SampleSpec(FamilyTag.RANK1_N4, seed=seed))
        K, H1 = inner.N - inner.N[0, 0] * np.eye(4), inner.H
    elif n == 7:
        inner, _ = sample_canonical(SampleSpec(FamilyTag.RANK1_N4, seed=seed))
        K = block_diag(inner.N - inner.N[0, 0] * np.eye(4), [[0.0]])
        H1 = block_diag(inner.H, [[1.0]])
    else:
        raise ValueError("only n = 6 and n = 7 are impossible frames")
    m = n - 2
    inner_pair = conjugated(IndefinitePair(K, H1), seed + 2)
    K, H1 = inner_pair.N, inner_pair.H
    M = np.zeros((n, n), dtype=complex)
    M[:1, 1:1 + m] = rng.normal(size=(1, m)) + 1j * rng.normal(size=(1, m))
    M[1:1 + m, 1:1 + m] = K
    M[1:1 + m, 1 + m:] = rng.normal(size=(m, 1)) + 1j * rng.normal(size=(m, 1))
    M[0, n - 1] = complex(rng.normal(), rng.normal())
    N = lam * np.eye(n) + M
    pair = IndefinitePair(N, frame_h(1, H1))
    split = TriSplit(1, lam, np.eye(n), pair, IndefinitePair(lam * np.eye(m) + K, H1))
    return pair, split
