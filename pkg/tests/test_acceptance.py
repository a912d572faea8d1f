"""End-to-end acceptance checks.

Each test records its verdict in ``acceptance_log``; the session ends with one
``criterion k: PASS/FAIL`` line per check.  Run alone with
``python tests/test_acceptance.py`` or ``pytest tests/test_acceptance.py``.
"""

import math
import subprocess
import sys
from collections import Counter

import numpy as np
import pytest

from conftest import conjugated, impossible_frame
from hnormal import (
    FamilyTag,
    IndefinitePair,
    block_size_law_holds,
    congruence_canonical_2x2,
    f_rho,
    pairs_equivalent,
    roundtrip_oracle,
    sample_canonical,
    solve_rho,
    split_orthogonal,
)
from hnormal.classify import reduce_dim1_dec, reduce_dim1_indec
from hnormal.cli import dumps, encode_pair, main, parse_input, run_sample
from hnormal.errors import ImpossibleCase
from hnormal.families import (
    COMPLEX_SLOTS,
    RANK2_FAMILIES,
    REAL_SLOTS,
    SIZES,
    SLOTS,
    SQRT3,
    UNIT_SLOTS,
    constraint_violations,
    record,
    template,
)
from hnormal.genfuzz import SampleSpec
from hnormal.matcore import block_diag

PARAMS_PER_FAMILY = 100
CONJUGATIONS = 10
PARAM_TOL = 1e-6
RESIDUAL_TOL = 1e-8


def record_result(log, k, ok, detail):
    log[k] = (ok, detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="module")
def corpus():
    """Oracle reports for every rank-two family, sample seed and conjugation."""
    return {
        tag: [roundtrip_oracle(SampleSpec(tag, seed=s), n_conjugations=CONJUGATIONS,
                               param_tol=PARAM_TOL, residual_tol=math.inf, raise_on_failure=False)
              for s in range(PARAMS_PER_FAMILY)]
        for tag in RANK2_FAMILIES
    }


def test_round_trip_recovery(corpus, acceptance_log):
    bad = {}
    for tag, reports in corpus.items():
        n_fail = sum(len(r.failures) for r in reports)
        if n_fail:
            bad[tag.value] = n_fail
    total = len(corpus) * PARAMS_PER_FAMILY * CONJUGATIONS
    worst = max(r.max_param_deviation for reps in corpus.values() for r in reps if not r.failures)
    detail = f"{total - sum(bad.values())}/{total} runs recovered, max deviation {worst:.2e}"
    if bad:
        detail += f"; failing families {bad}"
    record_result(acceptance_log, 1, not bad, detail)
    assert not bad, detail


def test_certificate_residuals(corpus, acceptance_log):
    # runs that split or raised carry no single-block certificate; criterion 1 counts those
    worst = max(r.max_residual for reps in corpus.values() for r in reps)
    ok = worst <= RESIDUAL_TOL
    record_result(acceptance_log, 2, ok, f"max residual {worst:.2e} over every single-block classification")
    assert ok


def _perturb(tag, rec, rng, eps=1e-3):
    """A valid record differing from ``rec`` in exactly one invariant by ``eps``."""
    slots = list(("lambda1",) + SLOTS[tag])
    rng.shuffle(slots)
    for slot in slots:
        for sign in (1, -1):
            v = getattr(rec, slot)
            if slot in UNIT_SLOTS:
                new = v * complex(math.cos(sign * eps), math.sin(sign * eps))
            elif slot in COMPLEX_SLOTS:
                new = v + sign * eps * (1 if rng.random() < 0.5 else 1j)
            else:
                assert slot in REAL_SLOTS
                new = v + sign * eps
            out = rec.replace(**{slot: new})
            if not constraint_violations(tag, out, tol=1e-12):
                return slot, out
    raise AssertionError(f"no valid perturbation of {rec}")


def _cross_family_probes():
    z = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
    pick = {
        FamilyTag.D1_DEC_N4_B: dict(lambda1=0.1, z=1j, r=0.5),
        FamilyTag.D1_DEC_N4_C: dict(lambda1=0.1, z=1j, r=0.5),
        FamilyTag.D1_IND_N5_A: dict(lambda1=0.1, r1=1.0, r2=-0.5, r3=0.3),
        FamilyTag.D1_IND_N5_B: dict(lambda1=0.1, z=z, r1=1.0, r2=-0.5, r3=0.3),
        FamilyTag.D1_IND_N5_C: dict(lambda1=0.1, r1=1.0, r2=-0.5, r3=0.3),
    }
    pairs = {t: IndefinitePair(*template(t, record(**p))) for t, p in pick.items()}
    groups = [(FamilyTag.D1_DEC_N4_B, FamilyTag.D1_DEC_N4_C),
              (FamilyTag.D1_IND_N5_A, FamilyTag.D1_IND_N5_B),
              (FamilyTag.D1_IND_N5_A, FamilyTag.D1_IND_N5_C),
              (FamilyTag.D1_IND_N5_B, FamilyTag.D1_IND_N5_C)]
    return [(a, b, pairs[a], pairs[b]) for a, b in groups]


def test_non_equivalence(acceptance_log):
    misses = Counter()
    total = 0
    for tag in FamilyTag:
        for seed in range(50):
            rng = np.random.default_rng(seed)
            pair, rec = sample_canonical(SampleSpec(tag, seed=seed))
            _, moved = _perturb(tag, rec, rng)
            other = IndefinitePair(*template(tag, moved))
            total += 1
            if pairs_equivalent(conjugated(pair, 2 * seed + 1), conjugated(other, 2 * seed + 2)):
                misses[tag.value] += 1
    cross = []
    for k, (a, b, pa, pb) in enumerate(_cross_family_probes()):
        for s in range(10):
            total += 1
            if pairs_equivalent(conjugated(pa, 100 + s), conjugated(pb, 200 + s + k)):
                cross.append(f"{a.value}~{b.value}")
    ok = not misses and not cross
    detail = f"{total - sum(misses.values()) - len(cross)}/{total} pairs separated"
    if misses:
        detail += f"; perturbations missed {dict(misses)}"
    if cross:
        detail += f"; cross-family probes merged {sorted(set(cross))}"
    record_result(acceptance_log, 3, ok, detail)
    assert ok, detail


def test_impossible_cases(acceptance_log):
    emitted = []
    for n, reducer in ((6, reduce_dim1_indec), (7, reduce_dim1_dec)):
        for seed in range(20):
            pair, split = impossible_frame(n, seed)
            try:
                reducer(pair, split)
            except ImpossibleCase:
                continue
            except Exception as exc:  # noqa: BLE001 - any other outcome is a miss
                emitted.append((n, seed, type(exc).__name__))
            else:
                emitted.append((n, seed, "form emitted"))
    ok = not emitted
    record_result(acceptance_log, 4, ok, f"{40 - len(emitted)}/40 constructions rejected {emitted[:5]}")
    assert ok


_RANK = {t: 2 for t in RANK2_FAMILIES} | {t: 1 for t in FamilyTag if t.value.startswith("RANK1")} \
    | {FamilyTag.RANK0: 0}


def _random_sum(rng):
    """Random direct sum of canonical blocks with total rank at most 2 and size at most 8."""
    rank_left, size_left = 2, 8
    parts = []
    while True:
        fits = [t for t in FamilyTag if _RANK[t] <= rank_left and SIZES[t] <= size_left]
        if not fits or (parts and rng.random() < 0.3):
            break
        tag = fits[rng.integers(len(fits))]
        pair, _ = sample_canonical(SampleSpec(tag, seed=int(rng.integers(2**31))))
        parts.append(pair)
        rank_left -= _RANK[tag]
        size_left -= SIZES[tag]
    return IndefinitePair(block_diag(*[p.N for p in parts]), block_diag(*[p.H for p in parts]))


def test_block_size_law(acceptance_log):
    rng = np.random.default_rng(2024)
    violations, blocks = [], 0
    for i in range(1000):
        pair = conjugated(_random_sum(rng), i)
        for b in split_orthogonal(pair).blocks:
            blocks += 1
            if not block_size_law_holds(b.pair):
                violations.append((i, b.pair.n, b.pair.signature.rank))
    ok = not violations
    record_result(acceptance_log, 5, ok, f"{blocks} blocks from 1000 inputs, {len(violations)} violations")
    assert ok, violations[:5]


def test_congruence_oracle(acceptance_log):
    exact = f_rho(SQRT3) == -1.0
    rng = np.random.default_rng(6)
    s = np.concatenate([-np.logspace(0, 6, 500), rng.uniform(-50, -1, 500)])
    rt = max(abs(f_rho(solve_rho(v)) - v) / abs(v) for v in s)
    unstable = 0
    for _ in range(1000):
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        ref = congruence_canonical_2x2(A)
        for _ in range(10):
            T = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            got = congruence_canonical_2x2(T @ A @ T.conj().T)
            same = got.kind is ref.kind and all(abs(a - b) <= 1e-6 for a, b in zip(got.params(), ref.params()))
            if not same:
                unstable += 1
                break
    ok = exact and rt <= 1e-10 and unstable == 0
    record_result(acceptance_log, 6, ok,
                  f"f(sqrt 3) == -1: {exact}; round-trip {rt:.1e}; unstable matrices {unstable}/1000")
    assert ok


def test_single_frame_blocks_stay_whole(acceptance_log):
    families = [t for t in FamilyTag if t.value.startswith("D1_")]
    rng = np.random.default_rng(7)
    split = []
    for i in range(500):
        tag = families[rng.integers(len(families))]
        pair, _ = sample_canonical(SampleSpec(tag, seed=int(rng.integers(2**31))))
        # without the dim S0 = 1 shortcut, so the commutant search itself is tested
        dec = split_orthogonal(conjugated(pair, i), s0_shortcut=False)
        if len(dec.blocks) != 1:
            split.append(tag.value)
    ok = not split
    record_result(acceptance_log, 7, ok, f"{500 - len(split)}/500 constructions kept whole")
    assert ok, Counter(split)


def test_cli_determinism(tmp_path, capsys, acceptance_log):
    doc, _ = run_sample("D2_N8", 5)
    path = tmp_path / "in.json"
    path.write_text(dumps(encode_pair(conjugated(parse_input(dumps(doc)), 1))))
    cmd = [sys.executable, "-m", "hnormal", "classify", str(path)]
    a = subprocess.run(cmd, capture_output=True).stdout
    b = subprocess.run(cmd, capture_output=True).stdout
    identical = a == b and len(a) > 0
    bad = []
    for tag in FamilyTag:
        sample = tmp_path / f"{tag.value}.json"
        if main(["--sample", tag.value, "--seed", "3", "-o", str(sample)]) != 0:
            bad.append((tag.value, "sample"))
            continue
        first = main(["classify", str(sample)])
        out1 = capsys.readouterr().out
        second = main(["classify", str(sample)])
        out2 = capsys.readouterr().out
        if first != 0 or second != 0 or out1 != out2:
            bad.append((tag.value, first, second))
    ok = identical and not bad
    record_result(acceptance_log, 8, ok,
                  f"subprocess reports identical: {identical}; pipeline failures {bad or 'none'}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
