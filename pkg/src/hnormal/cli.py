"""Command-line batch interface.

Documents are JSON objects whose matrices are nested lists of ``[re, im]``
pairs.  Output is deterministic: fixed key order and every float written as the
shortest decimal that reads back exactly.

Exit status: 0 success, 2 parse or validation error, 3 classification error,
4 oracle failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .errors import HNormalError, ParseError, ValidationError
from .families import REAL_SLOTS, FamilyTag, InvariantRecord
from .matcore import IndefinitePair

DEFAULT_TOL = 1e-9
RESIDUAL_TOL = 1e-8


# --- serialization --------------------------------------------------------------

def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    if x == 0:
        return "0.0"  # folds -0.0 so equal numbers print equally
    return repr(x)  # shortest text that reads back to the same double


def _scalar(v) -> bool:
    return isinstance(v, (int, float, np.number)) and not isinstance(v, (bool, np.bool_))


def _flat(v) -> bool:
    """Numbers and ``[re, im]`` pairs print inline, so matrix rows fit on one line."""
    return _scalar(v) or (isinstance(v, (list, tuple)) and all(_scalar(x) for x in v))


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with fixed float formatting; dict order is kept as built."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(_flat(v) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return json.dumps(str(obj))


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(A) -> list:
    A = np.asarray(A, dtype=complex)
    return [[encode_complex(v) for v in row] for row in A]


def encode_params(p: InvariantRecord) -> dict:
    return {k: (float(v.real) if k in REAL_SLOTS else encode_complex(v)) for k, v in p.as_dict().items()}


def _error_doc(exc: Exception) -> dict:
    code = exc.code if isinstance(exc, HNormalError) else type(exc).__name__
    details = getattr(exc, "details", {}) or {}
    clean = {}
    for k in sorted(details):
        v = details[k]
        if isinstance(v, (int, float, np.integer, np.floating, str, bool)):
            clean[k] = v
        elif isinstance(v, complex):
            clean[k] = encode_complex(v)
        else:
            clean[k] = str(v)
    return {"code": code, "message": str(exc), "details": clean}


# --- input ---------------------------------------------------------------------

def _decode_entry(v, name, i, j) -> complex:
    if isinstance(v, bool):
        raise ParseError(f"{name}[{i}][{j}]: expected [re, im], got a boolean", field=name, row=i, col=j)
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                                  for x in v):
        return complex(v[0], v[1])
    raise ParseError(f"{name}[{i}][{j}]: expected [re, im], got {v!r}", field=name, row=i, col=j)


def _decode_matrix(doc: dict, name: str) -> np.ndarray:
    if name not in doc:
        raise ParseError(f"missing field {name!r}", field=name)
    rows = doc[name]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{name}: expected a nonempty list of rows", field=name)
    n = len(rows)
    for i, r in enumerate(rows):
        if len(r) != n:
            raise ValidationError(f"{name}: row {i} has {len(r)} entries, expected {n}", field=name, row=i)
    return np.array([[_decode_entry(v, name, i, j) for j, v in enumerate(r)] for i, r in enumerate(rows)])


def parse_input(text) -> IndefinitePair:
    """Read ``{"N": ..., "H": ..., "tol": ...}``; unknown fields are ignored."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed document: {exc}", line=exc.lineno, col=exc.colno) from exc
    if not isinstance(doc, dict):
        raise ParseError("document must be an object with fields N and H")
    N = _decode_matrix(doc, "N")
    H = _decode_matrix(doc, "H")
    if N.shape != H.shape:
        raise ValidationError(f"N is {N.shape[0]}x{N.shape[0]} but H is {H.shape[0]}x{H.shape[0]}")
    tol = doc.get("tol", DEFAULT_TOL)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not tol >= 0:
        raise ParseError(f"tol must be a nonnegative number, got {tol!r}", field="tol")
    try:
        return IndefinitePair(N, H, float(tol))
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def encode_pair(pair: IndefinitePair) -> dict:
    return {"N": encode_matrix(pair.N), "H": encode_matrix(pair.H), "tol": pair.tol}


# --- commands --------------------------------------------------------------------

def _input_echo(pair: IndefinitePair) -> dict:
    sig = pair.signature
    return {"n": pair.n, "signature": [sig.v_minus, sig.v_plus], "tol": pair.tol}


def run_classify(pair: IndefinitePair, tol: float = RESIDUAL_TOL, seed: int = 0) -> tuple[dict, int]:
    """Classify ``pair``; returns the report and the exit status."""
    from .classify import classify_pair, global_certificate

    report = {"input": _input_echo(pair)}
    try:
        results = classify_pair(pair, seed=seed)
    except HNormalError as exc:
        report["status"] = "error"
        report["error"] = _error_doc(exc)
        report["global"] = {"tolerance": tol, "pass": False}
        return report, exc.exit_code
    blocks = []
    worst = 0.0
    for cf, cert in results:
        worst = max(worst, cert.residual)
        blocks.append({
            "family": cf.family.value,
            "h_sign": cf.h_sign,
            "size": cf.n,
            "params": encode_params(cf.params),
            "canonical_N": encode_matrix(cf.n_tilde),
            "canonical_H": encode_matrix(cf.h_tilde),
            "T": encode_matrix(cert.T),
            "residual_similarity": cert.residual_similarity,
            "residual_congruence": cert.residual_congruence,
            "pass": cert.residual <= tol,
        })
    report["status"] = "ok"
    report["blocks"] = blocks
    report["global"] = {
        "tolerance": tol,
        "max_residual": worst,
        "T": encode_matrix(global_certificate(results)),
        "pass": worst <= tol,
    }
    return report, 0


def run_check_equiv(a: IndefinitePair, b: IndefinitePair, tol: float) -> tuple[dict, int]:
    from .classify import pairs_equivalent

    report = {"a": _input_echo(a), "b": _input_echo(b), "tolerance": tol}
    try:
        report["equivalent"] = pairs_equivalent(a, b, tol=tol)
    except HNormalError as exc:
        report["error"] = _error_doc(exc)
        return report, exc.exit_code
    return report, 0


def run_sample(family: str, seed: int) -> tuple[dict, int]:
    from .genfuzz import SampleSpec, sample_canonical

    pair, rec = sample_canonical(SampleSpec(FamilyTag(family), seed=seed))
    doc = encode_pair(pair)
    doc["family"] = FamilyTag(family).value
    doc["seed"] = seed
    doc["params"] = encode_params(rec)
    return doc, 0


def run_fuzz(family: str, runs: int, seed: int) -> tuple[dict, int]:
    from .genfuzz import SampleSpec, roundtrip_oracle

    rep = roundtrip_oracle(SampleSpec(FamilyTag(family), seed=seed), n_conjugations=runs, raise_on_failure=False)
    doc = {
        "family": rep.family.value,
        "seed": rep.seed,
        "runs": rep.runs,
        "failures": [{"seed": s, "reason": why} for s, why in rep.failures],
        "max_param_deviation": rep.max_param_deviation,
        "max_residual": rep.max_residual,
        "pass": rep.ok,
    }
    return doc, 0 if rep.ok else 4


# --- entry point -------------------------------------------------------------------

def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", path=path) from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hnormal", description="Classify H-normal operators of rank at most two.")
    p.add_argument("command", nargs="?", choices=["classify"], help="classify the pair in FILE")
    p.add_argument("file", nargs="?", help="input document, '-' for stdin")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--check-equiv", nargs=2, metavar=("A", "B"), help="are two documents unitarily similar")
    mode.add_argument("--sample", metavar="FAMILY", help="emit a canonical sample document")
    mode.add_argument("--fuzz", metavar="FAMILY", help="run the round-trip oracle on one sample")
    p.add_argument("--tol", type=float, default=None,
                   help=f"residual tolerance for pass flags (default {RESIDUAL_TOL}); "
                        f"parameter tolerance with --check-equiv (default 1e-6)")
    p.add_argument("--seed", type=int, default=0, help="sample or oracle seed (default 0)")
    p.add_argument("--runs", type=int, default=10, help="conjugations for --fuzz (default 10)")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    return p


def _dispatch(args) -> tuple[dict, int]:
    if args.check_equiv:
        a, b = (parse_input(_read(f)) for f in args.check_equiv)
        return run_check_equiv(a, b, 1e-6 if args.tol is None else args.tol)
    if args.sample:
        return run_sample(args.sample, args.seed)
    if args.fuzz:
        return run_fuzz(args.fuzz, args.runs, args.seed)
    pair = parse_input(_read(args.file))
    return run_classify(pair, RESIDUAL_TOL if args.tol is None else args.tol, args.seed)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    modes = bool(args.check_equiv) + bool(args.sample) + bool(args.fuzz)
    if modes == 0 and (args.command != "classify" or not args.file):
        parser.error("give 'classify FILE', --check-equiv A B, --sample FAMILY or --fuzz FAMILY")
    if modes and args.command:
        parser.error("'classify' cannot be combined with another mode")
    for name in ("sample", "fuzz"):
        fam = getattr(args, name)
        if fam and fam not in FamilyTag._value2member_map_:
            parser.error(f"unknown family {fam!r}; choose from {', '.join(t.value for t in FamilyTag)}")
    try:
        doc, status = _dispatch(args)
    except HNormalError as exc:
        doc, status = {"status": "error", "error": _error_doc(exc)}, exc.exit_code
    text = dumps(doc) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
