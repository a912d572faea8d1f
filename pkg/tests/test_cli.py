import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import conjugated, d
from hnormal.cli import dumps, encode_pair, main, parse_input, run_classify, run_sample
from hnormal.errors import NearSingular, ParseError, ValidationError
from hnormal.families import FamilyTag
from hnormal.genfuzz import SampleSpec, sample_canonical
from hnormal.matcore import IndefinitePair


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else dumps(doc))
    return str(path)


def run_main(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


class TestParse:
    def test_smallest_document(self):
        p = parse_input('{"N": [[[0, 0]]], "H": [[[1, 0]]]}')
        assert p.n == 1 and p.tol == 1e-9

    def test_plain_numbers_and_bytes(self):
        p = parse_input(b'{"N": [[1, 2], [0, 1]], "H": [[0, 1], [1, 0]], "tol": 1e-6}')
        np.testing.assert_array_equal(p.N, [[1, 2], [0, 1]])
        assert p.tol == 1e-6

    def test_missing_metric(self):
        with pytest.raises(ParseError, match="'H'"):
            parse_input('{"N": [[[0, 0]]]}')

    def test_malformed_json(self):
        with pytest.raises(ParseError):
            parse_input('{"N": [[')

    def test_bad_entry_location(self):
        with pytest.raises(ParseError) as info:
            parse_input('{"N": [[[0, 0], [1, 2, 3]], [[0, 0], [0, 0]]], "H": [[1, 0], [0, 1]]}')
        assert info.value.details["row"] == 0 and info.value.details["col"] == 1

    def test_ragged_rows(self):
        with pytest.raises(ValidationError):
            parse_input('{"N": [[1, 0], [0]], "H": [[1, 0], [0, 1]]}')

    def test_singular_metric(self):
        with pytest.raises(NearSingular):
            parse_input('{"N": [[0, 0], [0, 0]], "H": [[1, 0], [0, 0]]}')

    def test_negative_tol(self):
        with pytest.raises(ParseError):
            parse_input('{"N": [[0]], "H": [[1]], "tol": -1}')

    def test_lossless_round_trip(self):
        pair, _ = sample_canonical(SampleSpec(FamilyTag.D2_N8, seed=3))
        p = conjugated(pair, 4)
        q = parse_input(dumps(encode_pair(p)))
        assert np.array_equal(p.N, q.N) and np.array_equal(p.H, q.H)


class TestDumps:
    def test_floats_keep_a_point(self):
        assert dumps([1.0, -0.0, 2.5e-20]) == "[1.0, 0.0, 2.5e-20]"

    def test_nested_layout(self):
        assert dumps({"a": [[1.0, 2.0]]}) == '{\n  "a": [[1.0, 2.0]]\n}'


class TestClassify:
    def test_sample_document(self):
        doc, _ = run_sample("D2_N5_B", 3)
        report, code = run_classify(parse_input(dumps(doc)))
        assert code == 0 and report["status"] == "ok"
        (block,) = report["blocks"]
        assert block["family"] == "D2_N5_B" and block["pass"]
        assert report["global"]["pass"]
        for k, v in doc["params"].items():
            assert np.allclose(block["params"][k], v, atol=1e-9)

    def test_not_normal_exits_three(self):
        pair = IndefinitePair(np.array([[0, 1], [0, 0]]), np.eye(2))
        report, code = run_classify(pair)
        assert code == 3 and report["error"]["code"] == "NotHNormal"

    def test_main_reads_file(self, tmp_path, capsys):
        doc, _ = run_sample("RANK1_N3_A", 1)
        code, out = run_main(capsys, "classify", write(tmp_path, "a.json", doc))
        assert code == 0 and out["blocks"][0]["family"] == "RANK1_N3_A"

    def test_main_parse_error_exits_two(self, tmp_path, capsys):
        code, out = run_main(capsys, "classify", write(tmp_path, "a.json", '{"N": [[0]]}'))
        assert code == 2 and out["error"]["code"] == "ParseError"

    def test_missing_file_exits_two(self, tmp_path, capsys):
        code, out = run_main(capsys, "classify", str(tmp_path / "nope.json"))
        assert code == 2

    def test_output_file(self, tmp_path, capsys):
        doc, _ = run_sample("RANK0", 0)
        out = tmp_path / "out.json"
        assert main(["classify", write(tmp_path, "a.json", doc), "-o", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["status"] == "ok"

    def test_usage_errors(self, capsys):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 2
        with pytest.raises(SystemExit):
            main(["--sample", "NOT_A_FAMILY"])


class TestOtherModes:
    def test_check_equiv(self, tmp_path, capsys):
        pair, _ = sample_canonical(SampleSpec(FamilyTag.D1_IND_N5_A, seed=2))
        a = write(tmp_path, "a.json", encode_pair(pair))
        b = write(tmp_path, "b.json", encode_pair(conjugated(pair, 5)))
        code, out = run_main(capsys, "--check-equiv", a, b)
        assert code == 0 and out["equivalent"] is True

    def test_check_equiv_different(self, tmp_path, capsys):
        a = write(tmp_path, "a.json", {"N": [[0.0, 1.0], [0.0, 0.0]], "H": d(2).tolist()})
        b = write(tmp_path, "b.json", {"N": [[0.0, 2.0], [0.0, 0.0]], "H": (-d(2)).tolist()})
        code, out = run_main(capsys, "--check-equiv", a, b)
        assert code == 0 and out["equivalent"] is False

    def test_fuzz(self, capsys):
        code, out = run_main(capsys, "--fuzz", "D1_DEC_N5", "--runs", "3", "--seed", "2")
        assert code == 0 and out["pass"] and out["runs"] == 3

    def test_fuzz_failure_exits_four(self, capsys):
        code, out = run_main(capsys, "--fuzz", "D2_N6", "--runs", "1")
        assert code == 4 and not out["pass"]


def test_classify_output_is_byte_identical(tmp_path):
    doc, _ = run_sample("D2_N7", 9)
    pair = conjugated(parse_input(dumps(doc)), 3)
    path = write(tmp_path, "a.json", encode_pair(pair))
    cmd = [sys.executable, "-m", "hnormal", "classify", path]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
