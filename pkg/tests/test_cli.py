import json

from parkline.cli import canonical_json, main
from parkline.procedures import DirTable, Direction


def invoke(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEnumerate:
    def test_right_r4(self, capsys):
        code, out, _ = invoke(capsys, "enumerate", "--proc", "right", "--r", "4")
        assert code == 0
        assert "count: 125" in out

    def test_far_r3(self, capsys):
        code, out, _ = invoke(capsys, "enumerate", "--proc", "far", "--r", "3")
        assert code == 0
        assert "count: 14" in out

    def test_trivial(self, capsys):
        code, out, _ = invoke(capsys, "enumerate", "--proc", "right", "--r", "1")
        assert code == 0
        assert "count: 1" in out

    def test_expect_universal_failure_exit_1(self, capsys):
        code, out, _ = invoke(
            capsys, "enumerate", "--proc", "far", "--r", "3", "--expect-universal"
        )
        assert code == 1

    def test_cap_exit_2(self, capsys):
        code, _, err = invoke(capsys, "enumerate", "--proc", "right", "--r", "8")
        assert code == 2
        assert "cap" in err

    def test_bad_proc_exit_3(self, capsys):
        code, _, err = invoke(capsys, "enumerate", "--proc", "bogus", "--r", "2")
        assert code == 3

    def test_missing_proc_exit_3(self, capsys):
        code, _, _ = invoke(capsys, "enumerate", "--r", "2")
        assert code == 3


class TestOrbits:
    def test_far_lists_empty_orbits(self, capsys):
        code, out, _ = invoke(
            capsys, "orbits", "--proc", "far", "--r", "3", "--format", "json"
        )
        assert code == 0
        doc = json.loads(out)
        reps = {v["representative"] for v in doc["results"]["violations"]}
        assert reps == {"1,3,1", "1,3,3"}
        members = {tuple(v["members"]) for v in doc["results"]["violations"]}
        assert ("1,3,1", "2,4,2", "3,1,3", "4,2,4") in members

    def test_closest_all_one(self, capsys):
        code, out, _ = invoke(
            capsys, "orbits", "--proc", "closest", "--r", "4", "--format", "json"
        )
        doc = json.loads(out)
        assert doc["results"]["all_one"] is True
        assert doc["results"]["orbit_count"] == 125

    def test_r1(self, capsys):
        code, out, _ = invoke(capsys, "orbits", "--proc", "right", "--r", "1", "--format", "json")
        doc = json.loads(out)
        assert doc["results"]["orbit_count"] == 1
        assert doc["results"]["histogram"] == {"1": 1}


class TestProb:
    def test_kw_mass(self, capsys):
        code, out, _ = invoke(capsys, "prob", "--proc", "kw:q=1/2", "--mass", "2")
        assert code == 0
        assert "total_parking_mass: 3/1" in out

    def test_pq_word(self, capsys):
        code, out, _ = invoke(capsys, "prob", "--proc", "pq:q=2", "--word", "1,1")
        assert code == 0
        assert "parking_probability: 1/3" in out

    def test_permutation(self, capsys):
        code, out, _ = invoke(capsys, "prob", "--proc", "pq:q=1", "--word", "1,2,3")
        assert "parking_probability: 1/1" in out

    def test_per_orbit(self, capsys):
        code, out, _ = invoke(
            capsys, "prob", "--proc", "pq:q=1", "--mass", "2", "--per-orbit",
            "--format", "json",
        )
        doc = json.loads(out)
        assert doc["results"]["orbit_mass"] == {"1,1": "1/1", "1,2": "1/1", "1,3": "1/1"}

    def test_word_and_mass_conflict(self, capsys):
        code, _, _ = invoke(capsys, "prob", "--proc", "kw:q=1/2", "--word", "1", "--mass", "2")
        assert code == 3

    def test_prob_cap(self, capsys):
        code, _, _ = invoke(capsys, "prob", "--proc", "kw:q=1/2", "--mass", "6")
        assert code == 2


class TestFibers:
    def test_right_r3(self, capsys):
        code, out, _ = invoke(
            capsys, "fibers", "--proc", "right", "--r", "3", "--format", "json"
        )
        doc = json.loads(out)
        assert doc["results"]["shape_counts"] == [6, 4, 3, 2, 1]
        assert doc["results"]["shape_total"] == 16
        assert doc["results"]["formula_total"] == 16
        for row in doc["results"]["fibers"]:
            assert row["formula"] == row["brute"]

    def test_sigma(self, capsys):
        code, out, _ = invoke(
            capsys, "fibers", "--proc", "right", "--r", "3", "--sigma", "1,2,3",
            "--format", "json",
        )
        doc = json.loads(out)
        assert doc["results"]["fibers"] == [{"sigma": "1,2,3", "formula": 6, "brute": 6}]

    def test_r1(self, capsys):
        code, out, _ = invoke(capsys, "fibers", "--proc", "right", "--r", "1", "--format", "json")
        doc = json.loads(out)
        assert doc["results"]["fibers"] == [{"sigma": "1", "formula": 1, "brute": 1}]

    def test_non_formula_procedure_exit_3(self, capsys):
        code, _, err = invoke(capsys, "fibers", "--proc", "lbs", "--r", "2")
        assert code == 3


class TestEncode:
    def test_lbs_121(self, capsys):
        code, out, _ = invoke(
            capsys, "encode", "--proc", "lbs", "--word", "1,2,1", "--format", "json"
        )
        doc = json.loads(out)
        assert doc["results"]["support"] == [0, 1, 2]
        assert doc["results"]["displacement"] == 1

    def test_single(self, capsys):
        code, out, _ = invoke(capsys, "encode", "--proc", "right", "--word", "5", "--format", "json")
        doc = json.loads(out)
        assert doc["results"]["support"] == [5]
        assert doc["results"]["shapes"] == ["(|)"]

    def test_right_11(self, capsys):
        code, out, _ = invoke(capsys, "encode", "--proc", "right", "--word", "1,1", "--format", "json")
        doc = json.loads(out)
        assert doc["results"]["shapes"] == ["((|)|)"]
        assert doc["results"]["p_labels"] == [1, 1]

    def test_missing_word(self, capsys):
        code, _, _ = invoke(capsys, "encode", "--proc", "right")
        assert code == 3


class TestTableFile:
    def test_proc_file(self, tmp_path, capsys):
        table = DirTable(((Direction.RIGHT,), (Direction.LEFT, Direction.RIGHT)))
        path = tmp_path / "table.json"
        path.write_text(json.dumps(table.to_json()))
        code, out, _ = invoke(
            capsys, "enumerate", "--proc-file", str(path), "--r", "3"
        )
        assert code == 0
        assert "count: 16" in out

    def test_strict_refuses(self, tmp_path, capsys):
        table = DirTable(((Direction.RIGHT,), (Direction.LEFT, Direction.RIGHT)))
        path = tmp_path / "table.json"
        path.write_text(json.dumps(table.to_json()))
        code, _, err = invoke(
            capsys, "enumerate", "--proc-file", str(path), "--r", "3", "--strict"
        )
        assert code == 3
        assert "strict" in err

    def test_malformed_table(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"type": "memoryless_local", "rows": [["R", "L"]]}))
        code, _, _ = invoke(capsys, "enumerate", "--proc-file", str(path), "--r", "2")
        assert code == 3


class TestFormats:
    def test_json_round_trip_identical(self, capsys):
        for argv in (
            ["enumerate", "--proc", "prime", "--r", "3"],
            ["orbits", "--proc", "far", "--r", "3"],
            ["prob", "--proc", "pq:q=2", "--word", "1,1"],
            ["encode", "--proc", "lbs", "--word", "1,2,1"],
        ):
            code, out, _ = invoke(capsys, *argv, "--format", "json")
            assert code == 0
            assert canonical_json(json.loads(out)) == out

    def test_csv(self, capsys):
        code, out, _ = invoke(
            capsys, "enumerate", "--proc", "right", "--r", "2", "--format", "csv"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "key,value"
        assert "count,3" in lines

    def test_table_format_default(self, capsys):
        code, out, _ = invoke(capsys, "enumerate", "--proc", "right", "--r", "2")
        assert out.startswith("enumerate")


class TestJobs:
    def test_jobs_flag(self, capsys):
        code, out, _ = invoke(
            capsys, "enumerate", "--proc", "closest", "--r", "5", "--jobs", "3"
        )
        assert code == 0
        assert "count: 1296" in out

    def test_jobs_env_default(self, capsys, monkeypatch):
        monkeypatch.setenv("PARKING_JOBS", "2")
        from parkline.cli import build_parser

        args = build_parser().parse_args(["enumerate", "--proc", "right", "--r", "2"])
        assert args.jobs == 2

    def test_cap_unsafe_lifts_cap(self):
        from parkline.cli import _cap, build_parser

        args = build_parser().parse_args(
            ["enumerate", "--proc", "right", "--r", "9", "--cap-unsafe"]
        )
        assert _cap(args, 7) is None
