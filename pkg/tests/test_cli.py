import csv
import json
import shutil

import pytest

from fraysched.cli import main


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def ex1(tmp_path, example1_instance_path):
    dest = tmp_path / "example1.json"
    shutil.copy(example1_instance_path, dest)
    return dest


class TestScheduleCommand:
    def test_schedule_validate_roundtrip(self, tmp_path, ex1, capsys):
        out = tmp_path / "sched.json"
        stats = tmp_path / "stats.json"
        assert run(["schedule", ex1, "--strategy", "ffp", "--out", out,
                    "--stats", stats]) == 0
        captured = capsys.readouterr()
        assert "3 slots" in captured.out
        record = json.loads(stats.read_text())
        assert record == {
            "strategy": "ffp",
            "slot_count": 3,
            "wall_time_s": record["wall_time_s"],
            "signal_count": 8,
            "variant_count": 2,
        }
        assert run(["validate", ex1, out]) == 0

    def test_native_and_mems_outputs(self, tmp_path, ex1):
        out = tmp_path / "sched.json"
        assert run(["schedule", ex1, "--strategy", "ffc", "--out", out,
                    "--native-dir", tmp_path / "nat",
                    "--mems-dump", tmp_path / "mems"]) == 0
        natives = sorted((tmp_path / "nat").iterdir())
        assert [p.name for p in natives] == ["variant00.json", "variant01.json"]
        native0 = json.loads(natives[0].read_text())
        assert {p["signal"] for s in native0["slots"] for p in s["placements"]} == set(
            "ABCDFG"
        )
        assert (tmp_path / "mems" / "smem.csv").exists()
        assert (tmp_path / "mems" / "nmem.csv").exists()

    def test_missing_instance_exits_2(self, tmp_path):
        assert run(["schedule", tmp_path / "nope.json", "--out", tmp_path / "s.json"]) == 2

    def test_unknown_strategy_exits_2(self, tmp_path, ex1):
        assert run(["schedule", ex1, "--strategy", "magic", "--out", tmp_path / "s.json"]) == 2

    def test_infeasible_instance_exits_2(self, tmp_path):
        doc = {
            "config": {"cycle_us": 1000, "hyperperiod_cycles": 2, "payload_bits": 8},
            "signals": [{"id": "x", "node": 1, "period_us": 1000, "length_bits": 2,
                         "deadline_us": 500}],
            "variants": [["x"]],
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        assert run(["schedule", path, "--out", tmp_path / "s.json"]) == 2


class TestValidateCommand:
    def test_reference_schedule_ok(self, ex1, example1_schedule_path):
        assert run(["validate", ex1, example1_schedule_path]) == 0

    def test_mutated_schedule_exits_1(self, tmp_path, ex1, example1_schedule_doc, capsys):
        doc = json.loads(json.dumps(example1_schedule_doc))
        doc["slots"][0]["placements"][1]["offset_bits"] = 0  # B onto A
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        assert run(["validate", ex1, bad]) == 1
        lines = [
            json.loads(line)
            for line in capsys.readouterr().out.strip().splitlines()
        ]
        assert any(v["rule"] == "frame-overlap" for v in lines)

    def test_unknown_signal_exits_2(self, tmp_path, ex1, example1_schedule_doc):
        doc = json.loads(json.dumps(example1_schedule_doc))
        doc["slots"][0]["placements"].append(
            {"signal": "QQ", "first_cycle": 0, "offset_bits": 0}
        )
        bad = tmp_path / "unknown.json"
        bad.write_text(json.dumps(doc))
        assert run(["validate", ex1, bad]) == 2

    def test_missing_files_exit_2(self, tmp_path, ex1):
        assert run(["validate", tmp_path / "no.json", tmp_path / "rly.json"]) == 2


class TestGenerateCommand:
    def test_generate_writes_loadable_instance(self, tmp_path):
        out = tmp_path / "inst.json"
        assert run(["generate", "--profile", "set1", "--seed", 5, "--out", out]) == 0
        from fraysched.core import read_instance

        inst = read_instance(out)
        assert len(inst.signals) >= 500

    def test_unknown_profile_exits_2(self, tmp_path):
        assert run(["generate", "--profile", "set99", "--out", tmp_path / "x.json"]) == 2

    def test_generated_set5_schedules_and_validates(self, tmp_path):
        inst = tmp_path / "set5.json"
        sched = tmp_path / "sched.json"
        assert run(["generate", "--profile", "set5", "--seed", 1, "--out", inst]) == 0
        assert run(["schedule", inst, "--strategy", "ffc", "--out", sched]) == 0
        assert run(["validate", inst, sched]) == 0


class TestBenchCommand:
    def test_row_and_aggregate_schema(self, tmp_path):
        out = tmp_path / "rows.csv"
        agg = tmp_path / "agg.csv"
        assert run([
            "bench", "--profiles", "set1", "--strategies", "ff,ffc",
            "--repeats", 2, "--seed-base", 0, "--out", out,
            "--aggregate-out", agg,
        ]) == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4  # 2 seeds x 2 strategies
        assert all(r["status"] == "ok" for r in rows)
        assert [
            (r["profile"], r["seed"], r["strategy"]) for r in rows
        ] == [("set1", "0", "ff"), ("set1", "0", "ffc"),
              ("set1", "1", "ff"), ("set1", "1", "ffc")]
        with open(agg) as fh:
            agg_rows = list(csv.reader(fh))
        assert agg_rows[0] == ["profile", "ff", "ffc"]
        assert agg_rows[1][0] == "set1"
        ff_rows = [int(r["slot_count"]) for r in rows if r["strategy"] == "ff"]
        assert float(agg_rows[1][1]) == pytest.approx(sum(ff_rows) / len(ff_rows))

    def test_zero_repeats_gives_empty_table(self, tmp_path):
        out = tmp_path / "rows.csv"
        assert run(["bench", "--profiles", "set1", "--strategies", "ff",
                    "--repeats", 0, "--out", out]) == 0
        with open(out) as fh:
            assert list(csv.DictReader(fh)) == []

    def test_parallel_rows_match_sequential(self, tmp_path):
        seq = tmp_path / "seq.csv"
        par = tmp_path / "par.csv"
        args = ["bench", "--profiles", "set1", "--strategies", "ffp",
                "--repeats", 2, "--seed-base", 3]
        assert run(args + ["--out", seq]) == 0
        assert run(args + ["--out", par, "--jobs", 2]) == 0
        strip = lambda path: [
            {k: v for k, v in row.items() if k != "wall_time_s"}
            for row in csv.DictReader(open(path))
        ]
        assert strip(seq) == strip(par)

    def test_unknown_profile_exits_2(self, tmp_path):
        assert run(["bench", "--profiles", "setx", "--out", tmp_path / "x.csv"]) == 2
