import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from linechase.cli import main
from linechase.core import Instance, random_instance
from linechase.errors import InvalidInput
from linechase.geometry import Line
from linechase.io import dumps_instance, loads_instance, save_instance

SQ2 = math.sqrt(2)


def write(tmp_path, obj, name="inst.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestInstanceFiles:
    def test_round_trip_bit_exact(self, rng):
        for dim in (2, 3, 5):
            inst = random_instance(rng, 10, dim, initial_line=True)
            back = loads_instance(dumps_instance(inst))
            assert np.array_equal(back.start, inst.start)
            for a, b in zip(back.requests + [back.initial_line], inst.requests + [inst.initial_line]):
                assert np.array_equal(a.base, b.base) and np.array_equal(a.dir, b.dir)
            assert dumps_instance(back) == dumps_instance(inst)

    @given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=4, max_size=4)
           .filter(lambda v: abs(v[2]) + abs(v[3]) > 1e-6))
    def test_round_trip_property(self, v):
        inst = Instance(v[:2], [Line(v[:2], v[2:])])
        back = loads_instance(dumps_instance(inst))
        assert np.array_equal(back.requests[0].dir, inst.requests[0].dir)

    def test_direction_normalized_on_load(self):
        inst = loads_instance(json.dumps({"dim": 2, "start": [0, 1],
                                          "lines": [{"point": [0, 0], "dir": [-3, 0]}]}))
        assert np.array_equal(inst.requests[0].dir, [1.0, 0.0])

    @pytest.mark.parametrize("doc,msg", [
        ('{"dim": 2,', "line 1"),
        ('[]', "JSON object"),
        ('{"start": [0, 0], "lines": []}', "dim"),
        ('{"dim": 2, "start": [0], "lines": []}', "start"),
        ('{"dim": 2, "start": [0, 0], "lines": [{"point": [0, 0], "dir": [0, 0]}]}', r"lines\[0\].dir"),
        ('{"dim": 2, "start": [0, 0], "lines": [{"point": [0, "x"], "dir": [1, 0]}]}', r"lines\[0\].point\[1\]"),
        ('{"dim": 2, "start": [0, 0], "lines": [{"dir": [1, 0]}]}', "point"),
        ('{"dim": 2, "start": [0, 1], "initial_line": {"point": [0, 0], "dir": [1, 0]}, "lines": []}', "initial line"),
    ])
    def test_diagnostics(self, doc, msg):
        with pytest.raises(InvalidInput, match=msg):
            loads_instance(doc)


class TestRun:
    def test_empty_instance(self, tmp_path, capsys):
        inst = write(tmp_path, {"dim": 2, "start": [1.5, 2], "lines": []})
        out = tmp_path / "p.csv"
        assert main(["run", "--instance", inst, "--out", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0] == ["step", "x0", "x1", "step_cost", "cumulative_cost"]
        assert rows[1:] == [["0", "1.5", "2", "0", "0"]]
        assert "total_cost=0" in capsys.readouterr().out

    def test_two_line_example(self, tmp_path):
        h = 1 / SQ2
        inst = write(tmp_path, {"dim": 2, "start": [1, h], "lines": [
            {"point": [0, 0], "dir": [1, 0]}, {"point": [0, 0], "dir": [1, 1]}]})
        out = tmp_path / "p.csv"
        assert main(["run", "--instance", inst, "--out", str(out)]) == 0
        rows = read_csv(out)
        # first request: projection (cost h); second: drift x = (sqrt2 - 1)/sqrt2 toward the origin
        x = (SQ2 - 1) / SQ2
        second = math.hypot(h, x)
        assert float(rows[2][3]) == pytest.approx(h, rel=1e-15)
        assert float(rows[3][3]) == pytest.approx(second, rel=1e-12)
        assert abs(second - 0.76537) < 1e-5
        assert float(rows[3][4]) == pytest.approx(h + second, rel=1e-12)
        assert abs(h + second - 1.47248) < 1e-5

    def test_unknown_policy_exits_2(self, tmp_path, capsys):
        inst = write(tmp_path, {"dim": 2, "start": [0, 0], "lines": []})
        with pytest.raises(SystemExit) as e:
            main(["run", "--instance", inst, "--policy", "bogus"])
        assert e.value.code == 2
        assert "extended-drift" in capsys.readouterr().err

    def test_parse_error_exit(self, tmp_path, capsys):
        inst = write(tmp_path, '{"dim": 2, "start": [0, 0], "lines": [{"point": [0, 0]}]}')
        assert main(["run", "--instance", inst]) == 2
        assert "lines[0]" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["run", "--instance", str(tmp_path / "nope.json")]) == 2

    def test_csv_is_deterministic(self, tmp_path, rng):
        path = str(tmp_path / "i.json")
        save_instance(random_instance(rng, 30), path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["run", "--instance", path, "--out", str(a)])
        main(["run", "--instance", path, "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


def test_opt(tmp_path, capsys):
    inst = write(tmp_path, {"dim": 2, "start": [0, 0], "lines": [{"point": [0, 1], "dir": [1, 0]}]})
    out = tmp_path / "o.csv"
    assert main(["opt", "--instance", inst, "--out", str(out)]) == 0
    assert "opt_cost=1" in capsys.readouterr().out
    assert float(read_csv(out)[-1][-1]) == 1.0


class TestAdversary:
    def test_arbitrary(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        assert main(["adversary", "arbitrary", "--policy", "drift", "--out", str(out)]) == 0
        summary = capsys.readouterr().out
        ratio = float(summary.split("ratio=")[1].split()[0])
        assert ratio >= 1.5358 - 0.02 and "branch=force-A3" in summary
        rows = read_csv(out)
        assert rows[0][:3] == ["step", "line_x", "line_y"] and len(rows) > 4

    def test_memoryless_main(self, capsys):
        assert main(["adversary", "memoryless-main", "--policy", "drift", "--a", "1e-3",
                     "--steps", "100000"]) == 0
        ratio = float(capsys.readouterr().out.split("ratio=")[1].split()[0])
        assert abs(ratio - 3) <= 0.05

    def test_rotation(self, capsys):
        assert main(["adversary", "memoryless-rotation", "--policy", "beta:const:0.0",
                     "--a", "0.01", "--steps", "10000"]) == 0
        assert float(capsys.readouterr().out.split("ratio=")[1].split()[0]) >= 10

    def test_single(self, capsys):
        assert main(["adversary", "memoryless-single", "--policy", "greedy", "--h", "0.3"]) == 0
        assert capsys.readouterr().out.strip().endswith("ratio=1")

    @pytest.mark.parametrize("args", [["adversary", "sideways"],
                                      ["adversary", "arbitrary", "--stop-radius", "0"],
                                      ["adversary", "memoryless-main", "--steps", "-3"]])
    def test_usage_errors(self, args):
        with pytest.raises(SystemExit) as e:
            main(args)
        assert e.value.code == 2

    def test_invalid_construction_parameter(self):
        assert main(["adversary", "memoryless-rotation", "--a", "2"]) == 2


class TestVerify:
    def test_section5(self, capsys):
        assert main(["verify", "--suite", "section5-constants"]) == 0
        out = capsys.readouterr().out
        for ref in ("1.23679", "1.89948", "1.142963", "1.75537", "1.50435", "2.31039"):
            assert ref in out
        assert "MISMATCH" not in out and "FAIL" not in out

    def test_potential(self, capsys):
        assert main(["verify", "--suite", "potential", "--n", "200000"]) == 0

    def test_potential_greedy_fails_with_replayable_config(self, capsys):
        assert main(["verify", "--suite", "potential", "--policy", "greedy", "--n", "10000"]) == 1
        out = capsys.readouterr().out
        cfg = json.loads(out[out.index("{"):])["config"]
        assert {"P", "L", "L_new", "A", "A_new"} <= set(cfg)

    def test_rts(self, capsys):
        assert main(["verify", "--suite", "rts", "--n", "30"]) == 0

    def test_ratio_audit(self, capsys):
        assert main(["verify", "--suite", "ratio-audit", "--n", "20", "--dim", "3"]) == 0
        assert "extended-drift" in capsys.readouterr().out

    def test_failure_exit_code(self, capsys):
        # a policy that overshoots badly breaks the 3 bound on random instances
        assert main(["verify", "--suite", "ratio-audit", "--n", "30", "--policy", "beta:const:25"]) == 1


def test_sweep(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--beta-grid", "0.3,0.7071067811865476,1.0", "--a", "1e-3",
                 "--steps", "100000", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["beta", "simulated_ratio", "theoretical_ratio", "gap"]
    theo = [float(r[2]) for r in rows[1:]]
    assert theo.index(min(theo)) == 1 and math.isclose(theo[1], 3.0, rel_tol=1e-12)
    assert abs(theo[0] - 4.0585) < 1e-4
    for r in rows[1:]:
        assert float(r[3]) <= 0.02 * float(r[2])


def test_sweep_rejects_bad_grid():
    with pytest.raises(SystemExit):
        main(["sweep", "--beta-grid", "0.3,-1"])


def test_console_script(tmp_path):
    res = subprocess.run(["line-chase", "verify", "--suite", "section5-constants"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "ratio A2" in res.stdout
    res = subprocess.run([sys.executable, "-m", "linechase.cli", "run", "--instance", "x",
                          "--policy", "nope"], capture_output=True, text=True)
    assert res.returncode == 2
