"""CLI behavior and exit-code contract (0 ok, 1 verify fail, 2 input, 3 gave up)."""

from __future__ import annotations

import json

import pytest

from satpath.cli import run

from conftest import matching_pennies, prisoners_dilemma
from satpath import Game, save_game


@pytest.fixture
def mp_file(tmp_path):
    target = tmp_path / "mp.json"
    save_game(matching_pennies(), target)
    return str(target)


@pytest.fixture
def pd_file(tmp_path):
    target = tmp_path / "pd.json"
    save_game(prisoners_dilemma(), target)
    return str(target)


class TestGen:
    def test_writes_valid_game(self, tmp_path, capsys):
        out = tmp_path / "g.json"
        code = run(["gen", "--players", "2", "--actions", "2,3", "--seed", "5", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["players"] == 2 and doc["actions"] == [2, 3]

    def test_stdout_when_no_out(self, capsys):
        assert run(["gen", "--players", "1", "--actions", "2", "--seed", "1"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["players"] == 1

    def test_bad_actions_is_input_error(self, capsys):
        assert run(["gen", "--players", "2", "--actions", "2;2", "--seed", "1"]) == 2


class TestSolve:
    def test_matching_pennies(self, mp_file, capsys):
        assert run(["solve", "--game", mp_file]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["profile"] == [[0.5, 0.5], [0.5, 0.5]]
        assert doc["max_gap"] <= 1e-9

    def test_missing_game_file(self, tmp_path, capsys):
        assert run(["solve", "--game", str(tmp_path / "nope.json")]) == 2

    def test_malformed_game_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"players": 0}')
        assert run(["solve", "--game", str(bad)]) == 2

    def test_unreachable_tolerance_is_incomplete(self, tmp_path, capsys):
        game_file = tmp_path / "irr.json"
        save_game(Game((2, 2), ([0.1, -0.2, -0.3, 0.4], [-0.1, 0.2, 0.3, -0.4])), game_file)
        assert run(["solve", "--game", str(game_file), "--eps", "1e-300"]) == 3


class TestPathVerifyPipeline:
    @pytest.mark.parametrize("fmt", ["json", "csv"])
    def test_path_then_verify_exits_zero(self, mp_file, tmp_path, fmt, capsys):
        trace = tmp_path / f"trace.{fmt}"
        code = run(
            ["path", "--game", mp_file, "--seed", "3", "--init", "pure:0,0",
             "--format", fmt, "--out", str(trace)]
        )
        assert code == 0
        assert run(["verify", "--game", mp_file, "--in", str(trace)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["ok"] is True

    def test_verify_flags_bad_path(self, mp_file, tmp_path, capsys):
        trace = tmp_path / "bad.csv"
        trace.write_text(
            "step,step_kind,player,action,probability,gap,satisfied\n"
            "1,initial,0,0,1.0,0.0,true\n"
            "1,initial,0,1,0.0,0.0,true\n"
            "1,initial,1,0,1.0,2.0,false\n"
            "1,initial,1,1,0.0,2.0,false\n"
            "2,worse_step,0,0,0.5,0.0,false\n"
            "2,worse_step,0,1,0.5,0.0,false\n"
            "2,worse_step,1,0,1.0,0.0,true\n"
            "2,worse_step,1,1,0.0,0.0,true\n"
        )
        code = run(["verify", "--game", mp_file, "--in", str(trace), "--no-terminal-nash"])
        assert code == 1
        doc = json.loads(capsys.readouterr().out)
        assert doc["ok"] is False and doc["step"] == 1 and doc["player"] == 0

    def test_random_init_path(self, pd_file, tmp_path):
        trace = tmp_path / "t.json"
        assert run(["path", "--game", pd_file, "--seed", "11", "--out", str(trace)]) == 0
        assert run(["verify", "--game", pd_file, "--in", str(trace)]) == 0

    def test_pipeline_over_generated_corpus_sample(self, tmp_path, capsys):
        # gen -> path -> verify must exit 0 end to end on random games
        for k, (players, actions) in enumerate(
            [(2, "2,2"), (2, "3,3"), (3, "2,3,2"), (3, "3,2,2"), (4, "2,2,2,2"), (4, "3,2,3,2")]
        ):
            game_file = tmp_path / f"g{k}.json"
            trace = tmp_path / f"g{k}.trace.json"
            assert run(
                ["gen", "--players", str(players), "--actions", actions,
                 "--seed", str(100 + k), "--out", str(game_file)]
            ) == 0
            assert run(
                ["path", "--game", str(game_file), "--seed", str(k),
                 "--out", str(trace)]
            ) == 0
            assert run(["verify", "--game", str(game_file), "--in", str(trace)]) == 0


class TestSimulate:
    def test_trajectory_verifies_without_terminal_requirement(self, mp_file, tmp_path, capsys):
        trace = tmp_path / "run.csv"
        code = run(
            ["simulate", "--game", mp_file, "--seed", "2", "--max-steps", "25",
             "--format", "csv", "--out", str(trace)]
        )
        assert code == 0
        code = run(
            ["verify", "--game", mp_file, "--in", str(trace), "--eps", "1e-6",
             "--no-terminal-nash", "--no-length-bound"]
        )
        assert code == 0

    def test_bad_init_spec(self, mp_file):
        assert run(["simulate", "--game", mp_file, "--init", "vertex:0"]) == 2


class TestBatch:
    def test_csv_summary(self, pd_file, tmp_path):
        out = tmp_path / "summary.csv"
        code = run(
            ["batch", "--game", pd_file, "--trials", "20", "--explorer", "pure_uniform",
             "--eps", "1e-9", "--seed", "6", "--format", "csv", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("game,")
        assert len(lines) == 2
        assert lines[1].split(",")[4] == "1.0"  # hit_frequency

    def test_multiple_games_json(self, pd_file, mp_file, capsys):
        code = run(
            ["batch", "--game", pd_file, "--game", mp_file, "--trials", "5",
             "--max-steps", "30", "--seed", "1"]
        )
        assert code == 0
        rows = json.loads(capsys.readouterr().out)
        assert [r["game_index"] for r in rows] == [0, 1]
