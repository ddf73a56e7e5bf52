import json
import random
from pathlib import Path

from causalab.cli import main


def write_toy_csv(path: Path, n=60) -> Path:
    rng = random.Random(3)
    rows = ["a,b,c"]
    for _ in range(n):
        a = rng.gauss(0, 1)
        b = 1.2 * a + rng.gauss(0, 1)
        c = 0.9 * b + rng.gauss(0, 1)
        rows.append(f"{a:.5f},{b:.5f},{c:.5f}")
    path.write_text("\n".join(rows) + "\n")
    return path


class TestAnalyze:
    def test_writes_four_files(self, tmp_path):
        csv = write_toy_csv(tmp_path / "toy.csv")
        out = tmp_path / "out"
        code = main(["analyze", str(csv), "--alpha", "0.05",
                     "--out", str(out), "--seed", "1"])
        assert code == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == [
            "checkpoint.ckpt.json", "graph.json", "profile.json", "report.md",
        ]
        graph = json.loads((out / "graph.json").read_text())
        assert set(graph) == {"nodes", "edges"}
        assert "## Executive Summary" in (out / "report.md").read_text()

    def test_missing_file_exit_1(self, tmp_path, capsys):
        code = main(["analyze", str(tmp_path / "nope.csv")])
        assert code == 1
        assert "nope.csv" in capsys.readouterr().err

    def test_bad_alpha_exit_2(self, tmp_path):
        csv = write_toy_csv(tmp_path / "toy.csv")
        assert main(["analyze", str(csv), "--alpha", "1.5"]) == 2

    def test_usage_error_exit_2(self):
        assert main(["analyze"]) == 2
        assert main(["frobnicate"]) == 2

    def test_question_writes_answer(self, tmp_path):
        csv = write_toy_csv(tmp_path / "toy.csv")
        out = tmp_path / "out"
        code = main(["analyze", str(csv), "--out", str(out), "--seed", "7",
                     "--question", "What if we intervene on a? How would c change?"])
        assert code == 0
        answer = json.loads((out / "answer.json").read_text())
        assert answer.get("target") == "a" or "text" in answer

    def test_byte_identical_reruns(self, tmp_path):
        csv = write_toy_csv(tmp_path / "toy.csv")
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(["analyze", str(csv), "--out", str(out1), "--seed", "5"]) == 0
        assert main(["analyze", str(csv), "--out", str(out2), "--seed", "5"]) == 0
        for name in ("graph.json", "profile.json", "report.md",
                     "checkpoint.ckpt.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_corrupt_csv_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,a\n1,2\n")
        assert main(["analyze", str(bad)]) == 1
        assert "DuplicateHeader" in capsys.readouterr().err
