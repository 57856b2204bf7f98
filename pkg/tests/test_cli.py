import pytest

from swarmsat.cli import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_REFUSED,
    EXIT_TOTAL_FAILURE,
    EXIT_USAGE,
    main,
)
from swarmsat.wcnf import brute_force_optimum, load_wcnf

UNIT_WCNF = "c opt 5\np wcnf 1 1\n5 1 0\n"

FAST_PLAN = """\
runs_per_pair = 2
base_seed = 7
algorithms = ["gbest", "lbest"]

[[instances]]
vars = 8
clauses = 25
len = 3
wmin = 1
wmax = 20
seed = 5
with_opt = true

[swarm]
stagnation_window = 25
max_iterations = 400
"""


@pytest.fixture
def unit_file(tmp_path):
    path = tmp_path / "unit.wcnf"
    path.write_text(UNIT_WCNF)
    return str(path)


class TestSolve:
    def test_solves_unit_instance(self, unit_file, capsys):
        code = main(["solve", unit_file, "--stagnation", "20"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "best=5" in out
        assert "optimum=5" in out
        assert "percent=100.00" in out
        assert "converged=true" in out

    def test_assignment_flag(self, unit_file, capsys):
        main(["solve", unit_file, "--stagnation", "20", "--assignment"])
        assert "assignment=1" in capsys.readouterr().out

    def test_no_optimum_lines_without_opt_comment(self, tmp_path, capsys):
        path = tmp_path / "bare.wcnf"
        path.write_text("p wcnf 1 1\n5 1 0\n")
        code = main(["solve", str(path), "--stagnation", "20"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "optimum=" not in out
        assert "percent=" not in out

    def test_missing_file(self, capsys):
        code = main(["solve", "/nonexistent/x.wcnf"])
        assert code == EXIT_INPUT
        assert "error:" in capsys.readouterr().err

    def test_malformed_file(self, tmp_path, capsys):
        path = tmp_path / "bad.wcnf"
        path.write_text("p wcnf 1 1\n5 2 0\n")
        code = main(["solve", str(path)])
        assert code == EXIT_INPUT
        assert "out of range" in capsys.readouterr().err

    def test_unknown_topology_is_usage_error(self, unit_file, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["solve", unit_file, "--topology", "star"])
        assert exc.value.code == EXIT_USAGE
        err = capsys.readouterr().err
        assert "gbest" in err and "hierarchy" in err

    @pytest.mark.parametrize("topology", ["gbest", "lbest", "grid", "hierarchy"])
    @pytest.mark.parametrize("gc", [False, True])
    def test_all_variants(self, unit_file, capsys, topology, gc):
        argv = ["solve", unit_file, "--topology", topology, "--stagnation", "15"]
        if gc:
            argv.append("--gc")
        assert main(argv) == EXIT_OK
        assert "best=5" in capsys.readouterr().out

    def test_deterministic_given_seed(self, tmp_path, capsys):
        main(["gen", "--vars", "10", "--clauses", "30", "--len", "3",
              "--seed", "3", "--out", str(tmp_path / "i.wcnf")])
        capsys.readouterr()
        outputs = []
        for _ in range(2):
            main(["solve", str(tmp_path / "i.wcnf"), "--seed", "9",
                  "--stagnation", "25"])
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]


class TestGen:
    def test_writes_instance(self, tmp_path, capsys):
        out = tmp_path / "g.wcnf"
        code = main(["gen", "--vars", "10", "--clauses", "30", "--len", "3",
                     "--seed", "4", "--out", str(out)])
        assert code == EXIT_OK
        assert "wrote" in capsys.readouterr().out
        inst = load_wcnf(out)
        assert inst.num_vars == 10
        assert inst.num_clauses == 30

    def test_byte_identical_across_calls(self, tmp_path):
        a, b = tmp_path / "a.wcnf", tmp_path / "b.wcnf"
        for out in (a, b):
            main(["gen", "--vars", "10", "--clauses", "30", "--len", "3",
                  "--seed", "4", "--out", str(out)])
        assert a.read_bytes() == b.read_bytes()

    def test_with_opt_embeds_exact_optimum(self, tmp_path):
        out = tmp_path / "g.wcnf"
        main(["gen", "--vars", "8", "--clauses", "20", "--len", "3",
              "--seed", "4", "--out", str(out), "--with-opt"])
        inst = load_wcnf(out)
        assert inst.known_optimum == brute_force_optimum(inst)[0]

    def test_with_opt_refused_above_oracle_bound(self, tmp_path, capsys):
        out = tmp_path / "g.wcnf"
        code = main(["gen", "--vars", "30", "--clauses", "20", "--len", "3",
                     "--seed", "4", "--out", str(out), "--with-opt"])
        assert code == EXIT_REFUSED
        assert not out.exists()
        assert "error:" in capsys.readouterr().err

    def test_bad_parameters(self, tmp_path, capsys):
        code = main(["gen", "--vars", "10", "--clauses", "0", "--len", "3",
                     "--seed", "4", "--out", str(tmp_path / "g.wcnf")])
        assert code == EXIT_INPUT

    def test_missing_required_flag_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["gen", "--clauses", "30", "--len", "3", "--seed", "4",
                  "--out", str(tmp_path / "g.wcnf")])
        assert exc.value.code == EXIT_USAGE


class TestOracle:
    def test_unit_instance(self, unit_file, capsys):
        code = main(["oracle", unit_file])
        assert code == EXIT_OK
        assert "optimum=5" in capsys.readouterr().out

    def test_assignment(self, unit_file, capsys):
        main(["oracle", unit_file, "--assignment"])
        assert "assignment=1" in capsys.readouterr().out

    def test_refuses_large_instance(self, tmp_path, capsys):
        path = tmp_path / "big.wcnf"
        path.write_text("p wcnf 25 1\n1 1 0\n")
        code = main(["oracle", str(path)])
        assert code == EXIT_REFUSED
        assert "error:" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert main(["oracle", "/nonexistent/x.wcnf"]) == EXIT_INPUT


class TestExperiment:
    def test_runs_plan_and_writes_reports(self, tmp_path, capsys):
        plan = tmp_path / "plan.toml"
        plan.write_text(FAST_PLAN)
        out_dir = tmp_path / "out"
        code = main(["experiment", str(plan), "--out-dir", str(out_dir), "--quiet"])
        captured = capsys.readouterr()
        assert code == EXIT_OK
        names = {p.name for p in out_dir.iterdir()}
        assert names == {"report.txt", "runs.csv", "summary.csv", "anova.csv"}
        assert captured.out.count("wrote") == 4
        runs_text = (out_dir / "runs.csv").read_bytes().decode("utf-8")
        assert len(runs_text.strip().split("\r\n")) == 1 + 2 * 1 * 2

    def test_progress_lines_unless_quiet(self, tmp_path, capsys):
        plan = tmp_path / "plan.toml"
        plan.write_text(FAST_PLAN)
        main(["experiment", str(plan), "--out-dir", str(tmp_path / "o1")])
        assert "done algorithm=" in capsys.readouterr().err
        main(["experiment", str(plan), "--out-dir", str(tmp_path / "o2"),
              "--quiet"])
        assert "done algorithm=" not in capsys.readouterr().err

    def test_reruns_are_byte_identical_on_csvs(self, tmp_path):
        plan = tmp_path / "plan.toml"
        plan.write_text(FAST_PLAN)
        for name in ("o1", "o2"):
            main(["experiment", str(plan), "--out-dir", str(tmp_path / name),
                  "--quiet"])
        for name in ("runs.csv", "summary.csv", "anova.csv"):
            assert (tmp_path / "o1" / name).read_bytes() == (
                tmp_path / "o2" / name
            ).read_bytes()

    def test_partial_exclusion_still_succeeds(self, tmp_path, capsys):
        plan = tmp_path / "plan.toml"
        plan.write_text(
            FAST_PLAN + '\n[[instances]]\npath = "missing.wcnf"\n'
        )
        code = main(["experiment", str(plan), "--out-dir", str(tmp_path / "out"),
                     "--quiet"])
        assert code == EXIT_OK
        assert "excluded missing" in capsys.readouterr().err

    def test_nothing_loadable_is_total_failure(self, tmp_path, capsys):
        plan = tmp_path / "plan.toml"
        plan.write_text(
            'runs_per_pair = 1\n[[instances]]\npath = "missing.wcnf"\n'
        )
        code = main(["experiment", str(plan), "--out-dir", str(tmp_path / "out"),
                     "--quiet"])
        assert code == EXIT_TOTAL_FAILURE
        assert "no instance" in capsys.readouterr().err

    def test_invalid_plan(self, tmp_path, capsys):
        plan = tmp_path / "plan.toml"
        plan.write_text("bogus = 1\n")
        code = main(["experiment", str(plan), "--out-dir", str(tmp_path / "out")])
        assert code == EXIT_INPUT

    def test_missing_plan_file(self, tmp_path, capsys):
        code = main(["experiment", str(tmp_path / "none.toml"),
                     "--out-dir", str(tmp_path / "out")])
        assert code == EXIT_INPUT


def write_anova_csv(path, rows):
    path.write_text(
        "algorithm,value\n" + "\n".join(f"{a},{v}" for a, v in rows) + "\n"
    )


class TestAnova:
    def test_hand_computed_pair(self, tmp_path, capsys):
        path = tmp_path / "runs.csv"
        write_anova_csv(
            path, [("x", v) for v in (1, 2, 3)] + [("y", v) for v in (2, 3, 4)]
        )
        code = main(["anova", str(path)])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "x vs y: F=1.5000 v1=1 v2=4 Fcrit=7.71 not-significant" in out

    def test_twelve_run_groups(self, tmp_path, capsys):
        path = tmp_path / "runs.csv"
        rows = [("a", v) for v in range(12)] + [("b", v + 50) for v in range(12)]
        write_anova_csv(path, rows)
        code = main(["anova", str(path)])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "v1=1 v2=22 Fcrit=4.30" in out
        assert " significant" in out

    def test_ragged_groups(self, tmp_path, capsys):
        path = tmp_path / "runs.csv"
        write_anova_csv(path, [("a", 1), ("a", 2), ("b", 3)])
        assert main(["anova", str(path)]) == EXIT_INPUT
        assert "ragged" in capsys.readouterr().err

    def test_missing_columns(self, tmp_path, capsys):
        path = tmp_path / "runs.csv"
        path.write_text("name,score\na,1\n")
        assert main(["anova", str(path)]) == EXIT_INPUT
        assert "algorithm,value" in capsys.readouterr().err

    def test_single_algorithm(self, tmp_path, capsys):
        path = tmp_path / "runs.csv"
        write_anova_csv(path, [("a", 1), ("a", 2)])
        assert main(["anova", str(path)]) == EXIT_INPUT

    def test_non_numeric_value(self, tmp_path, capsys):
        path = tmp_path / "runs.csv"
        path.write_text("algorithm,value\na,one\nb,2\n")
        assert main(["anova", str(path)]) == EXIT_INPUT

    def test_missing_file(self, capsys):
        assert main(["anova", "/nonexistent/runs.csv"]) == EXIT_INPUT


class TestTopLevel:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert capsys.readouterr().out.strip() == "0.1.0"

    def test_no_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == EXIT_USAGE

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == EXIT_USAGE
