import numpy as np
import pytest

from gett import cli, testkit
from gett.layout import TensorView
from gett.tensorfile import TensorFile, read_tensor, write_tensor


def write_vector(path, values, tag="d"):
    values = np.asarray(values, dtype=np.float64)
    view = TensorView(1, (len(values),), (1,), 0, len(values))
    write_tensor(path, TensorFile(tag, view, values))


@pytest.fixture
def dot_files(tmp_path):
    a = tmp_path / "a.tns"
    b = tmp_path / "b.tns"
    write_vector(a, [1, 2, 3])
    write_vector(b, [4, 5, 6])
    return a, b, tmp_path / "c.tns"


class TestRun:
    def test_dot_product(self, dot_files):
        a, b, out = dot_files
        code = cli.main(["run", str(a), str(b), str(out),
                         "--conts", "1", "--cont-a", "0", "--cont-b", "0"])
        assert code == 0
        tf = read_tensor(out)
        assert tf.view.rank == 0
        assert tf.data.tolist() == [32.0]

    def test_extent_mismatch_exits_1(self, dot_files, tmp_path, capsys):
        a, _, out = dot_files
        b4 = tmp_path / "b4.tns"
        write_vector(b4, [4, 5, 6, 7])
        code = cli.main(["run", str(a), str(b4), str(out),
                         "--conts", "1", "--cont-a", "0", "--cont-b", "0"])
        assert code == 1
        assert "ExtentMismatch" in capsys.readouterr().err
        assert not out.exists()

    def test_bad_perm_exits_1(self, dot_files, capsys):
        a, b, out = dot_files
        code = cli.main(["run", str(a), str(b), str(out), "--perm", "0,0"])
        assert code == 1
        assert "PermNotBijection" in capsys.readouterr().err
        assert not out.exists()

    def test_missing_file_exits_2(self, tmp_path, capsys):
        code = cli.main(["run", str(tmp_path / "nope.tns"), str(tmp_path / "nope.tns"),
                         str(tmp_path / "out.tns")])
        assert code == 2

    def test_malformed_file_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.tns"
        bad.write_text("garbage\n")
        code = cli.main(["run", str(bad), str(bad), str(tmp_path / "out.tns")])
        assert code == 2
        assert "bad magic" in capsys.readouterr().err

    def test_outer_product_with_flags(self, dot_files):
        a, b, out = dot_files
        code = cli.main(["run", str(a), str(b), str(out),
                         "--perm", "0,1", "--out-ext", "3,3", "--out-inc", "1,3"])
        assert code == 0
        tf = read_tensor(out)
        assert tf.view.extents == (3, 3)
        # c[i + 3j] = a[i] * b[j]
        assert tf.data.reshape(3, 3, order="F").tolist() == [
            [4.0, 5.0, 6.0], [8.0, 10.0, 12.0], [12.0, 15.0, 18.0]]

    def test_wrong_out_ext_exits_1(self, dot_files, capsys):
        a, b, out = dot_files
        code = cli.main(["run", str(a), str(b), str(out),
                         "--perm", "0,1", "--out-ext", "2,2"])
        assert code == 1
        assert "out-ext" in capsys.readouterr().err

    def test_strided_output(self, dot_files):
        a, b, out = dot_files
        # spread the 3x3 outer product over a stride-2 layout
        code = cli.main(["run", str(a), str(b), str(out),
                         "--perm", "0,1", "--out-inc", "2,6"])
        assert code == 0
        tf = read_tensor(out)
        assert tf.view.increments == (2, 6)
        assert tf.data[0] == 4.0 and tf.data[2] == 8.0

    def test_negative_out_inc_offsets_base(self, dot_files):
        a, b, out = dot_files
        code = cli.main(["run", str(a), str(b), str(out),
                         "--perm", "0,1", "--out-inc=-1,-3"])
        assert code == 0
        tf = read_tensor(out)
        assert tf.view.base_offset == 8
        assert tf.data[8] == 4.0  # element (0, 0)

    def test_dtype_mismatch_exits_1(self, tmp_path, capsys):
        a = tmp_path / "a.tns"
        b = tmp_path / "b.tns"
        write_vector(a, [1.0])
        view = TensorView(1, (1,), (1,), 0, 1)
        write_tensor(b, TensorFile("s", view, np.zeros(1, dtype=np.float32)))
        code = cli.main(["run", str(a), str(b), str(tmp_path / "c.tns")])
        assert code == 1
        assert "dtype" in capsys.readouterr().err


class TestGen:
    def test_writes_case_files(self, tmp_path):
        out = tmp_path / "case"
        code = cli.main(["gen", "--category", "Basic contraction", "--seed", "9",
                         "--out-dir", str(out)])
        assert code == 0
        assert (out / "a.tns").exists() and (out / "b.tns").exists()
        spec_text = (out / "spec.txt").read_text()
        assert "category: Basic contraction" in spec_text
        assert "seed: 9" in spec_text

    def test_deterministic_bytes(self, tmp_path):
        d1, d2 = tmp_path / "one", tmp_path / "two"
        for d in (d1, d2):
            assert cli.main(["gen", "--category", "Negative increment", "--seed", "4",
                             "--out-dir", str(d)]) == 0
        for name in ("a.tns", "b.tns", "spec.txt"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()

    def test_unknown_category_exits_2(self, tmp_path, capsys):
        code = cli.main(["gen", "--category", "Bogus", "--seed", "1",
                         "--out-dir", str(tmp_path)])
        assert code == 2
        assert "unknown category" in capsys.readouterr().err

    def test_gen_then_run_matches_oracle(self, tmp_path):
        out = tmp_path / "case"
        seed = 21
        assert cli.main(["gen", "--category", "Sub-tensor of same rank", "--seed",
                         str(seed), "--out-dir", str(out)]) == 0
        fields = {}
        for line in (out / "spec.txt").read_text().splitlines():
            key, _, value = line.partition(":")
            fields[key.strip()] = value.strip()
        argv = ["run", str(out / "a.tns"), str(out / "b.tns"), str(out / "c.tns"),
                "--conts", fields["conts"]]
        if fields["cont_a"]:
            argv += ["--cont-a", ",".join(fields["cont_a"].split())]
        if fields["cont_b"]:
            argv += ["--cont-b", ",".join(fields["cont_b"].split())]
        if fields["perm"]:
            argv += ["--perm", ",".join(fields["perm"].split())]
        assert cli.main(argv) == 0

        case = testkit.generate_case(fields["category"], seed)
        want = testkit.oracle_contract(
            testkit.pack(case.a_view, case.a), testkit.pack(case.b_view, case.b), case.spec
        )
        tf = read_tensor(out / "c.tns")
        got = testkit.pack(tf.view, tf.data)
        assert testkit.compare(got, testkit.cast_packed(want, np.float64))


class TestVerify:
    def test_small_clean_run(self, capsys):
        code = cli.main(["verify", "--suite", "Scalar contraction", "--cases", "20",
                         "--seed", "2"])
        assert code == 0
        out = capsys.readouterr().out
        assert "Scalar contraction" in out
        assert "20/20" in out

    def test_unknown_suite_exits_2(self, capsys):
        code = cli.main(["verify", "--suite", "Nope", "--cases", "1"])
        assert code == 2

    def test_mismatch_exits_1_and_names_seed(self, monkeypatch, capsys):
        import gett.kernel as kernel_mod

        real = kernel_mod.dgett

        def corrupt(*args, **kwargs):
            errs = real(*args, **kwargs)
            c = np.asarray(args[13])
            if not errs and c.size:
                c[-1] += 1.0
            return errs

        monkeypatch.setattr(kernel_mod, "dgett", corrupt)
        code = cli.main(["verify", "--suite", "Basic contraction", "--cases", "3",
                         "--seed", "5"])
        assert code == 1
        err = capsys.readouterr().err
        assert "FAIL Basic contraction seed=" in err

    def test_report_lists_every_selected_category(self, capsys):
        code = cli.main(["verify", "--cases", "1", "--seed", "1"])
        assert code == 0
        out = capsys.readouterr().out
        for cat in testkit.CATEGORIES:
            assert cat in out


class TestBench:
    def test_reports_mac_count(self, capsys):
        code = cli.main(["bench", "--rank", "2", "--extent", "4", "--conts", "1",
                         "--reps", "2"])
        assert code == 0
        out = capsys.readouterr().out
        assert "64 multiply-adds" in out  # 4**3
        assert "median of 2 reps" in out

    def test_square_matmul_mac_count(self, capsys):
        code = cli.main(["bench", "--rank", "2", "--extent", "64", "--conts", "1",
                         "--reps", "1"])
        assert code == 0
        assert "262144 multiply-adds" in capsys.readouterr().out  # 64**3

    def test_conts_exceeding_rank_exits_2(self, capsys):
        assert cli.main(["bench", "--rank", "1", "--extent", "2", "--conts", "2"]) == 2


class TestSelftest:
    def test_aliases_to_full_verify(self, monkeypatch):
        seen = {}

        def fake_run_suite(categories=None, cases=None, seed=None, progress=None):
            seen.update(categories=categories, cases=cases, seed=seed)
            return testkit.SuiteReport([], cases, seed, 0.0)

        monkeypatch.setattr(testkit, "run_suite", fake_run_suite)
        assert cli.main(["selftest"]) == 0
        assert seen == {"categories": "all", "cases": 1000, "seed": 1}
