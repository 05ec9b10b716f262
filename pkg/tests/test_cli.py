import json
import subprocess
import sys

import pytest

from regbip.cli import main, parse_params, UsageError

# Every documented subcommand example: (argv, expected exit status)
EXAMPLES = [
    (["coeffs", "ell=2", "n=2"], 0),
    (["coeffs", "ell=3", "n=0"], 0),
    (["coeffs", "ell=4", "n=2", "--mod", "4"], 0),
    (["certify", "12^2", "--format", "json"], 0),
    (["certify", "4^6", "--format", "json"], 0),
    (["certify", "1^-2", "--format", "json"], 0),
    (["certify", "48^10 * 24^-2 * 96^-4", "level=1152"], 0),
    (["verify", "cor6.2", "p=5", "k=0", "j=1", "--trunc", "2000"], 0),
    (["verify", "cor6.2", "p=2", "k=0", "j=1"], 2),
    (["verify", "thm8.3", "p=3", "r=0", "k=1", "--trunc", "2000", "--format", "csv"], 1),
    (["density", "ell=4", "M=2", "X=1000,10000,100000"], 0),
    (["density", "ell=2", "M=4", "X=1000,10000,100000", "--format", "json"], 0),
    (["density", "ell=3", "M=3", "X=1"], 0),
    (["identity", "B4-d"], 0),
    (["hecke", "12^2", "primes=13"], 0),
    (["hecke", "12^2"], 0),
    (["hecke", "4^6", "primes=3"], 0),
    (["hecke", "4^6", "primes=5,7,11", "--mod", "4", "--trunc", "2000"], 0),
]


def run(argv):
    proc = subprocess.run([sys.executable, "-m", "regbip", *argv], capture_output=True)
    return proc.returncode, proc.stdout, proc.stderr


def call(capsys, argv):
    status = main(argv)
    out = capsys.readouterr()
    return status, out.out, out.err


class TestExamples:
    def test_coeffs(self, capsys):
        status, out, _ = call(capsys, ["coeffs", "ell=2", "n=2", "--format", "csv"])
        assert status == 0 and out == "n,B\n0,1\n1,2\n2,3\n"
        _, out, _ = call(capsys, ["coeffs", "ell=7", "n=0", "--format", "csv"])
        assert out == "n,B\n0,1\n"
        _, out, _ = call(capsys, ["coeffs", "ell=4", "n=2", "--mod", "4", "--format", "csv"])
        assert out == "n,B\n0,1\n1,2\n2,1\n"

    def test_coeffs_exact_big(self, capsys):
        _, out, _ = call(capsys, ["coeffs", "ell=2", "--trunc", "400", "--format", "json"])
        rows = json.loads(out)
        from regbip.partitions import brute_force_B

        assert rows[-1] == {"n": 400, "B": brute_force_B(2, 400)} and rows[-1]["B"] > 2**63

    def test_certify(self, capsys):
        _, out, _ = call(capsys, ["certify", "12^2", "--format", "json"])
        doc = json.loads(out)
        assert (doc["level"], doc["weight"], doc["holomorphic"]) == (144, 1, True)
        _, out, _ = call(capsys, ["certify", "4^6", "--format", "json"])
        doc = json.loads(out)
        assert (doc["level"], doc["weight"]) == (16, 3)
        _, out, _ = call(capsys, ["certify", "1^-2", "--format", "json"])
        assert json.loads(out)["holomorphic"] is False

    def test_certify_warning(self, capsys):
        _, out, _ = call(capsys, ["certify", "1", "--format", "json"])
        assert any("fractional" in w for w in json.loads(out)["warnings"])

    def test_verify(self, capsys):
        status, out, _ = call(capsys, ["verify", "cor6.2", "p=5", "k=0", "j=1", "--format", "csv"])
        assert status == 0
        assert out.splitlines()[1] == "cor6.2,p=5;k=0;j=1,25,7,4,vanishing,holds,"
        status, _, err = call(capsys, ["verify", "cor6.2", "p=2", "k=0", "j=1"])
        assert status == 2 and "non-integral" in err
        status, out, _ = call(capsys, ["verify", "thm8.3", "p=3", "r=0", "k=1", "--format", "csv"])
        assert status == 1
        assert "factor=3" in out.splitlines()[1] and out.splitlines()[1].endswith("fails,0")

    def test_verify_hypothesis_message(self, capsys):
        status, _, err = call(capsys, ["verify", "cor8.2", "p=5", "k=0", "j=1"])
        assert status == 2 and "3 (mod 4)" in err

    def test_density(self, capsys):
        status, out, _ = call(capsys, ["density", "ell=4", "M=2", "X=1000,10000,100000", "--format", "csv"])
        rows = out.splitlines()
        assert status == 0 and rows[0] == "X,count,ratio" and len(rows) == 4
        status, _, err = call(capsys, ["density", "ell=4", "M=2", "X=2000000"])
        assert status == 2 and "capacity" in err

    def test_identity(self, capsys):
        status, out, _ = call(capsys, ["identity", "B2-c", "--trunc", "1000", "--format", "csv"])
        assert status == 0 and out.splitlines()[1:] == ["B2-c,2,1000,holds,", "B2-c,4,1000,holds,"]

    def test_hecke(self, capsys):
        _, base, _ = call(capsys, ["hecke", "12^2", "--format", "json"])
        _, t13, _ = call(capsys, ["hecke", "12^2", "primes=13", "--format", "json"])
        head = lambda doc: [int(x) for x in next(r["value"] for r in json.loads(doc) if r["field"] == "head").split()]
        assert head(t13) == [-2 * c for c in head(base)]
        _, t3, _ = call(capsys, ["hecke", "4^6", "primes=3", "--format", "json"])
        assert not any(head(t3))
        status, out, _ = call(capsys, ["hecke", "12^2", "primes=13", "--mod", "2", "--format", "csv"])
        assert status == 0 and "vanish_after,1" in out.splitlines()
        status, _, err = call(capsys, ["hecke", "4^6", "primes=3", "--mod", "4"])
        assert status == 2 and "coprime to 6" in err


class TestUsage:
    @pytest.mark.parametrize(
        "argv",
        [
            ["coeffs", "ell=2", "bogus=1"],
            ["coeffs", "ell=1"],
            ["coeffs", "ell"],
            ["coeffs", "ell=x"],
            ["coeffs", "ell=2", "ell=3"],
            ["certify", "12^^2"],
            ["verify", "nope"],
            ["verify", "cor6.2", "p=5", "k=0", "j=1", "q=2"],
            ["density", "ell=2", "M=2"],
            ["density", "ell=2", "M=2", "X=10,5"],
            ["identity", "zzz"],
            ["hecke", "1"],
        ],
    )
    def test_exit_two(self, capsys, argv):
        assert call(capsys, argv)[0] == 2

    def test_argparse_errors(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["coeffs", "--format", "xml"])
        assert err.value.code == 2
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2
        with pytest.raises(SystemExit) as err:
            main(["coeffs", "ell=2", "--mod", "1"])
        assert err.value.code == 2

    def test_parse_params(self):
        assert parse_params(["a=1", "b=x=y"], ("a", "b")) == {"a": "1", "b": "x=y"}
        with pytest.raises(UsageError):
            parse_params(["=1"], ("a",))

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "coeffs.csv"
        assert main(["coeffs", "ell=2", "n=3", "--format", "csv", "--out", str(target)]) == 0
        assert capsys.readouterr().out == ""
        assert target.read_bytes() == b"n,B\n0,1\n1,2\n2,3\n3,6\n"


class TestDeterminism:
    @pytest.mark.parametrize("argv,status", EXAMPLES, ids=[" ".join(a) for a, _ in EXAMPLES])
    def test_byte_identical(self, argv, status):
        first = run(argv)
        second = run(argv)
        assert first[0] == status
        assert first == second

    def test_workers_do_not_change_output(self):
        argv = ["verify", "thm6.1", "primes=5,7", "j=1", "--format", "json"]
        assert run(argv) == run(argv + ["--workers", "4"])

    def test_seed_is_inert(self):
        argv = ["density", "ell=4", "M=4", "X=100,1000"]
        assert run(argv) == run(argv + ["--seed", "99"])
