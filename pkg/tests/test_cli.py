import csv
import subprocess
import sys

import numpy as np
import pytest

from xorfilters.bench import generate_keys
from xorfilters.cli import main, read_keys


@pytest.fixture
def keyfile(tmp_path):
    keys = generate_keys(500, 4)
    path = tmp_path / "keys.txt"
    lines = [str(k) if i % 2 else hex(k) for i, k in enumerate(keys.tolist())]
    path.write_text("\n".join(lines) + "\n\n")
    return path, keys


def _query_lines(capsys, filter_path, keys_path, *extra):
    capsys.readouterr()
    assert main(["query", "--filter", str(filter_path), "--keys", str(keys_path), *extra]) == 0
    return [line.split("\t") for line in capsys.readouterr().out.splitlines()]


@pytest.mark.parametrize("kind", ["xor8", "xor16", "xorplus8", "xorplus16", "bloom8", "bloom12", "bloom16"])
def test_build_then_query_all_maybe(tmp_path, capsys, keyfile, kind):
    path, keys = keyfile
    out = tmp_path / "f.xflt"
    assert main(["build", "--kind", kind, "--keys", str(path), "--out", str(out), "--seed", "0x10"]) == 0
    lines = _query_lines(capsys, out, path)
    assert [int(k) for k, _ in lines] == keys.tolist()
    assert {v for _, v in lines} == {"maybe"}


def test_raw_key_files(tmp_path, capsys):
    keys = generate_keys(300, 2)
    raw = tmp_path / "keys.bin"
    raw.write_bytes(keys.astype("<u8").tobytes())
    assert np.array_equal(read_keys(str(raw), raw=True), keys)
    out = tmp_path / "f.xflt"
    assert main(["build", "--kind", "xorplus16", "--keys", str(raw), "--raw", "--out", str(out)]) == 0
    lines = _query_lines(capsys, out, raw, "--raw")
    assert len(lines) == 300 and all(v == "maybe" for _, v in lines)


def test_empty_xor16_rarely_matches(tmp_path, capsys):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    probes = tmp_path / "probes.txt"
    probes.write_text("\n".join(map(str, generate_keys(1000, 9).tolist())))
    out = tmp_path / "e.xflt"
    assert main(["build", "--kind", "xor16", "--keys", str(empty), "--out", str(out)]) == 0
    lines = _query_lines(capsys, out, probes)
    assert len(lines) == 1000
    # expected 1000 / 65536 matches
    assert sum(v == "maybe" for _, v in lines) <= 2


def test_inspect(tmp_path, capsys):
    keys = tmp_path / "k.bin"
    keys.write_bytes(generate_keys(1_000_000, 1).astype("<u8").tobytes())
    out = tmp_path / "big.xflt"
    assert main(["build", "--kind", "xor8", "--keys", str(keys), "--raw", "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["inspect", "--filter", str(out)]) == 0
    text = capsys.readouterr().out
    fields = dict(line.split(None, 1) for line in text.splitlines() if not line.startswith(("payload", "last")))
    assert fields["kind"] == "xor8"
    assert fields["n"] == "1000000"
    assert fields["segment"] == "410011"
    assert float(fields["bits/key"]) == pytest.approx(9.84, abs=0.001)


def test_inspect_xorplus_and_bloom(tmp_path, capsys, keyfile):
    path, _ = keyfile
    for kind in ("xorplus8", "bloom12"):
        out = tmp_path / f"{kind}.xflt"
        main(["build", "--kind", kind, "--keys", str(path), "--out", str(out)])
        capsys.readouterr()
        assert main(["inspect", "--filter", str(out)]) == 0
        assert f"kind          {kind}" in capsys.readouterr().out


def test_bench_writes_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = main(["bench", "--kind", "xor8,bloom8", "--kind", "xorplus8", "--n", "20000", "--queries", "20000",
                 "--fractions", "0,0.25", "--reps", "1", "--csv", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [(r["kind"], float(r["fraction"])) for r in rows] == [
        ("xor8", 0.0), ("xor8", 0.25), ("bloom8", 0.0), ("bloom8", 0.25), ("xorplus8", 0.0), ("xorplus8", 0.25)]
    assert "bits/key" in capsys.readouterr().out


def test_theory(capsys):
    assert main(["theory", "--epsilon", "0.00390625"]) == 0
    out = capsys.readouterr().out
    assert "11.520" in out and "9.840" in out


@pytest.mark.parametrize("argv", [
    [],
    ["build", "--kind", "xor8"],
    ["build", "--kind", "cuckoo", "--keys", "k", "--out", "o"],
    ["bench", "--fractions", "0.5,3"],
    ["bench", "--kind", "xor32"],
    ["frobnicate"],
])
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1
    assert "usage:" in capsys.readouterr().err


def test_data_errors_exit_2(tmp_path, capsys):
    bad_keys = tmp_path / "bad.txt"
    bad_keys.write_text("12\nnot-a-key\n")
    assert main(["build", "--kind", "xor8", "--keys", str(bad_keys), "--out", str(tmp_path / "o")]) == 2
    assert "bad.txt:2" in capsys.readouterr().err

    big = tmp_path / "big.txt"
    big.write_text(str(2**64))
    assert main(["build", "--kind", "xor8", "--keys", str(big), "--out", str(tmp_path / "o")]) == 2

    assert main(["query", "--filter", str(tmp_path / "missing"), "--keys", str(big)]) == 2

    junk = tmp_path / "junk.xflt"
    junk.write_bytes(b"JUNK" + bytes(60))
    assert main(["inspect", "--filter", str(junk)]) == 2
    assert "magic" in capsys.readouterr().err

    odd = tmp_path / "odd.bin"
    odd.write_bytes(b"\0" * 7)
    assert main(["build", "--kind", "xor8", "--keys", str(odd), "--raw", "--out", str(tmp_path / "o")]) == 2


def test_module_entry_point(tmp_path, keyfile):
    path, _ = keyfile
    out = tmp_path / "m.xflt"
    proc = subprocess.run([sys.executable, "-m", "xorfilters", "build", "--kind", "xor8", "--keys", str(path),
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "xorfilters", "inspect"], capture_output=True, text=True)
    assert proc.returncode == 1
