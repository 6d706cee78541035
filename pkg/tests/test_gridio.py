import json

import numpy as np
import pytest

from oamradar.gridio import (
    RunManifest,
    read_oamg,
    sha256_file,
    write_csv_rows,
    write_manifest,
    write_oamg,
    write_pgm16,
)


class TestOamg:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        grid = rng.normal(size=(13, 7)) + 1j * rng.normal(size=(13, 7))
        path = tmp_path / "grid.oamg"
        write_oamg(path, grid)
        back = read_oamg(path)
        np.testing.assert_array_equal(back, grid)

    def test_header_layout(self, tmp_path):
        path = tmp_path / "g.oamg"
        write_oamg(path, np.ones((2, 3), dtype=complex))
        blob = path.read_bytes()
        assert blob[:4] == b"OAMG"
        assert int.from_bytes(blob[4:6], "little") == 1
        assert int.from_bytes(blob[6:10], "little") == 2
        assert int.from_bytes(blob[10:14], "little") == 3
        assert len(blob) == 14 + 2 * 3 * 16

    def test_interleaved_little_endian_payload(self, tmp_path):
        path = tmp_path / "g.oamg"
        write_oamg(path, np.array([[1.5 - 2.5j]]))
        payload = path.read_bytes()[14:]
        assert np.frombuffer(payload, dtype="<f8").tolist() == [1.5, -2.5]

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "not.oamg"
        path.write_bytes(b"NOPE" + bytes(20))
        with pytest.raises(ValueError, match="magic"):
            read_oamg(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "g.oamg"
        write_oamg(path, np.ones((4, 4), dtype=complex))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ValueError, match="truncated"):
            read_oamg(path)

    def test_writes_are_deterministic(self, tmp_path, rng):
        grid = rng.normal(size=(5, 5)) * (1 + 1j)
        p1, p2 = tmp_path / "a.oamg", tmp_path / "b.oamg"
        write_oamg(p1, grid)
        write_oamg(p2, grid)
        assert sha256_file(p1) == sha256_file(p2)


class TestPgm:
    def test_header_and_range(self, tmp_path):
        path = tmp_path / "q.pgm"
        mag = np.array([[0.0, 0.5], [1.0, 2.0]])
        write_pgm16(path, mag)
        blob = path.read_bytes()
        header = b"P5\n2 2\n65535\n"
        assert blob.startswith(header)
        pix = np.frombuffer(blob[len(header):], dtype=">u2").reshape(2, 2)
        assert pix[1, 1] == 65535
        assert pix[0, 0] == 0

    def test_all_zero(self, tmp_path):
        path = tmp_path / "z.pgm"
        write_pgm16(path, np.zeros((3, 3)))
        pix = np.frombuffer(path.read_bytes().split(b"\n65535\n", 1)[1], dtype=">u2")
        assert np.all(pix == 0)


class TestManifest:
    def test_manifest_contents(self, tmp_path):
        man = RunManifest(scenario_hash="abc", tool_version="0.1.0", command="image")
        f = tmp_path / "x.csv"
        write_csv_rows(f, ["a", "b"], [[1, 2]])
        man.add_file(tmp_path, f)
        man.add_stage("emit", 0.125)
        out = tmp_path / "manifest.json"
        write_manifest(out, man)
        data = json.loads(out.read_text())
        assert data["scenario_hash"] == "abc"
        assert data["files"]["x.csv"] == sha256_file(f)
        assert data["stages"][0]["name"] == "emit"
