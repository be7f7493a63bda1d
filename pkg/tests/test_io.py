import numpy as np

from nmtorus.analysis import ScanResult, SlopeFit
from nmtorus.classical import phase_portrait
from nmtorus.echo import EchoSeries
from nmtorus.io import (
    read_header,
    read_table,
    table_body,
    write_echo,
    write_nm,
    write_portrait,
    write_scan,
    write_slopes,
)
from nmtorus.nonmarkov import nm_series


def test_echo_round_trip_is_exact(tmp_path):
    values = np.exp(-0.37 * np.arange(12)) * np.exp(1j * np.arange(12) / 3)
    series = EchoSeries(np.arange(12), values)
    path = write_echo(tmp_path / "e.csv", series, {"family": "pcm", "N": np.int64(64), "delta": np.float64(0.1)})
    header, data = read_table(path)
    assert header == {"family": "pcm", "N": 64, "delta": 0.1}
    np.testing.assert_array_equal(data["re_f"] + 1j * data["im_f"], values)
    np.testing.assert_array_equal(data["abs_f"], np.abs(values))
    np.testing.assert_array_equal(data["t"], np.arange(12))


def test_body_excludes_header(tmp_path):
    path = write_nm(tmp_path / "m.csv", nm_series([1, 0.4, 0.6]), {"a": 1})
    body = table_body(path)
    assert body.splitlines()[0] == "t,m_value,abs_f"
    assert len(body.splitlines()) == 4
    assert read_header(path) == {"a": 1}


def test_scan_and_slopes_tables(tmp_path):
    scan = ScanResult("k", np.array([0.1, 0.2]), np.array([0.5, np.nan]), ["", "ValueError: x"])
    _, data = read_table(write_scan(tmp_path / "s.csv", scan, {}))
    assert list(data) == ["k", "m_value", "error"]
    assert np.isnan(data["m_value"][1])
    assert data["error"][1] == "ValueError: x"
    fits = [(256, SlopeFit(0.002, 0.1, (30, 200), 0.01))]
    _, data = read_table(write_slopes(tmp_path / "f.csv", fits, {}))
    assert data["slope_times_n"][0] == 0.512


def test_portrait_rows(tmp_path):
    orbits = phase_portrait("harper", {"k": 1.0, "k_prime": 1.0}, [(0.1, 0.2), (0.3, 0.4)], 4)
    _, data = read_table(write_portrait(tmp_path / "p.csv", orbits, {}))
    assert data["orbit_id"].size == 2 * 5
    np.testing.assert_array_equal(data["step"][:5], np.arange(5))
