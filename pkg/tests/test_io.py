import time

import numpy as np
import pytest

from tfpainleve._io import format_float, parallel_map, worker_count, write_csv


def test_format_float_round_trips():
    for v in (np.pi, -0.0, 1e-300, 2.0 / 3.0, 1.2333601779902887):
        assert float(format_float(v)) == v


def test_write_csv_round_trip(tmp_path):
    path = tmp_path / "table.csv"
    a = np.array([1.0, 2.0, np.pi])
    b = np.array([-1.0, 0.5, 1e-12])
    write_csv(path, ["a", "b"], [a, b])
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 0], a)  # exact: 17 digits round-trip
    np.testing.assert_array_equal(data[:, 1], b)
    assert not (tmp_path / "table.csv.tmp").exists()


def test_write_csv_validation(tmp_path):
    with pytest.raises(ValueError, match="header"):
        write_csv(tmp_path / "x.csv", ["a"], [np.zeros(2), np.zeros(2)])
    with pytest.raises(ValueError, match="same length"):
        write_csv(tmp_path / "x.csv", ["a", "b"], [np.zeros(2), np.zeros(3)])


def test_worker_count_from_environment(monkeypatch):
    monkeypatch.setenv("TFP_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("TFP_THREADS", "abc")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.setenv("TFP_THREADS", "0")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.delenv("TFP_THREADS")
    assert 1 <= worker_count() <= 8


def test_parallel_map_preserves_order(monkeypatch):
    def jitter(i):
        time.sleep(0.01 * (5 - i % 5))
        return i * i

    items = list(range(10))
    expected = [i * i for i in items]
    monkeypatch.setenv("TFP_THREADS", "4")
    assert parallel_map(jitter, items) == expected
    monkeypatch.setenv("TFP_THREADS", "1")
    assert parallel_map(jitter, items) == expected
