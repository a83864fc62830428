"""Tests for the write module."""

import json
import tempfile
from pathlib import Path

from icn.write import DEVIATIONS_FILENAME, write_deviations, write_jsonl, write_report


class TestWriteReport:
    """Tests for write_report function."""

    def test_creates_parent_directories(self):
        """Test that missing directories are created."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "reports" / "n8.json"
            written = write_report(path, {"n": 8, "passed": True})

            assert written == path
            with open(path) as f:
                assert json.load(f) == {"n": 8, "passed": True}

    def test_no_temp_files_left(self):
        """Test that the atomic write cleans up after itself."""
        with tempfile.TemporaryDirectory() as tmpdir:
            write_report(Path(tmpdir) / "report.json", {"a": 1})

            names = [p.name for p in Path(tmpdir).iterdir()]
            assert names == ["report.json"]

    def test_overwrites(self):
        """Test that a second write replaces the first."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "report.json"
            write_report(path, {"run": 1})
            write_report(path, {"run": 2})

            assert json.loads(path.read_text()) == {"run": 2}


class TestWriteDeviations:
    """Tests for write_deviations function."""

    def test_written_next_to_report(self):
        """Test the fixed file name beside the report."""
        with tempfile.TemporaryDirectory() as tmpdir:
            records = [{"identity": "gamma(2,n)", "n": 8, "indices": [2, 8],
                        "expected": {}, "actual": {}, "replacement": "E1"}]
            target = write_deviations(Path(tmpdir) / "out" / "report.json", records)

            assert target == Path(tmpdir) / "out" / DEVIATIONS_FILENAME
            assert json.loads(target.read_text()) == records

    def test_empty_list_still_written(self):
        """Test that a clean run leaves an empty list, not a stale file."""
        with tempfile.TemporaryDirectory() as tmpdir:
            stale = Path(tmpdir) / DEVIATIONS_FILENAME
            stale.write_text('[{"identity": "old"}]')

            write_deviations(Path(tmpdir) / "report.json", [])

            assert json.loads(stale.read_text()) == []


class TestWriteJsonl:
    """Tests for write_jsonl function."""

    def test_one_object_per_line(self):
        """Test compact lines and the returned count."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "ic4.jsonl"
            records = [{"n": 4, "map": [1, None, None, None]}, {"n": 4, "map": [None] * 4}]
            count = write_jsonl(path, iter(records))

            assert count == 2
            lines = path.read_text().splitlines()
            assert lines[0] == '{"map":[1,null,null,null],"n":4}'
            assert [json.loads(line) for line in lines] == records

    def test_empty(self):
        """Test that no records gives an empty file."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "none.jsonl"

            assert write_jsonl(path, []) == 0
            assert path.read_text() == ""
