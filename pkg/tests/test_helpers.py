"""
Tests for utils.helpers.
"""

import json

import pytest

from utils.helpers import canonical_json, digest, format_report, parallel_map


class TestCanonicalJson:
    """Test cases for canonical serialization."""

    def test_key_order_does_not_matter(self):
        """Test equal payloads give equal bytes."""
        assert canonical_json({"b": 1, "a": [1, 2]}) == canonical_json({"a": [1, 2], "b": 1})

    def test_non_ascii_kept(self):
        """Test symbols are written as is."""
        assert "Θ" in canonical_json({"name": "Θ"})


class TestDigest:
    """Test cases for payload digests."""

    def test_prefix_and_length(self):
        """Test sha256 prefix and hex length."""
        value = digest({"a": 1})
        assert value.startswith("sha256:")
        assert len(value) == len("sha256:") + 64

    def test_stable_under_key_order(self):
        """Test digest ignores dictionary insertion order."""
        assert digest({"x": 1, "y": 2}) == digest({"y": 2, "x": 1})
        assert digest({"x": 1}) != digest({"x": 2})


class TestParallelMap:
    """Test cases for the worker pool."""

    @pytest.mark.parametrize("threads", [1, 4])
    def test_order_preserved(self, threads):
        """Test results come back in input order."""
        assert parallel_map(lambda n: n * n, range(20), threads=threads) == [n * n for n in range(20)]

    def test_empty(self):
        """Test an empty input gives an empty list."""
        assert parallel_map(str, [], threads=3) == []


class TestFormatReport:
    """Test cases for report formatting."""

    PAYLOAD = {
        "command": "delta",
        "passed": False,
        "inputs_digest": "sha256:00",
        "reports": [{
            "title": "delta_squared[K]",
            "checks": [
                {"name": "delta_squared", "passed": False, "witness": ["e1", "e2", "e3"]},
                {"name": "coderivation", "passed": True},
            ],
            "data": {"cutoff": 3},
        }],
        "timings": {"delta": 0.25},
    }

    def test_json_style(self):
        """Test json style is canonical JSON."""
        text = format_report(self.PAYLOAD, "json")
        assert json.loads(text) == self.PAYLOAD
        assert text == canonical_json(self.PAYLOAD)

    def test_text_style(self):
        """Test text style lists checks with witnesses and timings."""
        lines = format_report(self.PAYLOAD, "text").splitlines()
        assert lines[0] == "linfty-lab delta: FAIL"
        assert lines[1] == "inputs: sha256:00"
        assert '  [FAIL] delta_squared  witness=["e1", "e2", "e3"]' in lines
        assert "  [PASS] coderivation" in lines
        assert "  cutoff = 3" in lines
        assert lines[-1] == "time delta: 0.250s"

    def test_unknown_style(self):
        """Test unknown styles raise ValueError."""
        with pytest.raises(ValueError):
            format_report(self.PAYLOAD, "yaml")


if __name__ == "__main__":
    pytest.main([__file__])
