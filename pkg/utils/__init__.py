"""
Utility functions for the linfty-lab toolkit.
"""

from utils.helpers import canonical_json, digest, format_report, parallel_map

__all__ = ["canonical_json", "digest", "format_report", "parallel_map"]
