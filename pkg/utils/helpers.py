"""
Helper utility functions.
"""

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar

from config.settings import settings

T = TypeVar("T")
R = TypeVar("R")


def canonical_json(payload: Any) -> str:
    """Serialize with sorted keys and fixed separators so equal payloads give equal bytes."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)


def digest(payload: Any) -> str:
    """
    SHA-256 of the canonical serialization of a payload.

    Args:
        payload: JSON-compatible object

    Returns:
        Hex digest prefixed with the algorithm name
    """
    data = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return "sha256:" + hashlib.sha256(data.encode("utf-8")).hexdigest()


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Map ``func`` over ``items`` with at most ``threads`` workers, keeping input order.

    Falls back to a plain loop for a single worker.
    """
    items = list(items)
    workers = settings.THREADS if threads is None else threads
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _format_check(check: Dict) -> str:
    status = "PASS" if check["passed"] else "FAIL"
    line = f"  [{status}] {check['name']}"
    if "witness" in check:
        line += f"  witness={json.dumps(check['witness'], sort_keys=True, ensure_ascii=False)}"
    if check.get("detail"):
        line += f"  ({check['detail']})"
    return line


def format_report(payload: Dict, style: str = "json") -> str:
    """
    Format a command report.

    Args:
        payload: Report dictionary as produced by the CLI
        style: Format style (json, text)

    Returns:
        Formatted report string
    """
    if style == "json":
        return canonical_json(payload)
    if style != "text":
        raise ValueError(f"unknown output style {style!r}")

    lines = [f"linfty-lab {payload.get('command', '')}: {'PASS' if payload.get('passed') else 'FAIL'}"]
    if payload.get("inputs_digest"):
        lines.append(f"inputs: {payload['inputs_digest']}")
    for report in payload.get("reports", []):
        lines.append(f"{report['title']}:")
        lines.extend(_format_check(check) for check in report["checks"])
        for key in sorted(report.get("data", {})):
            value = json.dumps(report["data"][key], sort_keys=True, ensure_ascii=False)
            lines.append(f"  {key} = {value}")
    if "timings" in payload:
        for key in sorted(payload["timings"]):
            lines.append(f"time {key}: {payload['timings'][key]:.3f}s")
    return "\n".join(lines)
