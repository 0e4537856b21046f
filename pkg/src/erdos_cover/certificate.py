"""Witness certificates: build, serialize, re-verify."""

from __future__ import annotations

import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

from .bush import CoverageReport, Rect, verify_cover
from .errors import ParseError
from .exactset import IntervalSet, fmt_rational
from .patterns import Pattern

SCHEMA_VERSION = 1
VOLATILE = ("created_at",)


def tool_version() -> str:
    from . import __version__

    return __version__


def _timestamp() -> str:
    # honour the reproducible-builds convention when it is set
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def build(
    method: str,
    pattern: Pattern,
    target: Rect,
    cover: IntervalSet,
    report: CoverageReport,
    params: Optional[dict] = None,
    G: Optional[IntervalSet] = None,
    S: Optional[IntervalSet] = None,
    extra: Optional[dict] = None,
) -> dict:
    """Assemble a certificate; ``cover`` is the set whose coverage is claimed."""
    G = cover if G is None else G
    S = IntervalSet.empty() if S is None else S
    cert = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": tool_version(),
        "created_at": _timestamp(),
        "method": method,
        "pattern": pattern.to_json(),
        "target": target.to_json(),
        "params": params or {},
        "G": G.to_json(),
        "S": S.to_json(),
        "H": cover.to_json(),
        "measures": {
            "G": fmt_rational(G.measure()),
            "S": fmt_rational(S.measure()),
            "H": fmt_rational(cover.measure()),
        },
        "verification": report.digest(),
    }
    if extra:
        cert["details"] = extra
    return cert


def dumps(cert: dict) -> str:
    return json.dumps(cert, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def stable(cert: dict) -> dict:
    """The certificate without fields that legitimately differ between runs."""
    return {k: v for k, v in cert.items() if k not in VOLATILE}


def stable_bytes(cert: dict) -> bytes:
    return dumps(stable(cert)).encode("utf-8")


def loads(text: str) -> dict:
    try:
        cert = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"certificate is not valid JSON: {exc}") from exc
    if not isinstance(cert, dict) or "schema_version" not in cert:
        raise ParseError("not a certificate: missing schema_version")
    if cert["schema_version"] != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {cert['schema_version']!r}")
    for key in ("pattern", "target", "H"):
        if key not in cert:
            raise ParseError(f"certificate lacks {key!r}")
    return cert


def load(path) -> dict:
    return loads(Path(path).read_text(encoding="utf-8"))


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def save(cert: dict, path) -> None:
    atomic_write(path, dumps(cert))


def parts(cert: dict) -> tuple:
    return (
        Pattern.from_json(cert["pattern"]),
        IntervalSet.from_json(cert["H"]),
        Rect.from_json(cert["target"]),
    )


def reverify(cert: dict) -> CoverageReport:
    pattern, H, target = parts(cert)
    return verify_cover(pattern, H, target)


def digest_matches(cert: dict, report: Optional[CoverageReport] = None) -> bool:
    report = report or reverify(cert)
    return cert.get("verification") == report.digest()


def as_plain(value: Any) -> Any:
    """Recursively turn Fractions inside nested containers into strings."""
    from fractions import Fraction

    if isinstance(value, Fraction):
        return fmt_rational(value)
    if isinstance(value, dict):
        return {str(k): as_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [as_plain(v) for v in value]
    return value
