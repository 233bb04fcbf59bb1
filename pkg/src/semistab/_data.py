"""Location of the bundled data files (Odlyzko table, axiom ledger, catalogs)."""
from __future__ import annotations

import os
from pathlib import Path

ENV_VAR = "SEMISTAB_DATA"
_BUNDLED = Path(__file__).with_name("data")


def data_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    return Path(override) if override else _BUNDLED


def data_path(name: str) -> Path:
    return data_dir() / name


def data_lines(path: Path):
    """Yield ``(lineno, text)`` for non-blank, non-comment lines."""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield lineno, line
