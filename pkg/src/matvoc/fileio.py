"""Atomic file writing helpers.

Outputs are written to a temp file in the target directory and renamed into
place, so readers never observe a half-written file.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_rename_into_place(tmp: str | Path, path: str | Path) -> None:
    """Finalize a file that was produced at a temp path (e.g. a rendered figure)."""
    os.replace(tmp, path)
