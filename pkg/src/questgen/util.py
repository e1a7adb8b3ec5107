"""Small shared helpers."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

# tokens that attach to the preceding token when rendering text
NO_SPACE_BEFORE = {".", ",", "?", "!", ";", ":", "'s"}


def detokenize(texts) -> str:
    """Join token texts with spaces, gluing punctuation and possessives."""
    parts: list[str] = []
    for text in texts:
        if parts and text in NO_SPACE_BEFORE:
            parts[-1] += text
        else:
            parts.append(text)
    return " ".join(parts)


def atomic_write(path: str | os.PathLike, data: str) -> None:
    """Write a file via temp-file + rename so readers never see partial output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
