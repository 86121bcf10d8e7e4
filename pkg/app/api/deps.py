# app/api/deps.py
import sys
from pathlib import Path
from typing import Tuple

from app.domain.errors import InvalidParameter, ProtocolParseError
from app.domain.repositories.protocol_repo import ProtocolRepo


# Shared repository for command handlers (library dir from settings)
def protocol_repo() -> ProtocolRepo:
    return ProtocolRepo()


def parse_input_csv(raw: str) -> Tuple[str, ...]:
    """`--input 1,0,1` -> ("1", "0", "1"); symbols are checked against Σ later."""
    symbols = tuple(s.strip() for s in raw.split(","))
    if not raw.strip() or any(not s for s in symbols):
        raise InvalidParameter(f"input vector {raw!r} has an empty symbol")
    return symbols


def read_text_arg(value: str) -> str:
    """A value naming an existing file is replaced by the file's content."""
    path = Path(value)
    if path.is_file():
        try:
            return path.read_text(encoding="utf-8")
        except OSError as e:
            raise ProtocolParseError(f"cannot read {path}: {e.strerror}") from e
    return value


def emit(text: str) -> None:
    # stdout carries only deterministic command output
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def write_artifact(path: str, text: str) -> None:
    if path == "-":
        emit(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
