# app/domain/repositories/protocol_repo.py

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Union

from app.core.config import get_settings
from app.domain.errors import InvalidParameter, ProtocolParseError
from app.domain.models.protocol import ProtocolSpec
from app.domain.models.simulation import CompiledProtocol
from app.utils.textfmt import format_protocol, parse_protocol

logger = logging.getLogger(__name__)

AnyProtocol = Union[ProtocolSpec, CompiledProtocol]


class ProtocolRepo:
    """
    Protocol files in the text format. Relative names resolve against
    `base_dir`, which defaults to settings.PROTOCOLS_DIR (the shipped library).
    """

    def __init__(self, base_dir: Optional[Union[str, Path]] = None):
        self.base_dir = Path(base_dir if base_dir is not None else get_settings().PROTOCOLS_DIR)

    def path_of(self, name: Union[str, Path]) -> Path:
        path = Path(name)
        if path.exists() or path.is_absolute():
            return path
        candidate = self.base_dir / path
        if candidate.suffix == "":
            candidate = candidate.with_suffix(".txt")
        return candidate

    def load(self, name: Union[str, Path]) -> AnyProtocol:
        path = self.path_of(name)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ProtocolParseError(f"cannot read {path}: {e.strerror}") from e
        try:
            protocol = parse_protocol(text)
        except ProtocolParseError as e:
            raise ProtocolParseError(e.detail, e.line, path=str(path)) from e
        logger.debug("loaded protocol path=%s compiled=%s", path, isinstance(protocol, CompiledProtocol))
        return protocol

    def load_source(self, name: Union[str, Path]) -> ProtocolSpec:
        protocol = self.load(name)
        if isinstance(protocol, CompiledProtocol):
            return protocol.spec
        return protocol

    def load_compiled(self, name: Union[str, Path]) -> CompiledProtocol:
        protocol = self.load(name)
        if not isinstance(protocol, CompiledProtocol):
            raise InvalidParameter(f"{name} carries no simulation/provenance sections; compile it first")
        return protocol

    def save(self, protocol: AnyProtocol, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(format_protocol(protocol), encoding="utf-8")
        logger.info("wrote protocol path=%s", path)
        return path
