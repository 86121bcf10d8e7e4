# tests/repositories/test_protocol_repo.py
import pytest

from app.domain.errors import InvalidParameter, ProtocolParseError
from app.domain.repositories.protocol_repo import ProtocolRepo
from app.domain.services import library_svc


def test_load_by_bare_name(protocols_dir):
    assert ProtocolRepo(protocols_dir).load_source("detect_one") == library_svc.detect_one().spec


def test_parse_error_keeps_line_and_path(tmp_path):
    (tmp_path / "broken.txt").write_text("model: pp\nstates: a:b\n", encoding="utf-8")
    with pytest.raises(ProtocolParseError) as e:
        ProtocolRepo(tmp_path).load("broken")
    path = str(tmp_path / "broken.txt")
    assert e.value.line == 2
    assert e.value.path == path
    message = str(e.value)
    assert message.startswith(f"{path}: line 2: ")
    assert message.count("line 2") == 1


def test_unreadable_file(tmp_path):
    with pytest.raises(ProtocolParseError) as e:
        ProtocolRepo(tmp_path).load("missing")
    assert e.value.line is None
    assert "cannot read" in str(e.value)


def test_load_compiled_rejects_source(protocols_dir):
    with pytest.raises(InvalidParameter):
        ProtocolRepo(protocols_dir).load_compiled("detect_one")


def test_save_then_load_compiled(tmp_path, detect_one_c):
    repo = ProtocolRepo(tmp_path)
    path = repo.save(detect_one_c, tmp_path / "out" / "detect_one.iompp")
    assert repo.load_compiled(path) == detect_one_c
