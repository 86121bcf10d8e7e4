# tests/conftest.py
import os
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]

# Library files resolve against the repo, whatever the working directory
os.environ.setdefault("PROTOCOLS_DIR", str(ROOT / "protocols"))

from app.domain.services import library_svc  # noqa: E402
from app.domain.services.compiler_svc import compile_mpp, compile_pp  # noqa: E402


@pytest.fixture(scope="session")
def protocols_dir() -> Path:
    return ROOT / "protocols"


@pytest.fixture(scope="session")
def detect_one():
    return library_svc.detect_one().spec


@pytest.fixture(scope="session")
def threshold2():
    return library_svc.threshold2().spec


@pytest.fixture(scope="session")
def majority():
    return library_svc.majority().spec


@pytest.fixture(scope="session")
def detect_one_once():
    return library_svc.detect_one_once().spec


@pytest.fixture(scope="session")
def detect_one_c(detect_one):
    return compile_pp(detect_one)


@pytest.fixture(scope="session")
def detect_one_t6(detect_one):
    return compile_pp(detect_one, use_shortcut=True)


@pytest.fixture(scope="session")
def threshold2_c(threshold2):
    return compile_pp(threshold2)


@pytest.fixture(scope="session")
def detect_one_once_c(detect_one_once):
    return compile_mpp(detect_one_once)
