# tests/services/test_library.py
import pytest

from app.domain.errors import InvalidParameter
from app.domain.models.protocol import StepLabel
from app.domain.services import library_svc
from app.domain.services.execution_svc import predicate_value
from app.domain.services.semantics_svc import apply_step, global_input, is_enabled, is_immediate_observation


@pytest.mark.parametrize("name", library_svc.names())
def test_self_test(name):
    entry = library_svc.get_entry(name)
    report = library_svc.self_test(entry)
    assert report.passed, report.witness


def test_self_test_counts_inputs():
    report = library_svc.self_test(library_svc.detect_one(), max_n=4)
    assert report.passed and report.checked == 28
    assert report.params["inputs"] == "28"


def test_detect_one():
    spec = library_svc.detect_one().spec
    assert predicate_value(spec, ("1", "0")) == 1
    assert predicate_value(spec, ("0", "0")) == 0
    assert is_immediate_observation(spec)


def test_threshold2():
    spec = library_svc.threshold2().spec
    assert predicate_value(spec, ("1", "1")) == 1
    assert predicate_value(spec, ("1", "0")) == 0
    assert not is_immediate_observation(spec)


def test_majority_and_ties():
    entry = library_svc.majority()
    assert predicate_value(entry.spec, ("1", "1", "0")) == 1
    assert predicate_value(entry.spec, ("1", "0", "1", "0")) == 0
    assert entry.predicate(("1", "0")) == 0


def test_modulo():
    assert predicate_value(library_svc.modulo(2, 0).spec, ("1", "1")) == 1
    assert predicate_value(library_svc.modulo(3, 1).spec, ("1", "0", "0")) == 1
    assert library_svc.get_entry("modulo_3_2").name == "modulo_3_2"


@pytest.mark.parametrize("m, r", [(1, 0), (2, 2), (3, -1)])
def test_modulo_parameters(m, r):
    with pytest.raises(InvalidParameter):
        library_svc.modulo(m, r)


def test_detect_one_once_fires_once_per_pair():
    spec = library_svc.detect_one_once().spec
    assert predicate_value(spec, ("1", "0")) == 1
    assert predicate_value(spec, ("0", "0", "0")) == 0
    c = apply_step(spec, global_input(spec, ("1", "0")), StepLabel(0, 1, 2))
    assert (c.side(1, 2), c.side(2, 1)) == ("used", "used")
    assert not is_enabled(spec, c, StepLabel(0, 1, 2))


def test_unknown_entry():
    with pytest.raises(InvalidParameter):
        library_svc.get_entry("leader_election")


def test_self_test_reports_mismatch():
    entry = library_svc.threshold2().model_copy(update={"predicate": lambda inp: 1})
    report = library_svc.self_test(entry, max_n=2)
    assert not report.passed
    assert report.witness.input == ("0", "0")
