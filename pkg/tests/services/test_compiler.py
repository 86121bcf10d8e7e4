# tests/services/test_compiler.py
import pytest

from app.domain.errors import MalformedSource, UnknownTransition
from app.domain.models.protocol import Transition
from app.domain.models.simulation import INIT, RESPONDED, Family, backup, locked, paired, unlocked
from app.domain.services.compiler_svc import (
    classify,
    compile_mpp,
    compile_pp,
    compile_protocol,
    generated_from,
    without_family,
)


def test_detect_one_without_shortcut(detect_one_c):
    assert len(detect_one_c.spec.transitions) == 19
    assert detect_one_c.family_counts() == {"t1": 1, "t2": 1, "t3": 1, "t4": 4, "t5": 12, "t6": 0}
    assert detect_one_c.merged_count == 0


def test_detect_one_with_shortcut(detect_one_t6):
    assert len(detect_one_t6.spec.transitions) == 1
    t = detect_one_t6.spec.transitions[0]
    assert t.lhs == (unlocked("1"), INIT, unlocked("0"), INIT)
    assert t.rhs == (unlocked("1"), INIT, unlocked("1"), INIT)
    assert detect_one_t6.family_of(0) is Family.T6


def test_compiled_symbols(detect_one_c):
    spec = detect_one_c.spec
    assert spec.model == "mpp" and spec.simulation == "pp"
    assert spec.states == (unlocked("0"), unlocked("1"), locked("0"), locked("1"))
    assert spec.edge_states == (INIT, RESPONDED, backup("0"), backup("1"))
    assert spec.initial_edge == INIT
    assert spec.input_map == {"0": unlocked("0"), "1": unlocked("1")}
    assert spec.output_map[locked("1")] == 1
    assert spec.name == "detect_one-iompp"


def test_compiled_protocols_are_immediate_observation(detect_one_c, threshold2_c, detect_one_once_c):
    for compiled in (detect_one_c, threshold2_c, detect_one_once_c):
        assert compiled.spec.io_flag


def test_request_and_acknowledge_shapes(detect_one_c):
    t1 = detect_one_c.spec.transitions[generated_from(detect_one_c, Family.T1, 0)[0]]
    t2 = detect_one_c.spec.transitions[generated_from(detect_one_c, Family.T2, 0)[0]]
    assert t1 == Transition(
        lhs=(unlocked("1"), INIT, unlocked("0"), INIT),
        rhs=(unlocked("1"), INIT, locked("1"), backup("0")),
    )
    assert t2 == Transition(
        lhs=(locked("1"), backup("0"), unlocked("1"), INIT),
        rhs=(locked("1"), backup("0"), locked("1"), RESPONDED),
    )


def test_threshold2_merges_shared_instances(threshold2_c):
    assert len(threshold2_c.spec.transitions) == 62
    assert threshold2_c.merged_count == 37
    assert threshold2_c.family_counts() == {"t1": 3, "t2": 3, "t3": 2, "t4": 6, "t5": 48, "t6": 0}
    # the conclude step of the acknowledging side only depends on p'
    for k in generated_from(threshold2_c, Family.T4, 0):
        assert set(threshold2_c.provenance[k].sources) == {0, 1, 2}


def test_threshold2_shortcut_never_applies(threshold2):
    assert compile_pp(threshold2, use_shortcut=True).family_counts()["t6"] == 0


def test_mediated_compilation_sizes(detect_one_once_c):
    spec = detect_one_once_c.spec
    assert len(spec.edge_states) == 12
    assert len(spec.transitions) == 47
    assert spec.initial_edge == paired(INIT, "fresh")
    assert detect_one_once_c.source_edge_states == ["fresh", "used"]


def test_mediated_abort_never_overrides_a_responded_side(detect_one_once_c):
    for k in generated_from(detect_one_once_c, Family.T5, 0):
        assert detect_one_once_c.spec.transitions[k].lhs[1].kind is not RESPONDED.kind


def test_model_mismatch(detect_one, detect_one_once):
    with pytest.raises(MalformedSource):
        compile_pp(detect_one_once)
    with pytest.raises(MalformedSource):
        compile_mpp(detect_one)


def test_compile_protocol_dispatch(detect_one, detect_one_once):
    assert compile_protocol(detect_one).source_model == "pp"
    assert compile_protocol(detect_one_once, use_shortcut=True).source_model == "mpp"


def test_classify(detect_one_c):
    t = detect_one_c.spec.transitions[5]
    assert classify(detect_one_c, t) == detect_one_c.provenance[5]
    with pytest.raises(UnknownTransition):
        classify(detect_one_c, Transition(lhs=("x", "y", "z", "w"), rhs=("x", "y", "z", "w")))


def test_without_family(detect_one_c):
    mutated = without_family(detect_one_c, Family.T5)
    assert len(mutated.spec.transitions) == 7
    assert mutated.family_counts()["t5"] == 0
    assert mutated.spec.matching(detect_one_c.spec.transitions[-1].lhs) == []
