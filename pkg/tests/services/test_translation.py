# tests/services/test_translation.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.domain.errors import NotCleanable, StateNotInSource, StepNotEnabled
from app.domain.models.configuration import Configuration, MediatedConfiguration
from app.domain.models.protocol import StepLabel
from app.domain.models.simulation import INIT, RESPONDED, Family, backup, locked, paired, unlocked
from app.domain.services import library_svc
from app.domain.services.compiler_svc import compile_pp, generated_from, without_family
from app.domain.services.execution_svc import Trace, run_random
from app.domain.services.semantics_svc import apply_step, global_input
from app.domain.services.translation_svc import (
    cleanup_schedule,
    is_translated_form,
    normalize,
    project_trace,
    translate,
)

THRESHOLD2 = library_svc.threshold2().spec
THRESHOLD2_C = compile_pp(THRESHOLD2)


def plain(*agents):
    return Configuration(agents=tuple(agents))


def first(compiled, family):
    return generated_from(compiled, family, 0)


def step(compiled, config, family, i, j):
    for k in first(compiled, family):
        label = StepLabel(k, i, j)
        if compiled.spec.transitions[k].lhs == _lhs(config, i, j):
            return label
    raise AssertionError(f"no {family} step at ({i},{j})")


def _lhs(config, i, j):
    return config.agent(i), config.side(i, j), config.agent(j), config.side(j, i)


def test_translate_plain(detect_one_c):
    assert translate(plain("0", "1"), detect_one_c) == MediatedConfiguration(
        cells=((unlocked("0"), INIT), (INIT, unlocked("1")))
    )


def test_translate_mediated(detect_one_once, detect_one_once_c):
    c = global_input(detect_one_once, ("1", "0"))
    d = translate(c, detect_one_once_c)
    assert d.agent(1) == unlocked("1")
    assert d.side(1, 2) == paired(INIT, "fresh")


def test_translate_rejects_foreign_states(detect_one_c):
    with pytest.raises(StateNotInSource):
        translate(plain("0", "7"), detect_one_c)


def test_translate_matches_compiled_input(detect_one, detect_one_c):
    for inp in (("0", "1"), ("1", "1", "0")):
        assert translate(global_input(detect_one, inp), detect_one_c) == global_input(detect_one_c.spec, inp)


def test_four_step_witness(detect_one_c):
    d = translate(plain("1", "0"), detect_one_c)
    spec = detect_one_c.spec
    d = apply_step(spec, d, step(detect_one_c, d, Family.T1, 1, 2))
    assert d.agent(2) == locked("1") and d.side(2, 1) == backup("0")
    assert normalize(d, detect_one_c) == plain("1", "0")

    d = apply_step(spec, d, step(detect_one_c, d, Family.T2, 2, 1))
    assert d.side(1, 2) == RESPONDED
    assert normalize(d, detect_one_c) == plain("1", "1")

    d = apply_step(spec, d, step(detect_one_c, d, Family.T3, 1, 2))
    d = apply_step(spec, d, step(detect_one_c, d, Family.T4, 2, 1))
    assert d == translate(plain("1", "1"), detect_one_c)
    assert is_translated_form(d)


def test_cleanup_after_request_aborts(detect_one_c):
    d = translate(plain("1", "0"), detect_one_c)
    d = apply_step(detect_one_c.spec, d, step(detect_one_c, d, Family.T1, 1, 2))
    schedule = cleanup_schedule(d, detect_one_c)
    assert len(schedule) == 1
    assert detect_one_c.family_of(schedule.steps[0].transition) is Family.T5
    assert schedule.endpoint == translate(plain("1", "0"), detect_one_c)


def test_cleanup_after_acknowledge_concludes(detect_one_c):
    d = translate(plain("1", "0"), detect_one_c)
    d = apply_step(detect_one_c.spec, d, step(detect_one_c, d, Family.T1, 1, 2))
    d = apply_step(detect_one_c.spec, d, step(detect_one_c, d, Family.T2, 2, 1))
    schedule = cleanup_schedule(d, detect_one_c)
    assert [detect_one_c.family_of(s.transition) for s in schedule.steps] == [Family.T3, Family.T4]
    assert schedule.endpoint == translate(plain("1", "1"), detect_one_c)


def test_cleanup_of_translated_form_is_empty(detect_one_c):
    d = translate(plain("0", "1", "1"), detect_one_c)
    schedule = cleanup_schedule(d, detect_one_c)
    assert schedule.steps == () and schedule.endpoint == d


def test_cleanup_blocked_without_abort(detect_one_c):
    mutated = without_family(detect_one_c, Family.T5)
    d = translate(plain("1", "0"), mutated)
    d = apply_step(mutated.spec, d, step(mutated, d, Family.T1, 1, 2))
    with pytest.raises(NotCleanable) as e:
        cleanup_schedule(d, mutated)
    assert e.value.configuration == d


def test_normalize_mediated_restores_edge(detect_one_once, detect_one_once_c):
    c = global_input(detect_one_once, ("1", "0"))
    d = translate(c, detect_one_once_c)
    d = apply_step(detect_one_once_c.spec, d, step(detect_one_once_c, d, Family.T1, 1, 2))
    assert d.side(2, 1) == paired(backup("0", "fresh"), "used")
    assert normalize(d, detect_one_once_c) == c


def test_project_trace_threshold2():
    start = translate(plain("1", "1", "0"), THRESHOLD2_C)
    for seed in range(5):
        trace = run_random(THRESHOLD2_C.spec, start, seed=seed, max_steps=60)
        projected = project_trace(THRESHOLD2, THRESHOLD2_C, trace)
        current = normalize(trace.start, THRESHOLD2_C)
        for label in projected:
            current = apply_step(THRESHOLD2, current, label)
        assert current == normalize(trace.final, THRESHOLD2_C)


def test_project_trace_rejects_foreign_step():
    start = translate(plain("1", "1"), THRESHOLD2_C)
    bogus = translate(plain("2", "0"), THRESHOLD2_C)
    k = first(THRESHOLD2_C, Family.T3)[0]
    trace = Trace(start=start, steps=((StepLabel(k, 1, 2), bogus),), seed=0)
    with pytest.raises(StepNotEnabled):
        project_trace(THRESHOLD2, THRESHOLD2_C, trace)


# ---- properties ----------------------------------------------------------------

configs = st.lists(st.sampled_from(THRESHOLD2.states), min_size=1, max_size=5).map(lambda a: plain(*a))


@settings(max_examples=80, deadline=None)
@given(c=configs)
def test_normalize_inverts_translate(c):
    assert normalize(translate(c, THRESHOLD2_C), THRESHOLD2_C) == c


@settings(max_examples=80, deadline=None)
@given(c1=configs, c2=configs)
def test_translate_is_injective(c1, c2):
    if c1 != c2:
        assert translate(c1, THRESHOLD2_C) != translate(c2, THRESHOLD2_C)
