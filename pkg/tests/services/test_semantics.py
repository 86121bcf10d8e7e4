# tests/services/test_semantics.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.domain.errors import InvalidParameter, StateNotInSource, StepNotEnabled, UnknownInputSymbol
from app.domain.models.configuration import Configuration, MediatedConfiguration
from app.domain.models.protocol import Outcome, StepLabel
from app.domain.services import library_svc
from app.domain.services.semantics_svc import (
    apply_step,
    check_configuration,
    enabled_steps,
    global_input,
    global_output,
    is_enabled,
    is_immediate_observation,
)

THRESHOLD2 = library_svc.threshold2().spec


def plain(*agents):
    return Configuration(agents=tuple(agents))


def test_global_input_plain(detect_one):
    assert global_input(detect_one, ("1", "0")) == plain("1", "0")


def test_global_input_mediated_edges_start_fresh(detect_one_once):
    c = global_input(detect_one_once, ("1", "0", "0"))
    assert isinstance(c, MediatedConfiguration)
    assert c.diagonal() == ("1", "0", "0")
    assert all(s == "fresh" for _, _, s in c.off_diagonal())


def test_global_input_rejects_unknown_symbol(detect_one):
    with pytest.raises(UnknownInputSymbol):
        global_input(detect_one, ("5", "0"))


def test_global_input_rejects_empty_vector(detect_one):
    with pytest.raises(InvalidParameter):
        global_input(detect_one, ())


def test_global_output(threshold2):
    assert global_output(threshold2, plain("2", "2")) == 1
    assert global_output(threshold2, plain("0", "1")) == 0
    assert global_output(threshold2, plain("2", "0")) is Outcome.BOTTOM


def test_enabled_steps_respects_roles(detect_one):
    assert enabled_steps(detect_one, plain("1", "0")) == [StepLabel(0, 1, 2)]
    assert enabled_steps(detect_one, plain("0", "0")) == []


def test_enabled_steps_ordering(detect_one):
    steps = enabled_steps(detect_one, plain("1", "0", "0"))
    assert steps == [StepLabel(0, 1, 2), StepLabel(0, 1, 3)]


def test_apply_step(detect_one):
    assert apply_step(detect_one, plain("1", "0"), StepLabel(0, 1, 2)) == plain("1", "1")


def test_apply_step_not_enabled(detect_one):
    with pytest.raises(StepNotEnabled):
        apply_step(detect_one, plain("1", "0"), StepLabel(0, 2, 1))
    assert not is_enabled(detect_one, plain("1", "0"), StepLabel(0, 1, 1))
    assert not is_enabled(detect_one, plain("1", "0"), StepLabel(3, 1, 2))


def test_mediated_step_changes_only_its_cells(detect_one_once):
    c = global_input(detect_one_once, ("1", "0", "0"))
    after = apply_step(detect_one_once, c, StepLabel(0, 1, 2))
    assert after.agent(2) == "1"
    assert after.side(1, 2) == "used" and after.side(2, 1) == "used"
    assert after.side(1, 3) == "fresh" and after.side(3, 1) == "fresh"
    assert after.agent(3) == "0"


def test_check_configuration(detect_one):
    check_configuration(detect_one, plain("0", "1"))
    with pytest.raises(StateNotInSource):
        check_configuration(detect_one, plain("0", "7"))


def test_is_immediate_observation(detect_one, threshold2, detect_one_c):
    assert is_immediate_observation(detect_one)
    assert not is_immediate_observation(threshold2)
    assert is_immediate_observation(detect_one_c.spec)


# ---- properties ----------------------------------------------------------------

configs = st.lists(st.sampled_from(THRESHOLD2.states), min_size=2, max_size=4)


def _permute(config: Configuration, perm) -> Configuration:
    agents = [None] * config.size
    for i, q in enumerate(config.agents):
        agents[perm[i]] = q
    return Configuration(agents=tuple(agents))


@settings(max_examples=60, deadline=None)
@given(data=st.data(), agents=configs)
def test_steps_commute_with_agent_permutation(data, agents):
    config = plain(*agents)
    perm = data.draw(st.permutations(range(len(agents))))
    for label in enabled_steps(THRESHOLD2, config):
        moved = StepLabel(label.transition, perm[label.initiator - 1] + 1, perm[label.responder - 1] + 1)
        assert _permute(apply_step(THRESHOLD2, config, label), perm) == apply_step(
            THRESHOLD2, _permute(config, perm), moved
        )


@settings(max_examples=60, deadline=None)
@given(agents=configs)
def test_steps_only_touch_their_agents(agents):
    config = plain(*agents)
    for label in enabled_steps(THRESHOLD2, config):
        after = apply_step(THRESHOLD2, config, label)
        for k in range(1, config.size + 1):
            if k not in (label.initiator, label.responder):
                assert after.agent(k) == config.agent(k)
