"""Core engine: trail, levels, propagation, density caches."""

import pytest

from countsearch.alldiff import AllDifferent
from countsearch.engine import CONSISTENT, WIPEOUT, Constraint, Model


class Forbid(Constraint):
    """Toy constraint: variable may not take a fixed value."""

    def __init__(self, var, value):
        super().__init__([var])
        self.value = value

    def propagate(self, model):
        return model.remove_value(self.scope[0], self.value, self)

    def check(self, values):
        return values[0] != self.value


def test_empty_initial_domain_rejected():
    m = Model()
    with pytest.raises(ValueError):
        m.new_variable([])


def test_remove_and_backtrack_restores_exactly():
    m = Model()
    x = m.new_variable({1, 2, 3})
    m.push_level()
    assert m.remove_value(x, 2)
    assert m.domain(x) == {1, 3}
    m.push_level()
    assert m.assign(x, 1)
    assert m.is_bound(x)
    m.backtrack_to(1)
    assert m.domain(x) == {1, 3}
    m.backtrack_to(0)
    assert m.domain(x) == {1, 2, 3}


def test_backtrack_to_current_level_is_noop():
    m = Model()
    x = m.new_variable({1, 2})
    m.push_level()
    m.remove_value(x, 1)
    m.backtrack_to(m.level)
    assert m.domain(x) == {2}


def test_backtrack_forward_rejected():
    m = Model()
    m.new_variable({1})
    with pytest.raises(ValueError):
        m.backtrack_to(5)


def test_propagation_runs_to_fixpoint():
    m = Model()
    x = m.new_variable({1, 2})
    y = m.new_variable({1, 2})
    m.add(Forbid(x, 1))
    m.add(AllDifferent([x, y]))
    assert m.propagate() == CONSISTENT
    assert m.domain(x) == {2}
    assert m.domain(y) == {1}


def test_wipeout_reported_with_cause():
    m = Model()
    x = m.new_variable({1})
    seen = []
    m.on_wipeout(seen.append)
    c = m.add(Forbid(x, 1))
    assert m.propagate() == WIPEOUT
    assert m.last_wipeout is c
    assert seen == [c]


def test_push_decision_assign_and_refute():
    m = Model()
    x = m.new_variable({1, 2, 3})
    assert m.push_decision("assign", x, 2) == CONSISTENT
    assert m.value_of(x) == 2
    m.backtrack_to(0)
    assert m.push_decision("refute", x, 2) == CONSISTENT
    assert m.domain(x) == {1, 3}


def test_push_decision_rejects_absent_value():
    m = Model()
    x = m.new_variable({1})
    with pytest.raises(ValueError):
        m.push_decision("assign", x, 7)


def test_density_cache_trailed_across_levels():
    m = Model()
    x = m.new_variable({1, 2})
    y = m.new_variable({1, 2})
    c = m.add(AllDifferent([x, y]))
    m.propagate()
    tables = m.collect_densities()
    assert len(tables) == 1
    assert not c.dirty
    cached = c.cache
    m.push_level()
    m.push_decision("assign", x, 1)
    assert c.dirty  # domain change marked the table stale
    m.collect_densities()
    assert c.cache is not cached
    m.backtrack_to(0)
    assert c.cache is cached  # old table restored with the domains


def test_log_search_space_tracks_domain_product():
    import math

    m = Model()
    m.new_variable({1, 2})
    m.new_variable({1, 2, 3})
    assert m.log_search_space() == pytest.approx(math.log(6))
