"""
Tests for globular sums, spines, truncations and their complexes.
"""

import pytest

from adc import check_basis_conditions, dualize, find_isomorphism, wedge_adc
from errors import CorpusError
from theta import (
    POINT, SpinePresentation, dimension, dual_sum, globe, node, notation, path, spine,
    sum_from_json, sum_to_json, sums_up_to, suspend, to_adc, truncate_sum, wedge,
)


def _make_whisker():
    return node([globe(1), POINT])


def _make_two_globes():
    return node([globe(1), globe(1)])


@pytest.mark.parametrize("n", range(7))
def test_globe_dimension(n):
    assert dimension(globe(n)) == n


class TestWedge:
    def test_intervals(self):
        assert wedge(path(1), path(1)) == path(2)
        assert len(wedge(path(1), path(1))) == 2

    def test_point_is_unit(self):
        assert wedge(_make_whisker(), POINT) == _make_whisker()
        assert wedge(POINT, _make_whisker()) == _make_whisker()

    def test_associative(self):
        a, b, c = globe(2), path(1), _make_whisker()
        assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))

    def test_dimension_is_max(self):
        assert dimension(wedge(globe(3), path(2))) == 3


class TestSpine:
    def test_path(self):
        presentation = spine(path(3))
        assert presentation.globes == (1, 1, 1)
        assert presentation.gluings == (0, 0)
        assert str(presentation) == "D1 ∪_D0 D1 ∪_D0 D1"

    def test_globe_is_its_own_spine(self):
        assert spine(globe(3)) == SpinePresentation((3,), ())

    def test_two_globes(self):
        assert spine(_make_two_globes()) == SpinePresentation((2, 2), (0,))

    def test_suspended_path(self):
        assert spine(suspend(path(2))) == SpinePresentation((2, 2), (1,))

    def test_round_trip(self):
        for a in sums_up_to(3, 2):
            assert spine(a).to_sum() == a

    def test_gluing_below_globes(self):
        with pytest.raises(ValueError):
            SpinePresentation((1, 1), (1,))


class TestComplexes:
    def test_path_complex(self):
        assert to_adc(path(2)).size_by_degree() == (3, 2)

    def test_globe_complex(self):
        assert to_adc(globe(2)).size_by_degree() == (2, 2, 1)

    def test_basis_conditions(self):
        for a in sums_up_to(2, 2):
            assert check_basis_conditions(to_adc(a)).all(), notation(a)

    @pytest.mark.parametrize("a,b", [
        (path(1), path(1)),
        (globe(2), path(1)),
        (_make_whisker(), globe(1)),
    ])
    def test_wedge_matches_complex_wedge(self, a, b):
        assert find_isomorphism(to_adc(wedge(a, b)), wedge_adc(to_adc(a), to_adc(b))) is not None


class TestTruncation:
    def test_globe(self):
        assert truncate_sum(globe(2), 1) == globe(1)

    def test_already_truncated(self):
        assert truncate_sum(path(2), 1) == path(2)

    def test_mixed(self):
        assert truncate_sum(node([globe(2), globe(1)]), 1) == path(2)

    def test_zero(self):
        assert truncate_sum(_make_two_globes(), 0) == POINT


class TestDuality:
    def test_reverses_top_level(self):
        assert dual_sum(_make_whisker(), {1}) == node([POINT, globe(1)])

    def test_globes_self_dual(self):
        assert dual_sum(globe(3), {1, 2, 3}) == globe(3)

    @pytest.mark.parametrize("degrees", [{1}, {2}, {1, 2}])
    def test_matches_complex_duality(self, degrees):
        for a in (_make_whisker(), _make_two_globes(), node([path(2), globe(1)])):
            dual = dualize(to_adc(a), degrees)
            assert find_isomorphism(dual, to_adc(dual_sum(a, degrees))) is not None


class TestNotation:
    @pytest.mark.parametrize("a,text", [
        (POINT, "[0]"),
        (path(2), "[2]"),
        (_make_two_globes(), "[{[1], [1]}, 2]"),
    ])
    def test_render(self, a, text):
        assert notation(a) == text

    def test_json(self):
        assert sum_to_json(globe(1)) == [[]]
        assert sum_from_json([[[]], []]) == _make_whisker()

    def test_malformed_json(self):
        with pytest.raises(CorpusError):
            sum_from_json({"children": []})
