"""
Tests for augmented directed complexes, nu cells, pushouts and isomorphism search.
"""

import pytest

from adc import (
    Adc, Chain, ChainMap, associator, atom, check_basis_conditions, dualize, duality_degrees,
    find_isomorphism, globe_adc, nondegenerate_counts, nu_cells, nu_compose, oriental2_adc,
    path_adc, point_adc, pushout_adc, suspension_sum, table_problems, tensor, validate, wedge_adc,
)
from errors import BudgetExceededError, InvalidComplexError, NotComposableError, PushoutError


def _make_square() -> Adc:
    return tensor(path_adc(1), path_adc(1))


def _make_two_cycle() -> Adc:
    return Adc([("a", 0), ("b", 0), ("f", 1), ("g", 1)],
               {"f": {"b": 1, "a": -1}, "g": {"a": 1, "b": -1}},
               {"a": 1, "b": 1}, name="cycle")


class TestChain:
    def test_parts_are_non_negative(self):
        x = Chain(1, {"a": 2, "b": -3})
        assert x.positive_part() == Chain(1, {"a": 2})
        assert x.negative_part() == Chain(1, {"b": 3})
        assert x.positive_part() - x.negative_part() == x

    def test_zero_terms_dropped(self):
        assert Chain(0, {"a": 0}).is_zero
        assert Chain(0, {"a": 1}) - Chain(0, {"a": 1}) == Chain(0)

    def test_bool_coefficient_rejected(self):
        with pytest.raises(InvalidComplexError):
            Chain(0, {"a": True})

    def test_str(self):
        assert str(Chain(1, {"b": -1, "a": 2})) == "2·a - b"
        assert str(Chain(1)) == "0"


class TestAdc:
    def test_path_shape(self):
        path = path_adc(3)
        assert path.size_by_degree() == (4, 3)
        assert path.boundary("e1") == Chain(0, {"{2}": 1, "{1}": -1})
        assert path.endpoints == ("{0}", "{3}")
        assert validate(path).ok

    def test_duplicate_ids_rejected(self):
        with pytest.raises(InvalidComplexError):
            Adc([("a", 0), ("a", 1)])

    def test_differential_degree_checked(self):
        with pytest.raises(InvalidComplexError):
            Adc([("a", 0), ("t", 2)], {"t": {"a": 1}})

    def test_validate_reports_boundary_squared(self):
        bad = Adc([("a", 0), ("b", 0), ("f", 1), ("t", 2)],
                  {"f": {"b": 1, "a": -1}, "t": {"f": 1}}, {"a": 1, "b": 1})
        report = validate(bad)
        assert report.rules() == ["boundary-squared"]
        assert report.violations[0].subject == "t"

    def test_validate_reports_augmentation(self):
        bad = Adc([("a", 0), ("b", 0), ("f", 1)], {"f": {"b": 1, "a": -1}}, {"a": 1, "b": 2})
        assert validate(bad).rules() == ["augmentation"]

    def test_json_document(self):
        square = _make_square()
        restored = Adc.from_dict(square.to_dict())
        assert restored == square
        assert restored.endpoints == square.endpoints

    def test_malformed_document(self):
        with pytest.raises(InvalidComplexError):
            Adc.from_dict({"basis": [{"id": "a"}]})


class TestConstructions:
    def test_tensor_of_intervals(self):
        square = _make_square()
        assert square.size_by_degree() == (4, 4, 1)
        assert square.boundary("e0⊗e0") == Chain(1, {
            "{1}⊗e0": 1, "{0}⊗e0": -1, "e0⊗{1}": -1, "e0⊗{0}": 1,
        })
        assert validate(square).ok

    def test_tensor_rejects_invalid_input(self):
        bad = Adc([("a", 0), ("b", 0), ("f", 1)], {"f": {"b": 1, "a": -1}}, {"a": 1, "b": 2})
        with pytest.raises(InvalidComplexError):
            tensor(bad, path_adc(1))

    def test_tensor_with_point_is_unit(self):
        assert find_isomorphism(tensor(point_adc(), path_adc(2)), path_adc(2)) is not None

    def test_associator_is_isomorphism(self):
        assoc = associator(path_adc(1), path_adc(1), path_adc(1))
        assert assoc.is_isomorphism()

    def test_globe(self):
        assert globe_adc(2).size_by_degree() == (2, 2, 1)
        assert check_basis_conditions(globe_adc(3)).all()

    def test_suspension_requires_unit_augmentation(self):
        block = Adc([("a", 0)], augmentation={"a": 2})
        with pytest.raises(InvalidComplexError):
            suspension_sum([block])

    def test_suspension_sum_of_points_is_path(self):
        assert find_isomorphism(suspension_sum([point_adc()] * 3), path_adc(3)) is not None

    def test_wedge_of_intervals(self):
        wedge = wedge_adc(path_adc(1), path_adc(1))
        assert wedge.size_by_degree() == (3, 2)
        assert wedge.endpoints == ("l.{0}", "r.{1}")
        assert find_isomorphism(wedge, path_adc(2)) is not None

    def test_wedge_needs_endpoints(self):
        with pytest.raises(InvalidComplexError):
            wedge_adc(path_adc(1).with_endpoints(None), path_adc(1))

    def test_dualize_reverses_edges(self):
        op = dualize(path_adc(1), duality_degrees("op", 1))
        assert op.boundary("e0") == Chain(0, {"{0}": 1, "{1}": -1})
        assert op.endpoints == ("{1}", "{0}")

    @pytest.mark.parametrize("kind,expected", [
        ("op", (1, 3)),
        ("co", (2,)),
        ("full", (1, 2, 3)),
    ])
    def test_duality_degrees(self, kind, expected):
        assert duality_degrees(kind, 3) == expected


class TestBasisConditions:
    def test_square_satisfies_all(self):
        conditions = check_basis_conditions(_make_square())
        assert conditions.all()
        assert conditions.steiner_loop_free

    def test_oriental(self):
        assert check_basis_conditions(oriental2_adc()).all()

    def test_cycle_is_not_loop_free(self):
        conditions = check_basis_conditions(_make_two_cycle())
        assert conditions.unital and conditions.atomic
        assert not conditions.loop_free
        assert any("cycle" in failure for failure in conditions.failures)

    def test_atom_of_square_face(self):
        table = atom(_make_square(), "e0⊗e0")
        assert table[0] == (Chain(0, {"{0}⊗{0}": 1}), Chain(0, {"{1}⊗{1}": 1}))
        assert table[1] == (Chain(1, {"{0}⊗e0": 1, "e0⊗{1}": 1}), Chain(1, {"{1}⊗e0": 1, "e0⊗{0}": 1}))

    def test_atoms_are_cells(self):
        square = _make_square()
        for b in square.ids():
            assert table_problems(square, atom(square, b)) == []

    def test_table_with_wrong_boundary(self):
        ends = (Chain(0, {"{0}⊗{0}": 1}), Chain(0, {"{1}⊗{1}": 1}))
        edge = Chain(1, {"{0}⊗e0": 1})
        problems = table_problems(_make_square(), [ends, (edge, edge)])
        assert any(p.startswith("∂") for p in problems)


class TestNuCells:
    def test_interval(self):
        assert nondegenerate_counts(nu_cells(path_adc(1), 1)) == (2, 1)

    def test_square(self):
        assert nondegenerate_counts(nu_cells(_make_square(), 2)) == (4, 6, 1)

    def test_degenerate_cells_included(self):
        cells = nu_cells(path_adc(1), 1)
        assert sum(1 for c in cells if c.is_degenerate) == 2

    def test_requires_loop_free(self):
        with pytest.raises(InvalidComplexError):
            nu_cells(_make_two_cycle(), 1)

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            nu_cells(_make_square(), 2, budget=5)

    def test_compose_edges(self):
        cells = {str(c): c for c in nu_cells(path_adc(2), 1)}
        first, second = cells["⟨{0} → {1}; e0⟩"], cells["⟨{1} → {2}; e1⟩"]
        composite = nu_compose(first, second, 0)
        assert composite.top == Chain(1, {"e0": 1, "e1": 1})
        assert composite.source() == first.source()
        assert composite.target() == second.target()

    def test_compose_mismatch(self):
        cells = {str(c): c for c in nu_cells(path_adc(2), 1)}
        with pytest.raises(NotComposableError):
            nu_compose(cells["⟨{1} → {2}; e1⟩"], cells["⟨{0} → {1}; e0⟩"], 0)

    def test_identity_is_unit(self):
        cells = {str(c): c for c in nu_cells(path_adc(1), 1)}
        edge = cells["⟨{0} → {1}; e0⟩"]
        assert nu_compose(edge.source().identity(), edge, 0) == edge


class TestChainMaps:
    def test_identity(self):
        square = _make_square()
        assert ChainMap.identity(square).is_valid()
        assert ChainMap.identity(square).is_identity()

    def test_violations(self):
        path = path_adc(1)
        swap = ChainMap(path, path, {"{0}": "{1}", "{1}": "{0}", "e0": "e0"})
        assert "commutes-with-boundary" in swap.violations().rules()

    def test_inverse(self):
        iso = find_isomorphism(wedge_adc(path_adc(1), path_adc(1)), path_adc(2))
        assert iso.then(iso.inverse()).is_identity()


class TestPushouts:
    def _make_span(self):
        point, interval = point_adc(), path_adc(1)
        f = ChainMap(point, interval, {"•": "{1}"})
        g = ChainMap(point, interval, {"•": "{0}"})
        return f, g

    def test_gluing_intervals(self):
        f, g = self._make_span()
        result = pushout_adc(f, g)
        assert result.apex.size_by_degree() == (3, 2)
        assert validate(result.apex).ok
        assert find_isomorphism(result.apex, path_adc(2)) is not None
        assert result.left.is_valid() and result.right.is_valid()

    def test_mediator(self):
        f, g = self._make_span()
        result = pushout_adc(f, g)
        path, target = path_adc(1), path_adc(2)
        to_left = ChainMap(path, target, {"{0}": "{0}", "{1}": "{1}", "e0": "e0"})
        to_right = ChainMap(path, target, {"{0}": "{1}", "{1}": "{2}", "e0": "e1"})
        mediator = result.mediate(to_left, to_right)
        assert mediator.is_isomorphism()
        assert result.left.then(mediator) == to_left

    def test_needs_an_inclusion(self):
        path, point = path_adc(1), point_adc()
        collapse = ChainMap(path, point, {"{0}": "•", "{1}": "•"})
        with pytest.raises(PushoutError):
            pushout_adc(collapse, collapse)


def test_isomorphism_rejects_different_shapes():
    assert find_isomorphism(_make_square(), globe_adc(2)) is None
    assert find_isomorphism(path_adc(2), wedge_adc(path_adc(1), path_adc(1))) is not None
