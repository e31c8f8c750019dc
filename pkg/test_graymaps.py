"""
Tests for the explicit comparison maps and the colimit decompositions built from them.
"""

import pytest

from adc import Adc, Chain, dualize, duality_degrees, find_isomorphism, path_adc, point_adc, tensor
from errors import ClauseError, DimensionBoundError
from graymaps import (
    decomposition_cone, duality_tensor_check, nabla, p_map, p_s_nm, reindex, s_map, section_report,
    verify_cosuspension, verify_susp_colimit, verify_susp_tensor_decomposition,
)
from theta import POINT, globe, node, path, to_adc


def _make_interval() -> Adc:
    return path_adc(1)


@pytest.mark.parametrize("n,m,k,l,expected", [
    (2, 2, 1, 3, 1),
    (2, 2, 1, 1, 0),
    (2, 2, 1, 2, 0),
    (2, 2, 0, 4, 2),
    (3, 1, 0, 2, 2),
])
def test_reindex(n, m, k, l, expected):
    assert reindex(n, m, k, l) == expected


class TestSections:
    def test_edge_clause(self):
        p = p_map(_make_interval(), 1)
        assert p.image("[e0,1]⊗e0") == Chain(3, {"[e0⊗e0,1]": 1})
        assert p.image("{0}⊗e0").is_zero

    def test_vertex_correction(self):
        s = s_map(point_adc(), 2)
        assert s.image("[•⊗{1},1]") == Chain(1, {"{0}⊗e0": 1, "[•,1]⊗{1}": 1, "{1}⊗e1": 1})

    @pytest.mark.parametrize("block", [POINT, path(1), globe(2)])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_section_identity(self, block, n):
        report = section_report(p_map(to_adc(block), n), s_map(to_adc(block), n))
        assert report.ok, str(report)

    @pytest.mark.parametrize("n,m", [(1, 2), (2, 2), (1, 3)])
    def test_blocks(self, n, m):
        for block in (point_adc(), _make_interval()):
            p, s = p_s_nm(block, n, m)
            assert section_report(p, s).ok

    def test_single_block_matches(self):
        p, s = p_s_nm(_make_interval(), 2, 1)
        assert p == p_map(_make_interval(), 2)
        assert s == s_map(_make_interval(), 2)

    def test_zero_length_path(self):
        p, s = p_s_nm(_make_interval(), 0, 1)
        assert section_report(p, s).ok

    def test_rejects_non_unital_points(self):
        bad = Adc([("a", 0)], augmentation={"a": 2})
        with pytest.raises(ClauseError):
            p_s_nm(bad, 1, 1)


class TestNabla:
    @pytest.mark.parametrize("side", ["left", "right"])
    @pytest.mark.parametrize("through", [None, "{1}"])
    def test_valid(self, side, through):
        for k, l in ((point_adc(), point_adc()), (_make_interval(), point_adc()), (_make_interval(), _make_interval())):
            assert nabla(k, l, side, through).is_valid()

    def test_points(self):
        fold = nabla(point_adc(), point_adc())
        assert fold.image("[•⊗•,1]") == Chain(1, {"[•,1]^0": 1, "[•,1]^1": 1})
        assert fold.image("{1}") == Chain(0, {"{2}": 1})

    def test_edges_vanish(self):
        assert nabla(_make_interval(), _make_interval()).image("[e0⊗e0,1]").is_zero

    def test_degreewise(self):
        fold = nabla(_make_interval(), point_adc())
        assert fold.image("[e0⊗•,1]") == Chain(2, {"[e0,1]^0": 1})

    def test_right_side_swaps_blocks(self):
        fold = nabla(_make_interval(), point_adc(), "right")
        assert fold.image("[{0}⊗•,1]") == Chain(1, {"[{0},1]^1": 1, "[•,1]^0": 1})


class TestCone:
    def test_points(self):
        cone = decomposition_cone(point_adc(), point_adc())
        assert cone.image("[(•⊗{0})⊗•,1]") == Chain(1, {"[•,1]⊗{1}": 1, "{0}⊗[•,1]": 1})
        assert cone.image("[(•⊗e0)⊗•,1]") == Chain(2, {"[•,1]⊗[•,1]": 1})

    def test_high_degree_vanishes(self):
        cone = decomposition_cone(_make_interval(), _make_interval())
        assert cone.image("[(e0⊗{0})⊗e0,1]").is_zero

    @pytest.mark.parametrize("k,l", [
        (point_adc(), point_adc()),
        (path_adc(1), point_adc()),
        (path_adc(1), path_adc(1)),
    ])
    def test_valid(self, k, l):
        assert decomposition_cone(k, l).is_valid()


class TestTensorDecomposition:
    @pytest.mark.parametrize("c,d", [
        (POINT, POINT),
        (POINT, globe(1)),
        (globe(1), POINT),
        (globe(1), globe(1)),
        (path(2), POINT),
        (node([globe(1), POINT]), POINT),
    ])
    def test_witness(self, c, d):
        witness = verify_susp_tensor_decomposition(c, d)
        assert witness.ok, str(witness.report)
        assert witness.comparison.then(witness.inverse).is_identity()
        assert witness.inverse.then(witness.comparison).is_identity()

    def test_points_give_square(self):
        witness = verify_susp_tensor_decomposition(POINT, POINT)
        assert witness.colimit.size_by_degree() == (4, 4, 1)
        assert find_isomorphism(witness.colimit, tensor(path_adc(1), path_adc(1))) is not None

    def test_bound(self):
        with pytest.raises(DimensionBoundError):
            verify_susp_tensor_decomposition(globe(2), globe(1))

    def test_bound_override(self, monkeypatch):
        monkeypatch.setenv("GRAYCAT_BOUND", "2")
        with pytest.raises(DimensionBoundError):
            verify_susp_tensor_decomposition(globe(1), POINT)


class TestSuspensionColimits:
    @pytest.mark.parametrize("block,n", [(POINT, 1), (path(1), 1), (globe(1), 2), (globe(2), 1)])
    def test_suspension(self, block, n):
        witness = verify_susp_colimit(to_adc(block), n)
        assert witness.ok, str(witness.report)

    def test_two_globes(self):
        witness = verify_susp_colimit(to_adc(globe(1)), 2)
        assert find_isomorphism(witness.colimit, to_adc(node([globe(1), globe(1)]))) is not None

    @pytest.mark.parametrize("block,n", [(POINT, 2), (path(1), 1), (globe(2), 2)])
    def test_cosuspension(self, block, n):
        assert verify_cosuspension(to_adc(block), n).ok

    def test_full_duality_is_involution(self):
        for block in (path(2), globe(2), node([globe(1), POINT])):
            c = to_adc(block)
            degrees = duality_degrees("full", c.top_degree)
            assert dualize(dualize(c, degrees), degrees) == c


class TestDualities:
    @pytest.mark.parametrize("c,d", [
        (globe(1), globe(1)),
        (globe(2), path(1)),
        (node([globe(1), POINT]), path(2)),
    ])
    def test_identities(self, c, d):
        report = duality_tensor_check(c, d)
        assert report.ok, str(report)
        assert report.facts == {"op": True, "co": True, "full": True}
