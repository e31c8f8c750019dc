"""
Tests for lax square double categories, Čech levels and the square functor.
"""

import pytest

from adc import ChainMap, globe_adc, path_adc, point_adc
from corpus import CATEGORIES, STRICT_IMAGE_CATEGORIES, TINY_CATEGORIES, isocell
from doublecat import every_horizontal_is_companion, is_accompanied, is_complete, validate_double
from errors import DimensionBoundError, InvalidCategoryError, PairConditionError
from squarecech import (
    Filtration2, cech_level, cube_level, double_functor_enumerate, lax_square_double, check_tensor_surjection,
    segal_check, sq2, sq2_functor, sq_pair, truncation_pair, verify_sq_fully_faithful, verify_sq_image,
    verify_square_orientation,
)
from strictcat import (
    CatFunctor, discrete_category, enumerate_functors, from_nu, identity_functor, poset_category,
    terminal_category, validate_category,
)


def _make_walking_2cell():
    return from_nu(globe_adc(2), 2)


def _make_discrete_pair() -> Filtration2:
    """The two objects of [1] with only their identities as vertical cells."""
    a0 = discrete_category(["0", "1"], 1)
    a1 = poset_category(1)
    mapping = {"0": "0", "1": "1", ("id", "0"): "0→0", ("id", "1"): "1→1"}
    return Filtration2(a0, a1, CatFunctor(a0, a1, mapping, name="objects"), name="objects of [1]")


def _make_folded() -> Filtration2:
    """Two objects sent to the single object of the terminal category."""
    a0 = discrete_category(["a", "b"], 1)
    a1 = terminal_category(1)
    mapping = {"a": "*", "b": "*", ("id", "a"): a1.identity("*"), ("id", "b"): a1.identity("*")}
    return Filtration2(a0, a1, CatFunctor(a0, a1, mapping), name="folded")


class TestFiltrations:
    def test_truncation_is_pair(self):
        assert truncation_pair(_make_walking_2cell()).is_pair

    def test_folded_is_not_pair(self):
        assert not _make_folded().is_pair

    def test_rejects_high_dimension(self):
        c = _make_walking_2cell()
        with pytest.raises(InvalidCategoryError):
            Filtration2(c, c, identity_functor(c))

    def test_rejects_non_functor(self):
        a0 = discrete_category(["0", "1"], 1)
        a1 = poset_category(1)
        mapping = {"0": "0", "1": "1", ("id", "0"): "0→1", ("id", "1"): "1→1"}
        with pytest.raises(InvalidCategoryError):
            Filtration2(a0, a1, CatFunctor(a0, a1, mapping))


class TestSq2:
    def test_interval_sizes(self):
        d = sq2(poset_category(1))
        assert (len(d.vcells), len(d.hcells), len(d.squares)) == (3, 3, 6)

    @pytest.mark.parametrize("name", sorted(CATEGORIES))
    def test_valid(self, name):
        report = validate_double(sq2(CATEGORIES[name]()))
        assert report.ok, str(report)

    def test_square_labels_carry_boundary(self):
        d = sq2(_make_walking_2cell())
        for alpha, b in d.squares.items():
            assert alpha[1:5] == (b.top, b.bottom, b.left, b.right)

    @pytest.mark.parametrize("make", [lambda: poset_category(1), _make_walking_2cell])
    def test_orientation(self, make):
        report = verify_square_orientation(make())
        assert report.ok, str(report)
        assert report.facts["squares"] == len(sq2(make()).squares)

    @pytest.mark.parametrize("name", STRICT_IMAGE_CATEGORIES)
    def test_image(self, name):
        report = verify_sq_image(CATEGORIES[name]())
        assert report.ok, str(report)

    def test_image_with_shared_companions(self):
        report = verify_sq_image(isocell())
        assert report.rules() == ["complete:injective"] * len(report.violations)
        assert report.violations


class TestPairs:
    def test_truncation_pair_gives_sq2(self):
        c = poset_category(2)
        assert sq_pair(truncation_pair(c)) == sq2(c)

    def test_discrete_pair(self):
        d = sq_pair(_make_discrete_pair())
        assert validate_double(d).ok
        assert (len(d.vcells), len(d.hcells)) == (2, 3)
        assert is_accompanied(d)
        assert is_complete(d)
        assert not every_horizontal_is_companion(d)

    def test_rejects_non_pair(self):
        with pytest.raises(PairConditionError):
            sq_pair(_make_folded())

    def test_non_pair_labels(self):
        d = lax_square_double(_make_folded(), require_pair=False)
        assert validate_double(d).ok
        assert len(d.hcells) == 4
        assert all(isinstance(h, tuple) and len(h) == 3 for h in d.hcells)


class TestCech:
    def test_level_zero_is_vertical(self):
        filt = truncation_pair(poset_category(2))
        level = cech_level(filt, 0)
        assert validate_category(level).ok
        assert (len(level.objects), len(level.cells(1))) == (3, 6)

    def test_level_one(self):
        level = cech_level(truncation_pair(poset_category(1)), 1)
        assert validate_category(level).ok
        assert (len(level.objects), len(level.cells(1))) == (3, 6)

    def test_negative_level(self):
        with pytest.raises(ValueError):
            cech_level(truncation_pair(poset_category(1)), -1)

    @pytest.mark.parametrize("m", [2, 3])
    def test_segal(self, m):
        report = segal_check(truncation_pair(poset_category(1)), m)
        assert report.ok, str(report)
        assert report.facts["level"] == report.facts["pullback"]

    def test_segal_walking_2cell(self):
        assert segal_check(truncation_pair(_make_walking_2cell()), 2).ok

    def test_segal_low_levels_trivial(self):
        assert segal_check(truncation_pair(poset_category(1)), 1).facts["trivial"]

    def test_segal_non_pair(self):
        assert segal_check(_make_folded(), 2).ok


class TestCubes:
    def test_square(self):
        assert cube_level(poset_category(1), 1, 1) == 6

    def test_objects_and_arrows(self):
        c = poset_category(2)
        assert cube_level(c, 0, 0) == 3
        assert cube_level(c, 1, 0) == 6

    @pytest.mark.parametrize("k1,k2", [(0, 0), (1, 1), (2, 1)])
    def test_terminal(self, k1, k2):
        assert cube_level(terminal_category(), k1, k2) == 1

    def test_agrees_with_squares(self):
        c = _make_walking_2cell()
        assert cube_level(c, 1, 1) == len(sq2(c).squares)

    def test_bound(self):
        with pytest.raises(DimensionBoundError):
            cube_level(poset_category(1), 3, 0)


class TestDoubleFunctors:
    def test_interval_endofunctors(self):
        d = sq2(poset_category(1))
        functors = double_functor_enumerate(d, d)
        assert len(functors) == 3
        assert all(f.is_valid() for f in functors)

    def test_identity_is_induced(self):
        c = _make_walking_2cell()
        image = sq2_functor(identity_functor(c))
        assert image.is_valid()
        assert all(alpha == beta for alpha, beta in image.squares.items())

    @pytest.mark.parametrize("source", TINY_CATEGORIES)
    @pytest.mark.parametrize("target", TINY_CATEGORIES)
    def test_fully_faithful(self, source, target):
        c, d = CATEGORIES[source](), CATEGORIES[target]()
        report = verify_sq_fully_faithful(c, d)
        assert report.ok, str(report)
        assert report.facts["functors"] == report.facts["double_functors"]

    def test_fully_faithful_counts(self):
        report = verify_sq_fully_faithful(poset_category(1), poset_category(1))
        assert report.facts == {"functors": 3, "double_functors": 3}

    def test_induced_functors_match(self):
        c = poset_category(1)
        induced = {sq2_functor(f) for f in enumerate_functors(c, c)}
        assert induced == set(double_functor_enumerate(sq2(c), sq2(c)))


class TestTensorSurjection:
    def test_collapse(self):
        collapse = ChainMap(path_adc(1), point_adc(), {"{0}": "•", "{1}": "•"}, name="collapse")
        report = check_tensor_surjection(collapse, path_adc(1), 0)
        assert report.ok, str(report)
        assert report.facts["map"] and report.facts["tensored"]

    def test_identity(self):
        report = check_tensor_surjection(ChainMap.identity(path_adc(1)), path_adc(1), 1)
        assert report.ok
        assert report.facts == {"map": True, "tensored": True}

    def test_dimension_bound(self):
        with pytest.raises(DimensionBoundError):
            check_tensor_surjection(ChainMap.identity(globe_adc(2)), globe_adc(2), 1)
