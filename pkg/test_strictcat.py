"""
Tests for finite strict n-categories, their functors and the surjectivity calculus.
"""

import pytest

from adc import ChainMap, oriental2_adc, path_adc, tensor
from errors import BudgetExceededError, InvalidCategoryError, NotComposableError
from strictcat import (
    CatFunctor, FiniteStrictNCat, category_from_dict, category_to_dict, discrete_category,
    enumerate_functors, essentially_surjective, factorize, fiber_product, from_nu, hom_cat,
    identity_functor, is_invertible, is_n_fully_faithful, is_n_surjective, is_strict_equivalence,
    itruncate, lifting_oracle, nu_functor, poset_category, promote, terminal_category, truncate,
    validate_category, walking_iso,
)
from theta import globe, to_adc


def _make_grid():
    return from_nu(tensor(path_adc(1), path_adc(1)), 2)


def _make_walking_2cell():
    return from_nu(to_adc(globe(2)), 2)


def _make_collapse():
    """The two parallel arrows of the walking 2-cell sent to the single arrow of [1]."""
    parallel = truncate(_make_walking_2cell(), 1)
    target = poset_category(1)
    mapping = {"⟨{0}⟩": "0", "⟨{1}⟩": "1"}
    for x in parallel.cells(1):
        mapping[x] = f"{mapping[parallel.src(x)]}→{mapping[parallel.tgt(x)]}"
    return CatFunctor(parallel, target, mapping)


def _make_whisker_square():
    """Two 2-cells α: f ⇒ f2 and β: g ⇒ g2 whose two whiskered composites differ.

    α ∘0 β is h1 = αg ;1 f2β, while fβ ;1 αg2 is a separate cell h2.
    """
    objects = ["x", "y", "z"]
    arrows = {"idx": ("x", "x"), "idy": ("y", "y"), "idz": ("z", "z"),
              "f": ("x", "y"), "f2": ("x", "y"), "g": ("y", "z"), "g2": ("y", "z"),
              "fg": ("x", "z"), "fg2": ("x", "z"), "f2g": ("x", "z"), "f2g2": ("x", "z")}
    faces = {f"I{c}": (c, c) for c in arrows}
    faces.update({"α": ("f", "f2"), "β": ("g", "g2"), "αg": ("fg", "f2g"), "αg2": ("fg2", "f2g2"),
                  "fβ": ("fg", "fg2"), "f2β": ("f2g", "f2g2"), "h1": ("fg", "f2g2"), "h2": ("fg", "f2g2")})
    boundary = dict(arrows)
    boundary.update(faces)
    identity = {o: f"id{o}" for o in objects}
    identity.update({c: f"I{c}" for c in arrows})

    composition = {}
    for c, (s, t) in arrows.items():
        composition[(0, f"id{s}", c)] = c
        composition[(0, c, f"id{t}")] = c
    for a in ("f", "f2"):
        for b in ("g", "g2"):
            composition[(0, a, b)] = a + b
    for theta, (p, q) in faces.items():
        s, t = arrows[p]
        composition[(1, f"I{p}", theta)] = theta
        composition[(1, theta, f"I{q}")] = theta
        composition[(0, f"Iid{s}", theta)] = theta
        composition[(0, theta, f"Iid{t}")] = theta
    left = {"If": "f", "If2": "f2", "α": None}
    right = {"Ig": "g", "Ig2": "g2", "β": None}
    named = {("α", "Ig"): "αg", ("α", "Ig2"): "αg2", ("If", "β"): "fβ", ("If2", "β"): "f2β", ("α", "β"): "h1"}
    for a, fa in left.items():
        for b, gb in right.items():
            composition[(0, a, b)] = named.get((a, b)) or f"I{fa}{gb}"
    composition[(1, "αg", "f2β")] = "h1"
    composition[(1, "fβ", "αg2")] = "h2"
    return FiniteStrictNCat(2, {0: objects, 1: list(arrows), 2: list(faces)}, boundary, identity,
                            composition, name="whisker square")


class TestCategories:
    @pytest.mark.parametrize("make", [
        lambda: poset_category(2),
        lambda: promote(poset_category(1), 3),
        walking_iso,
        _make_grid,
        _make_walking_2cell,
        lambda: from_nu(oriental2_adc(), 2),
        lambda: terminal_category(2),
    ])
    def test_valid(self, make):
        report = validate_category(make())
        assert report.ok, str(report)

    def test_grid_counts(self):
        assert _make_grid().nondegenerate_counts() == (4, 6, 1)

    def test_walking_2cell_counts(self):
        assert _make_walking_2cell().nondegenerate_counts() == (2, 2, 1)

    def test_broken_interchange(self):
        report = validate_category(_make_whisker_square())
        assert report.rules() == ["interchange"]
        assert report.violations[0].subject == str(("If", "α", "β", "Ig2"))

    def test_missing_composite(self):
        poset = poset_category(1)
        table = poset.composition_table()
        del table[(0, "0→0", "0→1")]
        broken = FiniteStrictNCat(1, {0: poset.objects, 1: poset.cells(1)}, poset.boundary_table(),
                                  poset.identity_table(), table)
        assert "totality" in validate_category(broken).rules()

    def test_rejects_high_dimension(self):
        with pytest.raises(InvalidCategoryError):
            FiniteStrictNCat(4, {0: ["a"]}, {}, {}, {})

    def test_rejects_dangling_boundary(self):
        with pytest.raises(InvalidCategoryError):
            FiniteStrictNCat(1, {0: ["a"], 1: ["u"]}, {"u": ("a", "b")}, {}, {})

    def test_compose_whiskers_lower_cells(self):
        c = _make_whisker_square()
        assert c.compose("α", "g", 0) == "αg"
        assert c.compose("f", "β", 0) == "fβ"

    def test_compose_rejects_mismatch(self):
        with pytest.raises(NotComposableError):
            poset_category(2).compose("1→2", "0→1", 0)

    def test_iterated_boundaries(self):
        c = _make_whisker_square()
        assert c.source("h2", 0) == "x"
        assert c.target("h2", 1) == "f2g2"
        assert c.iterated_identity("y", 2) == "Iidy"

    def test_json(self):
        poset = poset_category(2)
        assert category_from_dict(category_to_dict(poset)) == poset

    def test_malformed_json(self):
        with pytest.raises(InvalidCategoryError):
            category_from_dict({"cells": [["a"]]})


class TestConstructions:
    def test_grid_hom(self):
        hom = hom_cat(_make_grid(), "⟨{0}⊗{0}⟩", "⟨{1}⊗{1}⟩")
        assert hom.max_dim == 1
        assert hom.nondegenerate_counts() == (2, 1)
        assert validate_category(hom).ok

    def test_hom_of_walking_2cell_is_an_arrow(self):
        hom = hom_cat(_make_walking_2cell(), "⟨{0}⟩", "⟨{1}⟩")
        assert hom.nondegenerate_counts() == (2, 1)

    def test_hom_of_discrete(self):
        c = discrete_category(["a", "b"])
        assert hom_cat(c, "a", "a").objects == (("id", "a"),)
        assert hom_cat(c, "a", "b").objects == ()

    def test_truncate(self):
        assert truncate(_make_walking_2cell(), 1).nondegenerate_counts() == (2, 2)

    def test_itruncate_identifies_parallel_arrows(self):
        c = itruncate(_make_walking_2cell(), 1)
        assert c.nondegenerate_counts() == (2, 1)
        assert validate_category(c).ok

    def test_itruncate_walking_iso(self):
        assert itruncate(walking_iso(), 0).objects == ("0",)

    def test_promote(self):
        c = promote(poset_category(1), 2)
        assert c.nondegenerate_counts() == (2, 1, 0)
        assert c.identity("0→1") == ("id", "0→1")

    def test_fiber_product_over_terminal(self):
        arrow = poset_category(1)
        to_point = enumerate_functors(arrow, terminal_category(1))[0]
        product, left, right = fiber_product(to_point, to_point)
        assert product.nondegenerate_counts() == (4, 5)
        assert validate_category(product).ok
        assert left.is_valid() and right.is_valid()

    def test_fiber_product_needs_common_target(self):
        f = identity_functor(poset_category(1))
        g = identity_functor(poset_category(2))
        with pytest.raises(InvalidCategoryError):
            fiber_product(f, g)

    def test_nu_functor_of_identity(self):
        functor = nu_functor(ChainMap.identity(path_adc(2)), 1)
        assert functor.is_isomorphism()


class TestFunctors:
    def test_arrow_to_arrow(self):
        assert len(enumerate_functors(poset_category(1), poset_category(1))) == 3

    def test_grid_to_arrow(self):
        functors = enumerate_functors(_make_grid(), poset_category(1))
        assert len(functors) == 6
        assert all(f.is_valid() for f in functors)

    def test_walking_2cell_endofunctors(self):
        assert len(enumerate_functors(_make_walking_2cell(), _make_walking_2cell())) == 5

    @pytest.mark.parametrize("make", [_make_grid, _make_walking_2cell, walking_iso])
    def test_into_terminal(self, make):
        assert len(enumerate_functors(make(), terminal_category())) == 1

    def test_deterministic(self):
        first = enumerate_functors(_make_grid(), poset_category(1))
        second = enumerate_functors(_make_grid(), poset_category(1))
        assert [f.mapping for f in first] == [f.mapping for f in second]

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            enumerate_functors(_make_walking_2cell(), _make_walking_2cell(), budget=2)

    def test_invalid_functor(self):
        arrow = poset_category(1)
        swap = CatFunctor(arrow, arrow, {"0": "1", "1": "0", "0→0": "1→1", "1→1": "0→0", "0→1": "0→1"})
        assert not swap.is_valid()
        assert "boundary" in swap.violations().rules()

    def test_then(self):
        f = _make_collapse()
        assert f.then(identity_functor(f.target)) == f


class TestEquivalences:
    def test_invertible(self):
        iso = walking_iso()
        assert is_invertible(iso, "u")
        assert not is_invertible(poset_category(1), "0→1")

    def test_point_into_walking_iso(self):
        f = CatFunctor(terminal_category(1), walking_iso(), {"*": "0", ("id", "*"): "id0"})
        assert f.is_valid()
        assert essentially_surjective(f)
        assert is_strict_equivalence(f)
        assert not lifting_oracle(f, 0)

    def test_identity_is_equivalence(self):
        assert is_strict_equivalence(identity_functor(_make_grid()))

    def test_collapse(self):
        f = _make_collapse()
        assert is_n_surjective(f, 0)
        assert is_n_surjective(f, 1)
        assert not is_n_surjective(f, 2)
        assert not is_n_fully_faithful(f, 1)
        assert not is_n_fully_faithful(f, 2)
        assert is_n_fully_faithful(f, 3)
        assert not is_strict_equivalence(f)

    @pytest.mark.parametrize("n", [-1, 0, 1, 2])
    def test_lifting_oracle_agrees(self, n):
        f = _make_collapse()
        assert lifting_oracle(f, n) == is_n_surjective(f, n)

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_lifting_oracle_agrees_on_small_categories(self, n):
        small = [terminal_category(1), poset_category(1), poset_category(2), _make_walking_2cell(),
                 from_nu(oriental2_adc(), 2)]
        for c in small:
            for d in small:
                for f in enumerate_functors(c, d):
                    assert lifting_oracle(f, n) == is_n_surjective(f, n), f.mapping

    def test_discrete_inclusion(self):
        f = CatFunctor(discrete_category(["0", "1"]), poset_category(1), {"0": "0", "1": "1"})
        assert f.is_valid()
        assert is_n_surjective(f, 0)
        assert not is_n_surjective(f, 1)
        assert not is_n_fully_faithful(f, 1)

    def test_negative_full_faithfulness(self):
        with pytest.raises(ValueError):
            is_n_fully_faithful(_make_collapse(), -1)


class TestFactorization:
    @pytest.mark.parametrize("n", [0, 1])
    def test_collapse(self, n):
        f = _make_collapse()
        e, g = factorize(f, n)
        assert e.is_valid() and g.is_valid()
        assert validate_category(e.target).ok
        assert is_n_surjective(e, n)
        assert is_n_fully_faithful(g, n + 1)
        composite = e.then(g)
        assert all(composite(x) == f(x) for x in f.source.all_cells())

    def test_middle_of_collapse(self):
        e, _ = factorize(_make_collapse(), 0)
        assert e.target.nondegenerate_counts() == (2, 1)

    def test_minus_one(self):
        f = _make_collapse()
        e, g = factorize(f, -1)
        assert e == f
        assert g.is_isomorphism()

    def test_idempotent(self):
        e, _ = factorize(_make_collapse(), 0)
        _, g2 = factorize(e, 0)
        assert g2.is_isomorphism()

    @pytest.mark.parametrize("n", [0, 1])
    def test_grid_functors(self, n):
        for f in enumerate_functors(_make_grid(), poset_category(1)):
            e, g = factorize(f, n)
            assert is_n_surjective(e, n)
            assert is_n_fully_faithful(g, n + 1)
            assert all(e.then(g)(x) == f(x) for x in f.source.all_cells())

    @pytest.mark.parametrize("n", [0, 1])
    def test_functors_into_a_2_category(self, n):
        for f in enumerate_functors(poset_category(2), _make_walking_2cell()):
            e, g = factorize(f, n)
            assert validate_category(e.target).ok
            assert is_n_surjective(e, n)
            assert is_n_fully_faithful(g, n + 1)
            assert all(e.then(g)(x) == f(x) for x in f.source.all_cells())

    def test_rejects_large_n(self):
        with pytest.raises(InvalidCategoryError):
            factorize(_make_collapse(), 3)
