"""
Tests for named corpus objects and JSON persistence.
"""

import json

import pytest

from adc import Adc, globe_adc
from corpus import (
    ADCS, CATEGORIES, SUMS, dumps, filtration_from_dict, isocell, random_functors, resolve_adc, resolve_category,
    resolve_double, resolve_filtration, resolve_sum, save_json, saved_path, to_json,
)
from errors import CorpusError, GraycatError
from reports import Report
from strictcat import category_to_dict, validate_category


class TestResolve:
    @pytest.mark.parametrize("name", sorted(ADCS))
    def test_adcs(self, name):
        assert isinstance(resolve_adc(name), Adc)

    @pytest.mark.parametrize("name", sorted(CATEGORIES))
    def test_categories_are_valid(self, name):
        report = validate_category(resolve_category(name))
        assert report.ok, str(report)

    def test_sums(self):
        assert str(resolve_sum("path3")) == str(SUMS["path3"]())

    def test_unknown(self):
        with pytest.raises(CorpusError, match="known names"):
            resolve_adc("nosuchthing")

    def test_double_prefixes(self):
        assert len(resolve_double("sq2:interval").squares) == 6
        assert resolve_double("vertical:interval").vcells

    def test_double_unknown(self):
        with pytest.raises(CorpusError):
            resolve_double("interval")

    def test_filtration(self):
        assert resolve_filtration("truncation:poset2").is_pair

    def test_filtration_unknown(self):
        with pytest.raises(CorpusError):
            resolve_filtration("poset2")


class TestFiles:
    def test_save_and_resolve(self, tmp_path):
        path = save_json(globe_adc(2), str(tmp_path / "nested" / "globe2.json"))
        assert resolve_adc(path) == globe_adc(2)

    def test_category_file(self, tmp_path):
        path = save_json(isocell(), str(tmp_path / "isocell.json"))
        assert category_to_dict(resolve_category(path)) == category_to_dict(isocell())

    def test_saved_name(self, monkeypatch, tmp_path):
        monkeypatch.setenv("GRAYCAT_CORPUS_DIR", str(tmp_path))
        path = save_json(isocell(), saved_path("iso"))
        assert path == str(tmp_path / "iso.json")
        assert category_to_dict(resolve_category("iso")) == category_to_dict(isocell())
        assert len(resolve_double("sq2:iso").objects) == 2

    def test_filtration_file(self, tmp_path):
        c = CATEGORIES["interval"]()
        document = {"name": "self", "a0": category_to_dict(c), "a1": category_to_dict(c),
                    "map": {str(x): str(x) for x in c.all_cells()}}
        path = tmp_path / "filtration.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        assert resolve_filtration(str(path)).is_pair

    def test_malformed_filtration(self):
        with pytest.raises(CorpusError):
            filtration_from_dict({"name": "no categories"})

    def test_missing_file(self, tmp_path):
        with pytest.raises(CorpusError):
            resolve_adc(str(tmp_path / "absent.json"))


class TestToJson:
    def test_nested(self):
        report = Report("check")
        report.add("x", "rule", "detail")
        data = to_json({1: [report, (True, None)]})
        assert data == {"1": [report.to_dict(), [True, None]]}

    def test_dumps_is_stable(self):
        assert dumps(globe_adc(2)) == dumps(globe_adc(2))

    def test_unsupported(self):
        with pytest.raises(GraycatError):
            to_json(object())


class TestRandomFunctors:
    def test_seeded(self):
        first = [f.mapping for f in random_functors(3, 10, ("terminal", "interval"))]
        second = [f.mapping for f in random_functors(3, 10, ("terminal", "interval"))]
        assert first == second
        assert len(first) == 10

    def test_functors_are_valid(self):
        for f in random_functors(11, 5, ("interval", "poset2")):
            assert f.is_valid()
