"""Tests for stylesheets"""

import json

import pytest
from pydantic import ValidationError

from src.city.features import FeatureClass
from src.core.exceptions import InvalidStyleSheetError
from src.render.styles import (
    ClassStyle,
    StyleSheet,
    builtin_simple_sheet,
    builtin_target_sheet,
    load_sheet,
    rgba,
)


class TestBuiltinSheets:
    def test_simple_has_no_generalization(self):
        sheet = builtin_simple_sheet()
        assert sheet.visible_classes(0) == set(FeatureClass)
        assert not sheet.typify.enabled
        for style in sheet.classes.values():
            assert style.width_at(18) in (0.0, 1.0)
            for color in (style.fill, style.stroke):
                if color is not None:
                    assert color.a == 230

    def test_simple_hues_are_distinct(self):
        sheet = builtin_simple_sheet()
        hues = [
            (s.fill or s.stroke or s.marker.color).rgb for s in sheet.classes.values()
        ]
        assert len(set(hues)) == len(FeatureClass)

    def test_target_selection_threshold(self):
        sheet = builtin_target_sheet()
        assert FeatureClass.BUILDING not in sheet.visible_classes(15)
        assert FeatureClass.BUILDING in sheet.visible_classes(16)
        assert FeatureClass.ROAD_RESIDENTIAL not in sheet.visible_classes(15)
        assert sheet.typify.enabled

    def test_target_selection_monotone(self):
        sheet = builtin_target_sheet()
        for z in range(20):
            assert sheet.visible_classes(z) <= sheet.visible_classes(z + 1)

    def test_target_widths_grow_with_zoom_and_rank(self):
        sheet = builtin_target_sheet()
        primary = sheet.style(FeatureClass.ROAD_PRIMARY)
        secondary = sheet.style(FeatureClass.ROAD_SECONDARY)
        assert primary.width_at(18) > primary.width_at(15)
        for z in (15, 16, 17, 18):
            assert primary.width_at(z) > secondary.width_at(z)

    def test_width_lookup_uses_nearest_lower_zoom(self):
        style = ClassStyle(stroke=rgba(0, 0, 0), stroke_width={15: 3, 18: 8})
        assert style.width_at(17) == 3
        assert style.width_at(20) == 8
        assert style.width_at(10) == 3


class TestValidation:
    def test_incomplete_draw_order_rejected(self):
        sheet = builtin_simple_sheet()
        data = sheet.model_dump()
        data["draw_order"] = data["draw_order"][:-1]
        with pytest.raises(ValidationError):
            StyleSheet.model_validate(data)

    def test_negative_width_rejected(self):
        with pytest.raises(ValidationError):
            ClassStyle(stroke_width={15: -1})

    def test_channel_range(self):
        with pytest.raises(ValidationError):
            rgba(256, 0, 0)


class TestLoadSheet:
    def test_builtin_ids(self):
        assert load_sheet("simple-v1") == builtin_simple_sheet()
        assert load_sheet("target-v1") == builtin_target_sheet()

    def test_json_file(self, tmp_path):
        path = tmp_path / "sheet.json"
        path.write_text(builtin_target_sheet().model_dump_json(), encoding="utf-8")
        assert load_sheet(path) == builtin_target_sheet()

    def test_unknown_id(self):
        with pytest.raises(InvalidStyleSheetError):
            load_sheet("does-not-exist")

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "sheet.json"
        path.write_text(json.dumps({"id": "x"}), encoding="utf-8")
        with pytest.raises(InvalidStyleSheetError):
            load_sheet(path)
