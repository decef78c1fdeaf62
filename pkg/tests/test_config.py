#!/usr/bin/env python3
"""
Tests for the configuration manager
"""

import json

import pytest

from core.config import ConfigManager, get_config
from core.errors import FormatError


def test_defaults(tmp_path):
    config = ConfigManager(str(tmp_path))
    assert config.enumeration_budget() == 1_000_000
    assert config.subdivision_budget() == 3
    assert config.ml_cap() == 64
    assert config.face_budget() == 200_000
    assert config.seed() == 20240601
    assert config.get("reports.format_version") == "report v1"
    assert config.get("no.such.key", "fallback") == "fallback"


def test_environment_overrides(tmp_path, monkeypatch):
    config = ConfigManager(str(tmp_path))
    monkeypatch.setenv("CECHTOOL_BUDGET", "500")
    monkeypatch.setenv("CECHTOOL_SEED", "7")
    assert config.enumeration_budget() == 500
    assert config.seed() == 7
    monkeypatch.setenv("CECHTOOL_ML_CAP", "lots")
    assert config.ml_cap() == 64
    monkeypatch.setenv("CECHTOOL_SUBDIVISION_BUDGET", "-1")
    assert config.subdivision_budget() == 3
    monkeypatch.setenv("CECHTOOL_FACE_BUDGET", "1000")
    assert config.face_budget() == 1000


def test_environment_beats_set_values(tmp_path, monkeypatch):
    config = ConfigManager(str(tmp_path))
    config.set("budgets.ml_cap", 5, save=False)
    assert config.ml_cap() == 5
    monkeypatch.setenv("CECHTOOL_ML_CAP", "9")
    assert config.ml_cap() == 9


def test_save_and_reload(tmp_path):
    config = ConfigManager(str(tmp_path))
    assert config.set("random.seed", 99)
    reloaded = ConfigManager(str(tmp_path))
    assert reloaded.seed() == 99
    assert reloaded.ml_cap() == 64
    reloaded.reset()
    assert reloaded.seed() == 20240601


def test_broken_config_file_falls_back_to_defaults(tmp_path):
    (tmp_path / "config.json").write_text("{not json")
    assert ConfigManager(str(tmp_path)).seed() == 20240601


def test_load_file_merges(tmp_path):
    path = tmp_path / "override.json"
    path.write_text(json.dumps({"budgets": {"subdivision": 1}}))
    config = ConfigManager(str(tmp_path))
    config.load_file(str(path))
    assert config.subdivision_budget() == 1
    assert config.enumeration_budget() == 1_000_000


def test_load_file_errors(tmp_path):
    config = ConfigManager(str(tmp_path))
    with pytest.raises(FormatError):
        config.load_file(str(tmp_path / "missing.json"))
    bad = tmp_path / "list.json"
    bad.write_text("[1, 2]")
    with pytest.raises(FormatError):
        config.load_file(str(bad))


def test_global_instance_is_reset_between_tests():
    assert get_config().subdivision_budget() == 3
    get_config().set("budgets.subdivision", 0, save=False)
    assert get_config().subdivision_budget() == 0
