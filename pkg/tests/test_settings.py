import json
import os

import pytest

from chebresize.quality.metrics import SsimMode
from chebresize.utils.settings import THREADS_ENV_VAR, SettingsManager


def write_settings(tmp_path, data):
    path = tmp_path / "settings.json"
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


@pytest.fixture
def defaults(tmp_path):
    return SettingsManager(str(tmp_path / "absent.json"))


class TestDefaults:
    def test_user_settings(self, defaults):
        assert defaults.get_user_setting('default_method') == "lci"
        assert defaults.get_user_setting('quantize_output') is True
        assert defaults.get_user_setting('missing', 5) == 5

    def test_constants(self, defaults):
        assert defaults.get_constant('ssim', 'window') == 8
        assert defaults.get_constant('operators', 'backend') == "direct"
        assert defaults.get_constant('limits', 'max_operator_elements') == 2 ** 26
        assert defaults.get_constant('nope', 'nothing', "fallback") == "fallback"

    def test_ssim_params(self, defaults):
        params = defaults.ssim_params()
        assert params.mode is SsimMode.GLOBAL and params.squared_stabilizers
        assert defaults.ssim_params("windowed").mode is SsimMode.WINDOWED


class TestLoading:
    def test_deep_merge(self, tmp_path):
        path = write_settings(tmp_path, {
            "user_settings": {"ssim_mode": "windowed", "unknown": 1},
            "constants": {"ssim": {"k1": 0.02, "stabilizers": "literal"}, "bench": {"extensions": [".PGM"]}},
        })
        settings = SettingsManager(path)
        assert settings.get_user_setting('ssim_mode') == "windowed"
        assert 'unknown' not in settings.user_settings
        assert settings.get_constant('ssim', 'k1') == 0.02
        assert settings.get_constant('ssim', 'k2') == 0.03
        assert settings.get_constant('bench', 'extensions') == [".pgm"]

        params = settings.ssim_params()
        assert params.mode is SsimMode.WINDOWED
        assert params.c1 == pytest.approx(0.02 * 255.0)

    def test_invalid_values_fall_back(self, tmp_path):
        path = write_settings(tmp_path, {"constants": {
            "operators": {"backend": "gpu", "cache_size": "many"},
            "ssim": {"window": 0},
            "bench": {"extensions": []},
        }})
        settings = SettingsManager(path)
        assert settings.get_constant('operators', 'backend') == "direct"
        assert settings.get_constant('operators', 'cache_size') == 32
        assert settings.get_constant('ssim', 'window') == 8
        assert ".png" in settings.get_constant('bench', 'extensions')

    @pytest.mark.parametrize("text", ["{not json", "[1, 2]"])
    def test_unreadable_file_uses_defaults(self, tmp_path, text):
        settings = SettingsManager(write_settings(tmp_path, text))
        assert settings.get_constant('bicubic', 'a') == -0.5
        assert settings.get_user_setting('csv') is False


class TestRuntime:
    def test_thread_override(self, defaults):
        defaults.apply_config_vars({THREADS_ENV_VAR: "3"})
        assert defaults.get_thread_count() == 3

    @pytest.mark.parametrize("raw", ["-2", "lots", "0"])
    def test_invalid_or_zero_threads_mean_automatic(self, defaults, raw):
        defaults.apply_config_vars({THREADS_ENV_VAR: raw})
        assert defaults.get_thread_count() == (os.cpu_count() or 1)

    def test_unset_leaves_setting(self, tmp_path):
        settings = SettingsManager(write_settings(tmp_path, {"constants": {"runtime": {"threads": 2}}}))
        settings.apply_config_vars({})
        assert settings.get_thread_count() == 2


class TestSnapshot:
    def test_save_snapshot(self, defaults, tmp_path):
        path = defaults.save_snapshot(str(tmp_path / "nested" / "plan.json"), {"images": ["a.pgm"]})
        with open(path) as f:
            snapshot = json.load(f)
        assert snapshot["images"] == ["a.pgm"]
        assert snapshot["user_settings"]["default_method"] == "lci"
        assert snapshot["constants"]["limits"]["equispaced_max_size"] == 300
