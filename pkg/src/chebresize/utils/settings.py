import json
import os

from direct.directnotify.DirectNotifyGlobal import directNotify

from ..quality.metrics import SsimParams

notify = directNotify.newCategory("Settings")

THREADS_ENV_VAR = "CHEBRESIZE_THREADS"
DEFAULT_SETTINGS_FILE = "chebresize.json"


class SettingsManager:
    def __init__(self, settings_file=None):
        self.settings_file = settings_file or DEFAULT_SETTINGS_FILE
        self._explicit_file = settings_file is not None
        self._default_settings = self._get_default_settings()
        self.user_settings = self._default_settings['user_settings'].copy()
        self.constants = {}
        self.load_settings()

    def _get_default_settings(self):
        return {
            "user_settings": {
                "default_method": "lci",
                "quantize_output": True,
                "ssim_mode": "global",
                "metrics_on_quantized": True,
                "csv": False
            },
            "constants": {
                "ssim": {
                    "dynamic_range": 255.0,
                    "k1": 0.01,
                    "k2": 0.03,
                    "window": 8,
                    "stabilizers": "squared"
                },
                "operators": {
                    "backend": "direct",
                    "cache_size": 32
                },
                "limits": {
                    "max_operator_elements": 2 ** 26,
                    "equispaced_max_size": 300
                },
                "bicubic": {
                    "a": -0.5,
                    "antialias": True
                },
                "bench": {
                    "records_name": "records.csv",
                    "averages_name": "averages.csv",
                    "plan_name": "plan.json",
                    "extensions": [".pgm", ".ppm", ".pnm", ".png"]
                },
                "runtime": {
                    "threads": 0
                }
            }
        }

    def _get_nested_dict(self, data_dict, keys, default=None):
        current = data_dict
        for key in keys:
            if isinstance(current, dict):
                current = current.get(key)
            else:
                return default
            if current is None:
                return default
        return current

    def _deep_update(self, source, overrides):
        for key, value in overrides.items():
            if isinstance(value, dict) and key in source and isinstance(source[key], dict):
                self._deep_update(source[key], value)
            elif key in source:
                source[key] = value
        return source

    def _parse_choice(self, parsed, category, key, choices):
        section = parsed[category]
        value = section.get(key)
        if value not in choices:
            default_val = self._default_settings["constants"][category][key]
            notify.warning(f"Invalid value {value!r} for '{key}', expected one of {sorted(choices)}. Using default {default_val!r}.")
            section[key] = default_val

    def _parse_constants(self, constants_dict_to_parse):
        parsed = json.loads(json.dumps(self._default_settings['constants']))
        self._deep_update(parsed, constants_dict_to_parse)
        default_consts = self._default_settings['constants']

        for category, keys, cast in (
            ('ssim', ['dynamic_range', 'k1', 'k2'], float),
            ('ssim', ['window'], int),
            ('operators', ['cache_size'], int),
            ('limits', ['max_operator_elements', 'equispaced_max_size'], int),
            ('bicubic', ['a'], float),
            ('runtime', ['threads'], int),
        ):
            section = parsed.get(category, {})
            for key in keys:
                default_val = default_consts[category][key]
                try:
                    section[key] = cast(section.get(key, default_val))
                except (ValueError, TypeError):
                    notify.warning(f"Invalid value for constant '{category}.{key}'. Using default {default_val}.")
                    section[key] = default_val

        self._parse_choice(parsed, "ssim", "stabilizers", {"squared", "literal"})
        self._parse_choice(parsed, "operators", "backend", {"direct", "fct"})

        if parsed['ssim']['window'] < 1:
            notify.warning("SSIM window must be positive. Using default 8.")
            parsed['ssim']['window'] = default_consts['ssim']['window']

        extensions = parsed['bench'].get('extensions')
        if not isinstance(extensions, list) or not extensions:
            parsed['bench']['extensions'] = list(default_consts['bench']['extensions'])
        else:
            parsed['bench']['extensions'] = [str(ext).lower() for ext in extensions]

        return parsed

    def load_settings(self):
        if not os.path.exists(self.settings_file):
            if self._explicit_file:
                notify.warning(f"Settings file {self.settings_file} not found. Using default settings.")
            self.user_settings = self._default_settings['user_settings'].copy()
            self.constants = self._parse_constants({})
            return

        try:
            with open(self.settings_file, 'r') as f:
                loaded_data = json.load(f)
            if not isinstance(loaded_data, dict):
                raise ValueError("top level is not an object")

            default_user = self._default_settings['user_settings'].copy()
            self._deep_update(default_user, loaded_data.get('user_settings', {}))
            self.user_settings = default_user
            self.constants = self._parse_constants(loaded_data.get('constants', {}))
            notify.info(f"Settings loaded from {self.settings_file}.")
        except Exception as e:
            notify.warning(f"Error loading settings file {self.settings_file}: {e}. Falling back to defaults.")
            self.user_settings = self._default_settings['user_settings'].copy()
            self.constants = self._parse_constants({})

    def save_snapshot(self, path, extra=None):
        """Writes the effective settings (plus `extra`) as JSON, e.g. a bench plan.json."""
        snapshot = {
            'user_settings': dict(self.user_settings),
            'constants': json.loads(json.dumps(self.constants)),
        }
        if extra:
            snapshot.update(extra)
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, 'w') as f:
            json.dump(snapshot, f, indent=4, sort_keys=True)
        return path

    def get_constant(self, category, key, default=None):
        value = self._get_nested_dict(self.constants, [category, key])
        if value is not None:
            return value
        default_value = self._get_nested_dict(self._default_settings['constants'], [category, key])
        if default_value is not None:
            notify.warning(f"Constant ['{category}']['{key}'] missing from parsed constants. Using built-in default.")
            return default_value
        return default

    def get_user_setting(self, key, default=None):
        val = self.user_settings.get(key)
        if val is None:
            val = self._default_settings['user_settings'].get(key, default)
        return val

    def apply_config_vars(self, environ=None):
        environ = os.environ if environ is None else environ
        raw = environ.get(THREADS_ENV_VAR)
        if raw is None or raw == "":
            return
        try:
            threads = int(raw)
            if threads < 0:
                raise ValueError(raw)
        except ValueError:
            notify.warning(f"Invalid {THREADS_ENV_VAR}={raw!r}. Using automatic thread count.")
            threads = 0
        self.constants['runtime']['threads'] = threads

    def get_thread_count(self):
        """Worker count for parallel sections; 0 in the settings means one per CPU."""
        threads = self.get_constant('runtime', 'threads', 0)
        if threads <= 0:
            return os.cpu_count() or 1
        return threads

    def ssim_params(self, mode=None):
        ssim_consts = self.constants['ssim']
        return SsimParams(
            dynamic_range=ssim_consts['dynamic_range'],
            k1=ssim_consts['k1'],
            k2=ssim_consts['k2'],
            mode=mode or self.get_user_setting('ssim_mode', 'global'),
            window=ssim_consts['window'],
            squared_stabilizers=ssim_consts['stabilizers'] == 'squared',
        )
