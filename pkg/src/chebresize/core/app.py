import sys

from direct.directnotify.DirectNotifyGlobal import directNotify

from ..interp import cheb_core
from ..interp.resize_engine import EngineOptions
from ..ui.cli import CommandLineUI, build_parser
from ..utils.settings import SettingsManager
from .errors import ChebResizeError

notify = directNotify.newCategory("ChebResizeApp")

NOTIFY_CATEGORIES = (
    "ChebCore", "ResizeEngine", "Bicubic", "Metrics", "ImgIO", "Settings",
    "BenchHarness", "CorpusGenerator", "ChebResizeApp",
)


def configure_logging(verbose=False, quiet=False):
    """Progress (info) only with --verbose; --quiet drops warnings too."""
    for name in NOTIFY_CATEGORIES:
        category = directNotify.newCategory(name)
        category.setInfo(verbose)
        category.setDebug(False)
        category.setWarning(not quiet)


class ChebResizeApp:
    def __init__(self, settings_file=None, out=None):
        configure_logging()
        self.settings_manager = SettingsManager(settings_file)
        self.settings_manager.apply_config_vars()
        self.engine_options = EngineOptions.from_settings(self.settings_manager)
        self.cli = CommandLineUI(self, out)
        self.parser = build_parser()

    def load_settings(self, settings_file, backend=None):
        if settings_file is not None:
            self.settings_manager = SettingsManager(settings_file)
            self.settings_manager.apply_config_vars()
        cheb_core.configure_operator_cache(self.settings_manager.get_constant('operators', 'cache_size', 32))
        self.engine_options = EngineOptions.from_settings(self.settings_manager, backend)

    def run(self, argv=None):
        """Parse `argv`, run one subcommand and return its exit status."""
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else 2

        configure_logging(args.verbose, args.quiet)
        try:
            self.load_settings(args.config, args.backend)
            return self.cli.dispatch(args)
        except (ChebResizeError, OSError) as e:
            print(f"Error: {e}", file=sys.stderr)
            return 1
