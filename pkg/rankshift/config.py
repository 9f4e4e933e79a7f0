from pathlib import Path
import sys

from rankshift.errors import ConfigError
from rankshift.helpers import print_warning
try:
    import tomllib
except ImportError:
    import tomli as tomllib
import tomli_w


class Config:
    """
    Load and validate rankshift configuration.

    The defaults are stored in configdefaults.toml next to this module. A
    named preset (see the presets folder) can be layered on top of them and
    the command line options are applied last. There is deliberately no way
    to load arbitrary configuration files, everything a user changes goes
    through flags.
    """

    config_defaults = Path(__file__).parent / 'configdefaults.toml'
    presets_dir = Path(__file__).parent / 'presets'

    # command line option name -> configuration key (dotted for tables)
    option_keys = {
        'window': 'Window',
        'origin': 'Origin',
        'nodes': 'Nodes',
        'damping': 'Damping',
        'epsilon': 'Epsilon',
        'max_iters': 'MaxIters',
        'reanchor': 'ReanchorInterval',
        'warmup': 'Warmup',
        'metric': 'Metric',
        'topk': 'TopK',
        'seed': 'Seed',
        'min_attack_edges': 'MinAttackEdges',
        'k': 'EvalK',
        'gen_nodes': 'Generator.Nodes',
        'gen_edges': 'Generator.Edges',
        'gen_timestamps': 'Generator.Timestamps',
        'skew': 'Generator.Skew',
        'seed_fraction': 'Generator.SeedFraction',
        'kind': 'Injection.Kind',
        'events': 'Injection.Events',
        'clique_size': 'Injection.CliqueSize',
        'burst_weight': 'Injection.BurstWeight',
        'inject_warmup': 'Injection.Warmup',
    }

    def __init__(self, preset=None):
        """
        Initialize and load rankshift configuration.

        Args:
            preset: Optional name of a preset from the presets folder.
        """
        # ordered list of configuration files we loaded
        self.conf_files = []
        # Configuration content parsed from the toml files
        self.configuration = None
        self.find_configs(preset)
        self.load_config()

    @classmethod
    def available_presets(cls):
        return sorted(p.stem for p in cls.presets_dir.glob('*.toml'))

    def find_configs(self, preset=None):
        """
        Store paths to the defaults and the requested preset.
        """
        self.conf_files.append(self.config_defaults)
        if preset:
            path = self.presets_dir / f'{preset}.toml'
            if path.exists():
                self.conf_files.append(path)
            else:
                raise ConfigError(f'unknown preset {preset}, available: {", ".join(self.available_presets())}')

    def _merge_dictionaries(self, dest, source):
        """
        Merge in place dest dictionary for values in source in recursive way.
        Lists are replaced, not merged.
        """
        for k, v in source.items():
            vdest = dest.get(k)
            if isinstance(vdest, dict) and isinstance(v, dict):
                self._merge_dictionaries(vdest, v)
            else:
                dest[k] = v

    def load_config(self):
        """
        Load the configuration files and merge them into self.configuration.
        """
        cfg = {}
        for cf in self.conf_files:
            try:
                with open(cf, 'rb') as f:
                    toml_config = tomllib.load(f)
                self._merge_dictionaries(cfg, toml_config)
            except tomllib.TOMLDecodeError as terr:
                print_warning(f'(none): E: fatal error while parsing configuration file {cf}: {terr}')
                sys.exit(4)
        self.configuration = cfg

    def set(self, key, value):
        """Set a (possibly dotted) configuration key."""
        table = self.configuration
        *parents, name = key.split('.')
        for parent in parents:
            table = table.setdefault(parent, {})
        table[name] = value

    def get(self, key):
        value = self.configuration
        for part in key.split('.'):
            value = value[part]
        return value

    def apply_options(self, options):
        """
        Override configuration values by the command line options that
        were given (None means the flag was not used).
        """
        for option, key in self.option_keys.items():
            value = options.get(option)
            if value is not None:
                self.set(key, value)

    def validate(self):
        """
        Check all values are in their valid ranges.

        Raises:
            ConfigError: for the first invalid value found.
        """
        cfg = self.configuration
        checks = [
            (0 < cfg['Damping'] < 1, f'Damping must be in (0, 1), got {cfg["Damping"]}'),
            (cfg['Epsilon'] > 0, f'Epsilon must be positive, got {cfg["Epsilon"]}'),
            (cfg['MaxIters'] >= 1, f'MaxIters must be at least 1, got {cfg["MaxIters"]}'),
            (cfg['Window'] > 0, f'Window must be positive, got {cfg["Window"]}'),
            (cfg['Warmup'] >= 0, f'Warmup must not be negative, got {cfg["Warmup"]}'),
            (cfg['ReanchorInterval'] >= 0, f'ReanchorInterval must not be negative, got {cfg["ReanchorInterval"]}'),
            (cfg['TopK'] >= 1, f'TopK must be at least 1, got {cfg["TopK"]}'),
            (cfg['Nodes'] >= 0, f'Nodes must not be negative, got {cfg["Nodes"]}'),
            (cfg['MinAttackEdges'] >= 1, f'MinAttackEdges must be at least 1, got {cfg["MinAttackEdges"]}'),
            (cfg['StdFloor'] >= 0, f'StdFloor must not be negative, got {cfg["StdFloor"]}'),
            (cfg['Metric'] in ('s', 'w', 'both'), f'Metric must be one of s, w, both, got {cfg["Metric"]}'),
            (all(k >= 1 for k in cfg['EvalK']), 'EvalK values must be at least 1'),
            (cfg['Seed'] >= 0, f'Seed must not be negative, got {cfg["Seed"]}'),
        ]
        gen = cfg['Generator']
        checks += [
            (gen['Nodes'] >= 1, f'Generator.Nodes must be at least 1, got {gen["Nodes"]}'),
            (gen['Edges'] >= 0, f'Generator.Edges must not be negative, got {gen["Edges"]}'),
            (gen['Timestamps'] >= 1, f'Generator.Timestamps must be at least 1, got {gen["Timestamps"]}'),
            (gen['Skew'] >= 0, f'Generator.Skew must not be negative, got {gen["Skew"]}'),
            (0 <= gen['SeedFraction'] <= 1,
             f'Generator.SeedFraction must be between 0 and 1, got {gen["SeedFraction"]}'),
        ]
        inj = cfg['Injection']
        checks += [
            (inj['Kind'] in ('s', 'w', 'none'), f'Injection.Kind must be one of s, w, none, got {inj["Kind"]}'),
            (inj['Events'] >= 0, f'Injection.Events must not be negative, got {inj["Events"]}'),
            (inj['CliqueSize'] >= 2, f'Injection.CliqueSize must be at least 2, got {inj["CliqueSize"]}'),
            (inj['BurstWeight'] >= 0, f'Injection.BurstWeight must not be negative, got {inj["BurstWeight"]}'),
            (inj['Warmup'] >= 0, f'Injection.Warmup must not be negative, got {inj["Warmup"]}'),
        ]
        for valid, message in checks:
            if not valid:
                raise ConfigError(message)

    def metric_kinds(self):
        """Return the score kinds selected by the Metric value."""
        metric = self.configuration['Metric']
        return ('s', 'w') if metric == 'both' else (metric,)

    def print_config(self):
        """Print the current state of the configuration."""
        if self.configuration:
            print(tomli_w.dumps(self.configuration))
