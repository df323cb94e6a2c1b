import copy
import io
import logging
import os
import shlex
import sys

import yaml

from ..core import stages
from ..core import utils
from ..core.engine import resolver
from ..core.engine.stage_graph import StageGraph
from ..core.exceptions import LoaderException, PipelineValidationException

# Config keys merged entry by entry when several files define them.
MERGED_KEYS = ("pipelines", "stages", "replacements", "stage_attribute_defaults")

# Config keys later files simply override.
SCALAR_KEYS = ("seed", "workers", "out_dir", "report_path", "link_inputs", "run")

MAX_SEED = 2 ** 64


class Loader(object):
    """ Responsible for loading the configuration files and creating a stage
        graph for a given pipeline name present inside of the config files.

        Note: Duplicate entries found in more than 1 config file are overwritten
            by config files found later in the list.

        Args:
            config_file_paths (list): List of file paths to parse. If not specified,
                it defaults to the comma separated "STPIPE_CONFIG_SEARCH_PATHS"
                environment variable.
            replacements (dict): Extra "{name}" replacements.
    """

    def __init__(self, config_file_paths=None, replacements=None):
        if config_file_paths is None:
            config_file_paths = os.environ.get("STPIPE_CONFIG_SEARCH_PATHS")
            if config_file_paths:
                config_file_paths = [path for path in os.path.expandvars(config_file_paths).split(",") if path]

        if not config_file_paths:
            raise LoaderException("Configuration file not specified and 'STPIPE_CONFIG_SEARCH_PATHS' not set.")

        if isinstance(config_file_paths, str):
            config_file_paths = [config_file_paths]

        self._config_file_paths = list(config_file_paths)
        self.__config = None
        self.replacements = replacements or {}

        # ReplacementsDict leaves unknown "{name}" tokens in place.
        if not isinstance(self.replacements, resolver.ReplacementsDict):
            self.replacements = resolver.ReplacementsDict(self.replacements)

    @property
    def config_file_paths(self):
        return list(self._config_file_paths)

    @property
    def config(self):
        if self.__config is None:
            self.__config = self._load_configs(self._config_file_paths)

        return self.__config

    def _update_config(self, current_dict, new_dict):
        for key in MERGED_KEYS:
            value = new_dict.get(key)
            if value:
                if not isinstance(value, dict):
                    raise LoaderException("Config key '%s' must be a mapping, got %r" % (key, value))
                if key not in current_dict:
                    current_dict[key] = value
                else:
                    current_dict[key].update(value)

        for key in SCALAR_KEYS:
            if key in new_dict:
                current_dict[key] = new_dict[key]

        unknown = sorted(set(new_dict) - set(MERGED_KEYS) - set(SCALAR_KEYS))
        if unknown:
            logging.warning("Ignoring unknown config keys: %s" % ", ".join(unknown))

    def _load_configs(self, config_file_paths):
        config = {}
        loaded = []
        for config_file in config_file_paths:

            # Check that the config file exists before loading it.
            if not os.path.exists(config_file):
                logging.warning("stpipe config file %s was not found." % config_file)
                continue

            with io.open(config_file, "r", encoding="utf-8") as handle:
                try:
                    config_snippet = yaml.safe_load(handle)
                except yaml.YAMLError as e:
                    raise LoaderException("Failed to parse %s: %s" % (config_file, e))

            if config_snippet is None:
                continue
            if not isinstance(config_snippet, dict):
                raise LoaderException("Config file %s must hold a mapping." % config_file)
            self._update_config(config, config_snippet)
            loaded.append(config_file)

        if not loaded:
            raise LoaderException("None of the config files could be loaded: %s" % ", ".join(config_file_paths))

        builtins = resolver.ReplacementsDict(
            python=shlex.quote(sys.executable),
            config_dir=os.path.dirname(os.path.abspath(loaded[0])),
        )
        builtins.update(self.replacements)

        # Configured replacements may use the built in ones, eg: "{config_dir}/data"
        configured = resolver.Resolver(builtins).resolve(config.get("replacements", {}))
        self.replacements.update(builtins)
        self.replacements.update(configured)

        return config

    def get_default_stage_data(self, stage_type):
        return self.config.get("stage_attribute_defaults", {}).get(stage_type, {})

    def stages_from_stage_ids(self, stage_ids, replacements=None):
        """ Constructs the configured stages, in order.

            Args:
                stage_ids (list): Names of stages in the "stages" section.

            Kwargs:
                replacements (dict): Replacements on top of the loader's.

            Raises:
                PipelineValidationException: Unknown stage id or stage type, or a bad attribute.

            Returns:
                list: Constructed stages.
        """
        all_replacements = resolver.ReplacementsDict(self.replacements)
        all_replacements.update(replacements or {})

        stages_lookup = self.config.get("stages", {})
        stage_list = []
        for stage_id in stage_ids:
            configured_stage_data = stages_lookup.get(stage_id)
            if configured_stage_data is None:
                raise PipelineValidationException("Stage '%s' is not defined." % stage_id)

            stage_type = configured_stage_data.get("stage_type")
            stage_obj = stages.all_stages.get(stage_type)
            if stage_obj is None:
                raise PipelineValidationException(
                    "Stage '%s' has unknown stage type '%s'. Known types: %s"
                    % (stage_id, stage_type, ", ".join(sorted(stages.all_stages)))
                )

            stage_data = copy.deepcopy(self.get_default_stage_data(stage_type))
            stage_data.update(configured_stage_data)
            stage_data["name"] = stage_id
            stage_list.append(stage_obj.from_dict(stage_data, replacements=all_replacements))

        return stage_list

    def parse_pipeline(self, pipeline_name, replacements=None):
        """ Builds the StageGraph for one pipeline.

            Raises:
                PipelineValidationException: Unknown pipeline or stage.
        """
        pipeline = self.config.get("pipelines", {}).get(pipeline_name)
        if pipeline is None:
            raise PipelineValidationException("Unable to find pipeline '%s'" % pipeline_name)

        all_replacements = resolver.ReplacementsDict(self.replacements)
        all_replacements.update(replacements or {})

        stage_graph = StageGraph(
            pipeline_name,
            inputs=resolver.Resolver(all_replacements).resolve(pipeline.get("inputs", {})),
            replacements=all_replacements,
        )
        stage_graph.add_stages(self.stages_from_stage_ids(pipeline.get("stages", []), replacements=all_replacements))
        return stage_graph


class PipelineConfig(object):
    """ A loaded config plus the run level settings: seed, workers, paths.

        Args:
            loader (Loader): Loaded config files.

        Kwargs:
            seed, workers, out_dir, report_path, run_id: Override the config values.
            settings (StpipeSettings): Toolkit defaults.

        Raises:
            PipelineValidationException: Bad run level values.
    """

    def __init__(self, loader, seed=None, workers=None, out_dir=None, report_path=None, run_id=None, settings=None):
        config = loader.config
        self.loader = loader
        self.settings = settings or utils.StpipeSettings()
        self._resolver = resolver.Resolver(loader.replacements)

        try:
            self.seed = int(seed if seed is not None else config.get("seed", 0))
            self.workers = int(workers if workers is not None else config.get("workers", 1))
        except (TypeError, ValueError) as e:
            raise PipelineValidationException("Invalid seed or workers: %s" % e)
        if not 0 <= self.seed < MAX_SEED:
            raise PipelineValidationException("seed must be in [0, 2**64), got %d" % self.seed)
        if self.workers < 1:
            raise PipelineValidationException("workers must be >= 1, got %d" % self.workers)

        self.out_dir = out_dir or self._resolver.resolve(config.get("out_dir") or "run")
        self._report_path = report_path or config.get("report_path")
        self.link_inputs = bool(config.get("link_inputs", False))
        self.run_id = run_id

        pipelines = config.get("pipelines", {})
        self.run = list(config.get("run") or pipelines.keys())
        if not self.run:
            raise PipelineValidationException("The config defines no pipelines.")
        for name in self.run:
            if name not in pipelines:
                raise PipelineValidationException("Run order names unknown pipeline '%s'." % name)

        self.snapshot = copy.deepcopy(config)
        self.snapshot["seed"] = self.seed

    @classmethod
    def from_files(cls, config_file_paths, replacements=None, **kwargs):
        return cls(Loader(config_file_paths, replacements=replacements), **kwargs)

    def __repr__(self):
        return "PipelineConfig(run=%r, seed=%r, out_dir=%r)" % (self.run, self.seed, self.out_dir)

    def _run_replacements(self, run_dir):
        return {"run_dir": run_dir, "out_dir": self.out_dir}

    def report_path_for(self, run_dir):
        if not self._report_path:
            return None
        return resolver.Resolver(self._run_replacements(run_dir)).resolve(
            self._resolver.resolve(self._report_path)
        )

    def build_stage_graph(self, name, run_dir):
        return self.loader.parse_pipeline(name, replacements=self._run_replacements(run_dir))
