# Magic dictionary which is automatically populated with ALL stpipe.core.stages.stage.Stage
# types defined, keyed by their stage_type. (They only need to be imported -- See Below)
all_stages = {}

# Import all the stage modules we can find.
# Note: Will always search this current directory plus all directories found in
# the 'STPIPE_STAGE_SEARCH_PATHS' environment variable.

import glob
import importlib.util
import logging
import os
import sys

modules = glob.glob(os.path.join(os.path.dirname(__file__), "*.py"))
ignored_modules = ["__init__.py"]
__all__ = sorted(os.path.basename(f)[:-3] for f in modules if os.path.isfile(f) and os.path.basename(f) not in ignored_modules)

# Search current directory first.
from . import *

PATH_SEP = os.pathsep


def load_stage_modules(search_paths):
    """ Imports every .py file found in the given directories so the stage types
        they define get registered.

        Note: Stage types defined more than once overwrite previous definitions.

        Args:
            search_paths (str|list): Directories, as a list or a PATH_SEP separated string.

        Returns:
            list: Names of the modules loaded.
    """
    if isinstance(search_paths, str):
        search_paths = search_paths.split(PATH_SEP)

    loaded = []
    for item in search_paths:
        if not item or not os.path.isdir(item):
            continue
        for file_name in sorted(os.listdir(item)):
            if not file_name.endswith(".py"):
                continue
            module_name = "stpipe.core.stages.{stage_module}".format(stage_module=file_name[:-3])
            file_path = os.path.join(item, file_name)
            spec = importlib.util.spec_from_file_location(module_name, file_path)
            module = importlib.util.module_from_spec(spec)
            sys.modules[module_name] = module
            spec.loader.exec_module(module)
            logging.debug("Loaded stage module %s" % file_path)
            loaded.append(module_name)
    return loaded


search_paths = os.environ.get("STPIPE_STAGE_SEARCH_PATHS")
if search_paths:
    load_stage_modules(search_paths)
