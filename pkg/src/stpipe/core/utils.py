import errno
import hashlib
import io
import os
import tempfile

import yaml

_MISSING = object()


class StpipeSettings(object):
    """ Simple helper class to simplify getting the settings for stpipe.

    NOTE: The settings are a different file than the pipeline config files.
    """
    def __init__(self, settings_file=None):

        self.settings_file = None

        # If a settings file was passed into the init method, then use that
        if settings_file:
            self.settings_file = settings_file

        # Otherwise try and fallback to the environment variable
        if not self.settings_file:
            self.settings_file = os.environ.get("STPIPE_SETTINGS_FILE")

        # And finally look in this current directory for the default one.
        if not self.settings_file:
            self.settings_file = os.path.join(os.path.dirname(__file__), "settings.yaml")

        self._load_settings()

    def _load_settings(self):
        with io.open(self.settings_file, "r", encoding="utf-8") as handle:
            settings = yaml.safe_load(handle)
        self.settings = settings or {}

    def get(self, key, default=None):
        """ Looks up a dotted key, eg: "ngramlm.prune.heavy".
        """
        value = self.settings
        for part in key.split("."):
            if not isinstance(value, dict):
                return default
            value = value.get(part, _MISSING)
            if value is _MISSING:
                return default
        return value


def file_sha256(path, chunk_size=1 << 16):
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        while True:
            chunk = handle.read(chunk_size)
            if not chunk:
                break
            digest.update(chunk)
    return digest.hexdigest()


def ensure_dir(directory):
    if directory and not os.path.exists(directory):
        try:
            os.makedirs(directory)
        except OSError as e:
            if e.errno != errno.EEXIST:
                raise


def atomic_write_text(path, text):
    """ Writes text as UTF-8 with LF endings via a temp file + rename, so readers
        never observe a half written file.
    """
    directory = os.path.dirname(os.path.abspath(path))
    ensure_dir(directory)
    fd, temp_path = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.basename(path))
    try:
        with io.open(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(temp_path, path)
    except Exception:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise
