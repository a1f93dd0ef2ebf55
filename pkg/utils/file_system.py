import json
import logging
import os
import tempfile
from typing import Any, Dict

import pandas as pd

from config import TOOL_NAME, VERSION

# Create module-specific logger
logger = logging.getLogger(__name__)


def provenance_line(config_hash: str) -> str:
    return f"# {TOOL_NAME} {VERSION} config={config_hash}"


class ArtifactStore:
    """
    ArtifactStore writes and reads experiment outputs under one base directory.

    Every write goes to a temporary file in the destination directory and is
    renamed into place, so concurrent sweeps never observe partial files.
    Relative paths resolve against ``base_path``; absolute paths are used as is.
    """

    def __init__(self, base_path: str = "runs", config_hash: str = ""):
        """
        :param base_path: The base directory for all artifacts.
        :param config_hash: Hash of the resolved config, embedded in every CSV and JSON output.
        """
        self.base_path = base_path
        self.config_hash = config_hash

    def _get_full_path(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.base_path, path)

    def write_bytes(self, path: str, data: bytes) -> str:
        """
        Atomically writes bytes to a file.
        :param path: Relative or absolute destination.
        :param data: File content.
        :return: The full path written.
        :raises OSError: If the file cannot be written.
        """
        full_path = self._get_full_path(path)
        directory = os.path.dirname(full_path) or "."
        os.makedirs(directory, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(full_path))
        try:
            with os.fdopen(fd, "wb") as file:
                file.write(data)
            os.replace(tmp_path, full_path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise
        logger.debug(f"Wrote {len(data)} bytes to {full_path}")
        return full_path

    def read_bytes(self, path: str) -> bytes:
        full_path = self._get_full_path(path)
        if not os.path.isfile(full_path):
            raise FileNotFoundError(f"File '{full_path}' not found")
        with open(full_path, "rb") as file:
            return file.read()

    def write_json(self, path: str, record: Dict[str, Any]) -> str:
        """Writes a JSON record (sorted keys) stamped with the tool version and config hash."""
        record = {"tool": TOOL_NAME, "version": VERSION, "config_hash": self.config_hash, **record}
        return self.write_bytes(path, (json.dumps(record, sort_keys=True, indent=2) + "\n").encode("utf-8"))

    def write_csv(self, path: str, frame: pd.DataFrame, index: bool = False) -> str:
        """Writes a DataFrame as CSV under a one-line provenance comment."""
        body = frame.to_csv(index=index, lineterminator="\n")
        return self.write_bytes(path, (provenance_line(self.config_hash) + "\n" + body).encode("utf-8"))

