import json
import logging
import os
import sys
from typing import Any

from nchilbert.exceptions import DocumentError

logger = logging.getLogger("nc_hilbert.documents")


class DocumentClient:
    def __init__(self, path: str):
        """
        JSON document on the local filesystem.

        :param path: path of the document; "-" reads standard input
        """
        self.path = path

    def load(self) -> Any:
        """
        Parses the document.

        Raises:
            DocumentError: if the file is missing, unreadable, not UTF-8 or not valid JSON.
        """
        if self.path != "-" and not os.path.isfile(self.path):
            logger.error("[json][%s] File not found", self.path)
            raise DocumentError("file not found", self.path)
        try:
            if self.path == "-":
                text = sys.stdin.read()
            else:
                with open(self.path, "r", encoding="utf-8") as handle:
                    text = handle.read()
        except UnicodeDecodeError as e:
            logger.error("[json][%s] Not UTF-8: %s", self.path, e)
            raise DocumentError(f"not valid UTF-8: {e.reason} at byte {e.start}", self.path) from e
        except (OSError, ValueError) as e:
            logger.error("[json][%s] Failed to read: %s", self.path, e)
            raise DocumentError(f"unable to read: {e}", self.path) from e

        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise DocumentError(f"malformed JSON: {e.msg} at line {e.lineno} column {e.colno}", self.path) from e
        logger.debug("[json][%s] Loaded document", self.path)
        return document


def dumps(document: Any) -> str:
    """Deterministic serialization: sorted keys, fixed separators."""
    return json.dumps(document, sort_keys=True, separators=(",", ":"))
