"""Console abstraction so example primitives can print and prompt without
binding to process stdio; tests substitute in-memory streams."""

from __future__ import annotations

import sys
from typing import Optional, TextIO


class Console:
    def __init__(self, out: Optional[TextIO] = None, source: Optional[TextIO] = None):
        self._out = out
        self._source = source

    def print(self, text: str = "") -> None:
        stream = self._out if self._out is not None else sys.stdout
        stream.write(text + "\n")
        stream.flush()  # keep ordering with child-process output on the same tty

    def ask(self, prompt: str) -> str:
        """Print the prompt on its own line and read one answer line."""
        self.print(prompt)
        stream = self._source if self._source is not None else sys.stdin
        line = stream.readline()
        if line == "":
            raise EOFError("no input available for interactive prompt")
        return line.strip()
