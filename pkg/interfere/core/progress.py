import sys
import threading
import time
from typing import Optional, TextIO


class ProgressBar:
    """Grid-cell progress on stderr: current cell, completed/total, failures and ETA"""

    def __init__(self, total: int, description: str = "Cells", width: int = 30, stream: Optional[TextIO] = None):
        self.total = total
        self.done = 0
        self.failed = 0
        self.description = description
        self.cell = ''
        self.width = width
        self.stream = stream or sys.stderr
        self.start_time = time.time()
        self._lock = threading.Lock()

    def start_cell(self, label: str) -> None:
        with self._lock:
            self.cell = label
            self._render()

    def finish_cell(self, failed: bool = False, count: int = 1) -> None:
        with self._lock:
            self.done += count
            if failed:
                self.failed += count
            self._render()

    def line(self) -> str:
        filled = self.width * min(self.done, self.total) // self.total if self.total else self.width
        bar = '█' * filled + '░' * (self.width - filled)
        text = f"{self.description}: |{bar}| {self.done}/{self.total}"
        if self.failed:
            text += f" ({self.failed} failed)"
        if self.cell and self.done < self.total:
            text += f" {self.cell}"
        if 0 < self.done < self.total:
            eta = (time.time() - self.start_time) / self.done * (self.total - self.done)
            if eta > 1:
                text += f" ETA: {int(eta)}s"
        return text

    def _render(self) -> None:
        if self.total == 0:
            return
        self.stream.write('\r\033[K' + self.line())
        if self.done >= self.total:
            self.stream.write('\n')
        self.stream.flush()
