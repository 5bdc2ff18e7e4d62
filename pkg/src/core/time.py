from datetime import datetime, timezone
import time
import uuid


def now_utc() -> datetime:
    return datetime.now(timezone.utc)


def run_id() -> str:
    """Sortable id for one command or service run: UTC second plus a short random tail."""
    return f"{now_utc():%Y%m%dT%H%M%S}-{uuid.uuid4().hex[:6]}"


class StageTimer:
    """Wall-clock duration of a block, rounded to milliseconds."""

    def __enter__(self):
        self.started_at = now_utc()
        self._t0 = time.perf_counter()
        self.duration_sec = None
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.duration_sec = round(time.perf_counter() - self._t0, 3)
