"""Gap-based segmentation of meal-location events into activity episodes.

Consecutive events separated by less than the gap threshold form one
episode; an episode's duration is last event minus first event. Episodes
shorter than the minimum duration or with too few events (single-sensor
blips) are discarded.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Sequence

from mealclust.events import SensorEvent, TIMESTAMP_FORMAT

DEFAULT_GAP_THRESHOLD_MIN = 10.0
DEFAULT_MIN_DURATION_MIN = 1.0
DEFAULT_MIN_EVENTS = 2

EPISODE_CSV_COLUMNS = ("household_id", "start", "end", "duration_min", "start_hour", "event_count")


@dataclass(frozen=True)
class ActivityEpisode:
    household_id: str
    start: datetime
    end: datetime
    duration_min: float
    start_hour: float
    event_count: int


def _start_hour(ts: datetime) -> float:
    return ts.hour + ts.minute / 60.0 + ts.second / 3600.0


def segment_episodes(
    events: Sequence[SensorEvent],
    gap_threshold_min: float = DEFAULT_GAP_THRESHOLD_MIN,
    min_duration_min: float = DEFAULT_MIN_DURATION_MIN,
    min_events: int = DEFAULT_MIN_EVENTS,
) -> list[ActivityEpisode]:
    """Group a time-ordered event stream into activity episodes.

    Events whose inter-event gap is strictly below `gap_threshold_min`
    belong to the same episode. Input must already be filtered to a
    single household's meal locations and sorted ascending by timestamp.
    """
    if gap_threshold_min <= 0:
        raise ValueError("gap_threshold_min must be positive")
    if min_duration_min < 0:
        raise ValueError("min_duration_min must be non-negative")
    if min_events < 1:
        raise ValueError("min_events must be at least 1")
    for prev, cur in zip(events, events[1:]):
        if cur.timestamp < prev.timestamp:
            raise ValueError("events must be sorted ascending by timestamp")

    episodes: list[ActivityEpisode] = []
    run: list[SensorEvent] = []

    def flush(run: list[SensorEvent]) -> None:
        duration_min = (run[-1].timestamp - run[0].timestamp).total_seconds() / 60.0
        if duration_min < min_duration_min or len(run) < min_events:
            return
        episodes.append(
            ActivityEpisode(
                household_id=run[0].household_id,
                start=run[0].timestamp,
                end=run[-1].timestamp,
                duration_min=duration_min,
                start_hour=_start_hour(run[0].timestamp),
                event_count=len(run),
            )
        )

    for event in events:
        if run and (event.timestamp - run[-1].timestamp).total_seconds() / 60.0 >= gap_threshold_min:
            flush(run)
            run = []
        run.append(event)
    if run:
        flush(run)
    episodes.sort(key=lambda ep: ep.start)
    return episodes


def episodes_to_csv(episodes: Iterable[ActivityEpisode]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(EPISODE_CSV_COLUMNS)
    for ep in episodes:
        writer.writerow(
            [
                ep.household_id,
                ep.start.strftime(TIMESTAMP_FORMAT),
                ep.end.strftime(TIMESTAMP_FORMAT),
                repr(ep.duration_min),
                repr(ep.start_hour),
                ep.event_count,
            ]
        )
    return out.getvalue()


def read_episodes_csv(text: str) -> list[ActivityEpisode]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != EPISODE_CSV_COLUMNS:
        raise ValueError(f"unexpected episode CSV header: {header}")
    episodes = []
    for row in reader:
        if not row:
            continue
        episodes.append(
            ActivityEpisode(
                household_id=row[0],
                start=datetime.strptime(row[1], TIMESTAMP_FORMAT),
                end=datetime.strptime(row[2], TIMESTAMP_FORMAT),
                duration_min=float(row[3]),
                start_hour=float(row[4]),
                event_count=int(row[5]),
            )
        )
    return episodes
