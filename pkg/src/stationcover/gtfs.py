"""Ingest a GTFS feed as a station cover instance, one connection per route.

A feed stores many trips per route (one per departure); only one trip per
route is kept, the one with the lexicographically smallest trip_id, and its
stops ordered by stop_sequence become the route's connection.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Iterator

from .model import Instance, build_instance

log = logging.getLogger(__name__)

REQUIRED_FILES = ("stops.txt", "routes.txt", "trips.txt", "stop_times.txt")


class GtfsError(ValueError):
    pass


def _rows(path: Path, required: tuple[str, ...]) -> Iterator[tuple[int, dict[str, str]]]:
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise GtfsError(f"{path.name}: missing header row")
        fieldnames = [name.strip() for name in reader.fieldnames]
        missing = [col for col in required if col not in fieldnames]
        if missing:
            raise GtfsError(f"{path.name}: missing required columns {missing}")
        for row in reader:
            clean = {
                (k.strip() if k else k): (v.strip() if isinstance(v, str) else v)
                for k, v in row.items()
            }
            yield reader.line_num, clean


def _require(row: dict[str, str], column: str, path: Path, line: int) -> str:
    value = row.get(column)
    if not value:
        raise GtfsError(f"{path.name} line {line}: missing {column}")
    return value


def load_gtfs(directory) -> Instance:
    """Parse stops, routes, trips and stop_times into an instance.

    Stations are the stop_ids referenced by the selected trips, verbatim (no
    parent-station merging).  Routes without trips, and trips without stops,
    are skipped with a warning.  Callers usually continue with
    ``largest_component``.
    """
    feed = Path(directory)
    for name in REQUIRED_FILES:
        if not (feed / name).is_file():
            raise GtfsError(f"missing required file {name} in {feed}")

    stops_path = feed / "stops.txt"
    known_stops = {
        _require(row, "stop_id", stops_path, line) for line, row in _rows(stops_path, ("stop_id",))
    }

    routes_path = feed / "routes.txt"
    route_order = [
        _require(row, "route_id", routes_path, line)
        for line, row in _rows(routes_path, ("route_id",))
    ]

    trips_path = feed / "trips.txt"
    chosen_trip: dict[str, str] = {}
    for line, row in _rows(trips_path, ("route_id", "trip_id")):
        route_id = _require(row, "route_id", trips_path, line)
        trip_id = _require(row, "trip_id", trips_path, line)
        if route_id not in chosen_trip or trip_id < chosen_trip[route_id]:
            chosen_trip[route_id] = trip_id

    wanted_trips = {trip_id for trip_id in chosen_trip.values()}
    times_path = feed / "stop_times.txt"
    stops_of_trip: dict[str, list[tuple[int, str]]] = {t: [] for t in wanted_trips}
    for line, row in _rows(times_path, ("trip_id", "stop_id", "stop_sequence")):
        trip_id = _require(row, "trip_id", times_path, line)
        if trip_id not in stops_of_trip:
            continue
        stop_id = _require(row, "stop_id", times_path, line)
        if stop_id not in known_stops:
            raise GtfsError(f"{times_path.name} line {line}: unknown stop {stop_id!r}")
        raw_seq = _require(row, "stop_sequence", times_path, line)
        try:
            seq = int(raw_seq)
        except ValueError:
            raise GtfsError(
                f"{times_path.name} line {line}: stop_sequence {raw_seq!r} is not an integer"
            ) from None
        stops_of_trip[trip_id].append((seq, stop_id))

    connections: list[tuple[str, ...]] = []
    for route_id in route_order:
        trip_id = chosen_trip.get(route_id)
        if trip_id is None:
            log.warning("route %s has no trips; skipped", route_id)
            continue
        ordered = [stop for _, stop in sorted(stops_of_trip[trip_id])]
        collapsed: list[str] = []
        for stop in ordered:
            if not collapsed or collapsed[-1] != stop:
                collapsed.append(stop)
        if not collapsed:
            log.warning("route %s: trip %s has no stops; skipped", route_id, trip_id)
            continue
        connections.append(tuple(collapsed))

    return build_instance(None, connections)
