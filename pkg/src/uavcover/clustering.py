"""Grouping of targets by time-window overlap."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import Target, TimeWindow

DEFAULT_THRESHOLD = 0.7


@dataclass(frozen=True)
class Cluster:
    target_ids: tuple[int, ...]
    anchor_window: TimeWindow
    service_start: int
    cluster_index: int


def _overlap(a: TimeWindow, b: TimeWindow) -> int:
    return max(0, min(a.end, b.end) - max(a.start, b.start))


def overlap_ratio(a: TimeWindow, b: TimeWindow, denominator: str = "min") -> float:
    """Length of the intersection over the length of the shorter window.

    ``denominator`` may also be ``"max"`` (longer window) or ``"union"``.
    """
    inter = _overlap(a, b)
    if denominator == "min":
        base = min(a.length, b.length)
    elif denominator == "max":
        base = max(a.length, b.length)
    elif denominator == "union":
        base = a.length + b.length - inter
    else:
        raise ValueError(f"unknown denominator {denominator!r}")
    return inter / base


def sort_targets(targets: Iterable[Target]) -> list[Target]:
    return sorted(targets, key=lambda t: (t.window.start, t.window.end, t.id))


def cluster_targets(targets: Iterable[Target], threshold: float = DEFAULT_THRESHOLD,
                    denominator: str = "min") -> list[Cluster]:
    ordered = sort_targets(targets)
    if not ordered:
        raise ValueError("cannot cluster an empty target list")

    groups: list[list[Target]] = [[ordered[0]]]
    for t in ordered[1:]:
        anchor = groups[-1][-1].window
        # disjoint windows never share a cluster, even at threshold 0
        if _overlap(t.window, anchor) > 0 and \
                overlap_ratio(t.window, anchor, denominator) >= threshold:
            groups[-1].append(t)
        else:
            groups.append([t])

    return [Cluster(target_ids=tuple(t.id for t in g),
                    anchor_window=g[-1].window,
                    service_start=max(t.window.start for t in g),
                    cluster_index=k)
            for k, g in enumerate(groups)]
