"""Grouping targets by time-window overlap.

Four targets: the first two overlap by 70% and share a cluster, the third
starts after a gap, and the fourth overlaps the third by only 40%.
"""

from uavcover import Position, Target, TimeWindow, cluster_targets, overlap_ratio

targets = [Target(i, Position(0, 0), TimeWindow(s, e))
           for i, (s, e) in ((1, (0, 10)), (2, (3, 13)), (4, (20, 30)), (5, (26, 36)))]

for a, b in zip(targets, targets[1:]):
    print(f"overlap(t{a.id}, t{b.id}) = {overlap_ratio(a.window, b.window):.2f}")

for threshold in (0.7, 0.4, 0.0):
    groups = [c.target_ids for c in cluster_targets(targets, threshold)]
    print(f"threshold {threshold}: {groups}")
