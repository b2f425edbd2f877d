"""Random instances across three overlap regimes, and a JSON round trip."""

from uavcover import GeneratorParams, cluster_targets, generate_random, load_instance, save_instance

for regime in ((0.0, 0.3), (0.3, 0.7), (0.7, 1.0)):
    inst = generate_random(GeneratorParams(10, 5, 20, regime, 20), seed=42)
    w = [t.window for t in inst.targets]
    overlaps = [min(a.end, b.end) - max(a.start, b.start) for a, b in zip(w, w[1:])]
    print(f"regime {regime}: overlaps {overlaps} -> "
          f"{len(cluster_targets(inst.targets))} clusters")

text = save_instance(inst)
assert load_instance(text) == inst
print(f"\nlast instance serialises to {len(text)} bytes and loads back equal")
