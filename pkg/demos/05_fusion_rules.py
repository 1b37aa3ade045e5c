"""
From posture and place to a derived activity, with anomaly flags
================================================================

A posture alone says little: sitting in the hall while the TV is on is
watching TV; lying anywhere for five minutes straight is sleeping, and
sleeping in the kitchen is an anomaly worth reporting. This script
exercises the rule table, the sleep rewrite, and the flag report.
"""

from homeactivity import fusion

rules = fusion.load_default_rules()

print("the same posture in different contexts:")
for basic, room, appliances in [
    ("Sit", "Hall", frozenset()),
    ("Sit", "Hall", frozenset({"tv"})),
    ("Sit", "Kitchen", frozenset({"water_bottle"})),
    ("Jog", "Kitchen", frozenset()),
    ("Lie", "Worship", frozenset()),
]:
    d = rules.fuse(basic, room, appliances)
    extra = "" if d.flag == "Normal" else f"  [{d.flag}]"
    on = f" + {sorted(appliances)}" if appliances else ""
    print(f"  {basic:<5} in {room:<8}{on:<20} -> {d.name}{extra}")

# The classifier never says "Sleep"; lying still for at least five
# minutes of ticks is rewritten to Sleep before fusing.
tick_ms = 5000
timeline = [(i * tick_ms, "Lie") for i in range(72)]          # six minutes
timeline += [(360_000 + i * tick_ms, "Walk") for i in range(12)]
timeline += [(420_000 + i * tick_ms, "Lie") for i in range(24)]  # two minutes
with_sleep = fusion.derive_sleep(timeline, tick_ms=tick_ms)
labels = [basic for _, basic in with_sleep]
print(f"\nsleep rewrite: first run -> {labels[0]}, "
      f"short run at the end stays {labels[-1]}")

# Fuse each tick in a fixed context and pull out the non-Normal runs.
derived = [(ts, rules.fuse(basic, "Kitchen", frozenset())) for ts, basic in with_sleep]
print("\nflagged stretches in the kitchen:")
for start, end, flag in fusion.flag_stream(derived, tick_ms=tick_ms):
    print(f"  [{start:>6}, {end:>6}) {flag}")
