"""Full-stack fall detection scenario, headless.

A resident walks from the far room through the doorway into the camera's
view, collapses at t=5 s, and the persisting-laying monitor dispatches a
help call ten seconds later without any confirmation round-trip.

Run:  python3 demos/fall_watch.py
"""

from pathlib import Path

from marvin.gateway import run_scenario

root = Path(__file__).resolve().parent.parent
result = run_scenario(root / "scenarios" / "fall_detection.scn", seed=42)

print(f"scenario {result.scenario}: {'PASS' if result.passed else 'FAIL'} "
      f"({result.sim_time:.0f} s simulated in {result.wall_time:.1f} s)\n")
print("event log:")
for event in result.events:
    line = f"  {event.stamp:6.2f}  {event.name}"
    if event.data:
        line += f"  {event.data}"
    print(line)
print("\nassertions:")
for check in result.checks:
    print(f"  [{'PASS' if check.passed else 'FAIL'}] {check.description} "
          f"({check.detail})")
