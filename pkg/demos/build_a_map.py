"""Drive a tour of the home and build an occupancy map from lidar.

Run:  python3 demos/build_a_map.py
"""

from pathlib import Path

import numpy as np

from marvin.config import MarvinConfig
from marvin.gateway import run_stack
from marvin.nav.mapio import save_map
from marvin.runtime import Stack
from marvin.worldsim import UNKNOWN, load_scenario

root = Path(__file__).resolve().parent.parent
scenario = load_scenario(root / "scenarios" / "mapping_tour.scn")
stack = Stack(scenario, MarvinConfig(), seed=11)
result = run_stack(stack, scenario, seed=11)

grid = stack.mapper.state.to_occupancy()
observed = grid.cells != UNKNOWN
truth = stack.world.grid.cells
agreement = (grid.cells[observed] == truth[observed]).mean()
print(f"tour finished in {result.wall_time:.1f} s wall; "
      f"{int(observed.sum())} of {grid.cells.size} cells observed, "
      f"{agreement:.1%} agreement with ground truth\n")

symbols = {0: ".", 100: "#", UNKNOWN: " "}
for row in grid.cells[::-1]:
    print("".join(symbols[int(c)] for c in row))

out = root / "demos" / "built_home.map"
save_map(stack.mapper.state, out)
print(f"\nsaved to {out.name}; convert with: marvin map-convert {out.name} home.world")
