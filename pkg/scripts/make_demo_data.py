#!/usr/bin/env python3
"""Generate a small demo dataset: a poster-like stimulus PNG and a gaze CSV
for four participants with distinct viewing habits.

    python3 scripts/make_demo_data.py demo/
    gazemine detect demo/stimulus.png --cell-size 8 --colors 4 -o demo/aois.json
    gazemine mine demo/gaze.csv demo/aois.json --n 2 --tau 6 -o demo/table.json
    gazemine layout demo/table.json demo/aois.json --patterns AB --seed 7 \
        -o demo/graph.svg --image demo/stimulus.png
"""

import os
import random
import sys

import numpy as np
from PIL import Image

BLOCKS = [
    ((40, 40, 280, 160), (202, 60, 60)),     # headline
    ((40, 260, 280, 420), (60, 96, 190)),    # left column
    ((360, 260, 600, 420), (60, 150, 80)),   # right column
    ((360, 40, 600, 160), (220, 170, 60)),   # hero picture
]


def write_stimulus(path: str) -> None:
    px = np.full((480, 640, 3), 245, dtype=np.uint8)
    for (x0, y0, x1, y1), color in BLOCKS:
        px[y0:y1, x0:x1] = color
    Image.fromarray(px).save(path)


def write_gaze(path: str) -> None:
    rng = random.Random(42)
    centers = [((x0 + x1) / 2, (y0 + y1) / 2) for (x0, y0, x1, y1), _ in BLOCKS]
    # visit orders: readers go headline -> left -> right; skimmers bounce
    plans = {
        "P1": [0, 1, 2, 0, 1, 2, 3],
        "P2": [0, 1, 2, 0, 1, 2, 3],
        "P3": [0, 3, 2, 3, 0, 3, 1],
        "P4": [3, 2, 1, 0, 3, 2, 1],
    }
    rows = ["participant,t,x,y"]
    for participant, plan in plans.items():
        t = 0
        for block in plan:
            cx, cy = centers[block]
            for _ in range(rng.randint(9, 14)):
                rows.append(f"{participant},{t},{cx + rng.uniform(-30, 30):.1f},"
                            f"{cy + rng.uniform(-25, 25):.1f}")
                t += 1
            for _ in range(rng.randint(2, 4)):  # saccade through blank space
                rows.append(f"{participant},{t},{rng.uniform(0, 639):.1f},"
                            f"{rng.uniform(200, 240):.1f}")
                t += 1
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def main() -> int:
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "demo"
    os.makedirs(out_dir, exist_ok=True)
    write_stimulus(os.path.join(out_dir, "stimulus.png"))
    write_gaze(os.path.join(out_dir, "gaze.csv"))
    print(f"wrote {out_dir}/stimulus.png and {out_dir}/gaze.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
