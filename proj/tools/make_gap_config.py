#!/usr/bin/env python3
"""Writes configs/plan_gap_2dof.json.

Three thin radial plates at yaw -45, 0 and 45 degrees block the 2 DOF rod
below a ceiling; each plate leaves a pitch gap (15, 50 and 15 degrees), so a
path between the start and goal yaw bands has to weave through all three.
"""
import json
import math
import sys

R0, R1, THICK = 0.4, 1.15, 0.03


def plate(theta_deg, a_deg, b_deg):
    boxes = []
    n = max(1, math.ceil((b_deg - a_deg) / 20))
    step = (b_deg - a_deg) / n
    th = math.radians(theta_deg)
    for i in range(n):
        a = a_deg + i * step
        m = math.radians(a + step / 2)
        rc = (R0 + R1) / 2
        boxes.append({
            "type": "box",
            "center": [round(rc * math.cos(m) * math.cos(th), 4),
                       round(rc * math.cos(m) * math.sin(th), 4),
                       round(rc * math.sin(m), 4)],
            "half_extents": [round((R1 - R0) / 2, 4), THICK,
                             round(R0 * math.tan(math.radians(step / 2)), 4)],
            "rpy": [0.0, round(-m, 6), round(th, 6)],
        })
    return boxes


def barrier(theta, gap, half=16):
    return plate(theta, -10, gap - half) + plate(theta, gap + half, 75)


fixed = [{"type": "box", "center": [0, 0, 1.03], "half_extents": [1.2, 1.2, 0.01]}]
fixed += barrier(-45, 15) + barrier(0, 50) + barrier(45, 15)

config = {
    "description": "2 DOF rod robot threading three radial barriers through gaps",
    "seed": 1,
    "robot": {"type": "dof2", "rod_length": 1.0, "radius": 0.05},
    "obstacles": {"count": 0, "fixed": fixed},
    "fastron": {"gamma": 30, "beta": 100, "iter_max": 5000, "max_support": 1500,
                "initial_samples": 2000},
    "planner": {"algorithm": "rrt_connect", "edge_resolution": 0.05, "step_size": 0.2,
                "goal_bias": 0.05, "max_iterations": 20000,
                "start_region": {"min": [-0.6, -1.0], "max": [-0.35, -0.3]},
                "goal_region": {"min": [0.35, -1.0], "max": [0.6, -0.3]}},
    "eval": {"test_points": 10000},
    "thresholds": {"min_certified_fraction": 1.0, "proxy_not_slower": True},
}

text = json.dumps(config, indent=2)
# One obstacle per line.
for box in fixed:
    pretty = json.dumps(box, indent=2).replace("\n", "\n      ")
    text = text.replace(pretty, json.dumps(box))
out = sys.argv[1] if len(sys.argv) > 1 else "configs/plan_gap_2dof.json"
with open(out, "w") as f:
    f.write(text + "\n")
