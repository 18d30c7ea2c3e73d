#!/usr/bin/env python3
"""Generates the bundled crossroad fixtures under data/.

Writes the scenario JSON, spawn schedules and a small noisy trajectory
sample. Everything is deterministic; rerunning reproduces the same files.
"""

import json
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

HALF = 15.0      # central area half-extent
CAR_X = 3.5      # car lane centerline offset
BIKE_X = 6.5     # bike lane centerline offset
WALK_Y = 18.0    # crosswalk offset
ARM = 80.0       # lane length away from the center
FPS = 30.0


def scenario():
    lanes = []

    def lane(lid, a, b, width, direction, entry, kinds):
        lanes.append({
            "id": lid,
            "centerline": [list(a), list(b)],
            "width": width,
            "direction": list(direction),
            "entry_boundary_midpoint": list(entry),
            "allowed_kinds": kinds,
        })

    # Car lanes, right-hand traffic.
    lane("car_south_in", (CAR_X, -ARM), (CAR_X, -HALF), 3.5, (0, 1), (CAR_X, -HALF), ["car"])
    lane("car_north_out", (CAR_X, HALF), (CAR_X, ARM), 3.5, (0, 1), (CAR_X, HALF), ["car"])
    lane("car_north_in", (-CAR_X, ARM), (-CAR_X, HALF), 3.5, (0, -1), (-CAR_X, HALF), ["car"])
    lane("car_south_out", (-CAR_X, -HALF), (-CAR_X, -ARM), 3.5, (0, -1), (-CAR_X, -HALF), ["car"])
    lane("car_west_in", (-ARM, -CAR_X), (-HALF, -CAR_X), 3.5, (1, 0), (-HALF, -CAR_X), ["car"])
    lane("car_east_out", (HALF, -CAR_X), (ARM, -CAR_X), 3.5, (1, 0), (HALF, -CAR_X), ["car"])
    lane("car_east_in", (ARM, CAR_X), (HALF, CAR_X), 3.5, (-1, 0), (HALF, CAR_X), ["car"])
    lane("car_west_out", (-HALF, CAR_X), (-ARM, CAR_X), 3.5, (-1, 0), (-HALF, CAR_X), ["car"])

    # Bike lanes alongside.
    lane("bike_south_in", (BIKE_X, -ARM), (BIKE_X, -HALF), 1.5, (0, 1), (BIKE_X, -HALF), ["bicycle"])
    lane("bike_north_out", (BIKE_X, HALF), (BIKE_X, ARM), 1.5, (0, 1), (BIKE_X, HALF), ["bicycle"])
    lane("bike_north_in", (-BIKE_X, ARM), (-BIKE_X, HALF), 1.5, (0, -1), (-BIKE_X, HALF), ["bicycle"])
    lane("bike_south_out", (-BIKE_X, -HALF), (-BIKE_X, -ARM), 1.5, (0, -1), (-BIKE_X, -HALF), ["bicycle"])
    lane("bike_west_in", (-ARM, -BIKE_X), (-HALF, -BIKE_X), 1.5, (1, 0), (-HALF, -BIKE_X), ["bicycle"])
    lane("bike_east_out", (HALF, -BIKE_X), (ARM, -BIKE_X), 1.5, (1, 0), (HALF, -BIKE_X), ["bicycle"])
    lane("bike_east_in", (ARM, BIKE_X), (HALF, BIKE_X), 1.5, (-1, 0), (HALF, BIKE_X), ["bicycle"])
    lane("bike_west_out", (-HALF, BIKE_X), (-ARM, BIKE_X), 1.5, (-1, 0), (-HALF, BIKE_X), ["bicycle"])

    # Crosswalks, one lane per walking direction.
    lane("walk_south_e", (-24, -WALK_Y), (24, -WALK_Y), 2.0, (1, 0), (-24, -WALK_Y), ["pedestrian"])
    lane("walk_south_w", (24, -WALK_Y), (-24, -WALK_Y), 2.0, (-1, 0), (24, -WALK_Y), ["pedestrian"])
    lane("walk_north_e", (-24, WALK_Y), (24, WALK_Y), 2.0, (1, 0), (-24, WALK_Y), ["pedestrian"])
    lane("walk_north_w", (24, WALK_Y), (-24, WALK_Y), 2.0, (-1, 0), (24, WALK_Y), ["pedestrian"])
    lane("walk_west_n", (-WALK_Y, -24), (-WALK_Y, 24), 2.0, (0, 1), (-WALK_Y, -24), ["pedestrian"])
    lane("walk_west_s", (-WALK_Y, 24), (-WALK_Y, -24), 2.0, (0, -1), (-WALK_Y, 24), ["pedestrian"])
    lane("walk_east_n", (WALK_Y, -24), (WALK_Y, 24), 2.0, (0, 1), (WALK_Y, -24), ["pedestrian"])
    lane("walk_east_s", (WALK_Y, 24), (WALK_Y, -24), 2.0, (0, -1), (WALK_Y, 24), ["pedestrian"])

    ns_phases = [["green", 12], ["yellow", 3], ["red", 15]]
    ew_phases = [["red", 15], ["green", 12], ["yellow", 3]]
    lights = [
        {"stop_line": [[1.5, -HALF], [7.5, -HALF]], "phases": ns_phases,
         "applies_to": ["car_south_in", "bike_south_in"]},
        {"stop_line": [[-7.5, HALF], [-1.5, HALF]], "phases": ns_phases,
         "applies_to": ["car_north_in", "bike_north_in"]},
        {"stop_line": [[-HALF, -7.5], [-HALF, -1.5]], "phases": ew_phases,
         "applies_to": ["car_west_in", "bike_west_in"]},
        {"stop_line": [[HALF, 1.5], [HALF, 7.5]], "phases": ew_phases,
         "applies_to": ["car_east_in", "bike_east_in"]},
    ]

    return {
        "frame_rate": FPS,
        "grid_cell_size": 10.0,
        "central_area": [[-HALF, -HALF], [HALF, -HALF], [HALF, HALF], [-HALF, HALF]],
        "lanes": lanes,
        "lights": lights,
    }


# (in lane, planning) -> goal, per arm.
CAR_GOALS = {
    "car_south_in": {"straight": (CAR_X, HALF), "turn_left": (-HALF, CAR_X), "turn_right": (HALF, -CAR_X)},
    "car_north_in": {"straight": (-CAR_X, -HALF), "turn_left": (HALF, -CAR_X), "turn_right": (-HALF, CAR_X)},
    "car_west_in": {"straight": (HALF, -CAR_X), "turn_left": (CAR_X, HALF), "turn_right": (-CAR_X, -HALF)},
    "car_east_in": {"straight": (-HALF, CAR_X), "turn_left": (-CAR_X, -HALF), "turn_right": (CAR_X, HALF)},
}
BIKE_GOALS = {
    "bike_south_in": {"straight": (BIKE_X, HALF), "turn_left": (-HALF, BIKE_X), "turn_right": (HALF, -BIKE_X)},
    "bike_north_in": {"straight": (-BIKE_X, -HALF), "turn_left": (HALF, -BIKE_X), "turn_right": (-HALF, BIKE_X)},
    "bike_west_in": {"straight": (HALF, -BIKE_X), "turn_left": (BIKE_X, HALF), "turn_right": (-BIKE_X, -HALF)},
    "bike_east_in": {"straight": (-HALF, BIKE_X), "turn_left": (-BIKE_X, -HALF), "turn_right": (BIKE_X, HALF)},
}
WALK_GOALS = {
    "walk_south_e": (24, -WALK_Y), "walk_south_w": (-24, -WALK_Y),
    "walk_north_e": (24, WALK_Y), "walk_north_w": (-24, WALK_Y),
    "walk_west_n": (-WALK_Y, 24), "walk_west_s": (-WALK_Y, -24),
    "walk_east_n": (WALK_Y, 24), "walk_east_s": (WALK_Y, -24),
}


def schedule_20cars():
    plannings = ["straight", "turn_right", "straight", "turn_left", "straight"]
    speeds = [8.0, 7.0, 8.5, 7.5, 9.0]
    agents = []
    arm_offsets = {"car_south_in": 0, "car_north_in": 8, "car_west_in": 16, "car_east_in": 24}
    aid = 0
    for lane, offset in arm_offsets.items():
        for i in range(5):
            agents.append({
                "id": aid,
                "tick": offset + i * 60,
                "kind": "car",
                "lane": lane,
                "goal": list(CAR_GOALS[lane][plannings[i]]),
                "e1": speeds[i],
                "e2": speeds[i] + 3.0,
                "planning": plannings[i],
            })
            aid += 1
    return {"agents": agents}


def schedule_90mixed():
    agents = []
    aid = 0
    car_plannings = ["straight", "turn_right", "straight", "turn_left", "straight",
                     "straight", "turn_right", "straight", "turn_left", "straight"]
    car_speeds = [8.0, 6.5, 8.5, 7.0, 9.0, 7.5, 6.8, 8.2, 7.2, 8.8]
    for ai, lane in enumerate(["car_south_in", "car_north_in", "car_west_in", "car_east_in"]):
        for i in range(10):
            agents.append({
                "id": aid, "tick": ai * 10 + i * 55, "kind": "car", "lane": lane,
                "goal": list(CAR_GOALS[lane][car_plannings[i]]),
                "e1": car_speeds[i], "e2": car_speeds[i] + 3.0,
                "planning": car_plannings[i],
            })
            aid += 1
    bike_plannings = ["straight", "turn_right", "straight", "straight", "turn_left"]
    bike_speeds = [4.0, 3.5, 4.5, 4.2, 3.8]
    for ai, lane in enumerate(["bike_south_in", "bike_north_in", "bike_west_in", "bike_east_in"]):
        for i in range(5):
            agents.append({
                "id": aid, "tick": ai * 12 + i * 80, "kind": "bicycle", "lane": lane,
                "goal": list(BIKE_GOALS[lane][bike_plannings[i]]),
                "e1": bike_speeds[i], "e2": bike_speeds[i] + 1.5,
                "planning": bike_plannings[i],
            })
            aid += 1
    walk_lanes = list(WALK_GOALS.keys())
    ped_speeds = [1.3, 1.5, 1.2, 1.6]
    for i in range(30):
        lane = walk_lanes[i % len(walk_lanes)]
        agents.append({
            "id": aid, "tick": (i // len(walk_lanes)) * 150 + (i % len(walk_lanes)) * 9,
            "kind": "pedestrian", "lane": lane,
            "goal": list(WALK_GOALS[lane]),
            "e1": ped_speeds[i % 4], "e2": ped_speeds[i % 4] + 0.6,
            "planning": "straight",
        })
        aid += 1
    return {"agents": agents}


def schedule_trend():
    plannings = ["straight", "turn_right", "straight", "turn_left"]
    speeds = [8.0, 6.5, 9.0, 7.0]
    agents = []
    aid = 0
    for ai, lane in enumerate(["car_south_in", "car_north_in", "car_west_in", "car_east_in"]):
        for i in range(4):
            agents.append({
                "id": aid, "tick": ai * 12 + i * 90, "kind": "car", "lane": lane,
                "goal": list(CAR_GOALS[lane][plannings[i]]),
                "e1": speeds[i], "e2": speeds[i] + 3.0,
                "planning": plannings[i],
            })
            aid += 1
    return {"agents": agents}


# --------------------------------------------------------------------------
# Noisy sample trajectories for the denoise -> build-dataset -> simulate demo.

def arc_point(center, radius, angle):
    return (center[0] + radius * math.cos(angle), center[1] + radius * math.sin(angle))


def path_for(lane, planning):
    """Piecewise path (list of sampled points is built later by arc length)."""
    segs = []
    if lane == "car_south_in":
        approach = [(CAR_X, -55.0), (CAR_X, -HALF)]
        if planning == "straight":
            segs = [("line", approach[0], (CAR_X, 55.0))]
        elif planning == "turn_right":
            segs = [("line", approach[0], approach[1]),
                    ("arc", (HALF, -HALF), HALF - CAR_X, math.pi, math.pi / 2, -1),
                    ("line", (HALF, -CAR_X), (55.0, -CAR_X))]
        else:  # turn_left
            segs = [("line", approach[0], approach[1]),
                    ("arc", (-HALF, -HALF), HALF + CAR_X, 0.0, math.pi / 2, +1),
                    ("line", (-HALF, CAR_X), (-55.0, CAR_X))]
    return segs


def rotate90(p):
    return (-p[1], p[0])


def rotate_path(segs, quarter_turns):
    out = []
    for seg in segs:
        if seg[0] == "line":
            a, b = seg[1], seg[2]
            for _ in range(quarter_turns):
                a, b = rotate90(a), rotate90(b)
            out.append(("line", a, b))
        else:
            _, c, r, a0, a1, d = seg
            for _ in range(quarter_turns):
                c = rotate90(c)
            out.append(("arc", c, r, a0 + quarter_turns * math.pi / 2,
                        a1 + quarter_turns * math.pi / 2, d))
    return out


def sample_path(segs, speed, fps, rng, noise_sigma):
    lengths = []
    for seg in segs:
        if seg[0] == "line":
            lengths.append(math.dist(seg[1], seg[2]))
        else:
            _, c, r, a0, a1, d = seg
            lengths.append(abs(a1 - a0) * r)
    total = sum(lengths)
    n = int(total / speed * fps)
    pts = []
    for i in range(n):
        s = total * i / (n - 1)
        for seg, seg_len in zip(segs, lengths):
            if s > seg_len + 1e-9:
                s -= seg_len
                continue
            if seg[0] == "line":
                t = s / seg_len
                x = seg[1][0] + (seg[2][0] - seg[1][0]) * t
                y = seg[1][1] + (seg[2][1] - seg[1][1]) * t
            else:
                _, c, r, a0, a1, d = seg
                ang = a0 + (a1 - a0) * (s / seg_len)
                x, y = arc_point(c, r, ang)
            pts.append((x + rng.gauss(0.0, noise_sigma), y + rng.gauss(0.0, noise_sigma)))
            break
    return pts


def sample_trajectories():
    rng = random.Random(20240501)
    rows = []
    # Quarter-turn rotations of the south-arm path land on these arms in order.
    lanes = ["car_south_in", "car_east_in", "car_north_in", "car_west_in"]
    plans = ["straight", "straight", "turn_right", "turn_left", "straight"]
    speeds = [7.5, 9.0, 6.5, 7.0, 8.2]
    for ai, lane in enumerate(lanes):
        base = path_for("car_south_in", "straight")
        for i, (plan, speed) in enumerate(zip(plans, speeds)):
            segs = rotate_path(path_for("car_south_in", plan), ai)
            pts = sample_path(segs, speed, FPS, rng, 0.35)
            tid = f"v{ai * len(plans) + i:02d}"
            for frame, (x, y) in enumerate(pts):
                rows.append(f"{tid},car,{frame},{x:.6f},{y:.6f},{lane}")
        del base
    return rows


def main():
    os.makedirs(DATA, exist_ok=True)
    with open(os.path.join(DATA, "crossroad.json"), "w") as f:
        json.dump(scenario(), f, indent=1)
        f.write("\n")
    for name, sched in [("schedule_20cars.json", schedule_20cars()),
                        ("schedule_90mixed.json", schedule_90mixed()),
                        ("schedule_trend.json", schedule_trend())]:
        with open(os.path.join(DATA, name), "w") as f:
            json.dump(sched, f, indent=1)
            f.write("\n")
    with open(os.path.join(DATA, "sample_trajectories.csv"), "w") as f:
        f.write("agent_id,kind,frame,x,y,departure_lane\n")
        f.write("\n".join(sample_trajectories()))
        f.write("\n")
    print("fixtures written to", os.path.normpath(DATA))


if __name__ == "__main__":
    main()
