#!/usr/bin/env python3
"""Regenerates data/demo_catalog.json (the small bundled asset registry)."""
import json
import math
import sys

FPS = 30
N = 120


def clip(clip_id, segments, velocity_fn):
    traj = []
    pos = [0.0, 0.0, 0.0]
    heading = 0.0
    for f in range(N):
        traj.append({"position": [round(pos[0], 6), 0.0, round(pos[2], 6)], "heading": round(heading, 6)})
        vx, vz, dh = velocity_fn(f)
        pos[0] += vx / FPS
        pos[2] += vz / FPS
        heading += dh / FPS
    return {
        "id": clip_id,
        "fps": FPS,
        "n_frames": N,
        "action_segments": [{"start": a, "end": b, "action": s} for a, b, s in segments],
        "root_trajectory": traj,
    }


def human(gender, scale):
    def cap(part, p0, p1, r):
        return {"part": part,
                "capsule": {"p0": [round(c * scale, 4) for c in p0],
                            "p1": [round(c * scale, 4) for c in p1],
                            "radius": round(r * scale, 4)}}
    parts = [
        cap("left_leg", [-0.1, 0.08, 0.0], [-0.1, 0.85, 0.0], 0.08),
        cap("right_leg", [0.1, 0.08, 0.0], [0.1, 0.85, 0.0], 0.08),
        cap("torso", [0.0, 0.95, 0.0], [0.0, 1.40, 0.0], 0.17),
        cap("left_arm", [-0.28, 0.90, 0.0], [-0.24, 1.40, 0.0], 0.06),
        cap("right_arm", [0.28, 0.90, 0.0], [0.24, 1.40, 0.0], 0.06),
        cap("head", [0.0, 1.58, 0.0], [0.0, 1.66, 0.0], 0.11),
    ]
    return {"gender": gender, "body_extent": [round(0.68 * scale, 4), round(1.77 * scale, 4), round(0.34 * scale, 4)],
            "collider_parts": parts}


def main(out):
    objects = [
        ("chair_01", "chair", "folding chair", [0.5, 0.9, 0.5], ["wood", "metal"], "c_brown"),
        ("table_01", "table", "dining table", [1.2, 0.75, 0.8], ["wood", "glass"], "c_brown"),
        ("vase_01", "vase", "vase", [0.2, 0.28, 0.2], ["ceramic", "glass"], "c_white"),
        ("lamp_01", "lamp", "table lamp", [0.3, 0.6, 0.3], ["metal", "glass"], "c_black"),
        ("box_01", "box", "carton", [0.4, 0.3, 0.4], ["cardboard"], "c_brown"),
        ("mug_01", "mug", "coffee mug", [0.1, 0.12, 0.1], ["ceramic"], "c_white"),
        ("bookshelf_01", "bookshelf", "bookcase", [0.9, 1.6, 0.35], ["wood"], "c_brown"),
        ("stool_01", "stool", "stool", [0.35, 0.45, 0.35], ["wood", "metal"], "c_black"),
        ("bottle_01", "bottle", "water bottle", [0.08, 0.28, 0.08], ["glass"], "c_green"),
        ("sofa_01", "sofa", "studio couch", [1.6, 0.85, 0.8], ["wood"], "c_blue"),
        ("teapot_01", "teapot", "teapot", [0.25, 0.2, 0.18], ["ceramic", "metal"], "c_white"),
        ("umbrella_stand_01", "umbrella stand", "umbrella", [0.3, 0.7, 0.3], ["metal"], "c_black"),
    ]

    def size_class(ext):
        m = max(ext)
        return "small" if m < 0.3 else "medium" if m < 1.0 else "large"

    catalog = {
        "catalog_version": 1,
        "objects": [
            {"id": i, "noun": n, "category_label": c, "size_class": size_class(e), "base_extent": e,
             "allowed_material_families": f, "default_color": d}
            for i, n, c, e, f, d in objects
        ],
        "materials": [
            {"id": "m_steel", "family": "metal", "name": "steel"},
            {"id": "m_brass", "family": "metal", "name": "brass"},
            {"id": "m_aluminum", "family": "metal", "name": "aluminum"},
            {"id": "m_cardboard", "family": "cardboard", "name": "cardboard"},
            {"id": "m_oak", "family": "wood", "name": "oak"},
            {"id": "m_pine", "family": "wood", "name": "pine"},
            {"id": "m_porcelain", "family": "ceramic", "name": "porcelain"},
            {"id": "m_terracotta", "family": "ceramic", "name": "terracotta"},
            {"id": "m_glass", "family": "glass", "name": "glass"},
            {"id": "m_frosted_glass", "family": "glass", "name": "frosted glass"},
        ],
        "colors": [
            {"id": "c_red", "name": "red", "rgb": [0.80, 0.10, 0.10]},
            {"id": "c_orange", "name": "orange", "rgb": [0.95, 0.55, 0.10]},
            {"id": "c_yellow", "name": "yellow", "rgb": [0.95, 0.85, 0.15]},
            {"id": "c_green", "name": "green", "rgb": [0.15, 0.65, 0.20]},
            {"id": "c_blue", "name": "blue", "rgb": [0.15, 0.30, 0.85]},
            {"id": "c_brown", "name": "brown", "rgb": [0.50, 0.32, 0.16]},
            {"id": "c_white", "name": "white", "rgb": [0.95, 0.95, 0.95]},
            {"id": "c_black", "name": "black", "rgb": [0.08, 0.08, 0.08]},
        ],
        "human_templates": [human("male", 1.03), human("female", 0.95), human("neutral", 1.0)],
        "clothing_textures": [
            {"id": "t_plain_gray", "source": "plain_color", "description_sentences": [], "tint": [0.55, 0.55, 0.55]},
            {"id": "t_plain_teal", "source": "plain_color", "description_sentences": [], "tint": [0.20, 0.55, 0.55]},
            {"id": "t_surreal_01", "source": "surreal",
             "description_sentences": ["wears a gray t-shirt and dark jeans"], "tint": [0.35, 0.37, 0.45]},
            {"id": "t_surreal_02", "source": "surreal",
             "description_sentences": ["wears a green sweater"], "tint": [0.25, 0.50, 0.28]},
            {"id": "t_mgn_01", "source": "multigarment",
             "description_sentences": ["wears a red plaid shirt", "has short brown hair", "wears blue jeans"],
             "tint": [0.70, 0.20, 0.20]},
            {"id": "t_mgn_02", "source": "multigarment",
             "description_sentences": ["wears a white hoodie with a logo", "has a short beard"],
             "tint": [0.90, 0.90, 0.88]},
        ],
        "motion_clips": [
            clip("walk_then_stand", [(0, 70, "walks forward"), (70, N, "stands still")],
                 lambda f: (0.0, 1.2, 0.0) if f < 70 else (0.0, 0.0, 0.0)),
            clip("wave_and_turn", [(0, 50, "waves with the right hand"), (50, N, "turns around")],
                 lambda f: (0.0, 0.0, 0.0) if f < 50 else (0.0, 0.0, math.pi / 2.4)),
            clip("jog_and_back", [(0, 60, "jogs forward"), (60, N, "walks backward")],
                 lambda f: (0.0, 2.0, 0.0) if f < 60 else (0.0, -0.8, 0.0)),
            clip("sidestep", [(0, 40, "stands still"), (40, 90, "steps to the side"), (90, N, "claps hands")],
                 lambda f: (0.6, 0.0, 0.0) if 40 <= f < 90 else (0.0, 0.0, 0.0)),
        ],
        "scene_envs": [
            {"id": "env_living_room", "kind": "indoor", "description": "modern living room with wooden floors",
             "floor_extent": {"x_min": -4.0, "z_min": -4.0, "x_max": 4.0, "z_max": 4.0},
             "spawn_region": {"x_min": -2.1, "z_min": -2.1, "x_max": 2.1, "z_max": 2.1}},
            {"id": "env_kitchen", "kind": "indoor", "description": "empty kitchen with tiled floors",
             "floor_extent": {"x_min": -3.5, "z_min": -3.5, "x_max": 3.5, "z_max": 3.5},
             "spawn_region": {"x_min": -2.0, "z_min": -2.0, "x_max": 2.0, "z_max": 2.0}},
            {"id": "env_park", "kind": "outdoor", "description": "open park with short green grass",
             "floor_extent": {"x_min": -10.0, "z_min": -10.0, "x_max": 10.0, "z_max": 10.0},
             "spawn_region": {"x_min": -2.2, "z_min": -2.2, "x_max": 2.2, "z_max": 2.2}},
        ],
    }
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(catalog, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/demo_catalog.json")
