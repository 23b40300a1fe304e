#!/usr/bin/env python3
"""Regenerates the bundled scenario files in scenarios/.

    python3 tools/make_scenarios.py [out_dir]
"""

import math
import sys
from pathlib import Path

TABLE1_CABLES = [8.3, 7.0, 8.6, 8.8, 8.3, 8.5, 8.4, 7.7, 8.3, 7.3]
THREE_CABLES = [8.3, 7.0, 8.6]
SOFT_BARRIER = "eps_t = 0.5\neps_s = 0.5\n"


def smootherstep(u):
    u = min(max(u, 0.0), 1.0)
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0)


def narrowing(s, start, length, wide, narrow, taper):
    """Half-width along arc s: wide, tapering to narrow over `taper`, holding for `length`."""
    if s < start - taper or s > start + length + taper:
        return wide
    if s < start:
        return wide + (narrow - wide) * (s - (start - taper)) / taper
    if s <= start + length:
        return narrow
    return narrow + (wide - narrow) * (s - (start + length)) / taper


def fmt(v):
    return f"{v:.6g}"


def points_line(pts):
    return "; ".join(f"{fmt(x)} {fmt(y)}" for x, y in pts)


def header(name, duration, extra=""):
    return (
        f"# {name}\n"
        f"name = {name}\n"
        "dt = 0.001\n"
        f"duration = {duration}\n"
        "sim_mode = closed_loop\n"
        "controller_mode = dissipative\n"
        "observer_mode = estimate\n"
        "output_stride = 10\n"
        f"{extra}"
    )


def tube_block(pts, widths, resample):
    return (
        "\n[tube]\n"
        f"centerline = {points_line(pts)}\n"
        f"half_widths = {' '.join(fmt(w) for w in widths)}\n"
        f"resample_count = {resample}\n"
    )


def formation_block(cables, load_mass, load_xy, tray_height, max_tension=20.0):
    return (
        "\n[load]\n"
        f"position = {fmt(load_xy[0])} {fmt(load_xy[1])} 0\n"
        f"mass = {fmt(load_mass)}\n"
        "\n[formation]\n"
        f"uav_count = {len(cables)}\n"
        "node_radius = 3\n"
        "phase = 0\n"
        "uav_mass = 2\n"
        f"cable_lengths = {' '.join(fmt(c) for c in cables)}\n"
        "stiffness = 5000\n"
        "damping = 50\n"
        f"max_tension = {fmt(max_tension)}\n"
        "\n[intermediate]\n"
        f"tray_height = {fmt(tray_height)}\n"
        "rest_lengths = from_initial\n"
        "connection = default\n"
    )


def ellipse_points(count, a, b):
    """Points on an ellipse with semi-axes a (along x) and b, evenly spaced in arc length."""
    fine = 20000
    pts = [(a * math.cos(2 * math.pi * k / fine), b * math.sin(2 * math.pi * k / fine)) for k in range(fine + 1)]
    arc = [0.0]
    for k in range(1, len(pts)):
        arc.append(arc[-1] + math.dist(pts[k], pts[k - 1]))
    out, j = [], 0
    for i in range(count):
        target = arc[-1] * i / count
        while arc[j + 1] < target:
            j += 1
        u = (target - arc[j]) / (arc[j + 1] - arc[j])
        out.append((pts[j][0] + u * (pts[j + 1][0] - pts[j][0]), pts[j][1] + u * (pts[j + 1][1] - pts[j][1])))
    return out


def ellipse_equilibrium(cables, load_mass, a, b, stiffness, g=9.81):
    """UAV offsets from the load for an elliptical formation in which every cable
    carries the same tension and the horizontal components cancel."""
    base = ellipse_points(len(cables), a, b)
    shift = (0.0, 0.0)
    tension = load_mass * g / len(cables)
    for _ in range(100):
        stretched = [c + tension / stiffness for c in cables]
        weights = [1.0 / s for s in stretched]
        shift = (
            sum(w * p[0] for w, p in zip(weights, base)) / sum(weights),
            sum(w * p[1] for w, p in zip(weights, base)) / sum(weights),
        )
        offsets = [(p[0] - shift[0], p[1] - shift[1]) for p in base]
        heights = [math.sqrt(s * s - o[0] ** 2 - o[1] ** 2) for s, o in zip(stretched, offsets)]
        tension = load_mass * g / sum(h / s for h, s in zip(heights, stretched))
    return [(o[0], o[1], h) for o, h in zip(offsets, heights)], tension


def explicit_block(cables, load_mass, load_xy, tray_height, a, b, stiffness, damping,
                   max_tension=20.0, uav_mass=2.0):
    offsets, _ = ellipse_equilibrium(cables, load_mass, a, b, stiffness)
    text = (
        "\n[load]\n"
        f"position = {fmt(load_xy[0])} {fmt(load_xy[1])} 0\n"
        f"mass = {fmt(load_mass)}\n"
    )
    for (ox, oy, oz), c in zip(offsets, cables):
        text += (
            "\n[uav]\n"
            f"position = {load_xy[0] + ox:.12g} {load_xy[1] + oy:.12g} {oz:.12g}\n"
            f"mass = {fmt(uav_mass)}\n"
            f"rest_length = {fmt(c)}\n"
            f"stiffness = {fmt(stiffness)}\n"
            f"damping = {fmt(damping)}\n"
            f"max_tension = {fmt(max_tension)}\n"
        )
    text += (
        "\n[intermediate]\n"
        f"tray_height = {fmt(tray_height)}\n"
        "rest_lengths = from_initial\n"
        "connection = default\n"
    )
    return text


def controller_block(extra=""):
    return (
        "\n[controller]\n"
        "k1 = 1\nk2 = 1\nk3 = 1\nv_m = 1.5\nr_s = 0.4\n"
        f"{extra}"
        "\n[low_level]\n"
        "kp = 2\nki = 0.1\nkd = 0.1\nintegral_limit = 2\nthrust_limit = 60\n"
        "observer_bandwidth = 20\n"
    )


def straight(length, half_width):
    return [(0.0, 0.0), (length, 0.0)], [half_width, half_width]


def single_narrowing():
    # 8 m wide, tapering to 2.4 m between x = 15 and 22.
    xs = [0.0, 10.0, 15.0, 22.0, 27.0, 45.0]
    ws = [4.0, 4.0, 1.2, 1.2, 4.0, 4.0]
    return [(x, 0.0) for x in xs], ws


def s_curve():
    # Straight run, S-bend from x = 20 to 40 (lateral offset 12 m), straight run.
    # The narrowings sit on the straight parts; the bend keeps the full width.
    pts, widths = [], []
    x = 0.0
    while x <= 58.0 + 1e-9:
        pts.append((x, 12.0 * smootherstep((x - 20.0) / 20.0)))
        x += 0.05
    arc = 0.0
    for k, p in enumerate(pts):
        if k:
            arc += math.dist(p, pts[k - 1])
        w = min(narrowing(arc, 12.0, 3.0, 4.0, 1.5, 4.0), narrowing(arc, 49.5, 3.0, 4.0, 1.5, 4.0))
        widths.append(w)
    return pts, widths


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "scenarios"
    out.mkdir(parents=True, exist_ok=True)
    files = {}

    pts, ws = single_narrowing()
    files["table1_ten_uav.scn"] = (
        header("table1_ten_uav", 60)
        + tube_block(pts, ws, 451)
        + explicit_block(TABLE1_CABLES, 18.0, (4.0, 0.0), 60.0, 2.2, 0.65, 500.0, 50.0)
        + controller_block(SOFT_BARRIER)
    )
    files["narrowing_three_uav.scn"] = (
        header("narrowing_three_uav", 60)
        + tube_block(pts, ws, 451)
        + explicit_block(THREE_CABLES, 4.5, (4.0, 0.0), 60.0, 2.2, 0.65, 500.0, 50.0)
        + controller_block(SOFT_BARRIER)
    )

    pts, ws = s_curve()
    files["s_curve_ten_uav.scn"] = (
        header("s_curve_ten_uav", 90)
        + tube_block(pts, ws, 626)
        + formation_block(TABLE1_CABLES, 18.0, (4.0, 0.0), 20.0)
        + controller_block(SOFT_BARRIER)
    )
    files["s_curve_three_uav.scn"] = (
        header("s_curve_three_uav", 90)
        + tube_block(pts, ws, 626)
        + explicit_block(THREE_CABLES, 4.5, (4.0, 0.0), 60.0, 2.2, 0.65, 500.0, 50.0)
        + controller_block(SOFT_BARRIER)
    )

    pts, ws = straight(30.0, 4.0)
    files["straight_three_uav.scn"] = (
        header("straight_three_uav", 60)
        + tube_block(pts, ws, 601)
        + formation_block(THREE_CABLES, 4.5, (4.0, 0.0), 20.0)
        + controller_block(SOFT_BARRIER)
    )
    files["straight_ten_uav.scn"] = (
        header("straight_ten_uav", 60)
        + tube_block(pts, ws, 601)
        + formation_block(TABLE1_CABLES, 18.0, (4.0, 0.0), 20.0)
        + controller_block(SOFT_BARRIER)
    )

    for name, text in files.items():
        (out / name).write_text(text)
        print(out / name)


if __name__ == "__main__":
    main()
