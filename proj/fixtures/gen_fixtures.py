#!/usr/bin/env python3
"""Regenerates the static fixture maps. Outputs are committed; rerunning
must be byte-stable."""

import os

HERE = os.path.dirname(os.path.abspath(__file__))
MAPS = os.path.join(HERE, "maps")


def write(path, text):
    with open(path, "w", newline="\n") as f:
        f.write(text)


def grid_map(cols, rows, blocks, comment):
    """blocks: list of (col0, row0, w, h), row 0 at the bottom."""
    grid = [["." for _ in range(cols)] for _ in range(rows)]
    for c0, r0, w, h in blocks:
        for r in range(r0, r0 + h):
            for c in range(c0, c0 + w):
                if 0 <= r < rows and 0 <= c < cols:
                    grid[r][c] = "#"
    lines = [comment]
    for r in range(rows - 1, -1, -1):
        lines.append("".join(grid[r]))
    return "\n".join(lines) + "\n"


def fmt(v):
    s = f"{v:.10g}"
    return s


def points_csv(points):
    lines = ["x,y,z"]
    for x, y, z in points:
        lines.append(f"{fmt(x)},{fmt(y)},{fmt(z)}")
    return "\n".join(lines) + "\n"


# Vertical wall plane across the corridor: x = 3.5, y in [-2, 2],
# z in [0, 5], 0.25 m spacing -> 17 * 21 = 357 points.
def wall3d():
    pts = []
    for iy in range(17):
        for iz in range(21):
            pts.append((3.5, -2.0 + 0.25 * iy, 0.25 * iz))
    assert len(pts) == 357
    return points_csv(pts)


# Sparse tree-like clusters near the first third of the 45 m route
# (0,0,6) -> (45,-6,8); the rest of the flight is open space.
def clusters3d():
    pts = []

    def tree(cx, cy, top):
        z = 0.0
        while z <= top:
            pts.append((cx, cy, z))
            pts.append((cx + 0.3, cy - 0.2, z))
            z += 0.5

    # straight-line y at x: y = -6x/45, z ~ 6..7 on route
    tree(6.0, -0.8, 10.0)
    tree(10.0, -1.33, 9.5)
    tree(14.0, -1.87, 10.5)
    tree(8.0, 1.2, 8.0)
    tree(12.0, -4.0, 9.0)
    return points_csv(pts)


def blocks_map():
    blocks = [
        (10, 10, 6, 6), (28, 8, 8, 5), (46, 12, 6, 8), (8, 30, 7, 6),
        (22, 20, 6, 12), (36, 28, 10, 6), (52, 30, 5, 8), (14, 44, 8, 6),
        (30, 42, 6, 10), (46, 46, 8, 5), (6, 56, 8, 6), (22, 58, 10, 5),
        (40, 58, 6, 8), (52, 12, 4, 4), (2, 20, 4, 5), (56, 44, 3, 6),
    ]
    return grid_map(60, 70, blocks,
                    "; 60x70 scattered block field for the discrete-grid "
                    "comparison runs")


def trapmaze_map():
    blocks = [
        # concave pocket opening south, in front of the (15, 50) goal;
        # mouth is 6 cells wide so a car-size turning circle cannot
        # complete inside it
        (10, 46, 10, 2),   # top wall
        (10, 38, 2, 10),   # west arm
        (18, 38, 2, 10),   # east arm
        # scattered blocks elsewhere
        (4, 20, 6, 4), (24, 16, 6, 5), (30, 36, 6, 5), (8, 60, 6, 4),
        (24, 52, 5, 5), (31, 6, 5, 5),
    ]
    return grid_map(40, 70, blocks,
                    "; 40x70 block map with a south-facing pocket on the "
                    "route to (15, 50)")


def deadcorner_map():
    blocks = [
        (5, 13, 7, 1),   # north wall
        (5, 7, 7, 1),    # south wall
        (11, 7, 1, 7),   # east wall (closed side)
    ]
    return grid_map(30, 20, blocks,
                    "; three-sided box opening west; goal lies east behind "
                    "the closed side")


def blocks2d_map():
    blocks = [
        (8, 6, 5, 5), (20, 10, 6, 5), (10, 20, 6, 6), (24, 24, 6, 5),
        (16, 30, 5, 5), (30, 16, 5, 6),
    ]
    return grid_map(40, 40, blocks,
                    "; 40x40 block layout for constrained-vehicle runs")


def smoke_map():
    blocks = [(5, 5, 2, 2)]
    return grid_map(12, 12, blocks, "; small smoke-test map")


def main():
    os.makedirs(MAPS, exist_ok=True)
    write(os.path.join(MAPS, "wall3d.csv"), wall3d())
    write(os.path.join(MAPS, "clusters3d.csv"), clusters3d())
    write(os.path.join(MAPS, "blocks.map"), blocks_map())
    write(os.path.join(MAPS, "trapmaze.map"), trapmaze_map())
    write(os.path.join(MAPS, "deadcorner.map"), deadcorner_map())
    write(os.path.join(MAPS, "blocks2d.map"), blocks2d_map())
    write(os.path.join(MAPS, "smoke.map"), smoke_map())
    print("fixtures written to", MAPS)


if __name__ == "__main__":
    main()
