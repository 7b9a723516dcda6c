"""Independent reference computations used by the tests.

Each function here is written from the formula directly, in plain Python,
without reusing any code path of the package.
"""
from collections import deque
from fractions import Fraction
import math


def luma(r, g, b):
    return math.floor(Fraction(299 * r + 587 * g + 114 * b, 1000))


def pack_row(bits):
    """Pack one row of 0/1 values MSB first, padding the last byte with zeros."""
    out = []
    for i in range(0, len(bits), 8):
        chunk = list(bits[i:i + 8]) + [0] * (8 - len(bits[i:i + 8]))
        byte = 0
        for b in chunk:
            byte = byte * 2 + (1 if b else 0)
        out.append(byte)
    return bytes(out)


def t_sigma(g_min, t_fixed, t_min):
    """Piecewise form of the dynamic tolerance."""
    if g_min - t_min <= t_fixed:
        return t_fixed
    return t_fixed + 2 * (g_min - t_min - t_fixed)


def is_background(g_min, spread, t_fixed, t_min):
    return g_min > t_min and spread < t_sigma(g_min, t_fixed, t_min)


def trunc_div(a, b):
    """Rational division truncated toward zero (operands here are nonnegative)."""
    return math.trunc(Fraction(a, b))


def profile_stats(heights):
    n = len(heights)
    mu = trunc_div(sum(heights), n)
    tau = trunc_div(sum(abs(mu - h) for h in heights), n)
    return mu, tau


def flood_fill_labels(grid, width, height):
    """8-connected labelling of cells < 255 by breadth-first search.

    ``grid`` is a list of rows. Returns a dict ``(x, y) -> label``.
    """
    labels = {}
    next_label = 0
    for y in range(height):
        for x in range(width):
            if grid[y][x] >= 255 or (x, y) in labels:
                continue
            labels[(x, y)] = next_label
            queue = deque([(x, y)])
            while queue:
                cx, cy = queue.popleft()
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        nx, ny = cx + dx, cy + dy
                        if 0 <= nx < width and 0 <= ny < height and (nx, ny) not in labels \
                                and grid[ny][nx] < 255:
                            labels[(nx, ny)] = next_label
                            queue.append((nx, ny))
            next_label += 1
    return labels


def same_partition(a, b):
    """True when two pixel->label maps describe the same partition."""
    if a.keys() != b.keys():
        return False
    fwd, back = {}, {}
    for p, la in a.items():
        lb = b[p]
        if fwd.setdefault(la, lb) != lb or back.setdefault(lb, la) != la:
            return False
    return True


def count_components_8(mask):
    grid = [[0 if v else 255 for v in row] for row in mask]
    labels = flood_fill_labels(grid, len(mask[0]), len(mask))
    return len(set(labels.values()))
