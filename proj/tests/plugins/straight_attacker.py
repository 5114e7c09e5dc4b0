#!/usr/bin/env python3
# Heads straight at the target: reads "t xD_x xD_y xA_x xA_y", writes "hx hy".
import math
import sys

for line in sys.stdin:
    t, dx, dy, ax, ay = map(float, line.split())
    n = math.hypot(ax, ay)
    print("1 0" if n == 0 else f"{-ax / n!r} {-ay / n!r}", flush=True)
