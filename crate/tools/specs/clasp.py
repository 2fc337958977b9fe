import math
COMMENT = "Hopf-type clasp: two figure-eight unknots whose inner lobes overlap in a lens; r and a are the two mixed crossings, L1 is over at a and L2 is over at r"
N = 32
def eight(cx, cy, sx, sy, phase=0.05):
    return [(cx + sx * 2 * math.sin(t), cy + sy * math.sin(2 * t)) for t in [2 * math.pi * i / N + phase for i in range(N)]]
COMPONENTS = {"L1": eight(0, 0, 1, 1), "L2": eight(3, 0, 1, 1.3)}
NAMES = ["r", "a", "t1", "t2"]
CONTRACTIBLE = ["a"]
SELECT = lambda r: r["over"]["a"] == "L1" and r["over"]["r"] == "L2"
SMOOTH = ["a"]
