import math
COMMENT = "Surgery fixture: test unknot T (vertical figure-eight) over the clasp L1, L2 of clasp.json except at q1 under L2, q2 under L1, q3 under L2, q4 under L1, q5 under L2, q6 under L1; a is the contractible degree-0 chord from L2 to L1 with augmentation value 1, r is the order-reversing chord"
N = 32
def eight(cx, cy, sx, sy, phase=0.05):
    return [(cx + sx * 2 * math.sin(t), cy + sy * math.sin(2 * t)) for t in [2 * math.pi * i / N + phase for i in range(N)]]
def veight(cx, cy, sx, sy, phase=0.05):
    return [(cx + sx * math.sin(2 * t), cy + sy * 2 * math.sin(t)) for t in [2 * math.pi * i / N + phase for i in range(N)]]
COMPONENTS = {"T": veight(1.5, 0.2, 0.8, 0.9), "L1": eight(0, 0, 1, 1), "L2": eight(3, 0, 1, 1.3)}
NAMES = ["q0", "q1", "q2", "q3", "t", "q4", "q5", "q6", "q7", "r", "a", "s1", "s2"]
CONTRACTIBLE = ["a"]
SMOOTH = ["a"]
UNDER = {'q1': 'L2', 'q2': 'L1', 'q3': 'L2', 'q4': 'L1', 'q5': 'L2', 'q6': 'L1'}
def SELECT(r):
    tl = [k for k, p in r["pair"].items() if "T" in p and len(p) == 2]
    want = {k: UNDER.get(k, "T") for k in tl}
    return r["over"]["a"] == "L1" and r["over"]["r"] == "L2" and all(r["over"][k] == v for k, v in want.items())
