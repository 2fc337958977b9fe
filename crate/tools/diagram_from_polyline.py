#!/usr/bin/env python3
"""Build a diagram JSON file from a planar polyline drawing.

The drawing is a dict of closed polylines, one per link component, in
traversal order. The script finds the crossings, numbers their ports
counterclockwise (port 0 = first strand's exit), links the edges, and then
searches over upper/lower strand choices for heights that make every bounded
face have positive area (area = signed sum of corner heights). Heights come
from a small integer program minimizing their sum, with optional pinned
values.

Usage: diagram_from_polyline.py SPEC.py OUT.json [--choice N | --all] [--plot OUT.png]

With --all every selected choice i is written to OUT_i.json.

SPEC.py defines:
  COMPONENTS = {"K": [(x, y), ...], ...}
  NAMES      = optional list of crossing ids (in detection order)
  UPPER      = optional {crossing_id: 0|1}  (parity of upper strand ports)
  PIN        = optional {crossing_id: height}
  WEIGHT     = optional {crossing_id: objective weight}
  DEGREE     = optional {crossing_id: 0|1}
  CONTRACTIBLE = optional list of crossing ids
  COMMENT    = provenance note
  SMOOTH     = optional list of crossing ids (or callable(over, pair) -> list)
               whose smoothing must leave every bounded face positive
  PREFILTER  = optional callable(over, pair) -> bool, applied before the
               height search to skip choices cheaply
  SELECT     = optional callable(candidate dict) -> bool to filter choices;
               the dict has "upper", "heights", "writhe", "over" (crossing id ->
               component of the upper strand) and "pair" (crossing id -> set of
               components meeting there)
"""
import itertools
import json
import math
import sys
from fractions import Fraction

import numpy as np
from scipy.optimize import milp, LinearConstraint, Bounds


def seg_intersect(p, p2, q, q2):
    r = (p2[0] - p[0], p2[1] - p[1])
    s = (q2[0] - q[0], q2[1] - q[1])
    den = r[0] * s[1] - r[1] * s[0]
    if abs(den) < 1e-12:
        return None
    qp = (q[0] - p[0], q[1] - p[1])
    t = (qp[0] * s[1] - qp[1] * s[0]) / den
    u = (qp[0] * r[1] - qp[1] * r[0]) / den
    eps = 1e-9
    if eps < t < 1 - eps and eps < u < 1 - eps:
        return t, u
    return None


def build(spec):
    comps = spec["COMPONENTS"]
    names = list(comps)
    segs = []  # (comp, index, p, q)
    for cname in names:
        pts = comps[cname]
        for i in range(len(pts)):
            segs.append((cname, i, pts[i], pts[(i + 1) % len(pts)]))
    crossings = []  # list of dict(passes=[(comp, param, dir)], point)
    for a, b in itertools.combinations(range(len(segs)), 2):
        ca, ia, p, p2 = segs[a]
        cb, ib, q, q2 = segs[b]
        if ca == cb:
            n = len(comps[ca])
            if abs(ia - ib) in (1, n - 1):
                continue
        hit = seg_intersect(p, p2, q, q2)
        if hit is None:
            continue
        t, u = hit
        pt = (p[0] + t * (p2[0] - p[0]), p[1] + t * (p2[1] - p[1]))
        da = np.array(p2) - np.array(p)
        db = np.array(q2) - np.array(q)
        crossings.append({
            "point": pt,
            "passes": [(ca, ia + t, da / np.linalg.norm(da)), (cb, ib + u, db / np.linalg.norm(db))],
        })
    n = len(crossings)
    ids = spec.get("NAMES") or [f"x{i}" for i in range(n)]
    assert len(ids) == n, f"found {n} crossings, NAMES has {len(ids)}"
    # ports
    for c in crossings:
        dirs = []
        for k, (_, _, d) in enumerate(c["passes"]):
            dirs.append(("out", k, math.atan2(d[1], d[0])))
            dirs.append(("in", k, math.atan2(-d[1], -d[0])))
        base = dirs[0][2]
        dirs.sort(key=lambda x: (x[2] - base) % (2 * math.pi))
        c["port"] = {(kind, k): i for i, (kind, k, _) in enumerate(dirs)}
        c["strand_parity"] = [c["port"][("out", k)] % 2 for k in range(2)]
    # passes along components
    along = {cn: [] for cn in names}
    for ci, c in enumerate(crossings):
        for k, (cn, par, _) in enumerate(c["passes"]):
            along[cn].append((par, ci, k))
    edges = []
    geometry = {}  # dart (c, port) -> list of points from crossing to next crossing
    for cn in names:
        seq = sorted(along[cn])
        pts = comps[cn]
        m = len(pts)
        for j, (par, ci, k) in enumerate(seq):
            par2, cj, k2 = seq[(j + 1) % len(seq)]
            a = (ci, crossings[ci]["port"][("out", k)])
            b = (cj, crossings[cj]["port"][("in", k2)])
            edges.append({"from": [ids[a[0]], a[1]], "to": [ids[b[0]], b[1]], "component": cn})
            # geometry
            path = [crossings[ci]["point"]]
            s = math.floor(par) + 1
            end = par2 if par2 > par or len(seq) > 1 and par2 > par else par2 + m
            if len(seq) == 1 or par2 <= par:
                end = par2 + m
            idx = s
            while idx < end:
                path.append(tuple(pts[idx % m]))
                idx += 1
            path.append(crossings[cj]["point"])
            geometry[a] = path
            geometry[b] = list(reversed(path))
    partner = {}
    for e in edges:
        a = (ids.index(e["from"][0]), e["from"][1])
        b = (ids.index(e["to"][0]), e["to"][1])
        partner[a] = b
        partner[b] = a
    # faces: leave via port k, corner quadrant k; arrive p -> leave p-1
    face_of = {}
    faces = []
    for c in range(n):
        for k in range(4):
            if (c, k) in face_of:
                continue
            fid = len(faces)
            corners = []
            poly = []
            cur = (c, k)
            while cur not in face_of:
                face_of[cur] = fid
                corners.append(cur)
                poly.extend(geometry[cur][:-1])
                arr = partner[cur]
                cur = (arr[0], (arr[1] + 3) % 4)
            area = 0.0
            for i in range(len(poly)):
                x1, y1 = poly[i]
                x2, y2 = poly[(i + 1) % len(poly)]
                area += x1 * y2 - x2 * y1
            faces.append({"corners": corners, "geo_area": area / 2})
    return crossings, ids, edges, faces, partner


def over_map(crossings, ids, choice):
    over, pair = {}, {}
    for j, c in enumerate(crossings):
        here = [cn for cn, _, _ in c["passes"]]
        k = [k for k in range(2) if c["strand_parity"][k] == choice[j]][0]
        over[ids[j]] = here[k]
        pair[ids[j]] = frozenset(here)
    return over, pair


def solve(spec, crossings, ids, faces):
    n = len(crossings)
    pin = spec.get("PIN", {})
    weight = spec.get("WEIGHT", {})
    upper_fixed = spec.get("UPPER", {})
    smooth = spec.get("SMOOTH", [])
    prefilter = spec.get("PREFILTER", lambda over, pair: True)
    bounded = [f for f in faces if f["geo_area"] > 0]
    results = []
    for choice in itertools.product([0, 1], repeat=n):
        if any(choice[ids.index(k)] != v for k, v in upper_fixed.items()):
            continue
        over, pair = over_map(crossings, ids, choice)
        if not prefilter(over, pair):
            continue
        A = []
        rows = {}
        for fi, f in enumerate(faces):
            row = np.zeros(n)
            for (c, q) in f["corners"]:
                row[c] += 1 if q % 2 == choice[c] else -1
            rows[fi] = row
            if f["geo_area"] > 0:
                A.append(row)
        # Smoothing a crossing joins the faces at its positive corners and
        # drops both corners; keep that merged face positive too.
        for sid in (smooth(over, pair) if callable(smooth) else smooth):
            c = ids.index(sid)
            pos = {fi for fi, f in enumerate(faces) for (cc, q) in f["corners"] if cc == c and q % 2 == choice[c]}
            if any(faces[fi]["geo_area"] <= 0 for fi in pos):
                continue
            row = sum(rows[fi] for fi in pos)
            row[c] -= 2
            A.append(row)
        A = np.array(A)
        lo = np.ones(n)
        hi = np.full(n, 1000.0)
        for k, v in pin.items():
            lo[ids.index(k)] = hi[ids.index(k)] = v
        cost = np.array([weight.get(ids[i], 1.0) for i in range(n)])
        res = milp(cost, constraints=[LinearConstraint(A, lb=np.ones(len(A)), ub=np.inf)],
                   integrality=np.ones(n), bounds=Bounds(lo, hi))
        if res.status == 0:
            h = [int(round(x)) for x in res.x]
            results.append({"upper": choice, "heights": h, "over": over, "pair": pair})
    return results


def writhe_sign(c, upper):
    # lower strand exit is upper exit + 1 -> positive
    up_k = [k for k in range(2) if c["strand_parity"][k] == upper][0]
    lo_k = 1 - up_k
    up_out = c["port"][("out", up_k)]
    lo_out = c["port"][("out", lo_k)]
    return 1 if lo_out == (up_out + 1) % 4 else -1


def write(spec, crossings, ids, edges, r, out):
    deg = spec.get("DEGREE", {})
    recs = []
    for i, c in enumerate(crossings):
        u = r["upper"][i]
        rec = {"id": ids[i], "height": f"{r['heights'][i]}/1",
               "quadrants": ["+" if k % 2 == u else "-" for k in range(4)]}
        if ids[i] in deg:
            rec["degree_data"] = deg[ids[i]]
        recs.append(rec)
    doc = {
        "comment": spec.get("COMMENT", ""),
        "components": list(spec["COMPONENTS"]),
        "crossings": recs,
        "edges": edges,
        "contractible": spec.get("CONTRACTIBLE", []),
    }
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def main():
    spec_path, out = sys.argv[1], sys.argv[2]
    spec = {}
    exec(open(spec_path).read(), spec)
    crossings, ids, edges, faces, partner = build(spec)
    results = solve(spec, crossings, ids, faces)
    select = spec.get("SELECT")
    print(f"{len(crossings)} crossings, {len(faces)} faces, {len(results)} realizable upper choices")
    for r in results:
        r["writhe"] = sum(writhe_sign(c, r["upper"][i]) for i, c in enumerate(crossings))
    if select:
        results = [r for r in results if select(r)]
    for i, r in enumerate(results):
        over = [f"{k}:{v}" for k, v in r["over"].items() if len(r["pair"][k]) == 2]
        print(f"  [{i}] upper", r["upper"], "heights", r["heights"], "writhe", r["writhe"], "over", " ".join(over))
    if not results:
        sys.exit("no realizable choice")
    if "--all" in sys.argv:
        for i, r in enumerate(results):
            write(spec, crossings, ids, edges, r, out.replace(".json", f"_{i}.json"))
    else:
        r = results[int(sys.argv[sys.argv.index("--choice") + 1]) if "--choice" in sys.argv else 0]
        write(spec, crossings, ids, edges, r, out)
    if "--plot" in sys.argv:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        fig, ax = plt.subplots(figsize=(8, 6))
        for cn, pts in spec["COMPONENTS"].items():
            xs = [p[0] for p in pts] + [pts[0][0]]
            ys = [p[1] for p in pts] + [pts[0][1]]
            ax.plot(xs, ys, "-", label=cn)
            for i in range(len(pts)):
                a, b = pts[i], pts[(i + 1) % len(pts)]
                ax.annotate("", xy=((a[0] + b[0]) / 2 + (b[0] - a[0]) * 0.05, (a[1] + b[1]) / 2 + (b[1] - a[1]) * 0.05),
                            xytext=((a[0] + b[0]) / 2, (a[1] + b[1]) / 2), arrowprops=dict(arrowstyle="->"))
        for i, c in enumerate(crossings):
            ax.text(c["point"][0], c["point"][1] + 0.1, ids[i], color="red")
        ax.legend()
        ax.set_aspect("equal")
        fig.savefig(sys.argv[sys.argv.index("--plot") + 1])


if __name__ == "__main__":
    main()
