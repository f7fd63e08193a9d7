"""Brute-force reference solver written directly against the model.

Every permutation of the interior nodes and every charge set is tried. For a
fixed (order, r) the arrival times come from a linear program over the time
constraints, and charging always takes the full capped gain. Shares no code
with the C++ solvers.

    python3 reference_oracle.py instance.json
"""

import itertools
import json
import sys

import numpy as np
from scipy.optimize import linprog

TOL = 1e-6


class Model:
    def __init__(self, data):
        self.nodes = data["nodes"]
        self.n = len(self.nodes)
        self.dist = data["dist"]
        self.travel = data["travel"]
        self.k_min = data["battery"]["k_min"]
        self.k_max = data["battery"]["k_max"]
        self.k_start = data["battery"]["k_start"]
        self.seps = data["separators"]
        w = data["weights"]
        self.wd, self.wt, self.wc = w["wd"], w["wt"], w["wc"]
        self.eps = data["epsilon"]

    def walk(self, u, r):
        c = self.nodes[u].get("charging")
        return r[u] * (c["walk_time"] if c else 0.0)

    def chargeable(self):
        return [u for u in range(self.n - 1) if "charging" in self.nodes[u]]

    def ranges(self, order, r):
        k = [0.0] * self.n
        gain = [0.0] * self.n
        k[order[0]] = self.k_start
        for u, v in zip(order, order[1:]):
            if r[u]:
                gain[u] = min(self.nodes[u]["charging"]["max_gain"], self.k_max - k[u])
            k[v] = k[u] + gain[u] - self.dist[u][v]
        if any(k[u] < self.k_min - TOL for u in range(self.n)):
            return None
        return k, gain

    def times(self, order, r):
        """Arrival vector minimising the time part of the objective, or None."""
        n = self.n
        a_ub, b_ub = [], []
        bounds = []
        for u, node in enumerate(self.nodes):
            w = self.walk(u, r)
            hi = node["a_max"] - node["duration"] - w
            if "fixed_arrival" in node:
                bounds.append((node["fixed_arrival"] - w, node["fixed_arrival"] - w))
            elif node["kind"] == "separator":
                pos = self.seps.index(u)
                if pos == 0:
                    row = np.zeros(n)
                    row[0], row[u] = 1.0, -1.0  # a_0 + w <= a_u
                    a_ub.append(row)
                    b_ub.append(-w)
                    bounds.append((None, hi))
                else:
                    prev = self.nodes[self.seps[pos - 1]]["a_max"]
                    bounds.append((prev + w, hi))
            else:
                bounds.append((node["a_min"] - w, hi))
        for u, v in zip(order, order[1:]):
            node = self.nodes[u]
            row = np.zeros(n)
            row[v] = -1.0
            if node["kind"] == "separator":
                rhs = -(node["a_max"] + self.walk(u, r) + self.travel[u][v])
            else:
                row[u] = 1.0
                rhs = -(node["duration"] + 2.0 * self.walk(u, r) + self.travel[u][v])
            a_ub.append(row)
            b_ub.append(rhs)
        c = np.zeros(n)
        c[0] += self.eps
        for pos, s in enumerate(self.seps):
            c[s] += self.wt
            if pos == 0:
                c[0] -= self.wt
        res = linprog(c, A_ub=np.array(a_ub), b_ub=np.array(b_ub), bounds=bounds, method="highs")
        if res.status != 0:
            return None
        a = [float(np.round(x, 6)) for x in res.x]
        return a

    def objective(self, order, r, a, k):
        obj = self.wd * sum(self.dist[u][v] for u, v in zip(order, order[1:]))
        for pos, s in enumerate(self.seps):
            ref = a[0] if pos == 0 else self.nodes[self.seps[pos - 1]]["a_max"]
            obj += self.wt * (a[s] - ref)
        obj -= self.wc * k[self.n - 1]
        obj += self.eps * sum(r[u] for u in range(self.n - 1))
        obj += self.eps * a[0]
        return obj


def solve(data):
    m = Model(data)
    interior = list(range(1, m.n - 1))
    chargeable = m.chargeable()
    zero = [0] * m.n
    best = None
    for perm in itertools.permutations(interior):
        order = [0, *perm, m.n - 1]
        if m.times(order, zero) is None:
            continue
        for bits in itertools.product((0, 1), repeat=len(chargeable)):
            r = [0] * m.n
            for u, b in zip(chargeable, bits):
                r[u] = b
            rk = m.ranges(order, r)
            if rk is None:
                continue
            a = m.times(order, r)
            if a is None:
                continue
            obj = m.objective(order, r, a, rk[0])
            if best is None or obj < best[0] - 1e-9:
                best = (obj, order, r, a, rk[0])
    return best


if __name__ == "__main__":
    with open(sys.argv[1]) as f:
        result = solve(json.load(f))
    if result is None:
        print("infeasible")
    else:
        obj, order, r, a, k = result
        print(f"objective {obj:.12f}")
        print("order", order)
        print("charge", r)
        print("arrival", a)
        print("range", [round(x, 6) for x in k])
