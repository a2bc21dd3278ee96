"""Independent brute-force oracle for the 3/3/3 exemplar instance.

Enumerates every map user -> vehicle, keeps those respecting capacities
(empty vehicles <= 2 users, one-order vehicles <= 1 user) and, for empty
vehicles holding two users, both pickup orders.
"""
import itertools

empty = [(86.97, 35.86), (85.23, 36.74), (95.62, 28.43)]
one = [(90.55, 35.17), (101.43, 44.49), (100.56, 44.77)]
users = [(90.33, 35.82), (97.04, 41.87), (100.91, 42.75)]


def d(a, b):
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


best = None
count = 0
m, n, p = len(empty), len(one), len(users)
for owner in itertools.product(range(m + n), repeat=p):
    load = [owner.count(v) for v in range(m + n)]
    if any(load[v] > 2 for v in range(m)) or any(load[m + v] > 1 for v in range(n)):
        continue
    variants = [[]]
    for v in range(m):
        us = [u for u in range(p) if owner[u] == v]
        if len(us) == 1:
            variants = [c + [d(empty[v], users[us[0]])] for c in variants]
        elif len(us) == 2:
            a, b = us
            variants = [c + [o] for c in variants for o in (
                d(empty[v], users[a]) + d(users[a], users[b]),
                d(empty[v], users[b]) + d(users[b], users[a]))]
    for v in range(n):
        us = [u for u in range(p) if owner[u] == m + v]
        if us:
            variants = [c + [d(one[v], users[us[0]])] for c in variants]
    for c in variants:
        count += 1
        cost = sum(c)
        if best is None or cost < best:
            best = cost
print("feasible assignments:", count)
print("optimum: %.17g" % best)
