"""Cluster-to-transportation conversion and three exact transportation solvers.

Solvers:

* :func:`solve_transportation_simplex` - northwest-corner start, MODI duals and
  stepping-stone pivots.
* :func:`solve_transportation_bruteforce` - exhaustive enumeration of integer
  flows with the required marginals.
* :func:`build_lp_model` + :func:`solve_lp_simplex` - the same problem as a
  generic equality-constrained LP, solved by a dense two-phase tableau.

All three break ties the same way: among optimal flows the lexicographically
smallest flattened matrix is returned. The brute force gets this by enumeration
order; the two simplex routes post-process their optimal vertex with
:func:`canonical_flow`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .clustering import Cluster
from .model import Position, ProblemInstance, Target, UavState, manhattan_distance


class ResourceCapError(RuntimeError):
    """A search exceeded its configured node or pivot budget."""


class UnbalancedError(ValueError):
    pass


@dataclass(frozen=True)
class Source:
    position: Position | None
    supply: int
    uav_ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class Sink:
    target_id: int | None
    demand: int


@dataclass
class TransportationProblem:
    sources: list[Source]
    sinks: list[Sink]
    cost: np.ndarray
    feasible: np.ndarray | None = None
    dummy_source: int | None = None
    dummy_sink: int | None = None
    big: float | None = None

    def __post_init__(self):
        self.cost = np.asarray(self.cost, dtype=float)
        if self.cost.shape != (len(self.sources), len(self.sinks)):
            raise ValueError(f"cost matrix {self.cost.shape} does not match "
                             f"{len(self.sources)} sources x {len(self.sinks)} sinks")
        if self.feasible is None:
            self.feasible = np.ones(self.cost.shape, dtype=bool)

    @property
    def supplies(self) -> np.ndarray:
        return np.array([s.supply for s in self.sources], dtype=np.int64)

    @property
    def demands(self) -> np.ndarray:
        return np.array([s.demand for s in self.sinks], dtype=np.int64)

    @property
    def shape(self) -> tuple[int, int]:
        return self.cost.shape

    def is_balanced(self) -> bool:
        return int(self.supplies.sum()) == int(self.demands.sum())


@dataclass
class Flow:
    x: np.ndarray
    objective: float
    pivots: int = 0
    nodes: int = 0

    def shipped_from_dummy(self, tp: TransportationProblem) -> int:
        return 0 if tp.dummy_source is None else int(self.x[tp.dummy_source].sum())

    def shipped_to_dummy(self, tp: TransportationProblem) -> int:
        return 0 if tp.dummy_sink is None else int(self.x[:, tp.dummy_sink].sum())


@dataclass
class LpModel:
    """Equality-form LP ``min c.x  s.t.  A x = b,  lower <= x <= upper``."""

    a_eq: np.ndarray
    b_eq: np.ndarray
    objective: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    n_sources: int
    n_sinks: int
    a_ub: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    b_ub: np.ndarray = field(default_factory=lambda: np.zeros(0))


def make_problem(supplies: Sequence[int], demands: Sequence[int], cost,
                 feasible=None) -> TransportationProblem:
    """Plain transportation problem from arrays; dummies added if unbalanced."""
    sources = [Source(None, int(s)) for s in supplies]
    sinks = [Sink(j, int(d)) for j, d in enumerate(demands)]
    return balance(TransportationProblem(sources, sinks, np.asarray(cost, dtype=float),
                                         None if feasible is None else np.asarray(feasible, bool)))


def big_cost(cost: np.ndarray, feasible: np.ndarray, total_demand: int) -> float:
    return 1.0 + float(cost[feasible].sum()) * total_demand


def balance(tp: TransportationProblem) -> TransportationProblem:
    """Add a zero-cost dummy sink or a BIG-cost dummy source; mark infeasible edges BIG."""
    supply, demand = int(tp.supplies.sum()), int(tp.demands.sum())
    feasible = tp.feasible.copy()
    big = big_cost(tp.cost, feasible, demand)
    cost = np.where(feasible, tp.cost, big)
    sources, sinks = list(tp.sources), list(tp.sinks)
    dummy_source = dummy_sink = None
    if supply > demand:
        sinks.append(Sink(None, supply - demand))
        cost = np.hstack([cost, np.zeros((len(sources), 1))])
        feasible = np.hstack([feasible, np.ones((len(sources), 1), dtype=bool)])
        dummy_sink = len(sinks) - 1
    elif supply < demand:
        sources.append(Source(None, demand - supply))
        cost = np.vstack([cost, np.full((1, len(sinks)), big)])
        feasible = np.vstack([feasible, np.zeros((1, len(sinks)), dtype=bool)])
        dummy_source = len(sources) - 1
    return TransportationProblem(sources, sinks, cost, feasible, dummy_source, dummy_sink, big)


# -- conversion -------------------------------------------------------------

def can_serve(state: UavState, target: Target, instance: ProblemInstance,
              depart_time: int | None = None) -> bool:
    """Time and fuel check for sending ``state`` straight to ``target``.

    The fuel check reserves the trip home from the target when the instance
    requires a depot return.
    """
    d = manhattan_distance(state.position, target.position)
    depart = state.available_at if depart_time is None else depart_time
    if depart + d > target.window.start:
        return False
    need = d + instance.loiter_fuel
    if instance.require_depot_return:
        need += manhattan_distance(target.position, instance.depot)
    return state.fuel_remaining + 1e-9 >= need


def ready_uavs(fleet: Sequence[UavState], cluster: Cluster, targets: Sequence[Target],
               instance: ProblemInstance) -> list[UavState]:
    members = _cluster_targets(cluster, targets)
    return [u for u in fleet if any(can_serve(u, t, instance) for t in members)]


def _cluster_targets(cluster: Cluster, targets) -> list[Target]:
    by_id = {t.id: t for t in targets}
    return [by_id[i] for i in cluster.target_ids]


def build_transportation(ready: Sequence[UavState], cluster: Cluster, targets: Sequence[Target],
                         instance: ProblemInstance) -> TransportationProblem:
    """Sources are ready UAVs grouped by position (and by which sinks they can serve)."""
    members = _cluster_targets(cluster, targets)
    groups: dict[tuple, list[UavState]] = {}
    for u in sorted(ready, key=lambda s: s.uav_id):
        signature = tuple(can_serve(u, t, instance) for t in members)
        groups.setdefault((u.position, signature), []).append(u)

    sources, rows_cost, rows_ok = [], [], []
    for (pos, signature), group in groups.items():
        sources.append(Source(pos, len(group), tuple(u.uav_id for u in group)))
        rows_cost.append([manhattan_distance(pos, t.position) for t in members])
        rows_ok.append(list(signature))
    sinks = [Sink(t.id, t.demand) for t in members]
    cost = np.array(rows_cost, dtype=float).reshape(len(sources), len(sinks))
    feasible = np.array(rows_ok, dtype=bool).reshape(len(sources), len(sinks))
    return balance(TransportationProblem(sources, sinks, cost, feasible))


# -- shared helpers ------------------------------------------------------------

def _check_balanced(tp: TransportationProblem) -> None:
    if not tp.is_balanced():
        raise UnbalancedError(f"supply {int(tp.supplies.sum())} != demand {int(tp.demands.sum())}")


def _objective(x: np.ndarray, cost: np.ndarray) -> float:
    return float((x * cost).sum())


def _tolerance(cost: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.abs(cost).max(initial=0.0)))


def canonical_flow(tp: TransportationProblem, x: np.ndarray) -> np.ndarray:
    """Lexicographically smallest optimal flow, given any optimal flow ``x``.

    Node potentials from Bellman-Ford on the residual graph identify the
    zero-reduced-cost cells; every optimal flow lives on them. Cells are then
    visited in row-major order and each one's flow is pushed down as far as
    rerouting through later (unfixed) zero-reduced-cost cells allows.
    """
    m, n = tp.shape
    c = tp.cost
    tol = _tolerance(c)
    x = np.array(x, dtype=np.int64)

    # potentials: forward arcs row->col cost c, backward arcs col->row cost -c where x > 0
    du, dv = np.zeros(m), np.zeros(n)
    back = np.where(x > 0, -c, np.inf)
    for _ in range(m + n + 1):
        nv = np.minimum(dv, (du[:, None] + c).min(axis=0))
        nu = np.minimum(du, (nv[None, :] + back).min(axis=1))
        if np.all(nv >= dv - tol) and np.all(nu >= du - tol):
            break
        du, dv = nu, nv
    else:
        raise ValueError("flow is not optimal (negative residual cycle)")
    reduced = c + du[:, None] - dv[None, :]
    tight = np.abs(reduced) <= tol * (m + n)
    if np.any(x[~tight] > 0):
        raise ValueError("flow is not optimal")

    free = tight.copy()
    for i in range(m):
        for j in range(n):
            while x[i, j] > 0:
                path = _reroute_path(x, free, i, j)
                if path is None:
                    break
                # path alternates: row i -> col a (+), col a -> row b (-), ... -> col j
                back = [x[r, col] for k, (r, col) in enumerate(path) if k % 2 == 1]
                amount = min([x[i, j]] + back)
                for k, (r, col) in enumerate(path):
                    x[r, col] += amount if k % 2 == 0 else -amount
                x[i, j] -= amount
            free[i, j] = False
    return x


def _reroute_path(x, free, i0, j0):
    """BFS from row ``i0`` to column ``j0`` avoiding cell (i0, j0).

    Forward steps use free cells (row -> col), backward steps use free cells
    with positive flow (col -> row). Returns the cells along the path.
    """
    m, n = x.shape
    parent: dict[tuple[str, int], tuple[tuple[str, int], tuple[int, int]] | None] = {("r", i0): None}
    queue = deque([("r", i0)])
    while queue:
        kind, k = queue.popleft()
        if kind == "r":
            for j in range(n):
                if free[k, j] and not (k == i0 and j == j0) and ("c", j) not in parent:
                    parent[("c", j)] = ((kind, k), (k, j))
                    if j == j0:
                        queue.clear()
                        break
                    queue.append(("c", j))
        else:
            for i in range(m):
                if free[i, k] and x[i, k] > 0 and not (i == i0 and k == j0) \
                        and ("r", i) not in parent:
                    parent[("r", i)] = ((kind, k), (i, k))
                    queue.append(("r", i))
    if ("c", j0) not in parent:
        return None
    cells = []
    node = ("c", j0)
    while parent[node] is not None:
        prev, cell = parent[node]
        cells.append(cell)
        node = prev
    return cells[::-1]


# -- transportation simplex (MODI) -----------------------------------------------

def northwest_corner(supplies: np.ndarray, demands: np.ndarray):
    """Initial basic feasible solution with exactly m + n - 1 basic cells."""
    m, n = len(supplies), len(demands)
    s, d = supplies.astype(np.int64).copy(), demands.astype(np.int64).copy()
    x = np.zeros((m, n), dtype=np.int64)
    basis = []
    i = j = 0
    while i < m and j < n:
        q = min(s[i], d[j])
        x[i, j] = q
        basis.append((i, j))
        s[i] -= q
        d[j] -= q
        if s[i] == 0 and i < m - 1:
            i += 1
        else:
            j += 1
    return x, basis


def _duals(cost: list[list[float]], basis, m, n):
    """MODI multipliers: u_i + v_j = c_ij on every basic cell, u_0 = 0."""
    u: list[float | None] = [None] * m
    v: list[float | None] = [None] * n
    u[0] = 0.0
    rows: dict[int, list[int]] = {}
    cols: dict[int, list[int]] = {}
    for i, j in basis:
        rows.setdefault(i, []).append(j)
        cols.setdefault(j, []).append(i)
    stack = [("r", 0)]
    while stack:
        kind, k = stack.pop()
        if kind == "r":
            for j in rows.get(k, ()):
                if v[j] is None:
                    v[j] = cost[k][j] - u[k]
                    stack.append(("c", j))
        else:
            for i in cols.get(k, ()):
                if u[i] is None:
                    u[i] = cost[i][k] - v[k]
                    stack.append(("r", i))
    return np.array(u, dtype=float), np.array(v, dtype=float)


def _basis_cycle(basis, entering, m, n):
    """Cells of the basis path from the entering row to the entering column."""
    r0, c0 = entering
    rows: dict[int, list[int]] = {}
    cols: dict[int, list[int]] = {}
    for i, j in basis:
        rows.setdefault(i, []).append(j)
        cols.setdefault(j, []).append(i)
    parent = {("r", r0): None}
    queue = deque([("r", r0)])
    while queue and ("c", c0) not in parent:
        kind, k = queue.popleft()
        nbrs = [("c", j) for j in rows.get(k, ())] if kind == "r" else \
               [("r", i) for i in cols.get(k, ())]
        for nb in nbrs:
            if nb not in parent:
                parent[nb] = (kind, k)
                queue.append(nb)
    path = []
    node = ("c", c0)
    while parent[node] is not None:
        prev = parent[node]
        cell = (prev[1], node[1]) if prev[0] == "r" else (node[1], prev[1])
        path.append(cell)
        node = prev
    return path[::-1]


def solve_transportation_simplex(tp: TransportationProblem, max_pivots: int = 10_000,
                                 canonical: bool = True) -> Flow:
    _check_balanced(tp)
    m, n = tp.shape
    c = tp.cost
    tol = _tolerance(c)
    x, basis = northwest_corner(tp.supplies, tp.demands)
    cost_rows = c.tolist()
    pivots = 0
    while True:
        u, v = _duals(cost_rows, basis, m, n)
        reduced = c - u[:, None] - v[None, :]
        in_basis = np.zeros((m, n), dtype=bool)
        for cell in basis:
            in_basis[cell] = True
        # Bland: first improving cell in row-major order
        candidates = np.argwhere((reduced < -tol) & ~in_basis)
        if len(candidates) == 0:
            break
        if pivots >= max_pivots:
            raise ResourceCapError(f"transportation simplex exceeded {max_pivots} pivots")
        entering = (int(candidates[0][0]), int(candidates[0][1]))
        path = _basis_cycle(basis, entering, m, n)
        minus = path[0::2]
        theta = min(x[cell] for cell in minus)
        leaving = min(cell for cell in minus if x[cell] == theta)
        for k, cell in enumerate(path):
            x[cell] += -theta if k % 2 == 0 else theta
        x[entering] += theta
        basis.remove(leaving)
        basis.append(entering)
        pivots += 1
    if canonical:
        x = canonical_flow(tp, x)
    return Flow(x, _objective(x, c), pivots=pivots)


# -- brute force -------------------------------------------------------------------

def solve_transportation_bruteforce(tp: TransportationProblem, node_cap: int = 2_000_000) -> Flow:
    """Enumerate every integer flow with the right marginals, row-major, ascending values."""
    _check_balanced(tp)
    m, n = tp.shape
    c = tp.cost.tolist()
    supply = [int(s) for s in tp.supplies]
    demand = [int(d) for d in tp.demands]
    x = [[0] * n for _ in range(m)]
    tol = _tolerance(tp.cost)
    best = {"obj": None, "x": None}
    nodes = 0

    def visit(i, j, acc):
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            raise ResourceCapError(f"brute force exceeded node cap {node_cap} on a "
                                   f"{m}x{n} transportation problem")
        if i == m:
            if best["obj"] is None or acc < best["obj"] - tol:
                best["obj"] = acc
                best["x"] = [row[:] for row in x]
            return
        ni, nj = (i, j + 1) if j + 1 < n else (i + 1, 0)
        hi = min(supply[i], demand[j])
        if j == n - 1:
            lo = supply[i]          # last column absorbs the rest of the row
            if lo > hi:
                return
        elif i == m - 1:
            lo = demand[j]          # last row absorbs the rest of the column
            if lo > hi:
                return
        else:
            # the rest of row i must fit into the remaining columns' demands
            lo = max(0, supply[i] - sum(demand[j + 1:]))
        for q in range(lo, hi + 1):
            x[i][j] = q
            supply[i] -= q
            demand[j] -= q
            visit(ni, nj, acc + q * c[i][j])
            supply[i] += q
            demand[j] += q
        x[i][j] = 0

    visit(0, 0, 0.0)
    if best["x"] is None:
        raise UnbalancedError("no feasible flow")
    xb = np.array(best["x"], dtype=np.int64)
    return Flow(xb, _objective(xb, tp.cost), nodes=nodes)


# -- LP route ----------------------------------------------------------------------

def build_lp_model(tp: TransportationProblem) -> LpModel:
    """One equality row per source (row sum) and per sink (column sum)."""
    _check_balanced(tp)
    m, n = tp.shape
    a = np.zeros((m + n, m * n))
    for i in range(m):
        a[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        a[m + j, j::n] = 1.0
    b = np.concatenate([tp.supplies, tp.demands]).astype(float)
    return LpModel(a, b, tp.cost.ravel().copy(), np.zeros(m * n), np.full(m * n, np.inf), m, n)


class LpError(RuntimeError):
    pass


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    others = np.arange(t.shape[0]) != row
    t[others] -= np.outer(t[others, col], t[row])


def _run_simplex(t: np.ndarray, basis: list[int], allowed: np.ndarray, tol: float,
                 max_iter: int) -> int:
    """Bland's rule on tableau ``t`` (last row = reduced costs, last col = rhs)."""
    iters = 0
    while True:
        obj = t[-1, :-1]
        entering = np.flatnonzero((obj < -tol) & allowed)
        if len(entering) == 0:
            return iters
        if iters >= max_iter:
            raise ResourceCapError(f"LP simplex exceeded {max_iter} iterations")
        col = int(entering[0])
        column = t[:-1, col]
        rows = np.flatnonzero(column > tol)
        if len(rows) == 0:
            raise LpError("LP is unbounded")
        ratios = t[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(t, row, col)
        basis[row] = col
        iters += 1


def solve_lp_simplex(model: LpModel, tp: TransportationProblem | None = None,
                     max_iter: int = 50_000) -> Flow:
    """Two-phase primal simplex on a dense tableau with Bland's anti-cycling rule.

    If ``tp`` is given the optimal vertex is mapped to the canonical optimal
    flow of that problem.
    """
    a, b, c = model.a_eq.astype(float), model.b_eq.astype(float), model.objective
    r, nv = a.shape
    if np.any(model.lower != 0) or np.any(np.isfinite(model.upper)):
        raise LpError("only [0, inf) bounds are supported")
    neg = b < 0
    a[neg] *= -1
    b[neg] *= -1
    tol = 1e-9 * max(1.0, float(np.abs(c).max(initial=0.0)), float(b.max(initial=0.0)))

    # phase 1: minimise the sum of artificials
    t = np.zeros((r + 1, nv + r + 1))
    t[:r, :nv] = a
    t[:r, nv:nv + r] = np.eye(r)
    t[:r, -1] = b
    t[-1, :nv] = -a.sum(axis=0)
    t[-1, -1] = -b.sum()
    basis = list(range(nv, nv + r))
    allowed = np.ones(nv + r, dtype=bool)
    iters = _run_simplex(t, basis, allowed, 1e-9, max_iter)
    if -t[-1, -1] > 1e-7 * max(1.0, b.sum()):
        raise LpError("LP is infeasible")

    # drive zero-level artificials out; drop rows that are redundant
    keep = []
    for row in range(r):
        if basis[row] >= nv:
            cols = np.flatnonzero(np.abs(t[row, :nv]) > 1e-9)
            if len(cols) == 0:
                continue
            _pivot(t, row, int(cols[0]))
            basis[row] = int(cols[0])
        keep.append(row)
    t = np.vstack([t[keep][:, list(range(nv)) + [nv + r]], np.zeros((1, nv + 1))])
    basis = [basis[k] for k in keep]

    # phase 2
    t[-1, :nv] = c
    for row, var in enumerate(basis):
        t[-1] -= c[var] * t[row]
    iters += _run_simplex(t, basis, np.ones(nv, dtype=bool), tol, max_iter)

    sol = np.zeros(nv)
    for row, var in enumerate(basis):
        sol[var] = t[row, -1]
    xi = np.rint(sol).astype(np.int64)
    if np.abs(sol - xi).max(initial=0.0) > 1e-6:
        raise LpError("LP vertex is not integral")
    x = xi.reshape(model.n_sources, model.n_sinks)
    if tp is not None:
        x = canonical_flow(tp, x)
    return Flow(x, _objective(x, c.reshape(x.shape)), pivots=iters)


# -- debug dump -------------------------------------------------------------------

def format_transportation(tp: TransportationProblem, flow: Flow | None = None) -> str:
    """Aligned text table of costs (and flows, when given) for golden-file tests."""
    m, n = tp.shape
    col_names = ["dummy" if j == tp.dummy_sink else f"t{s.target_id}"
                 for j, s in enumerate(tp.sinks)]
    row_names = []
    for i, s in enumerate(tp.sources):
        if i == tp.dummy_source:
            row_names.append("dummy")
        elif s.position is None:
            row_names.append(f"s{i}")
        else:
            row_names.append(f"({s.position.x},{s.position.y})")

    def cell(i, j):
        if not tp.feasible[i, j]:
            text = "BIG"
        else:
            text = f"{tp.cost[i, j]:g}"
        if flow is not None:
            text += f"|{int(flow.x[i, j])}"
        return text

    rows = [[""] + col_names + ["supply"]]
    for i in range(m):
        rows.append([row_names[i]] + [cell(i, j) for j in range(n)] + [str(tp.sources[i].supply)])
    rows.append(["demand"] + [str(s.demand) for s in tp.sinks] + [""])
    widths = [max(len(r[k]) for r in rows) for k in range(n + 2)]
    lines = ["  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip() for r in rows]
    if flow is not None:
        lines.append(f"objective {flow.objective:g}")
    return "\n".join(lines) + "\n"
