"""Active channel sparsification: beam/user graph and the selection ILP.

Given every user's estimated DL support, a bipartite graph couples angular
directions (beams) to users.  A binary program selects beams and users so
that each served user keeps at most T selected beams, while the number of
probed beams plus served users is maximized.  The solver is an exact
branch-and-bound over LP relaxations; ties among optima are broken toward
more served users and then the lexicographically smallest beam set, so a
given instance always produces the same plan.
"""

from dataclasses import dataclass

import numpy as np

from ._simplex import solve_lp
from .channel import dft_matrix

_INT_TOL = 1e-6


@dataclass
class BeamUserGraph:
    """Bipartite beam/user adjacency.

    beams: sorted angular-direction indices (union of the users' supports).
    W[a, k] = 1 iff beams[a] is in user k's DL support.  Users with empty
    support keep an all-zero column and can never be served.
    """

    beams: np.ndarray
    n_users: int
    W: np.ndarray

    @property
    def n_beams(self):
        return int(self.beams.size)


def build_graph(supports):
    """Graph from K DL support sets.  Raises if every support is empty."""
    if len(supports) < 1:
        raise ValueError("need at least one user")
    for s in supports:
        if s.band != "dl":
            raise ValueError("supports must be DL support sets")
    union = sorted(set().union(*(s.as_set() for s in supports)))
    if not union:
        raise ValueError("all supports empty: nothing to probe")
    beams = np.asarray(union, dtype=np.int64)
    pos = {b: i for i, b in enumerate(union)}
    W = np.zeros((len(union), len(supports)), dtype=np.int8)
    for k, s in enumerate(supports):
        for b in s:
            W[pos[b], k] = 1
    return BeamUserGraph(beams=beams, n_users=len(supports), W=W)


@dataclass
class IlpSolution:
    z: np.ndarray  # binary over graph.beams
    u: np.ndarray  # binary over users
    objective: int
    optimal: bool
    nodes: int
    method: str  # 'bnb' or 'heuristic'


def _ilp_matrices(W, T, M):
    """Inequality system of the selection problem, variables [z | u]."""
    nA, K = W.shape
    n = nA + K
    A = np.zeros((nA + 2 * K, n))
    b = np.zeros(nA + 2 * K)
    Wf = W.astype(float)
    # selected beam needs a served neighbor
    A[:nA, :nA] = np.eye(nA)
    A[:nA, nA:] = -Wf
    # served user needs a selected neighbor
    A[nA : nA + K, nA:] = np.eye(K)
    A[nA : nA + K, :nA] = -Wf.T
    # served user keeps at most T selected beams
    A[nA + K :, :nA] = Wf.T
    A[nA + K :, nA:] = M * np.eye(K)
    b[nA + K :] = M + T
    return A, b


def _pick_branch_var(frac, n_beams):
    """Most fractional variable; ties prefer user variables, then low index."""
    top = frac.max()
    tied = np.where(frac >= top - 1e-9)[0]
    users = tied[tied >= n_beams]
    pool = users if users.size else tied
    return int(pool[0])


def _branch_and_bound(c, A, b, lb0, ub0, n_beams, node_cap, target=None):
    """Exact DFS branch-and-bound for binary variables, maximizing c'x.

    c must be integer-valued so that pruning by unit gaps is exact.  Returns
    (x, value, nodes, proven); proven means the search completed, or an
    incumbent reached ``target`` (callers pass the known optimum when they
    only need a feasibility witness).
    """
    best_x = None
    best = -1
    stack = [(lb0.copy(), ub0.copy())]
    nodes = 0
    while stack:
        if nodes >= node_cap:
            return best_x, best, nodes, False
        lb, ub = stack.pop()
        nodes += 1
        res = solve_lp(c, A, b, lb, ub)
        if res.status != "optimal":
            continue
        if res.objective <= best + 1 - _INT_TOL:
            continue
        x = res.x
        frac = np.abs(x - np.round(x))
        if frac.max() < _INT_TOL:
            xr = np.round(x)
            if np.all(A @ xr <= b + 1e-7):
                val = int(round(float(c @ xr)))
                if val > best:
                    best, best_x = val, xr.astype(np.int64)
                    if target is not None and best >= target:
                        return best_x, best, nodes, True
                continue
        j = _pick_branch_var(frac, n_beams)
        lb0_, ub0_ = lb.copy(), ub.copy()
        ub0_[j] = 0.0
        lb1_, ub1_ = lb.copy(), ub.copy()
        lb1_[j] = 1.0
        stack.append((lb0_, ub0_))
        stack.append((lb1_, ub1_))  # 1-branch pops first
    return best_x, best, nodes, True


def _greedy_heuristic(W, T):
    """Feasible fallback for oversized instances: serve easy users first."""
    nA, K = W.shape
    deg = W.sum(axis=0)
    order = [k for k in np.argsort(deg, kind="stable") if deg[k] > 0]
    z = np.zeros(nA, dtype=np.int64)
    u = np.zeros(K, dtype=np.int64)
    for k in order:
        mine = np.where(W[:, k] == 1)[0]
        have = mine[z[mine] == 1]
        extra = [a for a in mine if z[a] == 0]
        budget = T - have.size
        take = []
        for a in extra:
            if budget <= 0:
                break
            # adding beam a must not push any already-served user over T
            owners = np.where((W[a] == 1) & (u == 1))[0]
            if all(W[z == 1][:, o].sum() < T for o in owners):
                take.append(a)
                budget -= 1
        if have.size + len(take) >= 1:
            z[take] = 1
            u[k] = 1
    return z, u


def solve_ilp(graph, T, M, canonical=True, node_cap=200000, size_cap=2000):
    """Exact beam/user selection.

    Maximizes sum(z) + sum(u) over binary z (beams) and u (users) subject to
    the coupling and per-user cap constraints.  Branch-and-bound proves
    optimality; instances larger than size_cap (variables) fall back to a
    greedy heuristic flagged non-optimal.

    With ``canonical=True`` ties are broken by maximizing the number of
    probed beams and then taking the lexicographically smallest beam set,
    so repeated solves of one instance always return the same plan.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    W = graph.W
    nA, K = W.shape
    n = nA + K

    # trivial regime: every user fits in the pilot budget, take everything
    if int(W.sum(axis=0).max(initial=0)) <= T:
        u = (W.sum(axis=0) > 0).astype(np.int64)
        z = np.ones(nA, dtype=np.int64)
        return IlpSolution(z, u, int(z.sum() + u.sum()), True, 0, "bnb")

    if n > size_cap:
        z, u = _greedy_heuristic(W, T)
        return IlpSolution(z, u, int(z.sum() + u.sum()), False, 0, "heuristic")

    A, b = _ilp_matrices(W, T, M)
    # weighted objective: lexicographic in (beams+users, beams).  Among equal
    # primary objectives, plans with more probed beams keep the zero-forcing
    # stage well conditioned (served users never outnumber beams by choice),
    # which plans with more users but fewer beams do not.
    cw = np.concatenate([np.full(nA, nA + 2.0), np.full(K, nA + 1.0)])
    root_lb, root_ub = np.zeros(n), np.ones(n)
    x, wbest, nodes, proven = _branch_and_bound(cw, A, b, root_lb, root_ub, nA, node_cap)
    if x is None or not proven:
        z, u = _greedy_heuristic(W, T)
        return IlpSolution(z, u, int(z.sum() + u.sum()), False, nodes, "heuristic")
    obj = int(wbest // (nA + 1))
    n_beams_opt = int(wbest % (nA + 1))

    z = x[:nA].copy()
    u = x[nA:].copy()
    if canonical:
        # lexicographically smallest beam set among (obj, n_beams_opt)
        # optima: sweep beams in ascending order and keep each one that
        # still admits an optimal completion
        n_sel = n_beams_opt
        lb, ub = np.zeros(n), np.ones(n)
        chosen = 0
        aborted = False
        for a in range(nA):
            if chosen == n_sel:
                ub[a:nA] = 0.0
                break
            if n_sel - chosen == nA - a:
                lb[a:nA] = 1.0
                chosen = n_sel
                break
            lb[a] = 1.0
            _, wa, na, pa = _branch_and_bound(cw, A, b, lb, ub, nA, node_cap, target=wbest)
            nodes += na
            if not pa and wa < wbest:
                aborted = True  # node cap hit before a verdict
                break
            if wa >= wbest:
                chosen += 1
            else:
                lb[a] = 0.0
                ub[a] = 0.0
        if not aborted:
            z = (lb[:nA] > 0.5).astype(np.int64)
            # serve every user that is consistent with the canonical beams
            deg = W.T @ z
            u = ((deg >= 1) & (deg <= T)).astype(np.int64)
            assert int(z.sum() + u.sum()) == obj
    return IlpSolution(
        z.astype(np.int64), u.astype(np.int64), int(obj), True, nodes, "bnb"
    )


def exhaustive_search(graph, T, M=None):
    """Brute-force optimum of the selection problem (oracle for small cases).

    Enumerates every (z, u) assignment; only meant for n_beams + n_users
    around 20.  Returns the maximum objective value.
    """
    W = graph.W
    nA, K = W.shape
    if nA + K > 26:
        raise ValueError("instance too large for exhaustive search")
    z_all = ((np.arange(2**nA)[:, None] >> np.arange(nA)[None, :]) & 1).astype(np.int8)
    zcount = z_all.sum(axis=1)
    per_user = z_all @ W  # (2^nA, K) selected beams adjacent to each user
    best = 0
    for umask in range(2**K):
        u = (umask >> np.arange(K)) & 1
        served = u == 1
        # beams must touch a served user
        allowed = (W[:, served].sum(axis=1) > 0).astype(np.int8)
        ok = np.all(z_all <= allowed[None, :], axis=1)
        if served.any():
            ok &= np.all(per_user[:, served] >= 1, axis=1)
            ok &= np.all(per_user[:, served] <= T, axis=1)
        if not ok.any():
            continue
        val = int((zcount[ok]).max()) + int(served.sum())
        best = max(best, val)
    return best


@dataclass
class SparsificationPlan:
    """ILP outcome plus the pre-beamforming matrix.

    selected_beams are actual angular indices (subset of graph.beams);
    omega maps each served user to the 1-based positions of its beams
    inside selected_beams; B has the conjugated DFT columns as rows.
    """

    z: np.ndarray
    u: np.ndarray
    selected_beams: np.ndarray
    served_users: np.ndarray
    omega: dict
    B: np.ndarray
    objective: int


def build_plan(graph, z, u, F, T):
    """Assemble the pre-beamforming plan from a feasible (z, u) pair."""
    W = graph.W
    nA, K = W.shape
    z = np.asarray(z, dtype=np.int64)
    u = np.asarray(u, dtype=np.int64)
    if z.shape != (nA,) or u.shape != (K,):
        raise ValueError("z/u shape mismatch with graph")
    per_user = W.T @ z
    if np.any(z > (W @ u > 0)):
        raise ValueError("infeasible: selected beam with no served neighbor")
    if np.any(u > (per_user > 0)):
        raise ValueError("infeasible: served user with no selected beam")
    if np.any(per_user[u == 1] > T):
        raise ValueError("infeasible: served user exceeds pilot budget")
    sel_pos = np.where(z == 1)[0]
    beams = graph.beams[sel_pos]
    M = F.shape[0]
    B = F[:, beams].conj().T
    omega = {}
    for k in np.where(u == 1)[0]:
        mask = W[sel_pos, k] == 1
        omega[int(k)] = np.where(mask)[0] + 1  # 1-based positions within beams
    return SparsificationPlan(
        z=z,
        u=u,
        selected_beams=beams,
        served_users=np.where(u == 1)[0],
        omega=omega,
        B=B,
        objective=int(z.sum() + u.sum()),
    )


def plan_for_supports(supports, T, M, canonical=True):
    """Graph + ILP + plan in one call (the harness entry point)."""
    graph = build_graph(supports)
    sol = solve_ilp(graph, T, M, canonical=canonical)
    plan = build_plan(graph, sol.z, sol.u, dft_matrix(M), T)
    return graph, sol, plan


# ---------------------------------------------------------------------------
# line-oriented instance format (for oracle cross-checks and the CLI)


def dump_instance(graph, T, M, path):
    """Write beams, user count, parameters, and adjacency triplets."""
    lines = [
        "beams " + " ".join(str(int(b)) for b in graph.beams),
        f"users {graph.n_users}",
        f"T {int(T)}",
        f"M {int(M)}",
    ]
    for a in range(graph.n_beams):
        for k in range(graph.n_users):
            if graph.W[a, k]:
                lines.append(f"edge {int(graph.beams[a])} {k}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_instance(path):
    """Inverse of dump_instance.  Returns (graph, T, M)."""
    beams = None
    n_users = T = M = None
    edges = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, *rest = line.split()
            if key == "beams":
                beams = [int(v) for v in rest]
            elif key == "users":
                n_users = int(rest[0])
            elif key == "T":
                T = int(rest[0])
            elif key == "M":
                M = int(rest[0])
            elif key == "edge":
                edges.append((int(rest[0]), int(rest[1])))
            else:
                raise ValueError(f"unknown record {key!r} in {path}")
    if beams is None or n_users is None or T is None or M is None:
        raise ValueError(f"incomplete instance file {path}")
    pos = {b: i for i, b in enumerate(beams)}
    W = np.zeros((len(beams), n_users), dtype=np.int8)
    for b, k in edges:
        W[pos[b], k] = 1
    graph = BeamUserGraph(
        beams=np.asarray(beams, dtype=np.int64), n_users=n_users, W=W
    )
    return graph, T, M
