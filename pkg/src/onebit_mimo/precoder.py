"""Minimum-BER transmit-vector optimization and per-channel lookup-table construction.

For a channel H (MK x N), an input symbol vector s (MK QPSK symbols) and a
candidate transmit vector x inside the box |Re| <= 1/sqrt(2), |Im| <= 1/sqrt(2),
write w_i = (Hx)_i * conj(s_i) = a_i + j b_i.  The design cost is

    cost(H, x, s) = prod_i Re(w_i^2) = prod_i (a_i - b_i) (a_i + b_i),

the product of 2*MK "safety margins" that are all linear in the real
coordinates of x.  All margins positive means every noiseless receive sample
sits strictly inside its correct quadrant; maximizing the product pushes the
samples as far from the quantization thresholds as possible.

The solver is two-phase:

1. projected subgradient ascent on the minimum margin (a feasibility phase
   finding a point with all margins positive, when one exists);
2. projected gradient ascent with Armijo backtracking on the sum of margin
   logs, which is concave on the positive-margin cone, so the ascent reaches
   the global constrained maximum.

All heavy routines operate on batches of input vectors so that a full lookup
table is optimized in lockstep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import (
    BOX_HALF_WIDTH,
    decimal_to_labels,
    gray_decode,
    in_box,
    labels_to_decimal,
    rotation_label_map,
)

_ARMIJO_SIGMA = 1e-4
_MAX_BACKTRACKS = 60
_LUT_SIZE_CAP = 8  # largest supported MK; the table has 4**MK columns


@dataclass
class SolverOptions:
    """Knobs for the two-phase margin solver; defaults suit all tested scales."""

    max_iters: int = 500
    tol: float = 1e-7
    phase1_iters: int = 400
    step_shrink: float = 0.5
    step_init: float = 1.0

    def __post_init__(self):
        if (
            self.max_iters <= 0
            or self.tol <= 0
            or self.phase1_iters <= 0
            or not 0 < self.step_shrink < 1
            or self.step_init <= 0
        ):
            raise ValueError("solver options must be positive (shrink in (0,1))")


@dataclass
class MberCost:
    """Margin product and the margins themselves.

    margins holds the 2*MK linear margins, the MK "a-b" values first, then
    the MK "a+b" values; value is their product.
    """

    value: float
    margins: np.ndarray


@dataclass
class Phase1Result:
    x0: np.ndarray
    t_star: float

    @property
    def feasible(self):
        return self.t_star > 0


@dataclass
class SolveResult:
    x: np.ndarray
    cost: MberCost
    feasible: bool
    converged: bool
    iters: int
    trace: np.ndarray | None = None


@dataclass
class LookupTable:
    """Optimized transmit vector and cost for every input vector in O^(MK).

    Row ell holds the data for the input whose stacked Gray labels have
    decimal value ell (user 1 in the least significant base-4 digits).
    """

    vectors: np.ndarray  # (L, n_tx) complex
    costs: np.ndarray  # (L,)
    feasible: np.ndarray  # (L,) bool
    n_users: int
    n_rx: int
    n_tx: int
    channel_tag: str = ""

    @property
    def size(self):
        return self.vectors.shape[0]

    def lookup(self, labels):
        """Transmit vectors for stacked label vectors of shape (..., MK)."""
        return self.vectors[labels_to_decimal(labels)]


def _real_coords(x):
    x = np.asarray(x, dtype=complex)
    return np.concatenate([x.real, x.imag], axis=-1)


def _complex_coords(u):
    n = u.shape[-1] // 2
    return u[..., :n] + 1j * u[..., n:]


def margin_operator(h, s_batch):
    """Linear map from box coordinates to margins, per batch entry.

    Args:
        h: (MK, N) complex channel.
        s_batch: (B, MK) QPSK input vectors.

    Returns:
        (B, 2*MK, 2*N) real matrix A with margins = A @ [Re x; Im x].
    """
    h = np.asarray(h, dtype=complex)
    s_batch = np.atleast_2d(np.asarray(s_batch, dtype=complex))
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(s_batch))):
        raise ValueError("channel and input vectors must be finite")
    mk, n = h.shape
    if s_batch.shape[1] != mk:
        raise ValueError(f"input vectors have {s_batch.shape[1]} entries, channel has {mk} rows")
    c = np.conj(s_batch)[:, :, None] * h[None, :, :]
    p, q = c.real, c.imag
    a = np.empty((s_batch.shape[0], 2 * mk, 2 * n))
    a[:, :mk, :n] = p - q
    a[:, :mk, n:] = -(p + q)
    a[:, mk:, :n] = p + q
    a[:, mk:, n:] = p - q
    return a


def mber_cost(h, x, s):
    """Evaluate the margin-product cost of a transmit vector.

    Args:
        h: (MK, N) channel matrix.
        x: length-N complex transmit vector.
        s: length-MK QPSK input vector.

    Returns:
        MberCost with the 2*MK margins and their product.
    """
    h = np.asarray(h, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if x.shape != (h.shape[1],):
        raise ValueError(f"transmit vector length {x.shape} does not match channel {h.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("transmit vector must be finite")
    a = margin_operator(h, s)
    margins = a[0] @ _real_coords(x)
    return MberCost(value=float(np.prod(margins)), margins=margins)


def _mrt_start(h, s_batch):
    """Matched-filter starting point, scaled to touch the box boundary."""
    x0 = s_batch @ np.conj(h)
    peak = np.maximum(np.abs(x0.real), np.abs(x0.imag)).max(axis=1)
    peak = np.where(peak > 0, peak, 1.0)
    u = _real_coords(x0 * (BOX_HALF_WIDTH / peak)[:, None])
    return np.clip(u, -BOX_HALF_WIDTH, BOX_HALF_WIDTH)


def _phase1_batch(a, u0, opts):
    """Projected subgradient ascent on the minimum margin; returns (u_best, t_best)."""
    b, _, dim = a.shape
    u = u0.copy()
    m = np.matmul(a, u[:, :, None])[:, :, 0]
    t_best = m.min(axis=1)
    u_best = u.copy()
    base_step = BOX_HALF_WIDTH * np.sqrt(dim) / 4.0
    for k in range(opts.phase1_iters):
        jmin = np.argmin(m, axis=1)
        g = a[np.arange(b), jmin]
        norms = np.linalg.norm(g, axis=1)
        norms = np.where(norms > 0, norms, 1.0)
        step = base_step / np.sqrt(k + 1.0)
        u = np.clip(u + (step / norms)[:, None] * g, -BOX_HALF_WIDTH, BOX_HALF_WIDTH)
        m = np.matmul(a, u[:, :, None])[:, :, 0]
        t = m.min(axis=1)
        better = t > t_best
        t_best = np.where(better, t, t_best)
        u_best[better] = u[better]
    return u_best, t_best


def find_feasible_start(h, s, opts=None):
    """Feasibility phase: approximately maximize the minimum margin over the box.

    Returns a Phase1Result; t_star <= 0 flags the input as infeasible for a
    positive-margin solution.
    """
    opts = opts or SolverOptions()
    a = margin_operator(h, s)
    u0 = _mrt_start(h, np.atleast_2d(np.asarray(s, dtype=complex)))
    u, t = _phase1_batch(a, u0, opts)
    return Phase1Result(x0=_complex_coords(u[0]), t_star=float(t[0]))


def _ascend_batch(a, u, opts, track=False):
    """Projected gradient ascent with backtracking on sum(log margins).

    Every row of u must be strictly feasible (all margins positive).

    Returns:
        (u, log_cost, converged, iters, trace) with trace a list of
        per-iteration objective vectors when track is set, else None.
    """
    b = u.shape[0]
    m = np.matmul(a, u[:, :, None])[:, :, 0]
    obj = np.sum(np.log(m), axis=1)
    alpha = np.full(b, opts.step_init)
    converged = np.zeros(b, dtype=bool)
    stalled = np.zeros(b, dtype=bool)
    iters = np.zeros(b, dtype=int)
    trace = [obj.copy()] if track else None
    for it in range(1, opts.max_iters + 1):
        active = ~(converged | stalled)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        g = np.matmul(a[idx].transpose(0, 2, 1), (1.0 / m[idx])[:, :, None])[:, :, 0]
        stepped = np.clip(u[idx] + g, -BOX_HALF_WIDTH, BOX_HALF_WIDTH)
        pg_norm = np.linalg.norm(stepped - u[idx], axis=1)
        newly = pg_norm <= opts.tol
        converged[idx[newly]] = True
        idx = idx[~newly]
        if idx.size == 0:
            if track:
                trace.append(obj.copy())
            continue
        g = g[~newly]
        pending = idx
        g_pending = g
        for _ in range(_MAX_BACKTRACKS):
            if pending.size == 0:
                break
            cand = np.clip(
                u[pending] + alpha[pending][:, None] * g_pending,
                -BOX_HALF_WIDTH,
                BOX_HALF_WIDTH,
            )
            mc = np.matmul(a[pending], cand[:, :, None])[:, :, 0]
            ok = np.all(mc > 0, axis=1)
            obj_c = np.full(pending.size, -np.inf)
            if ok.any():
                obj_c[ok] = np.sum(np.log(mc[ok]), axis=1)
            gain = np.einsum("ij,ij->i", g_pending, cand - u[pending])
            accept = ok & (obj_c >= obj[pending] + _ARMIJO_SIGMA * gain)
            acc_rows = pending[accept]
            u[acc_rows] = cand[accept]
            m[acc_rows] = mc[accept]
            obj[acc_rows] = obj_c[accept]
            iters[acc_rows] = it
            alpha[acc_rows] *= 1.25
            pending = pending[~accept]
            g_pending = g_pending[~accept]
            alpha[pending] *= opts.step_shrink
        stalled[pending] = True
        if track:
            trace.append(obj.copy())
    return u, obj, converged, iters, (np.array(trace).T if track else None)


def solve_mber_batch(h, s_batch, opts=None, track=False):
    """Solve the box-constrained margin-product maximization for a batch of inputs.

    Args:
        h: (MK, N) channel matrix.
        s_batch: (B, MK) QPSK input vectors.
        opts: SolverOptions.
        track: record the per-iteration objective (testing aid).

    Returns:
        dict with arrays x (B, N), cost (B,), margins (B, 2MK),
        feasible (B,), converged (B,), iters (B,) and optional trace.
    """
    opts = opts or SolverOptions()
    s_batch = np.atleast_2d(np.asarray(s_batch, dtype=complex))
    a = margin_operator(h, s_batch)
    u0 = _mrt_start(h, s_batch)
    u, t = _phase1_batch(a, u0, opts)
    feasible = t > 0
    converged = np.zeros(len(s_batch), dtype=bool)
    iters = np.zeros(len(s_batch), dtype=int)
    trace = None
    if feasible.any():
        fi = np.flatnonzero(feasible)
        uf, _, conv_f, iters_f, trace_f = _ascend_batch(a[fi], u[fi], opts, track=track)
        u[fi] = uf
        converged[fi] = conv_f
        iters[fi] = iters_f
        if track:
            trace = trace_f
    margins = np.matmul(a, u[:, :, None])[:, :, 0]
    return {
        "x": _complex_coords(u),
        "cost": np.prod(margins, axis=1),
        "margins": margins,
        "feasible": feasible,
        "converged": converged,
        "iters": iters,
        "trace": trace,
    }


def solve_mber(h, s, opts=None, track=False):
    """Optimize the transmit vector for one input vector; see solve_mber_batch."""
    res = solve_mber_batch(h, np.atleast_2d(np.asarray(s, dtype=complex)), opts, track=track)
    x = res["x"][0]
    assert in_box(x, tol=1e-12)
    return SolveResult(
        x=x,
        cost=MberCost(value=float(res["cost"][0]), margins=res["margins"][0]),
        feasible=bool(res["feasible"][0]),
        converged=bool(res["converged"][0]),
        iters=int(res["iters"][0]),
        trace=res["trace"][0] if track else None,
    )


def _all_label_vectors(mk):
    return decimal_to_labels(np.arange(4**mk), mk)


def _rotation_orbits(mk):
    """Partition the 4**mk input indices into orbits under symbol rotation by 1j.

    Returns (reps, orbit) with orbit[t, i] the index reached from reps[i] by
    t quarter turns.
    """
    sigma = rotation_label_map()
    labels = _all_label_vectors(mk)
    size = 4**mk
    step = labels_to_decimal(sigma[labels])  # index after one quarter turn
    seen = np.zeros(size, dtype=bool)
    reps = []
    orbits = []
    for ell in range(size):
        if seen[ell]:
            continue
        orbit = [ell]
        cur = ell
        for _ in range(3):
            cur = int(step[cur])
            orbit.append(cur)
        seen[orbit] = True
        reps.append(ell)
        orbits.append(orbit)
    return np.array(reps), np.array(orbits).T  # (L/4,), (4, L/4)


def build_lut(h, opts=None, rotation_fill=True, n_users=1, n_rx=None, channel_tag=""):
    """Optimize the transmit vector for every possible input vector.

    With rotation_fill only one representative per quarter-turn orbit is
    solved and the remaining columns are filled via x(j*s) = j*x(s), which
    leaves the cost unchanged.

    Args:
        h: (MK, N) channel matrix.
        opts: SolverOptions.
        rotation_fill: solve L/4 representatives instead of all L inputs.
        n_users, n_rx: how the MK rows split into users (metadata for the
            table; defaults to a single user).
        channel_tag: free-form provenance string stored in the table.

    Returns:
        LookupTable with 4**MK rows.
    """
    h = np.asarray(h, dtype=complex)
    mk, n_tx = h.shape
    if mk > _LUT_SIZE_CAP:
        raise ValueError(
            f"lookup table would have 4**{mk} = {4**mk} columns; supported cap is MK <= {_LUT_SIZE_CAP}"
        )
    if n_rx is None:
        n_rx = mk // n_users
    if n_users * n_rx != mk:
        raise ValueError(f"n_users={n_users} * n_rx={n_rx} != channel rows {mk}")
    opts = opts or SolverOptions()
    size = 4**mk
    labels = _all_label_vectors(mk)
    symbols = gray_decode(labels)
    vectors = np.empty((size, n_tx), dtype=complex)
    costs = np.empty(size)
    feasible = np.empty(size, dtype=bool)
    if rotation_fill:
        reps, orbits = _rotation_orbits(mk)
        res = solve_mber_batch(h, symbols[reps], opts)
        for t in range(4):
            vectors[orbits[t]] = res["x"] * (1j**t)
            costs[orbits[t]] = res["cost"]
            feasible[orbits[t]] = res["feasible"]
    else:
        res = solve_mber_batch(h, symbols, opts)
        vectors[:] = res["x"]
        costs[:] = res["cost"]
        feasible[:] = res["feasible"]
    return LookupTable(
        vectors=vectors,
        costs=costs,
        feasible=feasible,
        n_users=n_users,
        n_rx=n_rx,
        n_tx=n_tx,
        channel_tag=channel_tag,
    )


def save_lut(lut, path):
    """Dump a lookup table as text: header, then one row per input vector.

    Each data line holds the cost followed by the interleaved re/im parts of
    the transmit vector.  Debug aid, not a bit-critical format.
    """
    with open(path, "w") as fh:
        fh.write(
            f"# n_tx={lut.n_tx} n_users={lut.n_users} n_rx={lut.n_rx} "
            f"size={lut.size} tag={lut.channel_tag}\n"
        )
        for ell in range(lut.size):
            parts = [repr(float(lut.costs[ell])), str(int(lut.feasible[ell]))]
            for z in lut.vectors[ell]:
                parts.append(repr(float(z.real)))
                parts.append(repr(float(z.imag)))
            fh.write(" ".join(parts) + "\n")


def load_lut(path):
    """Read a table written by save_lut."""
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ValueError("missing lookup-table header line")
        meta = dict(tok.split("=", 1) for tok in header[1:].split() if "=" in tok)
        n_tx = int(meta["n_tx"])
        n_users = int(meta["n_users"])
        n_rx = int(meta["n_rx"])
        size = int(meta["size"])
        vectors = np.empty((size, n_tx), dtype=complex)
        costs = np.empty(size)
        feasible = np.empty(size, dtype=bool)
        for ell in range(size):
            line = fh.readline()
            if not line:
                raise ValueError(f"lookup-table file truncated at row {ell}")
            vals = line.split()
            if len(vals) != 2 + 2 * n_tx:
                raise ValueError(f"row {ell}: expected {2 + 2 * n_tx} fields, got {len(vals)}")
            costs[ell] = float(vals[0])
            feasible[ell] = bool(int(vals[1]))
            flat = np.array([float(v) for v in vals[2:]])
            vectors[ell] = flat[0::2] + 1j * flat[1::2]
    return LookupTable(
        vectors=vectors,
        costs=costs,
        feasible=feasible,
        n_users=n_users,
        n_rx=n_rx,
        n_tx=n_tx,
        channel_tag=meta.get("tag", ""),
    )
