"""LDPC code construction, alist file I/O, systematic encoding and BP decoding.

Codes are either built by a seeded progressive-edge-growth (PEG) construction
(column weight 3, check degrees balanced by the growth rule) or ingested from
a standard alist text file.  The decoder is flooding-schedule sum-product
belief propagation on hard-decision inputs, mapped to LLRs through a binary
symmetric channel crossover probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

_RANK_RETRY_LIMIT = 25


@dataclass
class DecoderConfig:
    """Belief-propagation settings; 20 flooding iterations by default."""

    max_iterations: int = 20
    crossover: float = 0.05
    early_stop: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.crossover < 0.5:
            raise ValueError(f"crossover must be in (0, 0.5), got {self.crossover}")


def _gf2_row_reduce(h):
    """Reduced row echelon form over GF(2); returns (rref, pivot_cols, rank)."""
    h = (h.copy() % 2).astype(np.uint8)
    m, n = h.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        hits = np.flatnonzero(h[r:, c])
        if hits.size == 0:
            continue
        pr = r + hits[0]
        if pr != r:
            h[[r, pr]] = h[[pr, r]]
        others = np.flatnonzero(h[:, c])
        others = others[others != r]
        h[others] ^= h[r]
        pivots.append(c)
        r += 1
    return h, np.array(pivots, dtype=int), r


@dataclass
class LdpcCode:
    """Parity-check matrix with a systematic encoder and BP decoding structures."""

    check_matrix: np.ndarray  # (m, n) uint8
    rank_adjusted: bool = False
    info_positions: np.ndarray = field(init=False)
    parity_positions: np.ndarray = field(init=False)
    parity_map: np.ndarray = field(init=False)  # (m, k): parity = map @ info mod 2

    def __post_init__(self):
        h = np.asarray(self.check_matrix, dtype=np.uint8) % 2
        rref, pivots, rank = _gf2_row_reduce(h)
        if rank < h.shape[0]:
            # keep an independent row set so the encoder is well defined
            keep = _independent_rows(h, rank)
            h = h[keep]
            rref, pivots, rank = _gf2_row_reduce(h)
            self.rank_adjusted = True
        self.check_matrix = h
        self.parity_positions = pivots
        mask = np.ones(h.shape[1], dtype=bool)
        mask[pivots] = False
        self.info_positions = np.flatnonzero(mask)
        self.parity_map = rref[:, self.info_positions]
        self._build_graph()

    @property
    def n(self):
        return self.check_matrix.shape[1]

    @property
    def k(self):
        return self.n - self.check_matrix.shape[0]

    @property
    def rate(self):
        return Fraction(self.k, self.n)

    def _build_graph(self):
        """Edge lists and padded gather/scatter indices for vectorized BP."""
        chk_idx, var_idx = np.nonzero(self.check_matrix)
        self.edge_chk = chk_idx
        self.edge_var = var_idx
        e = len(chk_idx)
        m, n = self.check_matrix.shape
        dc = np.bincount(chk_idx, minlength=m)
        dv = np.bincount(var_idx, minlength=n)
        self.chk_gather = np.full((m, dc.max()), e, dtype=int)
        self.var_gather = np.full((n, dv.max()), e, dtype=int)
        cpos = np.zeros(m, dtype=int)
        vpos = np.zeros(n, dtype=int)
        for eid, (c, v) in enumerate(zip(chk_idx, var_idx)):
            self.chk_gather[c, cpos[c]] = eid
            self.var_gather[v, vpos[v]] = eid
            cpos[c] += 1
            vpos[v] += 1
        self.chk_mask = self.chk_gather < e
        self.var_mask = self.var_gather < e


def _independent_rows(h, rank):
    """Indices of a maximal independent row set (first rank rows in scan order)."""
    _, pivots, _ = _gf2_row_reduce(h.T)
    return pivots[:rank] if len(pivots) >= rank else pivots


def _parse_rate(rate):
    if isinstance(rate, Fraction):
        return rate
    if isinstance(rate, str):
        return Fraction(rate)
    return Fraction(rate).limit_denominator(1 << 16)


def _peg_grow(n, m, var_degree, rng):
    """Progressive edge growth: one bipartite graph, girth-greedy, seeded ties."""
    var_neighbors = [[] for _ in range(n)]
    chk_neighbors = [[] for _ in range(m)]
    chk_degree = np.zeros(m, dtype=int)

    def pick_min_degree(candidates):
        cand = np.asarray(candidates)
        degs = chk_degree[cand]
        best = cand[degs == degs.min()]
        return int(best[rng.integers(len(best))])

    for v in range(n):
        for edge in range(var_degree):
            if edge == 0:
                c = pick_min_degree(np.arange(m))
            else:
                c = pick_min_degree(_peg_candidates(v, var_neighbors, chk_neighbors, m))
            var_neighbors[v].append(c)
            chk_neighbors[c].append(v)
            chk_degree[c] += 1
    h = np.zeros((m, n), dtype=np.uint8)
    for v, checks in enumerate(var_neighbors):
        h[checks, v] = 1
    return h


def _peg_candidates(v, var_neighbors, chk_neighbors, m):
    """Checks to attach var v to: unreachable ones, else the deepest BFS layer."""
    reached = np.zeros(m, dtype=bool)
    seen_var = np.zeros(len(var_neighbors), dtype=bool)
    seen_var[v] = True
    frontier = [v]
    last_layer = []
    while frontier:
        layer = []
        for vv in frontier:
            for c in var_neighbors[vv]:
                if not reached[c]:
                    reached[c] = True
                    layer.append(c)
        if not layer:
            break
        last_layer = layer
        if reached.all():
            break
        frontier = []
        for c in layer:
            for vv in chk_neighbors[c]:
                if not seen_var[vv]:
                    seen_var[vv] = True
                    frontier.append(vv)
    unreached = np.flatnonzero(~reached)
    return unreached if unreached.size else np.asarray(last_layer)


def construct_code(n, rate, seed, var_degree=3):
    """Build a near-regular LDPC code by seeded progressive edge growth.

    Retries with the same stream until the parity-check matrix has full row
    rank, so k = n * rate holds exactly.

    Args:
        n: block length.
        rate: target code rate (Fraction, float or "3/8"-style string);
            n * rate must be an integer.
        seed: RNG seed; the construction is deterministic given (n, rate, seed).
        var_degree: column weight (default 3).

    Returns:
        LdpcCode.
    """
    rate = _parse_rate(rate)
    k_exact = rate * n
    if k_exact.denominator != 1:
        raise ValueError(f"n * rate = {n} * {rate} is not an integer")
    k = int(k_exact)
    m = n - k
    if not 0 < k < n:
        raise ValueError(f"rate {rate} gives k={k} outside 1..{n - 1}")
    if m < var_degree:
        raise ValueError(
            f"infeasible degree profile: {m} checks cannot host column weight {var_degree}"
        )
    rng = np.random.default_rng(seed)
    for _ in range(_RANK_RETRY_LIMIT):
        h = _peg_grow(n, m, var_degree, rng)
        if _gf2_row_reduce(h)[2] == m:
            return LdpcCode(check_matrix=h)
    # fall back to the rank-adjusting constructor (k will differ from n*rate)
    return LdpcCode(check_matrix=h)


def encode(info_bits, code):
    """Systematic encoding; info bits appear at code.info_positions.

    Args:
        info_bits: (..., k) array of 0/1.
        code: LdpcCode.

    Returns:
        (..., n) codeword array satisfying every parity check.
    """
    b = np.asarray(info_bits)
    if b.shape[-1] != code.k:
        raise ValueError(f"expected {code.k} info bits, got {b.shape[-1]}")
    b = b.astype(np.uint8) % 2
    out = np.zeros(b.shape[:-1] + (code.n,), dtype=np.uint8)
    out[..., code.info_positions] = b
    out[..., code.parity_positions] = (b @ code.parity_map.T) % 2
    return out


def decode(hard_bits, cfg, code):
    """Sum-product decode one hard-decision word; see decode_batch."""
    info, conv, iters = decode_batch(np.atleast_2d(hard_bits), cfg, code)
    return info[0], bool(conv[0]), int(iters[0])


def decode_batch(hard_bits, cfg, code):
    """Flooding sum-product BP over a batch of hard-decision words.

    Channel LLRs are (1 - 2y) * ln((1-p)/p) with p = cfg.crossover.  With
    early stopping each word's output freezes at its first zero-syndrome
    iteration; otherwise the final iteration's hard decision is returned.

    Args:
        hard_bits: (B, n) array of received bits.
        cfg: DecoderConfig.
        code: LdpcCode.

    Returns:
        (info_bits (B, k), converged (B,), iterations (B,)).
    """
    y = np.asarray(hard_bits, dtype=np.uint8)
    if y.ndim != 2 or y.shape[1] != code.n:
        raise ValueError(f"expected shape (B, {code.n}), got {y.shape}")
    h = code.check_matrix
    mag = np.log((1.0 - cfg.crossover) / cfg.crossover)
    lam = (1.0 - 2.0 * y.T) * mag  # (n, B)
    nwords = y.shape[0]

    bits = y.T.copy()
    converged = np.logical_not(np.any((h @ bits) % 2, axis=0))
    iters = np.zeros(nwords, dtype=int)
    out = bits.copy()
    if cfg.early_stop and converged.all():
        return out[code.info_positions].T, converged, iters

    v2c = lam[code.edge_var]  # (E, B)
    c2v = np.zeros_like(v2c)
    pad_row = np.ones((1, nwords))
    zero_row = np.zeros((1, nwords))
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        t = np.concatenate([np.tanh(0.5 * v2c), pad_row], axis=0)
        tc = t[code.chk_gather]  # (m, dcmax, B)
        is_zero = tc == 0.0
        nzero = is_zero.sum(axis=1, keepdims=True)
        prod_nz = np.prod(np.where(is_zero, 1.0, tc), axis=1, keepdims=True)
        excl = np.where(
            nzero == 0,
            prod_nz / np.where(is_zero, 1.0, tc),
            np.where((nzero == 1) & is_zero, prod_nz, 0.0),
        )
        excl = np.clip(excl, -1.0 + 1e-15, 1.0 - 1e-15)
        c2v[code.chk_gather[code.chk_mask]] = 2.0 * np.arctanh(excl[code.chk_mask])

        c_ext = np.concatenate([c2v, zero_row], axis=0)
        cv = c_ext[code.var_gather]  # (n, dvmax, B)
        tot = lam + cv.sum(axis=1)
        v2c[code.var_gather[code.var_mask]] = (tot[:, None, :] - cv)[code.var_mask]

        bits = (tot < 0).astype(np.uint8)
        sat = np.logical_not(np.any((h @ bits) % 2, axis=0))
        newly = sat & ~converged
        out[:, newly] = bits[:, newly]
        iters[newly] = it
        converged |= newly
        if cfg.early_stop and converged.all():
            break
    if cfg.early_stop:
        out[:, ~converged] = bits[:, ~converged]
    else:
        out = bits
        converged = np.logical_not(np.any((h @ out) % 2, axis=0))
    iters[~converged] = it
    return out[code.info_positions].T, converged, iters


def simulate_bsc(codewords, crossover, rng):
    """Flip each bit independently with the given probability."""
    cw = np.asarray(codewords, dtype=np.uint8)
    flips = np.random.default_rng(rng).random(cw.shape) < crossover
    return cw ^ flips.astype(np.uint8)


def save_alist(code_or_matrix, path):
    """Write a parity-check matrix in the standard alist text format.

    Layout: "n m", "dvmax dcmax", the n column degrees, the m row degrees,
    then per-column and per-row 1-based index lists padded with zeros.
    """
    h = code_or_matrix.check_matrix if hasattr(code_or_matrix, "check_matrix") else code_or_matrix
    h = np.asarray(h, dtype=np.uint8) % 2
    m, n = h.shape
    col_lists = [np.flatnonzero(h[:, j]) + 1 for j in range(n)]
    row_lists = [np.flatnonzero(h[i, :]) + 1 for i in range(m)]
    dvmax = max(len(c) for c in col_lists)
    dcmax = max(len(r) for r in row_lists)
    lines = [
        f"{n} {m}",
        f"{dvmax} {dcmax}",
        " ".join(str(len(c)) for c in col_lists),
        " ".join(str(len(r)) for r in row_lists),
    ]
    for entries, width in [(col_lists, dvmax), (row_lists, dcmax)]:
        for lst in entries:
            padded = list(lst) + [0] * (width - len(lst))
            lines.append(" ".join(str(v) for v in padded))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


class AlistError(ValueError):
    """Malformed alist file."""


def load_alist(path):
    """Parse an alist parity-check file into an LdpcCode.

    Accepts both zero-padded and unpadded index lines; validates declared
    degrees against the index lists and the column lists against the row
    lists.  Errors carry the 1-based line number.
    """
    with open(path) as fh:
        raw = fh.read().splitlines()
    tokens = []
    for lineno, line in enumerate(raw, start=1):
        stripped = line.split()
        if stripped:
            tokens.append((lineno, stripped))

    def take(section):
        if not tokens:
            raise AlistError(f"alist truncated: missing {section}")
        return tokens.pop(0)

    def ints(section):
        lineno, toks = take(section)
        try:
            return lineno, [int(t) for t in toks]
        except ValueError as exc:
            raise AlistError(f"line {lineno}: non-integer token in {section}") from exc

    lineno, dims = ints("size line")
    if len(dims) != 2:
        raise AlistError(f"line {lineno}: size line must hold two integers")
    n, m = dims
    if n < 1 or m < 1:
        raise AlistError(f"line {lineno}: non-positive dimensions {n} x {m}")
    lineno, maxdeg = ints("max-degree line")
    if len(maxdeg) != 2:
        raise AlistError(f"line {lineno}: max-degree line must hold two integers")
    dvmax, dcmax = maxdeg
    lineno, col_deg = ints("column degree list")
    if len(col_deg) != n:
        raise AlistError(f"line {lineno}: expected {n} column degrees, got {len(col_deg)}")
    lineno, row_deg = ints("row degree list")
    if len(row_deg) != m:
        raise AlistError(f"line {lineno}: expected {m} row degrees, got {len(row_deg)}")
    if max(col_deg) != dvmax or max(row_deg) != dcmax:
        raise AlistError("declared maximum degrees do not match the degree lists")

    h = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        lineno, entries = ints(f"column {j + 1} index list")
        nz = [e for e in entries if e != 0]
        if len(nz) != col_deg[j] or len(entries) > dvmax:
            raise AlistError(
                f"line {lineno}: column {j + 1} lists {len(nz)} checks, declared {col_deg[j]}"
            )
        for e in nz:
            if not 1 <= e <= m:
                raise AlistError(f"line {lineno}: check index {e} out of range 1..{m}")
            h[e - 1, j] = 1
    for i in range(m):
        lineno, entries = ints(f"row {i + 1} index list")
        nz = [e for e in entries if e != 0]
        if len(nz) != row_deg[i] or len(entries) > dcmax:
            raise AlistError(
                f"line {lineno}: row {i + 1} lists {len(nz)} vars, declared {row_deg[i]}"
            )
        for e in nz:
            if not 1 <= e <= n:
                raise AlistError(f"line {lineno}: column index {e} out of range 1..{n}")
            if h[i, e - 1] != 1:
                raise AlistError(
                    f"line {lineno}: row list entry ({i + 1},{e}) missing from column lists"
                )
    row_counts = h.sum(axis=1)
    if not np.array_equal(row_counts, np.asarray(row_deg)):
        raise AlistError("column lists and row lists describe different matrices")
    return LdpcCode(check_matrix=h)
