"""End-to-end Monte-Carlo engine: coded transmission over per-block channels.

One sweep iterates coherence blocks; each block draws a channel, optimizes
the lookup table, selects the per-user input subsets, then pushes LDPC-coded
bit streams through spatial encoding, the 1-bit transmit DAC, the channel,
the 1-bit receive ADC, spatial decoding and BP decoding, accumulating
information-bit and frame error counts for every transmit power on the grid.

Everything is deterministic given (config, seed): per-block substreams are
derived from the master seed with fixed spawn keys, so results do not depend
on execution order.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import channel, constellation, ldpc, precoder, spatial

CSV_HEADER = "ptx_db,rho,sc_rate,ldpc_rate,ber,fer,bits,errors,blocks,seed"

_STREAM_CHANNEL, _STREAM_BITS, _STREAM_NOISE = 0, 1, 2


@dataclass
class SweepConfig:
    """Full description of one BER-vs-transmit-power experiment."""

    n_tx: int
    n_users: int
    n_rx: int
    rho: float
    ptx_db: tuple
    subset_sizes: tuple  # per-user L'
    ldpc_n: int = 256
    ldpc_rate: object = Fraction(3, 8)  # Fraction, float or "3/8"
    ldpc_alist: str | None = None
    bp_iters: int = 20
    crossover: float = 0.05
    blocks: int = 200
    bits_per_user: int = 100_000
    seed: int = 0
    total_rate: object = None  # expected r_ldpc * r_sc per user, checked if set
    rotation_fill: bool = True
    solver: precoder.SolverOptions = field(default_factory=precoder.SolverOptions)

    def __post_init__(self):
        self.ptx_db = tuple(float(p) for p in self.ptx_db)
        self.subset_sizes = tuple(int(v) for v in self.subset_sizes)
        self.ldpc_rate = ldpc._parse_rate(self.ldpc_rate)
        if self.total_rate is not None:
            self.total_rate = ldpc._parse_rate(self.total_rate)
        if self.n_tx < self.n_users * self.n_rx:
            raise ValueError("need n_tx >= n_users * n_rx")
        if len(self.subset_sizes) != self.n_users:
            raise ValueError(f"{len(self.subset_sizes)} subset sizes for {self.n_users} users")
        if self.blocks < 1 or self.bits_per_user < 1:
            raise ValueError("blocks and bits_per_user must be positive")
        for l_prime in self.subset_sizes:
            if l_prime < 2 or l_prime & (l_prime - 1):
                raise ValueError(f"subset size {l_prime} must be a power of two >= 2")
            if l_prime > 4**self.n_rx:
                raise ValueError(f"subset size {l_prime} exceeds 4**K = {4**self.n_rx}")

    @property
    def sc_rates(self):
        """Per-user spatial coding rate log2(L') / (2K)."""
        return tuple(
            Fraction(int(l).bit_length() - 1, 2 * self.n_rx) for l in self.subset_sizes
        )

    @property
    def widths(self):
        return tuple(int(l).bit_length() - 1 for l in self.subset_sizes)

    def validate_rates(self, code):
        """Check r_total = r_ldpc * r_sc per user and the common use count."""
        r_ldpc = code.rate
        if self.total_rate is not None:
            for m, r_sc in enumerate(self.sc_rates):
                if r_ldpc * r_sc != self.total_rate:
                    raise ValueError(
                        f"user {m + 1}: ldpc rate {r_ldpc} * spatial rate {r_sc} "
                        f"= {r_ldpc * r_sc} != declared total rate {self.total_rate}"
                    )
        uses = {self.codewords_per_block(code) * code.n // w for w in self.widths}
        if len(uses) != 1:
            raise ValueError("users disagree on channel uses per block; adjust subset sizes")

    def codewords_per_block(self, code):
        """Codewords per user per block so that bits_per_user info bits are covered.

        Rounded up until every user's bit width divides the coded bits of a
        block, so channel uses come out integral.
        """
        per_block = self.blocks * code.k
        n_cw = -(-self.bits_per_user // per_block)  # ceil
        while any((n_cw * code.n) % w for w in self.widths):
            n_cw += 1
        return n_cw


@dataclass
class PointResult:
    ptx_db: float
    errors: int = 0
    bits: int = 0
    frame_errors: int = 0
    frames: int = 0
    raw_errors: int = 0
    raw_bits: int = 0

    @property
    def ber(self):
        return self.errors / self.bits if self.bits else 0.0

    @property
    def fer(self):
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def raw_ber(self):
        return self.raw_errors / self.raw_bits if self.raw_bits else 0.0


@dataclass
class SweepResult:
    config: SweepConfig
    points: list
    block_stats: list  # dicts: mean selected cost, infeasible column count
    ldpc_rate: Fraction
    wall_time: float = 0.0

    @property
    def sc_rate(self):
        return self.config.sc_rates[0]

    def csv_rows(self):
        rows = [CSV_HEADER]
        for p in self.points:
            rows.append(
                ",".join(
                    [
                        repr(p.ptx_db),
                        repr(self.config.rho),
                        repr(float(self.sc_rate)),
                        repr(float(self.ldpc_rate)),
                        repr(p.ber),
                        repr(p.fer),
                        str(p.bits),
                        str(p.errors),
                        str(self.config.blocks),
                        str(self.config.seed),
                    ]
                )
            )
        return rows

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("\n".join(self.csv_rows()) + "\n")

    def to_json_dict(self):
        cfg = self.config
        return {
            "config": {
                "n_tx": cfg.n_tx,
                "n_users": cfg.n_users,
                "n_rx": cfg.n_rx,
                "rho": cfg.rho,
                "ptx_db": list(cfg.ptx_db),
                "subset_sizes": list(cfg.subset_sizes),
                "ldpc_n": cfg.ldpc_n,
                "ldpc_rate": str(self.ldpc_rate),
                "ldpc_alist": cfg.ldpc_alist,
                "bp_iters": cfg.bp_iters,
                "crossover": cfg.crossover,
                "blocks": cfg.blocks,
                "bits_per_user": cfg.bits_per_user,
                "seed": cfg.seed,
                "sc_rate": float(self.sc_rate),
            },
            "points": [
                {
                    "ptx_db": p.ptx_db,
                    "ber": p.ber,
                    "fer": p.fer,
                    "raw_ber": p.raw_ber,
                    "bits": p.bits,
                    "errors": p.errors,
                    "frames": p.frames,
                    "frame_errors": p.frame_errors,
                }
                for p in self.points
            ],
            "block_stats": self.block_stats,
            "wall_time": self.wall_time,
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def make_code(cfg):
    """LDPC code for a sweep: from the alist file when given, else seeded PEG."""
    if cfg.ldpc_alist:
        code = ldpc.load_alist(cfg.ldpc_alist)
    else:
        seed = np.random.SeedSequence(cfg.seed, spawn_key=(99,))
        code = ldpc.construct_code(cfg.ldpc_n, cfg.ldpc_rate, seed)
    return code


def _select_codebooks(cfg, lut):
    if cfg.n_users == 1:
        return [spatial.select_subset_su(lut, cfg.subset_sizes[0])]
    table = spatial.phi_table(lut, cfg.n_users, cfg.n_rx)
    return spatial.select_subsets_mu(table, cfg.subset_sizes)


def run_block(cfg, code, block_index):
    """Simulate one coherence block at every transmit power.

    Returns (per-point counters, block diagnostics dict).
    """
    mk = cfg.n_users * cfg.n_rx
    rng_h = channel.derived_rng(cfg.seed, block_index, _STREAM_CHANNEL)
    rng_bits = channel.derived_rng(cfg.seed, block_index, _STREAM_BITS)
    rng_noise = channel.derived_rng(cfg.seed, block_index, _STREAM_NOISE)

    h = channel.draw_channel(cfg.n_users, cfg.n_rx, cfg.n_tx, cfg.rho, rng_h)
    lut = precoder.build_lut(
        h,
        cfg.solver,
        rotation_fill=cfg.rotation_fill,
        n_users=cfg.n_users,
        n_rx=cfg.n_rx,
        channel_tag=f"seed={cfg.seed} block={block_index}",
    )
    books = _select_codebooks(cfg, lut)

    n_cw = cfg.codewords_per_block(code)
    uses = n_cw * code.n // cfg.widths[0]
    info = rng_bits.integers(0, 2, size=(cfg.n_users, n_cw, code.k)).astype(np.uint8)
    coded = ldpc.encode(info, code)  # (users, n_cw, n)
    label_rows = np.empty((uses, mk), dtype=int)
    for m, book in enumerate(books):
        label_rows[:, m * cfg.n_rx : (m + 1) * cfg.n_rx] = spatial.encode_stream(
            coded[m].reshape(-1), book
        )
    x = lut.lookup(label_rows)  # (uses, n_tx)
    x_q = constellation.quantize(x)
    faded = x_q @ h.T  # (uses, MK)

    dec_cfg = ldpc.DecoderConfig(max_iterations=cfg.bp_iters, crossover=cfg.crossover)
    counters = []
    for ptx_db in cfg.ptx_db:
        scale = np.sqrt(10.0 ** (ptx_db / 10.0) / cfg.n_tx)
        noise = channel.draw_noise(mk, uses, rng_noise)
        received = constellation.quantize(scale * faded + noise.T)
        rec_labels = constellation.gray_encode(received)
        point = PointResult(ptx_db=float(ptx_db))
        for m, book in enumerate(books):
            words = spatial.decode_stream(
                rec_labels[:, m * cfg.n_rx : (m + 1) * cfg.n_rx], book
            )
            coded_hat = spatial.words_to_bits(words, book.width).reshape(n_cw, code.n)
            point.raw_errors += int((coded_hat != coded[m]).sum())
            point.raw_bits += coded[m].size
            info_hat, _, _ = ldpc.decode_batch(coded_hat, dec_cfg, code)
            frame_err = (info_hat != info[m]).sum(axis=1)
            point.errors += int(frame_err.sum())
            point.bits += info[m].size
            point.frame_errors += int((frame_err > 0).sum())
            point.frames += n_cw
        counters.append(point)
    stats = {
        "block": block_index,
        "infeasible_columns": int((~lut.feasible).sum()),
        "mean_selected_cost": float(np.mean(spatial.sub_lut(lut, books)[2])),
        "errors_per_point": [p.errors for p in counters],
        "bits_per_point": [p.bits for p in counters],
    }
    return counters, stats


def run_sweep(cfg, progress=False):
    """Run all blocks of a sweep and accumulate per-power error statistics."""
    t0 = time.perf_counter()
    code = make_code(cfg)
    cfg.validate_rates(code)
    # info bits consumed per channel use per user must equal r_total * 2K
    n_cw = cfg.codewords_per_block(code)
    uses = n_cw * code.n // cfg.widths[0]
    assert Fraction(n_cw * code.k, uses) == code.rate * cfg.sc_rates[0] * 2 * cfg.n_rx

    points = [PointResult(ptx_db=float(p)) for p in cfg.ptx_db]
    block_stats = []
    for b in range(cfg.blocks):
        counters, stats = run_block(cfg, code, b)
        block_stats.append(stats)
        for acc, one in zip(points, counters):
            acc.errors += one.errors
            acc.bits += one.bits
            acc.frame_errors += one.frame_errors
            acc.frames += one.frames
            acc.raw_errors += one.raw_errors
            acc.raw_bits += one.raw_bits
        if progress:
            print(f"block {b + 1}/{cfg.blocks}", flush=True)
    return SweepResult(
        config=cfg,
        points=points,
        block_stats=block_stats,
        ldpc_rate=code.rate,
        wall_time=time.perf_counter() - t0,
    )


def wilson_interval(errors, total, z=1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if total == 0:
        return 0.0, 1.0
    p = errors / total
    denom = 1.0 + z**2 / total
    center = (p + z**2 / (2 * total)) / denom
    half = (z / denom) * np.sqrt(p * (1 - p) / total + z**2 / (4 * total**2))
    lo = 0.0 if errors == 0 else max(center - half, 0.0)
    hi = 1.0 if errors == total else min(center + half, 1.0)
    return lo, hi


def crossing_db(ptx_db, ber, level=1e-2):
    """Transmit power (dB) where a BER curve first crosses the level, by
    log-linear interpolation; -inf if already below at the first point,
    +inf if never below."""
    ptx_db = np.asarray(ptx_db, dtype=float)
    ber = np.asarray(ber, dtype=float)
    below = ber < level
    if below[0]:
        return -np.inf
    if not below.any():
        return np.inf
    i = int(np.argmax(below))
    b_hi, b_lo = ber[i - 1], ber[i]
    if b_lo <= 0:
        b_lo = level / 100.0  # zero-BER point: clip for the log interpolation
    frac = (np.log10(b_hi) - np.log10(level)) / (np.log10(b_hi) - np.log10(b_lo))
    return float(ptx_db[i - 1] + frac * (ptx_db[i] - ptx_db[i - 1]))
