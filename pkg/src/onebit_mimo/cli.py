"""Command-line front end: TOML config, flag overrides, CSV/JSON output.

Example:

    onebit-mimo-sim --config configs/mu_rho08_sc05.toml --out results/

Config files are flat TOML key/value documents mirroring SweepConfig, e.g.::

    n_tx = 64
    n_users = 2
    n_rx = 2
    rho = 0.8
    ptx_db = [-12, -10, -8, -6, -4, -2, 0, 2]
    subset_sizes = [4, 4]
    ldpc_n = 256
    ldpc_rate = "3/4"
    bp_iters = 20
    blocks = 200
    bits_per_user = 100000
    seed = 2024
    total_rate = "3/8"
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .harness import SweepConfig, run_sweep
from .ldpc import _parse_rate

_CONFIG_KEYS = {
    "n_tx",
    "n_users",
    "n_rx",
    "rho",
    "ptx_db",
    "subset_sizes",
    "ldpc_n",
    "ldpc_rate",
    "ldpc_alist",
    "bp_iters",
    "crossover",
    "blocks",
    "bits_per_user",
    "seed",
    "total_rate",
    "rotation_fill",
}

PAPER_PROFILE_BITS = 1_000_000
PAPER_PROFILE_BLOCKS = 2000


def load_config(path):
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return raw


def build_parser():
    p = argparse.ArgumentParser(
        prog="onebit-mimo-sim",
        description="Coded-BER sweep for the 1-bit MIMO downlink simulator",
    )
    p.add_argument("--config", help="TOML sweep configuration")
    p.add_argument("--out", default=".", help="output directory for CSV/JSON")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--rho", type=float, help="override the receive correlation factor")
    p.add_argument("--ptx-db", help="override the power grid, comma separated dB values")
    p.add_argument(
        "--sc-rate",
        type=float,
        choices=[1.0, 0.75, 0.5],
        help="spatial coding rate; sets the per-user subset size (16, 8 or 4 for K=2) "
        "and re-derives the LDPC rate from the declared total rate",
    )
    p.add_argument("--blocks", type=int, help="override the coherence block count")
    p.add_argument(
        "--paper-profile",
        action="store_true",
        help=f"run the long profile ({PAPER_PROFILE_BITS} info bits/user, "
        f"{PAPER_PROFILE_BLOCKS} blocks)",
    )
    p.add_argument("--selftest", action="store_true", help="run the embedded sanity suite")
    p.add_argument("--quiet", action="store_true", help="suppress the progress lines")
    return p


def apply_overrides(raw, args):
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.rho is not None:
        raw["rho"] = args.rho
    if args.ptx_db is not None:
        raw["ptx_db"] = [float(tok) for tok in args.ptx_db.split(",") if tok.strip()]
    if args.blocks is not None:
        raw["blocks"] = args.blocks
    if args.paper_profile:
        raw["bits_per_user"] = PAPER_PROFILE_BITS
        raw["blocks"] = PAPER_PROFILE_BLOCKS
    if args.sc_rate is not None:
        n_rx = int(raw.get("n_rx", 2))
        width = 2 * n_rx * args.sc_rate
        if abs(width - round(width)) > 1e-9:
            raise ValueError(f"sc rate {args.sc_rate} gives non-integer bits/use for K={n_rx}")
        size = 2 ** int(round(width))
        raw["subset_sizes"] = [size] * int(raw.get("n_users", 1))
        if "total_rate" in raw:
            total = _parse_rate(raw["total_rate"])
            sc = Fraction(int(round(width)), 2 * n_rx)
            raw["ldpc_rate"] = str(total / sc)
    return raw


def selftest():
    """Small-instance end-to-end oracle checks; returns the number of failures."""
    import numpy as np

    from . import constellation as con
    from . import ldpc, precoder, spatial

    failures = 0

    def check(name, ok):
        nonlocal failures
        print(f"  {'ok' if ok else 'FAIL'}  {name}")
        failures += 0 if ok else 1

    labels = np.arange(4)
    check("gray round trip", np.array_equal(con.gray_encode(con.gray_decode(labels)), labels))
    check(
        "quantize idempotent",
        np.allclose(con.quantize(con.quantize([0.3 - 0.7j])), con.quantize([0.3 - 0.7j])),
    )
    rng = np.random.default_rng(0)
    h = (rng.standard_normal((1, 2)) + 1j * rng.standard_normal((1, 2))) / np.sqrt(2)
    s = con.gray_decode([1])
    res = precoder.solve_mber(h, s)
    grid = np.linspace(-con.BOX_HALF_WIDTH, con.BOX_HALF_WIDTH, 21)
    axes = np.meshgrid(grid, grid, grid, grid, indexing="ij")
    u = np.stack([g.ravel() for g in axes])
    margins = precoder.margin_operator(h, s)[0] @ u
    feas = np.all(margins > 0, axis=0)
    best = np.prod(margins, axis=0)[feas].max()
    check("solver beats coarse grid", res.cost.value >= best * (1 - 1e-3))

    costs = np.array([0.9, 0.1, 0.8, 0.2])
    lut = precoder.LookupTable(
        vectors=np.zeros((4, 1), dtype=complex),
        costs=costs,
        feasible=np.ones(4, dtype=bool),
        n_users=1,
        n_rx=1,
        n_tx=1,
    )
    book = spatial.select_subset_su(lut, 2)
    check("single-user selection", np.array_equal(book.decimals, [0, 2]))

    code = ldpc.construct_code(64, "1/2", 1)
    info = rng.integers(0, 2, size=(5, code.k)).astype(np.uint8)
    cw = ldpc.encode(info, code)
    out, conv, _ = ldpc.decode_batch(cw, ldpc.DecoderConfig(), code)
    check("ldpc noiseless round trip", bool(conv.all()) and np.array_equal(out, info))
    return failures


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.selftest:
        print("running self test")
        failures = selftest()
        print("self test:", "all ok" if failures == 0 else f"{failures} failure(s)")
        return 1 if failures else 0
    if not args.config:
        print("error: --config is required (or use --selftest)", file=sys.stderr)
        return 2
    try:
        raw = apply_overrides(load_config(args.config), args)
        cfg = SweepConfig(**raw)
    except (OSError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    stem = f"sweep_rho{cfg.rho:g}_sc{float(cfg.sc_rates[0]):g}_seed{cfg.seed}"
    try:
        result = run_sweep(cfg, progress=not args.quiet)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1
    csv_path = os.path.join(args.out, stem + ".csv")
    json_path = os.path.join(args.out, stem + ".json")
    result.write_csv(csv_path)
    result.write_json(json_path)
    print(f"wrote {csv_path} and {json_path}")
    print(f"{'ptx_db':>8} {'ber':>12} {'fer':>12} {'raw_ber':>12}")
    for pt in result.points:
        print(f"{pt.ptx_db:8.1f} {pt.ber:12.3e} {pt.fer:12.3e} {pt.raw_ber:12.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
