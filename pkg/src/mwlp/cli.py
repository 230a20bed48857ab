"""Configuration-driven experiment runner.

Subcommands: ap-constant, doubling, sampling-check, multiplier-bound,
besov-equiv, all.  Configuration is TOML; results are JSON + CSV written to
the output directory.  Outputs are byte-deterministic for a fixed
(config, seed) pair; wall-clock timestamps go only to a separate run.log.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
hypothesis violation (or any other module-level numerical error).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
import zlib
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .besov import BesovParams, equivalence_experiment, make_partition
from .bound import (
    empirical_ratio,
    large_p_ratio,
    make_corpus,
    rescale_experiment,
    theoretical_constant,
)
from .errors import ConfigInvalid, MwlpError
from .muckenhoupt import ApEstimate, CubeFamily, ap_constant, doubling_report
from .spectral import (
    TorusGrid,
    apply_multiplier,
    decay_constant,
    gaussian_symbol,
    lp_w_norm,
    make_symbol,
    raised_cosine,
    sampling_series,
    smooth_bump,
    synthesize_bandlimited,
    triangle,
)
from .weights import WeightSpec

COMMANDS = ("ap-constant", "doubling", "sampling-check", "multiplier-bound", "besov-equiv", "all")

SYMBOL_FORMS = {
    "raised_cosine": raised_cosine,
    "smooth_bump": smooth_bump,
    "triangle": triangle,
    "gaussian": gaussian_symbol,
}

DEFAULTS = {
    "seed": 0,
    "output_dir": "out",
    "threads": 1,
    "weight": {"kind": "scalar-power", "n": 1, "N": 1, "alpha": -0.5},
    "grid": {"T": 256, "m": 4096, "offset": 0.5},
    "cubes": {"j_min": -6, "j_max": 3, "X": 8.0, "q": 64},
    "symbol": {"form": "raised_cosine", "R": 8.0, "M": 3.0},
    "exponents": {"p": 1.0, "q": 1.0, "s": 0.5},
    "corpus": {"size": 32, "R": 8.0, "r_min": 0.0},
    "partition": {"c1": 0.5, "c2": 2.0, "profile": "smooth_exp", "j_lo": 0, "j_hi": 3},
    "partition2": {
        "c1": 0.7071067811865476,
        "c2": 2.8284271247461903,
        "profile": "smooth_exp",
        "j_lo": 0,
        "j_hi": 3,
    },
    "rescale": {"R_list": []},
    "sampling": {"T": 64, "m": 512, "R": 1.0, "M": 4.0, "offsets": [0.0, 0.5], "fields": 8},
}


def substream(seed: int, name: str) -> int:
    """Named deterministic substream of the root seed.

    Adding a new named consumer never perturbs the draws of existing ones.
    """
    return (int(seed) * 1000003 + zlib.crc32(name.encode())) % (1 << 63)


# -- configuration ----------------------------------------------------------


def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigInvalid(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigInvalid(f"config is not valid TOML: {exc}")


def validate(raw: dict) -> tuple[dict, list[str]]:
    """Fill defaults and range-check; returns (normalized config, error list)."""
    errors: list[str] = []
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        errors.append(f"unknown config sections/keys: {sorted(unknown)}")
    cfg = _merge(DEFAULTS, raw)

    p = cfg["exponents"]["p"]
    if not (isinstance(p, (int, float)) and p > 0):
        errors.append("p must be positive")
    s_q = cfg["exponents"]["q"]
    if not (s_q == "inf" or (isinstance(s_q, (int, float)) and s_q > 0)):
        errors.append('q must be positive or "inf"')

    for key in ("partition", "partition2"):
        part = cfg[key]
        if not part["c1"] < part["c2"]:
            errors.append(f"{key}: c1 must be < c2")
        if part["j_lo"] > part["j_hi"]:
            errors.append(f"{key}: j_lo must be <= j_hi")

    for key in ("grid", "sampling"):
        T, m = cfg[key]["T"], cfg[key]["m"]
        if not (isinstance(T, int) and T > 0 and T % 2 == 0):
            errors.append(f"{key}: T must be a positive even integer")
        elif not (isinstance(m, int) and m > 0 and m % T == 0):
            errors.append(f"{key}: m must be divisible by T")

    q = cfg["cubes"]["q"]
    if not (isinstance(q, int) and q >= 2 and q % 2 == 0):
        errors.append("cubes: q must be an even integer >= 2")
    if not (isinstance(cfg["seed"], int) and 0 <= cfg["seed"] < 1 << 64):
        errors.append("seed must be a 64-bit unsigned integer")
    if not (isinstance(cfg["corpus"]["size"], int) and cfg["corpus"]["size"] >= 1):
        errors.append("corpus: size must be a positive integer")
    if cfg["symbol"]["form"] not in SYMBOL_FORMS:
        errors.append(f"symbol: form must be one of {sorted(SYMBOL_FORMS)}")
    wkind = cfg["weight"].get("kind")
    if "file" not in cfg["weight"] and wkind not in (
        "identity",
        "scalar-power",
        "diagonal-power",
        "conjugated",
    ):
        errors.append("weight: need a file path or a kind from the generator zoo")
    return cfg, errors


def weight_from_config(wc: dict) -> WeightSpec:
    if "file" in wc:
        return WeightSpec.from_json(json.loads(Path(wc["file"]).read_text()))
    kind = wc["kind"]
    n = int(wc.get("n", 1))
    if kind == "identity":
        return WeightSpec.identity(n, int(wc.get("N", 1)))
    if kind == "scalar-power":
        return WeightSpec.scalar_power(n, int(wc.get("N", 1)), float(wc["alpha"]))
    if kind == "diagonal-power":
        return WeightSpec.diagonal_power(n, wc["alphas"])
    return WeightSpec.conjugated(n, wc["alphas"])


# -- deterministic serialization --------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n")


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _ap_row(est: ApEstimate, q: int) -> list:
    center = ";".join(repr(c) for c in est.argmax_center)
    return [est.regime, est.p, est.value, center, est.argmax_scale, q]


# -- subcommands ------------------------------------------------------------


def cmd_ap_constant(cfg: dict, out: Path) -> dict:
    spec = weight_from_config(cfg["weight"])
    cubes = CubeFamily(spec.n, **cfg["cubes"])
    est = ap_constant(spec, float(cfg["exponents"]["p"]), cubes)
    write_csv(
        out / "ap_constant.csv",
        ["regime", "p", "value", "center", "scale", "q"],
        [_ap_row(est, cubes.q)],
    )
    payload = {
        "value": est.value,
        "p": est.p,
        "regime": est.regime,
        "argmax_center": list(est.argmax_center),
        "argmax_scale": est.argmax_scale,
        "refinement": list(est.refinement),
        "weight": spec.to_json(),
    }
    write_json(out / "ap_constant.json", payload)
    return payload


def cmd_doubling(cfg: dict, out: Path) -> dict:
    spec = weight_from_config(cfg["weight"])
    p = float(cfg["exponents"]["p"])
    cubes = CubeFamily(spec.n, **cfg["cubes"])
    rep = doubling_report(spec, p, cubes, seed=substream(cfg["seed"], "directions"))
    center = ";".join(repr(c) for c in rep.argmax_center)
    write_csv(
        out / "doubling.csv",
        ["regime", "p", "value", "center", "scale", "q"],
        [
            ["C_dbl", p, rep.C_dbl, center, rep.argmax_scale, cubes.q],
            ["beta", p, rep.beta, center, rep.argmax_scale, cubes.q],
            ["c_w", p, rep.c_w, "", "", cubes.q],
        ],
    )
    payload = {
        "C_dbl": rep.C_dbl,
        "beta": rep.beta,
        "c_w": rep.c_w,
        "directions_tested": rep.directions_tested,
        "worst_direction": [[z.real, z.imag] for z in rep.worst_direction],
        "argmax_center": list(rep.argmax_center),
        "argmax_scale": rep.argmax_scale,
        "weight": spec.to_json(),
        "warnings": ["beta is a sampled lower estimate"],
    }
    write_json(out / "doubling.json", payload)
    return payload


def cmd_sampling_check(cfg: dict, out: Path) -> dict:
    sc = cfg["sampling"]
    grid = TorusGrid(1, int(sc["T"]), int(sc["m"]), 0.0)
    R = float(sc["R"])
    sym = make_symbol(grid, R, raised_cosine(R))
    # fixed-torus fit: the sampling identity needs only the kernel values
    decay_constant(sym, float(sc["M"]))
    t_nodes = np.arange(-grid.T // 2, grid.T // 2, dtype=float)
    rows = []
    worst = 0.0
    for i in range(int(sc["fields"])):
        f = synthesize_bandlimited(grid, R, 1, substream(cfg["seed"], "corpus") + i)
        g = apply_multiplier(sym, f)
        scale = float(np.max(np.abs(g.values)))
        for u in sc["offsets"]:
            series = np.array(
                [sampling_series(sym, f, [float(u)], [t])[0] for t in t_nodes]
            )
            idx = np.rint((t_nodes - grid.x0) / grid.h).astype(int)
            direct = g.values[idx, 0]
            rel = float(np.max(np.abs(series - direct)) / scale)
            rows.append([i, float(u), rel])
            worst = max(worst, rel)
    write_csv(out / "sampling_check.csv", ["field", "offset", "rel_discrepancy"], rows)
    payload = {
        "max_rel_discrepancy": worst,
        "fields": int(sc["fields"]),
        "offsets": [float(u) for u in sc["offsets"]],
        "K": sym.K,
        "M": sym.M,
        "grid": {"T": grid.T, "m": grid.m},
    }
    write_json(out / "sampling_check.json", payload)
    return payload


def cmd_multiplier_bound(cfg: dict, out: Path) -> dict:
    spec = weight_from_config(cfg["weight"])
    p = float(cfg["exponents"]["p"])
    gc = cfg["grid"]
    grid = TorusGrid(spec.n, int(gc["T"]), int(gc["m"]), float(gc["offset"]))
    R = float(cfg["symbol"]["R"])
    base_form = SYMBOL_FORMS[cfg["symbol"]["form"]](R)
    bandlimited = cfg["symbol"]["form"] != "gaussian"
    sym = make_symbol(grid, R, base_form, bandlimited=bandlimited)
    decay_constant(sym, float(cfg["symbol"]["M"]), refine_check=True)
    corpus = make_corpus(grid, R, spec.N, int(cfg["corpus"]["size"]), substream(cfg["seed"], "corpus"))

    rows = []
    if p <= 1.0:
        cubes = CubeFamily(spec.n, **cfg["cubes"])
        rep = theoretical_constant(spec, sym, p, cubes, seed=substream(cfg["seed"], "directions"))
        for i, f in enumerate(corpus):
            rows.append([i, lp_w_norm(apply_multiplier(sym, f), spec, p) / lp_w_norm(f, spec, p)])
        ratio_max = max(r for _, r in rows)
        payload = {
            "p": p,
            "regime": "small_p",
            "C_theory": rep.C_theory,
            "ratio_max": ratio_max,
            "K": rep.K,
            "M": rep.M,
            "L": rep.L,
            "beta": rep.beta,
            "c_w": rep.c_w,
            "c_M": rep.c_M,
            "ap": rep.ap,
            "within_bound": bool(ratio_max <= rep.C_theory * 1.01),
            "warnings": rep.warnings,
        }
    else:
        ratio_max = large_p_ratio(spec, sym, p, corpus)
        for i, f in enumerate(corpus):
            rows.append([i, lp_w_norm(apply_multiplier(sym, f), spec, p) / lp_w_norm(f, spec, p)])
        payload = {
            "p": p,
            "regime": "large_p",
            "C_theory": None,
            "ratio_max": ratio_max,
            "K": sym.K,
            "M": sym.M,
            "warnings": ["no constant chain for p > 1; empirical ratio only"],
        }
    R_list = [float(r) for r in cfg["rescale"]["R_list"]]
    if R_list:
        sweep = rescale_experiment(
            spec,
            SYMBOL_FORMS[cfg["symbol"]["form"]](1.0),
            grid,
            p,
            R_list,
            corpus_size=int(cfg["corpus"]["size"]),
            seed=substream(cfg["seed"], "corpus"),
        )
        payload["R_sweep"] = [[r, v] for r, v in sweep]
    payload["weight"] = spec.to_json()
    payload["corpus_size"] = int(cfg["corpus"]["size"])
    write_csv(out / "multiplier_bound.csv", ["field", "ratio"], rows)
    write_json(out / "multiplier_bound.json", payload)
    return payload


def cmd_besov_equiv(cfg: dict, out: Path) -> dict:
    spec = weight_from_config(cfg["weight"])
    ex = cfg["exponents"]
    q = np.inf if ex["q"] == "inf" else float(ex["q"])
    params = BesovParams(s=float(ex["s"]), p=float(ex["p"]), q=q, weight=spec)
    pc, pc2 = cfg["partition"], cfg["partition2"]
    psi = make_partition(pc["c1"], pc["c2"], (pc["j_lo"], pc["j_hi"]), pc["profile"])
    phi = make_partition(pc2["c1"], pc2["c2"], (pc2["j_lo"], pc2["j_hi"]), pc2["profile"])
    gc = cfg["grid"]
    grid = TorusGrid(spec.n, int(gc["T"]), int(gc["m"]), float(gc["offset"]))
    lo = max(psi.covered_interior()[0], phi.covered_interior()[0])
    hi = min(psi.covered_interior()[1], phi.covered_interior()[1])
    R = min(float(cfg["corpus"]["R"]), hi)
    r_min = max(float(cfg["corpus"]["r_min"]), lo)
    seed0 = substream(cfg["seed"], "corpus")
    corpus = [
        synthesize_bandlimited(grid, R, spec.N, seed0 + i, profile="flat", r_min=r_min)
        for i in range(int(cfg["corpus"]["size"]))
    ]
    cubes = CubeFamily(spec.n, **cfg["cubes"])
    res = equivalence_experiment(
        corpus, params, psi, phi, float(cfg["symbol"]["M"]), cubes=cubes,
        seed=substream(cfg["seed"], "directions"),
    )
    write_csv(
        out / "besov_equiv.csv",
        ["field", "ratio"],
        [[i, float(r)] for i, r in enumerate(res["ratios"])],
    )
    payload = {
        "r_min": res["r_min"],
        "r_max": res["r_max"],
        "C_equiv": res["C_equiv"],
        "C_psi_over_phi": res["C_psi_over_phi"],
        "C_phi_over_psi": res["C_phi_over_psi"],
        "n0": res["n0"],
        "beta": res["beta"],
        "decay_spread": res["decay_spread"],
        "s": params.s,
        "p": params.p,
        "q": "inf" if np.isinf(q) else q,
        "within_bound": bool(
            res["r_max"] <= res["C_psi_over_phi"] * 1.01
            and res["r_min"] >= 1.0 / (res["C_phi_over_psi"] * 1.01)
        ),
        "weight": spec.to_json(),
        "warnings": ["C_equiv is the artifact's assembled bound, not a sharp constant"],
    }
    write_json(out / "besov_equiv.json", payload)
    return payload


_DISPATCH = {
    "ap-constant": cmd_ap_constant,
    "doubling": cmd_doubling,
    "sampling-check": cmd_sampling_check,
    "multiplier-bound": cmd_multiplier_bound,
    "besov-equiv": cmd_besov_equiv,
}


def run(command: str, cfg: dict) -> dict:
    """Execute one subcommand (or all of them) and write its reports."""
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    if command == "all":
        report = {name: fn(cfg, out) for name, fn in _DISPATCH.items()}
        write_json(out / "all.json", report)
    else:
        report = _DISPATCH[command](cfg, out)
    with open(out / "run.log", "a") as fh:
        fh.write(f"{time.strftime('%Y-%m-%dT%H:%M:%S')} {command} {time.time() - t0:.3f}s\n")
    return report


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mwlp", description="matrix-weighted L^p experiment runner"
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=str, default=None, help="TOML config path")
    parser.add_argument("--seed", type=int, default=None, help="root seed override")
    parser.add_argument("--out", type=str, default=None, help="output directory override")
    parser.add_argument("--threads", type=int, default=None, help="worker count (reporting only)")
    args = parser.parse_args(argv)

    try:
        raw = load_config(args.config) if args.config else {}
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cfg, errors = validate(raw)
    if args.seed is not None:
        cfg["seed"] = args.seed
        if not 0 <= args.seed < 1 << 64:
            errors.append("seed must be a 64-bit unsigned integer")
    if args.out is not None:
        cfg["output_dir"] = args.out
    if args.threads is not None:
        cfg["threads"] = args.threads
    if errors:
        for err in errors:
            print(f"error: {err}", file=sys.stderr)
        return 2

    try:
        run(args.command, cfg)
    except MwlpError as exc:
        out = Path(cfg["output_dir"])
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "error.json", {"error": type(exc).__name__, "message": str(exc)})
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
