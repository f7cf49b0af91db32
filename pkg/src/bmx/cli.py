"""Scenario-driven command line: parse a config of named experiments, run
them over a worker pool, and persist reproducible JSON reports (plus raw
per-path CSVs on request).

Config files are flat INI text with one ``[scenario.NAME]`` section per
scenario.  Every value is a string with an experiment-specific parser;
unknown keys are errors, and every default is materialized into the report
echo so a rerun of the echoed config reproduces the run bit for bit.  Seed
precedence: config < BMX_SEED < --set seed=...

Exit status: 0 when all declared expectations pass, 2 when any fails,
1 on configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import re
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import maps as maps_mod
from .combs import build_comb
from .errors import BmxError, ConfigError
from .geometry import (Annulus, BoundaryLabel, Disk, HalfPlane,
                       HalfStripComplement, KoebeSlit, ParabolaComplement,
                       Rectangle, SpiralPair, Strip, Wedge)
from .hyperbolic import QhConfig
from .rng import RngStream
from .sim import EmConfig, WosConfig
from .stats import (CLASS_FINITE, estimate_hardy_number, estimate_moment,
                    proportion_estimate, region_matches, run_exits,
                    verify_cauchy_identities, verify_increasing_domains,
                    verify_karafyllia)

SCHEMA_VERSION = 1
ARTIFACT_VERSION = "0.1.0"

EXPERIMENTS = ("harmonic_measure", "moment", "hardy", "karafyllia", "cauchy",
               "modulus", "comb_sequence", "pushforward_check")


# ---------------------------------------------------------------------------
# Value and call-expression parsing
# ---------------------------------------------------------------------------

def _parse_number(tok: str):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        pass
    try:
        return complex(tok.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse number {tok!r}")


def _split_args(body: str):
    """Split on top-level commas (respecting parentheses and brackets)."""
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur and "".join(cur).strip():
        parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def parse_call(expr: str):
    """Parse ``name(arg, ...)`` where an arg is a number, a bare word, a
    bracketed number list, or a nested call."""
    expr = expr.strip()
    m = re.fullmatch(r"([a-zA-Z_][a-zA-Z_0-9]*)\s*\((.*)\)", expr, re.DOTALL)
    if not m:
        raise ConfigError(f"expected name(...), got {expr!r}")
    name = m.group(1).lower()
    args = []
    for tok in _split_args(m.group(2)):
        if re.fullmatch(r"[a-zA-Z_][a-zA-Z_0-9]*\s*\(.*\)", tok, re.DOTALL):
            args.append(parse_call(tok))
        elif tok.startswith("["):
            inner = tok[1:-1]
            args.append([_parse_number(t) for t in _split_args(inner)])
        elif re.fullmatch(r"[a-zA-Z_][a-zA-Z_0-9]*", tok):
            args.append(tok)
        else:
            args.append(_parse_number(tok))
    return name, args


def parse_domain(expr: str):
    name, args = parse_call(expr) if "(" in expr else (expr.strip().lower(), [])
    try:
        if name == "rectangle":
            return Rectangle(float(args[0]), float(args[1]))
        if name == "annulus":
            return Annulus(float(args[0]), float(args[1]))
        if name == "wedge":
            return Wedge(float(args[0]))
        if name == "halfplane":
            return HalfPlane(str(args[0]) if args else "north")
        if name == "strip":
            return Strip(float(args[0]), float(args[1]))
        if name == "halfstripcomplement":
            return HalfStripComplement(float(args[0]),
                                       float(args[1]) if len(args) > 1 else 0.0)
        if name == "parabolacomplement":
            return ParabolaComplement()
        if name == "koebeslit":
            return KoebeSlit()
        if name == "disk":
            return Disk(complex(args[0]), float(args[1]))
        if name == "spiralpair":
            return SpiralPair(str(args[0]) if args else "U")
        if name == "comb":
            n, a, b, side = int(args[0]), args[1], args[2], str(args[3])
            v, w = build_comb(n, [float(x) for x in a], [float(x) for x in b])
            return v if side.upper() == "V" else w
    except ConfigError:
        raise
    except (IndexError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad domain spec {expr!r}: {exc}") from exc
    raise ConfigError(f"unknown domain {name!r}")


_MAP_BUILDERS = {
    "linear": lambda args: maps_mod.Linear(complex(args[0])),
    "powerint": lambda args: maps_mod.PowerInt(
        int(args[0]), complex(args[1]) if len(args) > 1 else 1.0 + 0j),
    "powerbranch": lambda args: maps_mod.PowerBranch(float(args[0])),
    "mobius": lambda args: maps_mod.Mobius(complex(args[0])),
    "koebeparabola": lambda args: maps_mod.KoebeParabola(),
    "wedgepower": lambda args: maps_mod.WedgePower(float(args[0])),
    "exp": lambda args: maps_mod.Exp(),
}


def parse_map(expr: str):
    name, args = parse_call(expr)
    if name == "compose":
        stages = []
        for sub in args:
            if not isinstance(sub, tuple):
                raise ConfigError("compose() arguments must be map calls")
            stages.append(_build_map(sub))
        return maps_mod.Compose(tuple(stages))
    return _build_map((name, args))


def _build_map(call):
    name, args = call
    if name == "compose":
        return maps_mod.Compose(tuple(_build_map(sub) for sub in args))
    if name not in _MAP_BUILDERS:
        raise ConfigError(f"unknown map {name!r}")
    try:
        return _MAP_BUILDERS[name](args)
    except (IndexError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad map spec {name!r}: {exc}") from exc


_LABELS = {lab.name.lower(): lab for lab in BoundaryLabel}


def parse_region(expr: str):
    """A BoundaryLabel name or a half-space test like ``re>0`` / ``abs<1``."""
    s = expr.strip().lower()
    if s in _LABELS:
        return _LABELS[s]
    m = re.fullmatch(r"(re|im|abs)\s*([<>])\s*([-+0-9.eE]+)", s)
    if not m:
        raise ConfigError(f"cannot parse region {expr!r}")
    coord, op, val = m.group(1), m.group(2), float(m.group(3))
    extract = {"re": lambda z: z.real, "im": lambda z: z.imag,
               "abs": lambda z: np.abs(z)}[coord]
    if op == ">":
        return lambda z, lab: extract(z) > val
    return lambda z, lab: extract(z) < val


def _parse_floats(s: str):
    return [float(t) for t in re.split(r"[,\s]+", s.strip()) if t]


# ---------------------------------------------------------------------------
# Scenario schema
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    """One named experiment with fully resolved string-valued parameters."""

    name: str
    experiment: str
    params: tuple          # sorted (key, value-string) pairs
    seed: int
    workers: int
    out: str | None = None

    def param(self, key, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default


# Per-experiment key schema: {key: default-string-or-None (None = required)}.
_COMMON_KEYS = {"seed": "0", "workers": "1", "out": None}

_SCHEMAS = {
    "harmonic_measure": {
        "domain": None, "start": None, "region": None, "n": "100000",
        "kernel": "wos", "expect_prob": "", "expect_sigmas": "3",
    },
    "moment": {
        "domain": None, "start": None, "p": None, "n": "100000",
        "kernel": "em", "top_fraction": "0.05", "c": "0.1",
        "max_steps": "1000000", "expect_verdict": "",
        "expect_tail_index": "", "expect_tail_tol": "0.15",
    },
    "hardy": {
        "domain": None, "a": None, "r_schedule": None,
        "cell_factor": "0.2", "rel_floor": "0.02", "prune_clearance": "0",
        "min_cell": "", "max_rounds": "3", "max_nodes": "600000",
        "expect_contains": "", "expect_classification": "",
    },
    "karafyllia": {
        "domain": None, "a": None, "split_re": None, "n": "100000",
        "expect_ratio": "", "expect_ratio_tol": "0.1",
        "expect_bound_sigmas": "3",
    },
    "cauchy": {
        "gamma": None, "alpha_mobius": None, "alpha_power": None,
        "lambda": None, "n": "1000000", "expect_sigmas": "4",
    },
    "modulus": {
        "domain": None, "start": "", "n": "100000", "map_scale": "3",
        "expect_modulus": "", "expect_sigmas": "3",
    },
    "comb_sequence": {
        "a": None, "b": None, "iterations": "1 3 5", "start": "1",
        "p": "0.25", "n": "20000", "kernel": "wos", "growth": "",
    },
    "pushforward_check": {
        "domain": None, "start": None, "map": None, "image": None,
        "n": "20000",
    },
}


def parse_config(path: str, overrides=None) -> list[Scenario]:
    """Parse a scenario file; resolve defaults, env seed, and overrides."""
    cp = configparser.ConfigParser(strict=True, interpolation=None)
    cp.optionxform = str
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    overrides = dict(overrides or {})
    env_seed = os.environ.get("BMX_SEED")

    scenarios = []
    for section in cp.sections():
        if not section.startswith("scenario."):
            raise ConfigError(f"unknown section [{section}]")
        name = section[len("scenario."):]
        raw = dict(cp.items(section))
        if env_seed is not None:
            raw["seed"] = env_seed
        raw.update(overrides)

        exp = raw.pop("experiment", None)
        if exp is None:
            raise ConfigError(f"[{section}] is missing 'experiment'")
        if exp not in EXPERIMENTS:
            raise ConfigError(f"[{section}] unknown experiment {exp!r}")
        schema = dict(_SCHEMAS[exp])

        seed = int(raw.pop("seed", _COMMON_KEYS["seed"]))
        workers = int(raw.pop("workers", _COMMON_KEYS["workers"]))
        out = raw.pop("out", None)

        params = {}
        for key, default in schema.items():
            if key in raw:
                params[key] = raw.pop(key)
            elif default is None:
                raise ConfigError(f"[{section}] is missing required {key!r}")
            else:
                params[key] = default
        if raw:
            raise ConfigError(f"[{section}] has unknown keys {sorted(raw)}")
        scenarios.append(Scenario(
            name=name, experiment=exp,
            params=tuple(sorted(params.items())),
            seed=seed, workers=workers, out=out))
    if not scenarios:
        raise ConfigError("config declares no scenarios")
    return scenarios


def scenario_from_echo(echo: dict) -> Scenario:
    """Rebuild a Scenario from a report's echoed config."""
    return Scenario(name=echo["name"], experiment=echo["experiment"],
                    params=tuple(sorted(echo["params"].items())),
                    seed=int(echo["seed"]), workers=int(echo["workers"]),
                    out=echo.get("out"))


# ---------------------------------------------------------------------------
# Experiment runners
# ---------------------------------------------------------------------------

def _expectation(name, passed, detail):
    return {"name": name, "passed": bool(passed), "detail": detail}


def _estimate_dict(est):
    d = {"value": est.value, "stderr": est.stderr, "n": est.n,
         "ci95": list(est.ci95)}
    if hasattr(est, "wilson95"):
        d["wilson95"] = list(est.wilson95)
        d["excluded"] = est.excluded
    return d


def _run_harmonic_measure(sc: Scenario, raw_sink):
    domain = parse_domain(sc.param("domain"))
    start = complex(_parse_number(sc.param("start")))
    region = parse_region(sc.param("region"))
    n = int(sc.param("n"))
    kernel = sc.param("kernel")
    rng = RngStream(sc.seed)
    cfg = WosConfig() if kernel == "wos" else EmConfig()
    batch, _ = run_exits(domain, start, n, kernel, cfg, rng, sc.workers)
    ok = batch.ok
    hits = int(np.sum(region_matches(region, batch) & ok))
    est = proportion_estimate(hits, int(np.sum(ok)), excluded=batch.n_excluded)
    raw_sink(sc, batch)

    results = {"probability": _estimate_dict(est)}
    expectations = []
    target = sc.param("expect_prob")
    if target:
        sig = float(sc.param("expect_sigmas"))
        passed = est.within(float(target), sig)
        expectations.append(_expectation(
            "probability", passed,
            f"{est.value:.5f} vs {float(target):.5f} "
            f"(+-{sig} sigma = {sig * est.stderr:.5f})"))
    return results, expectations


def _run_moment(sc: Scenario, raw_sink):
    domain = parse_domain(sc.param("domain"))
    start = complex(_parse_number(sc.param("start")))
    p = float(sc.param("p"))
    n = int(sc.param("n"))
    kernel = sc.param("kernel")
    rng = RngStream(sc.seed)
    if kernel == "wos":
        cfg = WosConfig(with_time=True, max_steps=int(sc.param("max_steps")))
    else:
        cfg = EmConfig(c=float(sc.param("c")),
                       max_steps=int(sc.param("max_steps")))
    me = estimate_moment(domain, start, p, n, rng, kernel=kernel, cfg=cfg,
                         workers=sc.workers,
                         top_fraction=float(sc.param("top_fraction")))
    results = {
        "moment": _estimate_dict(me.estimate),
        "tail_index": _estimate_dict(me.tail_index),
        "verdict": me.verdict,
        "excluded": me.excluded,
    }
    expectations = []
    want = sc.param("expect_verdict")
    if want:
        expectations.append(_expectation(
            "verdict", me.verdict == want, f"{me.verdict} vs {want}"))
    want_alpha = sc.param("expect_tail_index")
    if want_alpha:
        tol = float(sc.param("expect_tail_tol"))
        off = abs(me.tail_index.value - float(want_alpha))
        expectations.append(_expectation(
            "tail_index", off <= tol,
            f"alpha {me.tail_index.value:.4f} vs {float(want_alpha)} "
            f"(tol {tol})"))
    return results, expectations


def _run_hardy(sc: Scenario, raw_sink):
    domain = parse_domain(sc.param("domain"))
    a = complex(_parse_number(sc.param("a")))
    schedule = _parse_floats(sc.param("r_schedule"))
    min_cell = sc.param("min_cell")
    cfg = QhConfig(
        cell_factor=float(sc.param("cell_factor")),
        rel_floor=float(sc.param("rel_floor")),
        prune_clearance=float(sc.param("prune_clearance")),
        min_cell=float(min_cell) if min_cell else None,
        max_rounds=int(sc.param("max_rounds")),
        max_nodes=int(sc.param("max_nodes")))
    he = estimate_hardy_number(domain, a, schedule, cfg)
    results = {
        "r_schedule": list(he.r_schedule),
        "delta_values": list(he.delta_values),
        "slope": he.slope,
        "slope_bounds": list(he.slope_bounds),
        "classification": he.classification,
    }
    expectations = []
    want_h = sc.param("expect_contains")
    if want_h:
        h = float(want_h)
        expectations.append(_expectation(
            "slope_bounds_contain", he.classification == CLASS_FINITE
            and he.contains(h),
            f"H={h} vs bounds {he.slope_bounds}"))
    want_cls = sc.param("expect_classification")
    if want_cls:
        expectations.append(_expectation(
            "classification", he.classification == want_cls,
            f"{he.classification} vs {want_cls}"))
    return results, expectations


def _run_karafyllia(sc: Scenario, raw_sink):
    domain = parse_domain(sc.param("domain"))
    a = complex(_parse_number(sc.param("a")))
    split = float(sc.param("split_re"))
    n = int(sc.param("n"))
    rep = verify_karafyllia(domain, a, split, n, RngStream(sc.seed),
                            workers=sc.workers)
    results = {
        "nu": _estimate_dict(rep.nu),
        "nu_hat": _estimate_dict(rep.nu_hat),
        "ratio": _estimate_dict(rep.ratio),
        "starlike_pass": None if rep.starlike is None else rep.starlike.passed,
    }
    expectations = []
    want = sc.param("expect_ratio")
    if want:
        tol = float(sc.param("expect_ratio_tol"))
        off = abs(rep.ratio.value - float(want))
        expectations.append(_expectation(
            "ratio", off <= tol,
            f"{rep.ratio.value:.4f} vs {want} (tol {tol})"))
    sig = float(sc.param("expect_bound_sigmas"))
    expectations.append(_expectation(
        "doubling_bound", rep.ratio.value <= 2.0 + sig * rep.ratio.stderr,
        f"ratio {rep.ratio.value:.4f} <= 2 + {sig} se ({rep.ratio.stderr:.4f})"))
    return results, expectations


def _run_cauchy(sc: Scenario, raw_sink):
    checks = verify_cauchy_identities(
        complex(_parse_number(sc.param("gamma"))),
        complex(_parse_number(sc.param("alpha_mobius"))),
        float(sc.param("alpha_power")),
        float(sc.param("lambda")),
        int(sc.param("n")),
        RngStream(sc.seed))
    sig = float(sc.param("expect_sigmas"))
    results, expectations = {}, []
    for c in checks:
        results[c.name] = {
            "mean": [c.mean.real, c.mean.imag],
            "target": [c.target.real, c.target.imag],
            "stderr": [c.stderr_re, c.stderr_im],
            "sigmas_off": c.sigmas_off,
        }
        expectations.append(_expectation(
            f"identity_{c.name}", c.sigmas_off <= sig,
            f"{c.sigmas_off:.2f} sigma <= {sig}"))
    return results, expectations


def _run_modulus(sc: Scenario, raw_sink):
    domain = parse_domain(sc.param("domain"))
    n = int(sc.param("n"))
    rng = RngStream(sc.seed)
    sig = float(sc.param("expect_sigmas"))
    results, expectations = {}, []
    if isinstance(domain, Annulus):
        start = complex(_parse_number(sc.param("start")))
        batch, _ = run_exits(domain, start, n, "wos", WosConfig(), rng,
                             sc.workers)
        ok = batch.ok
        inner = int(np.sum((batch.label == int(BoundaryLabel.ANNULUS_INNER))
                           & ok))
        est = proportion_estimate(inner, int(np.sum(ok)),
                                  excluded=batch.n_excluded)
        raw_sink(sc, batch)
        num = math.log(domain.R / abs(start))
        modulus = num / est.value
        mod_se = num * est.stderr / est.value ** 2
        results["p_inner"] = _estimate_dict(est)
        results["modulus"] = {"value": modulus, "stderr": mod_se,
                              "true": math.log(domain.R / domain.r)}
        want = sc.param("expect_modulus")
        if want:
            off = abs(modulus - float(want))
            expectations.append(_expectation(
                "modulus", off <= sig * mod_se,
                f"{modulus:.4f} vs {want} (+-{sig} se = {sig * mod_se:.4f})"))
    elif isinstance(domain, Rectangle):
        batch, _ = run_exits(domain, 0j, n, "wos", WosConfig(), rng,
                             sc.workers)
        okw = batch.ok
        em_batch, _ = run_exits(domain, 0j, n, "em", EmConfig(),
                                rng.child(1), sc.workers)
        oke = em_batch.ok
        scale = complex(_parse_number(sc.param("map_scale")))
        image = Rectangle(abs(scale) * domain.a, abs(scale) * domain.b)
        mapped = maps_mod.Linear(scale).evaluate(batch.exit_point[okw])
        same = np.array_equal(image.label_codes(mapped),
                              batch.label[okw])
        raw_sink(sc, batch)
        freqs_w, freqs_e = [], []
        agree = True
        for side in (BoundaryLabel.S1, BoundaryLabel.S2,
                     BoundaryLabel.S3, BoundaryLabel.S4):
            kw = int(np.sum((batch.label == int(side)) & okw))
            ke = int(np.sum((em_batch.label == int(side)) & oke))
            pw = proportion_estimate(kw, int(np.sum(okw)))
            pe = proportion_estimate(ke, int(np.sum(oke)))
            freqs_w.append(pw.value)
            freqs_e.append(pe.value)
            joint = math.hypot(pw.stderr, pe.stderr)
            if abs(pw.value - pe.value) > sig * joint:
                agree = False
        results["aspect_ratio"] = domain.a / domain.b
        results["side_probs_wos"] = freqs_w
        results["side_probs_em"] = freqs_e
        expectations.append(_expectation(
            "labels_invariant_under_scaling", same,
            f"Linear({scale}) pushforward relabels identically"))
        expectations.append(_expectation(
            "kernels_agree", agree,
            f"WoS vs EM side frequencies within {sig} joint se"))
    else:
        raise ConfigError("modulus experiment needs an annulus or rectangle")
    return results, expectations


def _run_comb_sequence(sc: Scenario, raw_sink):
    a = _parse_floats(sc.param("a"))
    b = _parse_floats(sc.param("b"))
    iterations = [int(x) for x in _parse_floats(sc.param("iterations"))]
    domains = [build_comb(k, a[:k + 1], b[:k])[0] for k in iterations]
    growth = _parse_floats(sc.param("growth")) if sc.param("growth") else None
    rep = verify_increasing_domains(
        domains, complex(_parse_number(sc.param("start"))),
        float(sc.param("p")), int(sc.param("n")), RngStream(sc.seed),
        kernel=sc.param("kernel"), workers=sc.workers,
        growth_schedule=growth)
    results = {
        "iterations": iterations,
        "moments": [_estimate_dict(m.estimate) for m in rep.moments],
        "tail_indices": [m.tail_index.value for m in rep.moments],
        "monotone": rep.monotone_ok,
    }
    expectations = [_expectation("monotone", rep.monotone_ok,
                                 "estimates nondecreasing beyond joint CIs")]
    if growth is not None:
        results["growth_schedule"] = growth
        for k, okg in zip(iterations, rep.growth_ok):
            expectations.append(_expectation(
                f"growth_V{k}", okg, "estimate - 2 se above its floor"))
    return results, expectations


def _run_pushforward(sc: Scenario, raw_sink):
    domain = parse_domain(sc.param("domain"))
    image = parse_domain(sc.param("image"))
    amap = parse_map(sc.param("map"))
    start = complex(_parse_number(sc.param("start")))
    n = int(sc.param("n"))
    batch, _ = run_exits(domain, start, n, "em", EmConfig(),
                         RngStream(sc.seed), sc.workers)
    ok = batch.ok
    mapped = amap.evaluate(batch.exit_point[ok])
    mapped_labels = image.label_codes(mapped)
    same = np.array_equal(mapped_labels, batch.label[ok])
    raw_sink(sc, batch)
    results = {
        "n_ok": int(np.sum(ok)),
        "excluded": batch.n_excluded,
        "labels_identical": bool(same),
    }
    expectations = [_expectation(
        "labels_identical", same,
        "pushforward preserves exit labels path by path")]
    return results, expectations


_RUNNERS = {
    "harmonic_measure": _run_harmonic_measure,
    "moment": _run_moment,
    "hardy": _run_hardy,
    "karafyllia": _run_karafyllia,
    "cauchy": _run_cauchy,
    "modulus": _run_modulus,
    "comb_sequence": _run_comb_sequence,
    "pushforward_check": _run_pushforward,
}


# ---------------------------------------------------------------------------
# Orchestration and persistence
# ---------------------------------------------------------------------------

def _write_raw_csv(path: str, scenario: str, batch):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "path_id", "exit_re", "exit_im", "exit_time",
                    "label", "steps", "status"])
        for i in range(len(batch)):
            ok = bool(batch.ok[i])
            t = ""
            if batch.exit_time is not None and ok:
                t = repr(float(batch.exit_time[i]))
            w.writerow([
                scenario, i,
                repr(float(batch.exit_point[i].real)) if ok else "",
                repr(float(batch.exit_point[i].imag)) if ok else "",
                t,
                BoundaryLabel(int(batch.label[i])).name if ok else "",
                int(batch.steps[i]),
                "ok" if ok else "max_steps",
            ])


def run_scenario(sc: Scenario, out_dir: str | None = None,
                 write_raw: bool = False) -> dict:
    """Execute one scenario and return its report dictionary."""
    raw_rows = []

    def raw_sink(scenario, batch):
        if write_raw:
            raw_rows.append(batch)

    t0 = time.perf_counter()
    runner = _RUNNERS[sc.experiment]
    results, expectations = runner(sc, raw_sink)
    wall = time.perf_counter() - t0
    report = {
        "schema": SCHEMA_VERSION,
        "artifact_version": ARTIFACT_VERSION,
        "scenario": {
            "name": sc.name,
            "experiment": sc.experiment,
            "params": dict(sc.params),
            "seed": sc.seed,
            "workers": sc.workers,
            "out": sc.out,
        },
        "wall_time_s": wall,
        "results": results,
        "expectations": expectations,
        "passed": all(e["passed"] for e in expectations),
    }
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, f"{sc.name}.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
        if write_raw and raw_rows:
            _write_raw_csv(os.path.join(out_dir, f"{sc.name}.csv"),
                           sc.name, raw_rows[0])
    return report


def run(config_path: str, overrides=None, out_dir: str | None = None,
        write_raw: bool = False, workers: int | None = None) -> list[dict]:
    """Run every scenario in a config file; per-scenario failures are
    recorded in the reports, not raised."""
    scenarios = parse_config(config_path, overrides)
    reports = []
    for sc in scenarios:
        if workers is not None:
            sc = Scenario(name=sc.name, experiment=sc.experiment,
                          params=sc.params, seed=sc.seed, workers=workers,
                          out=sc.out)
        target_dir = out_dir or sc.out
        try:
            reports.append(run_scenario(sc, target_dir, write_raw))
        except BmxError as exc:
            reports.append({
                "schema": SCHEMA_VERSION,
                "artifact_version": ARTIFACT_VERSION,
                "scenario": {"name": sc.name, "experiment": sc.experiment,
                             "params": dict(sc.params), "seed": sc.seed,
                             "workers": sc.workers, "out": sc.out},
                "error": f"{type(exc).__name__}: {exc}",
                "expectations": [],
                "passed": False,
            })
    return reports


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bmx",
        description="Brownian exit-time scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run scenarios from a config file")
    runp.add_argument("config")
    runp.add_argument("--set", action="append", default=[], metavar="K=V",
                      help="override a config key in every scenario")
    runp.add_argument("--raw", action="store_true",
                      help="write per-path CSV records")
    runp.add_argument("--workers", type=int, default=None)
    runp.add_argument("--out", default=None, help="report output directory")
    args = parser.parse_args(argv)

    overrides = {}
    for item in args.set:
        if "=" not in item:
            print(f"error: --set needs key=value, got {item!r}",
                  file=sys.stderr)
            return 1
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()

    try:
        reports = run(args.config, overrides, out_dir=args.out,
                      write_raw=args.raw, workers=args.workers)
    except (BmxError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    any_fail = False
    any_error = False
    for rep in reports:
        name = rep["scenario"]["name"]
        if "error" in rep:
            any_error = True
            print(f"[{name}] ERROR {rep['error']}")
            continue
        for e in rep["expectations"]:
            status = "pass" if e["passed"] else "FAIL"
            print(f"[{name}] {e['name']}: {status} ({e['detail']})")
            any_fail |= not e["passed"]
        if not rep["expectations"]:
            print(f"[{name}] completed (no declared expectations)")
    if any_error:
        return 1
    return 2 if any_fail else 0


if __name__ == "__main__":
    sys.exit(main())
