"""Monte-Carlo support-recovery campaigns over the preset scenarios."""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .csbr import StoppingRule, csbr
from .dictionary import ActiveSetState
from .l0pd import l0pd
from .problems import Scenario, draw_instance, scenario_dictionary
from .sbr import best_insertion
from .selection import default_grid, grid_decades, score_trial

log = logging.getLogger(__name__)

ALGORITHMS = ("csbr", "l0pd")
LARGE_M = 500


def stop_factor(algo: str, m: int) -> float:
    """lambda_stop as a multiple of the smallest grid value."""
    if algo == "csbr":
        return 1.0
    return 0.5 if m <= LARGE_M else 0.8


def run_trial(sc: Scenario, algo: str, trial: int, dictionary=None, stop_mult: float | None = None,
              check_polygon: bool = True) -> dict:
    """Solve one draw of ``sc`` and score it."""
    inst = draw_instance(sc, trial, dictionary)
    A, y = inst.dictionary, inst.y
    lam1, _ = best_insertion(ActiveSetState.empty(A, y))
    grid = default_grid(lam1, decades=grid_decades(sc.snr_db))
    mult = stop_factor(algo, A.m) if stop_mult is None else stop_mult
    stop = StoppingRule(lambda_stop=mult * grid.bottom)
    t0 = time.process_time()
    if algo == "csbr":
        path = csbr(A, y, stop)
        problems = []
    elif algo == "l0pd":
        poly, path = l0pd(A, y, stop)
        problems = poly.check_invariants() if check_polygon else []
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    cpu = time.process_time() - t0
    scores = score_trial(inst, path, grid, A.m)
    rec = {
        "trial": trial,
        "support_star": list(inst.support_star),
        "grid": [float(v) for v in grid.values],
        "lambda_stop": stop.lambda_stop,
        "n_segments": len(path),
        "polygon_problems": problems,
        "timing": {"cpu_seconds": cpu},
    }
    rec.update(scores.to_dict())
    rec["curve"] = {"lambdas": [float(v) for v in path.lambdas], "cards": path.cards,
                    "errors": [float(e) for e in path.errors]}
    return rec


def _run_one(args):
    sc, algo, trial = args
    return run_trial(sc, algo, trial)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("L0PATH_THREADS", "1")))
    except ValueError:
        return 1


def aggregate(records: list) -> dict:
    keys = ("se", "tp", "order", "mdlc_se", "mdlc_tp", "mdlc_order")
    out = {k: float(np.mean([r[k] for r in records])) for k in keys}
    n_grid = len(records[0]["j_values"])
    mean_j = []
    for i in range(n_grid):
        vals = [r["j_values"][i] for r in records if r["j_values"][i] is not None]
        mean_j.append(float(np.mean(vals)) if vals else None)
    out["mean_j"] = mean_j
    out["polygon_violations"] = sum(len(r["polygon_problems"]) for r in records)
    cpu = float(np.mean([r["timing"]["cpu_seconds"] for r in records]))
    out["timing"] = {"cpu_seconds": cpu, "cpu_per_grid_point_seconds": cpu / n_grid}
    return out


def run_bench(sc: Scenario, algos=ALGORITHMS, trials: int = 30, first_trial: int = 0) -> dict:
    """Run ``trials`` draws of ``sc`` through each algorithm and aggregate the scores."""
    results = {}
    workers = _threads()
    A = scenario_dictionary(sc) if workers == 1 else None
    for algo in algos:
        t0 = time.perf_counter()
        ids = range(first_trial, first_trial + trials)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                recs = list(ex.map(_run_one, [(sc, algo, t) for t in ids]))
        else:
            recs = [run_trial(sc, algo, t, A) for t in ids]
        results[algo] = {
            "trials": recs,
            "mean": aggregate(recs),
            "timing": {"wall_seconds": time.perf_counter() - t0},
        }
        log.info("%s/%s: %s", sc.name, algo, results[algo]["mean"])
    return results


SUMMARY_ROWS = ("se", "tp", "order", "mdlc_se", "mdlc_tp", "mdlc_order")
ROW_LABELS = {"se": "SE", "tp": "TP", "order": "Order", "mdlc_se": "MDLc-SE",
              "mdlc_tp": "MDLc-TP", "mdlc_order": "MDLc-Order"}


def summary_rows(sc: Scenario, results: dict) -> list:
    """Score table with one row per metric and one column per algorithm."""
    algos = list(results)
    rows = [[f"Scenario {sc.name}"] + algos]
    for key in SUMMARY_ROWS:
        label = ROW_LABELS[key]
        if key == "order":
            label += f" (true: {sc.k})"
        rows.append([label] + [f"{results[a]['mean'][key]:.2f}" for a in algos])
    return rows
