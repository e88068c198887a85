"""Compare the compiled and pure-python simplex pivot kernels.

Both kernels implement the same pivot selection and the same
floating-point update order, so every workload must produce
byte-identical results (status, objective repr, variable values,
iteration and node counts) under either kernel.  The script times both
and exits nonzero on any result mismatch.

Run from the repository root::

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from vnfplace import formulations, solver
from vnfplace.milp import BINARY, CONTINUOUS, SENSE_LE, MilpModel
from vnfplace.scenarios import _load_instance, load_config
from vnfplace.solver import branch_bound, simplex

REPO = Path(__file__).resolve().parent.parent


def random_lp(seed: int, n: int, m: int) -> MilpModel:
    """Bounded, feasible LP: min c.x  s.t.  A x <= b, 0 <= x <= 1."""
    rng = np.random.default_rng(seed)
    model = MilpModel(name=f"rand_lp_{seed}")
    for j in range(n):
        model.add_var(f"x{j}", CONTINUOUS, 0.0, 1.0)
    for i in range(m):
        cols = rng.choice(n, size=max(2, n // 4), replace=False)
        terms = [(int(j), float(rng.uniform(0.1, 2.0))) for j in sorted(cols)]
        rhs = 0.4 * sum(a for _, a in terms)
        model.add_constraint(f"r{i}", terms, SENSE_LE, float(rhs))
    model.set_objective([(j, float(rng.uniform(-1.0, -0.1))) for j in range(n)])
    return model


def random_milp(seed: int, n_bin: int, n_cont: int, m: int) -> MilpModel:
    """Mixed knapsack-style MILP, always feasible at x = 0."""
    rng = np.random.default_rng(seed)
    model = MilpModel(name=f"rand_milp_{seed}")
    for j in range(n_bin):
        model.add_var(f"b{j}", BINARY)
    for j in range(n_cont):
        model.add_var(f"y{j}", CONTINUOUS, 0.0, 2.0)
    n = n_bin + n_cont
    for i in range(m):
        cols = rng.choice(n, size=max(2, n // 3), replace=False)
        terms = [(int(j), float(rng.uniform(0.2, 3.0))) for j in sorted(cols)]
        rhs = 0.5 * sum(a for _, a in terms)
        model.add_constraint(f"r{i}", terms, SENSE_LE, float(rhs))
    model.set_objective([(j, float(rng.uniform(-2.0, -0.1))) for j in range(n)])
    return model


def corpus_models() -> list[tuple[str, MilpModel, str]]:
    """Real models from the bundled instance corpus."""
    out = []
    cfg = load_config(REPO / "data" / "corpus" / "te_chord.json")
    topo, traffic, pathset = _load_instance(cfg)
    background = sorted(traffic.background, key=lambda d: d.id)
    te_model, _ = formulations.build_te_model(topo, background, pathset, cfg.costfn)
    out.append(("te_chord (milp)", te_model, "milp"))

    cfg = load_config(REPO / "data" / "corpus" / "ra_theta_r2_lb.json")
    topo, traffic, pathset = _load_instance(cfg)
    from vnfplace.scenarios import ra_input_from

    inp = ra_input_from(
        cfg, topo, traffic, pathset, {l.id: 0.0 for l in topo.links}
    )
    ra_model, _ = formulations.build_ra_model(inp)
    out.append(("ra_theta_r2_lb (milp)", ra_model, "milp"))
    return out


def workloads() -> list[tuple[str, MilpModel, str]]:
    items: list[tuple[str, MilpModel, str]] = []
    items.append(("random lp 160x110", random_lp(11, 160, 110), "lp"))
    items.append(("random lp 240x160", random_lp(23, 240, 160), "lp"))
    items.append(("random milp 26b+10c", random_milp(5, 26, 10, 30), "milp"))
    items.append(("random milp 34b+8c", random_milp(17, 34, 8, 40), "milp"))
    items.extend(corpus_models())
    return items


def signature(kind: str, model: MilpModel):
    """Fully-reproducible result fingerprint under the active kernel."""
    if kind == "lp":
        sol = simplex.solve_lp(model)
        vals = tuple((vid, repr(sol.values[vid])) for vid in sorted(sol.values))
        return (sol.status, repr(sol.objective), sol.iterations, vals)
    sol = branch_bound.solve_milp(model, gap_tol=1e-9)
    vals = tuple((vid, repr(sol.values[vid])) for vid in sorted(sol.values))
    return (
        sol.status,
        repr(sol.objective),
        sol.stats.nodes,
        sol.stats.lp_iterations,
        vals,
    )


def time_workload(kind: str, model: MilpModel, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        signature(kind, model)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3, help="timing repetitions")
    args = ap.parse_args(argv)

    if simplex._kernel_cy is None:
        print(
            "compiled kernel unavailable (extension not built or "
            "VNFPLACE_PURE_PYTHON set); nothing to compare"
        )
        return 0

    items = workloads()
    rows = []
    mismatches = []
    for name, model, kind in items:
        results = {}
        times = {}
        for kname, kern in (
            ("compiled", simplex._kernel_cy),
            ("pure", simplex._kernel_py),
        ):
            simplex._kernel = kern
            try:
                results[kname] = signature(kind, model)
                times[kname] = time_workload(kind, model, args.repeat)
            finally:
                simplex._kernel = simplex._kernel_cy
        same = results["compiled"] == results["pure"]
        if not same:
            mismatches.append(name)
        rows.append(
            (
                name,
                model.num_vars,
                len(model.constraints),
                times["compiled"] * 1e3,
                times["pure"] * 1e3,
                times["pure"] / times["compiled"],
                "yes" if same else "NO",
            )
        )

    header = f"{'workload':<24} {'vars':>5} {'rows':>5} {'compiled_ms':>12} {'pure_ms':>10} {'speedup':>8} {'identical':>9}"
    print(header)
    print("-" * len(header))
    for name, nv, nc, tc, tp, sp, same in rows:
        print(
            f"{name:<24} {nv:>5} {nc:>5} {tc:>12.2f} {tp:>10.2f} {sp:>7.2f}x {same:>9}"
        )

    if mismatches:
        print(f"\nMISMATCH: kernels disagree on: {', '.join(mismatches)}")
        for name, model, kind in items:
            if name not in mismatches:
                continue
            simplex._kernel = simplex._kernel_cy
            a = signature(kind, model)
            simplex._kernel = simplex._kernel_py
            b = signature(kind, model)
            simplex._kernel = simplex._kernel_cy
            for fa, fb in zip(a, b):
                if fa != fb:
                    print(f"  {name}: {str(fa)[:120]} != {str(fb)[:120]}")
        return 1
    print("\nall workloads byte-identical across kernels")
    return 0


if __name__ == "__main__":
    sys.exit(main())
