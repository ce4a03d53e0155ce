"""Command-line front end.

Verbs: sample, walk, resist, classify, fit, report.  Experiments are
described by a flat key=value config file, e.g.

    family=frso
    d=7
    L=1
    p=1.08
    flavor=conditioned
    p_hat=1.08
    scales=4,6,8,12,16
    trials=50
    seed=7
    statistics=volume_ur,reff_qr,etau_qr

Tree-oracle experiments use flavor=tree and omit the kernel keys.
"""

from __future__ import annotations

import argparse
import sys

from . import harness, iic
from .explore import CriticalPoint
from .graphs import write_edge_list
from .harness import (ExperimentConfig, classify_good_radii, fit_exponent,
                      measure_for_jsets, parse_records, report, run_experiment,
                      target_slope)
from .kernels import KernelSpec

WALK_DEFAULT = ("p2n", "wrange", "disp_int")
RESIST_DEFAULT = ("volume_ur", "volume_br", "reff_qr", "reff_br", "etau_br")


def load_config(path):
    cfg = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            k, v = line.split("=", 1)
            cfg[k.strip()] = v.strip()
    return cfg


def _kernel_from(cfg):
    if "family" not in cfg:
        return None
    return KernelSpec.from_config(cfg)


def _experiment_from(cfg, default_stats, args):
    stats = tuple(cfg.get("statistics", ",".join(default_stats)).split(","))
    scales = tuple(float(s) for s in cfg["scales"].split(","))
    lambdas = tuple(float(s) for s in cfg.get("lambdas", "2,5,10,20,50").split(","))
    kernel = _kernel_from(cfg)
    alpha = kernel.alpha if (kernel and kernel.family == "lrso") else None
    seed = int(args.seed if args.seed is not None else cfg.get("seed", 0))
    return ExperimentConfig(
        experiment_id=cfg.get("experiment_id", "exp"),
        flavor=cfg.get("flavor", "tree"),
        scales=scales,
        trials=int(cfg.get("trials", 30)),
        seed=seed,
        statistics=stats,
        kernel=kernel,
        p_hat=float(cfg["p_hat"]) if "p_hat" in cfg else None,
        lambdas=lambdas,
        alpha=alpha,
        walk_trials=int(cfg.get("walk_trials", 400)),
        out=args.out,
    )


def cmd_sample(args):
    cfg = load_config(args.config)
    seed = int(args.seed if args.seed is not None else cfg.get("seed", 0))
    flavor = cfg.get("flavor", "tree")
    if flavor == "tree":
        depth = int(cfg.get("depth", 128))
        s = iic.sample_tree_iic(iic.Offspring.poisson(1.0), depth=depth, seed=seed)
    else:
        kernel = _kernel_from(cfg)
        pc = CriticalPoint(p_hat=float(cfg["p_hat"]), ci_halfwidth=1e-6,
                           method="configured", kernel=kernel)
        n = int(cfg.get("window", 16))
        if flavor == "conditioned":
            s = iic.sample_conditioned_iic(pc, n, seed=seed)
        else:
            s = iic.sample_size_biased(pc, n, seed=seed)
    out = args.out or "sample.edges"
    write_edge_list(out, s.graph, extra_header=[f"flavor={s.flavor}",
                                                f"valid_window={s.valid_window}"])
    print(f"wrote {out}: {s.site_graph.n_vertices} vertices, "
          f"{s.site_graph.n_edges} edges, flavor={s.flavor}")
    return 0


def _run(args, default_stats):
    cfg = load_config(args.config)
    exp = _experiment_from(cfg, default_stats, args)
    records = run_experiment(exp, threads=args.threads)
    if not exp.out:
        for r in records:
            print(r.line())
    else:
        print(f"wrote {len(records)} records to {exp.out}")
    return 0


def cmd_walk(args):
    return _run(args, WALK_DEFAULT)


def cmd_resist(args):
    return _run(args, RESIST_DEFAULT)


def cmd_classify(args):
    cfg = load_config(args.config)
    exp = _experiment_from(cfg, RESIST_DEFAULT, args)
    rows = []
    for trial in range(exp.trials):
        sample = harness._build_sample(exp, trial)
        for r in exp.scales:
            measured = measure_for_jsets(sample, r)
            rows.extend(classify_good_radii(measured, r, lambdas=exp.lambdas,
                                            alpha=exp.alpha))
    tables = report([], verdicts=rows, out_dir=args.out)
    if not args.out:
        sys.stdout.write(tables["jsets.csv"])
    else:
        print(f"wrote jsets.csv ({len(rows)} verdicts) to {args.out}")
    return 0


def cmd_fit(args):
    _, records = parse_records(args.records)
    alpha = args.alpha
    target = target_slope(args.statistic, alpha=alpha)
    window = tuple(args.window) if args.window else None
    fit = fit_exponent(records, args.statistic, window=window, target=target,
                       tolerance=args.tolerance)
    print(fit.summary())
    return 0


def cmd_report(args):
    _, records = parse_records(args.records)
    tables = report(records, out_dir=args.out)
    if args.out:
        print(f"wrote {len(tables)} tables to {args.out}")
    else:
        for name, text in sorted(tables.items()):
            print(f"== {name} ==")
            sys.stdout.write(text)
    return 0


def main(argv=None):
    ap = argparse.ArgumentParser(prog="iiclab")
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=1)

    common(sub.add_parser("sample", help="draw one sample, write its edge list"))
    common(sub.add_parser("walk", help="run walk statistics, emit records"))
    common(sub.add_parser("resist", help="run resistance/volume statistics"))
    common(sub.add_parser("classify", help="good-radii membership table"))

    pf = sub.add_parser("fit", help="log-log exponent fit from records")
    pf.add_argument("--records", required=True)
    pf.add_argument("--statistic", required=True)
    pf.add_argument("--window", type=float, nargs=2, default=None)
    pf.add_argument("--alpha", type=float, default=None)
    pf.add_argument("--tolerance", type=float, default=None)

    pr = sub.add_parser("report", help="tables from a record stream")
    pr.add_argument("--records", required=True)
    pr.add_argument("--out", default=None)

    args = ap.parse_args(argv)
    return {"sample": cmd_sample, "walk": cmd_walk, "resist": cmd_resist,
            "classify": cmd_classify, "fit": cmd_fit,
            "report": cmd_report}[args.verb](args)


if __name__ == "__main__":
    sys.exit(main())
