"""Experiment orchestration: configs, seeded trials, persistent run records,
exponent regression, and good-radii classification.

A RunRecord is one observation: (experiment id, seed, scale, statistic,
value, censored).  Records are line-delimited text with a config digest in
the header, appendable and parseable anywhere; identical configs reproduce
byte-identical streams.
"""

from __future__ import annotations

import hashlib
import io
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import metrics, resistance, walk
from .explore import CriticalPoint
from .iic import IICSample, Offspring, sample_conditioned_iic, sample_tree_iic
from .kernels import KernelSpec

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "JSetVerdict",
    "ExponentFit",
    "run_experiment",
    "write_records",
    "parse_records",
    "classify_good_radii",
    "fit_exponent",
    "report",
    "target_slope",
    "measure_sample",
    "measure_for_jsets",
]

LAMBDA_GRID = (2.0, 5.0, 10.0, 20.0, 50.0)

# statistics measurable per (sample, scale); walk statistics use scale = n
RESIST_STATISTICS = (
    "volume_ur", "volume_br", "reff_qr", "reff_br", "reff_max_ur",
    "volume_bb_br", "reff_bb_br", "etau_qr", "etau_br",
    "npiv_qr", "nbb_r", "h_r",
)
WALK_STATISTICS = ("p2n", "wrange", "disp_int", "disp_ext", "spine_disp")
ALL_STATISTICS = RESIST_STATISTICS + WALK_STATISTICS


@dataclass(frozen=True)
class RunRecord:
    experiment_id: str
    seed: int
    scale: float
    statistic: str
    value: float
    censored: bool = False

    def line(self):
        return "\t".join([self.experiment_id, str(self.seed), repr(float(self.scale)),
                          self.statistic, repr(float(self.value)), str(int(self.censored))])

    @classmethod
    def from_line(cls, line):
        eid, seed, scale, stat, value, cens = line.rstrip("\n").split("\t")
        return cls(experiment_id=eid, seed=int(seed), scale=float(scale),
                   statistic=stat, value=float(value), censored=bool(int(cens)))


@dataclass
class ExperimentConfig:
    """One reproducible experiment.

    flavor "tree" builds Kesten-tree samples (depth = max scale + margin);
    flavor "conditioned" rejection-samples lattice clusters at the supplied
    critical estimate.  `alpha` echoes the kernel decay for exponent targets
    (None means finite range, i.e. alpha treated as infinity).
    """

    experiment_id: str
    flavor: str
    scales: tuple
    trials: int
    seed: int
    statistics: tuple
    kernel: Optional[KernelSpec] = None
    p_hat: Optional[float] = None
    lambdas: tuple = LAMBDA_GRID
    alpha: Optional[float] = None
    depth_margin: int = 2
    walk_trials: int = 400
    out: Optional[str] = None

    def __post_init__(self):
        self.scales = tuple(float(s) for s in self.scales)
        if any(b <= a for a, b in zip(self.scales, self.scales[1:])):
            raise ValueError("scales must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.statistics) - set(ALL_STATISTICS)
        if unknown:
            raise ValueError(f"unknown statistics: {sorted(unknown)}")
        if self.flavor not in ("tree", "conditioned"):
            raise ValueError("flavor must be 'tree' or 'conditioned'")
        if self.flavor == "conditioned" and (self.kernel is None or self.p_hat is None):
            raise ValueError("conditioned flavor needs kernel and p_hat")

    def config_text(self):
        items = {
            "experiment_id": self.experiment_id,
            "flavor": self.flavor,
            "scales": ",".join(repr(s) for s in self.scales),
            "trials": self.trials,
            "seed": self.seed,
            "statistics": ",".join(self.statistics),
            "lambdas": ",".join(repr(l) for l in self.lambdas),
            "alpha": self.alpha,
            "depth_margin": self.depth_margin,
            "walk_trials": self.walk_trials,
        }
        if self.kernel is not None:
            items.update(self.kernel.config_dict())
            items["p_hat"] = self.p_hat
        return "\n".join(f"{k}={items[k]}" for k in sorted(items))

    def digest(self):
        return hashlib.sha256(self.config_text().encode()).hexdigest()[:16]


def _alpha_cap(alpha, cap):
    return cap if alpha is None else min(alpha, cap)


def target_slope(statistic, alpha=None, backbone=False, modified=False):
    """Asymptotic log-log slope for a statistic (None when no target).

    `alpha` is the long-range decay (None = finite range); backbone and
    modified variants shift the exit/return/displacement exponents.
    """
    a2 = _alpha_cap(alpha, 2.0)
    a4 = _alpha_cap(alpha, 4.0)
    table = {
        "volume_ur": 2 * a2,
        "volume_br": 2.0,
        "reff_qr": 2.0,
        "reff_br": 1.0,
        "nbb_r": a2,
        "etau_br": 2.0 if backbone else 3.0,
        "etau_qr": (2 * a2 if backbone else
                    (3 * a2 if modified else
                     (6.0 if alpha is None or alpha >= 4 else 3 * a4 / 2))),
        "p2n": -0.5 if backbone else -2.0 / 3.0,
        "wrange": 2.0 / 3.0,
        "disp_int": 0.5 if backbone else 1.0 / 3.0,
        "disp_ext": 1 / (2 * a2) if backbone else 1 / (3 * a2),
        "volume_bb_br": 1.0,
        "reff_bb_br": 1.0,
        "spine_disp": 1 / a2,
        "onearm_ext": -2.0,
        "onearm_int": -1.0,
        "cluster_tail": -0.5,
    }
    return table.get(statistic)


# -- measurement ----------------------------------------------------------------


def _ball_members(sample: IICSample, r, intrinsic):
    g = sample.site_graph
    if intrinsic:
        return metrics.intrinsic_ball(g, g.origin, int(r)).members
    return metrics.restricted_cluster(g, r).members


def measure_sample(sample: IICSample, scales, statistics, seed=0, walk_trials=400):
    """Evaluate resistance/structure statistics of one sample at each scale.

    Returns {(scale, statistic): (value, censored)}.  Walk statistics are
    Monte Carlo with `walk_trials` walks; structural ones are exact solves.
    """
    g = sample.site_graph
    out = {}
    needs_dec = {"nbb_r", "h_r", "npiv_qr", "volume_bb_br", "reff_bb_br", "spine_disp"}
    dec = None
    if needs_dec & set(statistics):
        targets = sample.target_ids()
        if targets.size:
            dec = metrics.backbone(g, targets.tolist())
    bb_graph = None
    if dec is not None and {"volume_bb_br", "reff_bb_br"} & set(statistics):
        bb_graph = g.subgraph_from_edges(dec.backbone_edges)
    stats_dec = None
    if dec is not None and {"nbb_r", "h_r"} & set(statistics):
        stats_dec = metrics.pivotal_stats(g, dec, scales)

    walk_ns = sorted(int(s) for s in scales)
    walk_stats = set(statistics) & set(WALK_STATISTICS)
    profile = rp = None
    if {"wrange", "disp_int", "disp_ext"} & walk_stats:
        profile = walk.displacement_profile(
            g, g.origin, walk_ns, trials=walk_trials, seed=seed,
            track_range="wrange" in walk_stats)
    if "p2n" in walk_stats:
        rp = walk.return_probability(g, g.origin, walk_ns, trials=walk_trials,
                                     seed=seed + 1, exact_limit=0)

    for i, r in enumerate(scales):
        for stat in statistics:
            val, cens = math.nan, False
            if stat == "volume_ur":
                val = metrics.edge_volume(g, _ball_members(sample, r, False))
            elif stat == "volume_br":
                val = metrics.edge_volume(g, _ball_members(sample, r, True))
            elif stat == "reff_qr":
                val = resistance.resistance_to_complement(
                    g, g.origin, _ball_members(sample, r, False)).r_eff
            elif stat == "reff_br":
                val = resistance.resistance_to_complement(
                    g, g.origin, _ball_members(sample, r, True)).r_eff
            elif stat == "reff_max_ur":
                members = _ball_members(sample, r, False)
                val = resistance.max_resistance_from_origin(g, members)
            elif stat == "volume_bb_br":
                val = metrics.edge_volume(
                    bb_graph, metrics.intrinsic_ball(bb_graph, g.origin, int(r)).members)
            elif stat == "reff_bb_br":
                val = resistance.resistance_to_complement(
                    bb_graph, g.origin,
                    metrics.intrinsic_ball(bb_graph, g.origin, int(r)).members).r_eff
            elif stat == "etau_qr":
                val, _ = resistance.expected_exit_time(
                    g, g.origin, _ball_members(sample, r, False), check_bound=False)
            elif stat == "etau_br":
                val, _ = resistance.expected_exit_time(
                    g, g.origin, _ball_members(sample, r, True), check_bound=False)
            elif stat == "npiv_qr":
                n = metrics.pivotal_count_to_complement(g, r)
                val, cens = (float(n), False) if n >= 0 else (math.nan, True)
            elif stat == "nbb_r":
                val = float(stats_dec.n_bb[i])
            elif stat == "h_r":
                val = float(stats_dec.h[i])
                cens = bool(stats_dec.h_censored[i])
            elif stat == "spine_disp":
                ids, norms, short = metrics.pivotal_displacement(g, dec, int(r))
                val, cens = float(norms[-1]), short
            elif stat == "p2n":
                j = walk_ns.index(int(r))
                val = float(rp.p2n[j])
            elif stat == "wrange":
                j = walk_ns.index(int(r))
                val = float(profile.range_mean[j])
            elif stat == "disp_int":
                j = walk_ns.index(int(r))
                val = float(profile.mean_intrinsic[j])
            elif stat == "disp_ext":
                j = walk_ns.index(int(r))
                if profile.mean_extrinsic is None:
                    cens = True
                else:
                    val = float(profile.mean_extrinsic[j])
            if isinstance(val, float) and math.isinf(val):
                val, cens = math.nan, True
            out[(r, stat)] = (val, cens)
    return out


def _build_sample(cfg: ExperimentConfig, trial):
    if cfg.flavor == "tree":
        depth = int(max(cfg.scales)) + cfg.depth_margin
        return sample_tree_iic(Offspring.poisson(1.0), depth=depth,
                               seed=cfg.seed * 1_000_003 + trial)
    pc = CriticalPoint(p_hat=cfg.p_hat, ci_halfwidth=1e-6,
                       method="configured", kernel=cfg.kernel)
    n = int(max(cfg.scales))
    return sample_conditioned_iic(pc, n, seed=cfg.seed * 1_000_003 + trial)


def run_experiment(cfg: ExperimentConfig, threads=1):
    """All RunRecords for a config, in deterministic (trial, scale, stat) order."""
    def one(trial):
        sample = _build_sample(cfg, trial)
        m = measure_sample(sample, cfg.scales, cfg.statistics,
                           seed=cfg.seed * 9_176_867 + trial,
                           walk_trials=cfg.walk_trials)
        recs = []
        for r in cfg.scales:
            for stat in cfg.statistics:
                v, c = m[(r, stat)]
                recs.append(RunRecord(experiment_id=cfg.experiment_id,
                                      seed=cfg.seed * 1_000_003 + trial,
                                      scale=r, statistic=stat, value=v, censored=c))
        return recs

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(one, range(cfg.trials)))
    else:
        chunks = [one(t) for t in range(cfg.trials)]
    records = [r for chunk in chunks for r in chunk]
    if cfg.out:
        write_records(cfg.out, cfg, records)
    return records


def write_records(path, cfg: ExperimentConfig, records):
    with open(path, "w") as fh:
        fh.write("# iiclab-records v1\n")
        fh.write(f"# digest={cfg.digest()}\n")
        for line in cfg.config_text().splitlines():
            fh.write(f"# {line}\n")
        for r in records:
            fh.write(r.line() + "\n")


def parse_records(path):
    header = {}
    records = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    header[k] = v
                continue
            if line.strip():
                records.append(RunRecord.from_line(line))
    return header, records


# -- exponent fits ----------------------------------------------------------------


@dataclass
class ExponentFit:
    statistic: str
    slope: float
    halfwidth: float
    window: tuple
    target: Optional[float]
    verdict: Optional[bool]
    n_scales: int
    censor_rate: float

    def summary(self):
        t = "n/a" if self.target is None else f"{self.target:+.3f}"
        v = "n/a" if self.verdict is None else ("PASS" if self.verdict else "FAIL")
        return (f"{self.statistic:14s} slope {self.slope:+.3f} +- {self.halfwidth:.3f} "
                f"target {t} [{v}] window {self.window}")


def fit_exponent(records, statistic, window=None, target=None, tolerance=None,
                 weighted=True):
    """Weighted log-log regression of per-scale means.

    Censored observations are excluded from the means (the censor rate is
    reported); per-scale SEs weight the fit when available.
    """
    by_scale = {}
    n_cens = n_tot = 0
    for r in records:
        if r.statistic != statistic:
            continue
        n_tot += 1
        if r.censored or math.isnan(r.value):
            n_cens += 1
            continue
        by_scale.setdefault(r.scale, []).append(r.value)
    scales = sorted(s for s in by_scale
                    if window is None or window[0] <= s <= window[1])
    if len(scales) < 3:
        raise ValueError("need at least 3 scales in the window")
    xs, ys, ws = [], [], []
    for s in scales:
        vals = np.asarray(by_scale[s], dtype=float)
        mean = vals.mean()
        if mean <= 0:
            continue
        se = vals.std(ddof=1) / math.sqrt(len(vals)) if len(vals) > 1 else 0.0
        xs.append(math.log(s))
        ys.append(math.log(mean))
        ws.append(1.0 / max(se / mean, 1e-9) ** 2 if (weighted and se > 0) else 1.0)
    xs, ys, ws = map(np.asarray, (xs, ys, ws))
    if len(xs) < 3:
        raise ValueError("fewer than 3 usable scale points")
    wsum = ws.sum()
    xbar = (ws * xs).sum() / wsum
    ybar = (ws * ys).sum() / wsum
    sxx = (ws * (xs - xbar) ** 2).sum()
    slope = (ws * (xs - xbar) * (ys - ybar)).sum() / sxx
    intercept = ybar - slope * xbar
    resid = ys - (intercept + slope * xs)
    dof = max(len(xs) - 2, 1)
    # reduced chi-square scaling: exact when the weights are 1/se^2
    var = (ws * resid ** 2).sum() / dof
    halfwidth = 1.96 * math.sqrt(max(var, 1e-300) / sxx)
    verdict = None
    if target is not None and tolerance is not None:
        verdict = abs(slope - target) <= tolerance
    return ExponentFit(statistic=statistic, slope=float(slope),
                       halfwidth=float(halfwidth),
                       window=(scales[0], scales[-1]), target=target,
                       verdict=verdict, n_scales=len(xs),
                       censor_rate=n_cens / max(n_tot, 1))


# -- good-radii classification -------------------------------------------------


@dataclass
class JSetVerdict:
    radius: float
    lam: float
    flags: dict          # set name -> bool or None (withheld)
    measured: dict

    def membership(self, name):
        return self.flags.get(name)


def _within(value, lo, hi):
    return lo <= value <= hi


def classify_good_radii(measured, radius, lambdas=LAMBDA_GRID, alpha=None,
                        lrp_a=0.25, lrp_b=0.25):
    """J-set membership flags from one sample's measured quantities.

    `measured` maps statistic names (as in measure_sample, plus optionally
    "reff_mod_qr", "volume_bb_ur", "reff_bb_qr", "reff_max_bb_ur",
    "reff_to_pivotal_top", "volume_to_pivotal") to values.  Every flag is
    exactly the conjunction of its defining inequalities; a missing
    measurement withholds the verdict (None).
    """
    a2 = _alpha_cap(alpha, 2.0)
    a4 = _alpha_cap(alpha, 4.0)
    r = float(radius)
    out = []
    for lam in lambdas:
        flags = {}

        def have(*names):
            return all(measured.get(n) is not None
                       and not math.isnan(measured[n]) for n in names)

        if have("volume_ur", "reff_qr", "reff_max_ur"):
            flags["J_E"] = (_within(measured["volume_ur"], r ** 4 / lam, lam * r ** 4)
                            and _within(measured["reff_qr"], r ** 2 / lam, lam * r ** 2)
                            and measured["reff_max_ur"] <= lam * r ** 2)
        else:
            flags["J_E"] = None
        if have("volume_br", "reff_br"):
            flags["J_I"] = (_within(measured["volume_br"], r ** 2 / lam, lam * r ** 2)
                            and measured["reff_br"] >= r / lam)
        else:
            flags["J_I"] = None
        if have("volume_bb_ur", "reff_bb_qr", "reff_max_bb_ur"):
            flags["J_E_bb"] = (_within(measured["volume_bb_ur"], r ** a2 / lam, lam * r ** a2)
                               and _within(measured["reff_bb_qr"], r ** a2 / lam, lam * r ** a2)
                               and measured["reff_max_bb_ur"] <= lam * r ** a2)
        else:
            flags["J_E_bb"] = None
        if have("volume_bb_br", "reff_bb_br"):
            flags["J_I_bb"] = (_within(measured["volume_bb_br"], r / lam, lam * r)
                               and measured["reff_bb_br"] >= r / lam)
        else:
            flags["J_I_bb"] = None
        if have("volume_ur", "reff_mod_qr", "reff_max_mod_ur"):
            flags["J_E_mod"] = (
                _within(measured["volume_ur"], r ** (2 * a2) / lam, lam * r ** (2 * a2))
                and _within(measured["reff_mod_qr"], r ** a2 / lam, lam * r ** a2)
                and measured["reff_max_mod_ur"] <= lam * r ** a2)
        else:
            flags["J_E_mod"] = None
        reff_seq = measured.get("reff_to_pivotal_top_seq")
        vol_seq = measured.get("volume_to_pivotal_seq")
        if alpha is not None and have("reff_qr") and reff_seq is not None:
            # the pivotal index n of the long-range set depends on lambda
            rho = a4 / 2.0
            n = max(int(math.floor(lam ** (-(1 + lrp_a) / 3.0) * r ** rho)), 1)
            if n <= len(reff_seq):
                flags["J_lrp"] = (measured["reff_qr"] <= lam ** lrp_b * r ** rho
                                  and reff_seq[n - 1] <= lam * n
                                  and vol_seq[n - 1] <= lam * n ** 2)
            else:
                flags["J_lrp"] = None       # fewer than n pivotals in the sample
        else:
            flags["J_lrp"] = None
        out.append(JSetVerdict(radius=r, lam=float(lam), flags=flags,
                               measured=dict(measured)))
    return out


def measure_for_jsets(sample: IICSample, r, include_backbone=True,
                      include_modified=True, include_lrp=False,
                      include_point_resistances=True, max_pivotals=None):
    """The measurement dict needed by classify_good_radii at radius r.

    Heavier than measure_sample: optionally includes backbone-restricted and
    modified-configuration resistances plus the per-pivotal sequences of the
    long-range set (one solve per pivotal, so `max_pivotals` caps the cost;
    the set never consults indices past r^2).  Intended for desk-scale
    samples (thousands of vertices).
    """
    g = sample.site_graph
    out = {}
    ur = metrics.restricted_cluster(g, r).members
    br = metrics.intrinsic_ball(g, g.origin, int(r)).members
    out["volume_ur"] = metrics.edge_volume(g, ur)
    out["volume_br"] = metrics.edge_volume(g, br)
    out["reff_qr"] = resistance.resistance_to_complement(g, g.origin, ur).r_eff
    out["reff_br"] = resistance.resistance_to_complement(g, g.origin, br).r_eff
    if include_point_resistances:
        out["reff_max_ur"] = resistance.max_resistance_from_origin(g, ur)

    targets = sample.target_ids()
    if targets.size and (include_backbone or include_modified or include_lrp):
        dec = metrics.backbone(g, targets.tolist())
        if include_backbone:
            bb = g.subgraph_from_edges(dec.backbone_edges)
            bb_ur = metrics.restricted_cluster(bb, r).members
            bb_br = metrics.intrinsic_ball(bb, g.origin, int(r)).members
            out["volume_bb_ur"] = metrics.edge_volume(bb, bb_ur)
            out["volume_bb_br"] = metrics.edge_volume(bb, bb_br)
            out["reff_bb_qr"] = resistance.resistance_to_complement(
                bb, g.origin, bb_ur).r_eff
            out["reff_bb_br"] = resistance.resistance_to_complement(
                bb, g.origin, bb_br).r_eff
            out["reff_max_bb_ur"] = resistance.max_resistance_from_origin(bb, bb_ur)
        if include_modified:
            mod = _modified_network(sample, dec, r)
            out["reff_mod_qr"] = resistance.resistance_to_complement(
                mod, g.origin, ur).r_eff
            out["reff_max_mod_ur"] = resistance.max_resistance_from_origin(mod, ur)
        if include_lrp:
            cap = int(max_pivotals if max_pivotals is not None
                      else min(len(dec.pivotals), math.ceil(r ** 2)))
            reff_seq, vol_seq = [], []
            for k, (bottom, top) in enumerate(dec.pivotals[:cap]):
                sol = resistance.effective_resistance(g, [g.origin], [int(top)])
                reff_seq.append(sol.r_eff)
                joined = np.concatenate(dec.sausages[:k + 1])
                vol_seq.append(metrics.edge_volume(g, np.unique(joined)))
            out["reff_to_pivotal_top_seq"] = reff_seq
            out["volume_to_pivotal_seq"] = vol_seq
    return out


def _modified_network(sample: IICSample, dec, r):
    """Electrical network of the modified dynamics at radius r.

    Keeps edges inside U_r plus backbone edges crossing out of Q_r; a
    non-backbone excursion returns immediately, so its edge is a dead end
    carrying no current and is dropped.
    """
    g = sample.site_graph
    norms = np.sqrt((g.coords.astype(float) ** 2).sum(axis=1))
    ur = set(metrics.restricted_cluster(g, r).members.tolist())
    bb = set(dec.backbone_edges)
    keep = []
    for u, v in g.edge_array().tolist():
        if u in ur and v in ur:
            keep.append((u, v))
        elif (u in ur) != (v in ur):
            outside = v if u in ur else u
            if norms[outside] > r and (min(u, v), max(u, v)) in bb:
                keep.append((u, v))
    return g.subgraph_from_edges(keep)


# -- reporting -------------------------------------------------------------------


def report(records, fits=(), verdicts=(), out_dir=None):
    """Per-statistic CSV tables, J-set membership table, exponent summary.

    Statistics are aggregated over the annealed law: first over walks within
    an environment, then over environments.  Returns {filename: text}; also
    writes the files when out_dir is given.
    """
    tables = {}
    stats = sorted({r.statistic for r in records})
    for stat in stats:
        rows = ["scale,mean,se,n,censor_rate"]
        by_scale = {}
        for r in records:
            if r.statistic == stat:
                by_scale.setdefault(r.scale, []).append(r)
        for s in sorted(by_scale):
            rs = by_scale[s]
            vals = np.array([x.value for x in rs
                             if not x.censored and not math.isnan(x.value)])
            cens = sum(x.censored for x in rs) / len(rs)
            mean = vals.mean() if vals.size else math.nan
            se = (vals.std(ddof=1) / math.sqrt(vals.size)
                  if vals.size > 1 else math.nan)
            rows.append(f"{s!r},{mean!r},{se!r},{vals.size},{cens!r}")
        tables[f"stat_{stat}.csv"] = "\n".join(rows) + "\n"

    if fits:
        rows = ["statistic,slope,halfwidth,target,verdict,window_lo,window_hi"]
        for f in fits:
            rows.append(f"{f.statistic},{f.slope!r},{f.halfwidth!r},"
                        f"{'' if f.target is None else repr(f.target)},"
                        f"{'' if f.verdict is None else int(f.verdict)},"
                        f"{f.window[0]!r},{f.window[1]!r}")
        tables["exponents.csv"] = "\n".join(rows) + "\n"

    if verdicts:
        names = sorted({k for v in verdicts for k in v.flags})
        rows = ["radius,lambda," + ",".join(names)]
        for v in verdicts:
            cells = [("" if v.flags[n] is None else str(int(v.flags[n])))
                     for n in names]
            rows.append(f"{v.radius!r},{v.lam!r}," + ",".join(cells))
        tables["jsets.csv"] = "\n".join(rows) + "\n"

    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for name, text in tables.items():
            with open(os.path.join(out_dir, name), "w") as fh:
                fh.write(text)
    return tables
