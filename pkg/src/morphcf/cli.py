"""Command-line orchestration: generate counterfactuals, evaluate them against
the nearest-unlike-neighbor baseline, run the uncertainty case study, emit
synthetic datasets, and inspect series descriptors."""

from __future__ import annotations

import argparse
import sys
import zlib
from pathlib import Path

import numpy as np
import yaml

from . import descriptors, metrics, nsga3
from .config import DEFAULT_CONFIG_TEXT, ExperimentConfig
from .objectives import TargetSpec
from .operators import build_reference_set
from .regressors import (augment_with_reference, ensemble_predict_all,
                         fit_bootstrap_ensemble, knn_dtw_regressor,
                         ridge_descriptor_regressor, spectral_rate_regressor)
from .series import (Dataset, LabeledSeries, parse_ts_dataset,
                     synth_ppg_dataset, write_ts_dataset)
from .signal_ops import SsaConfig, default_dtw_band, default_ssa_config
from .uncertainty import (BinReport, DescriptorKde, InstanceUncertainty,
                          bin_report, central_interval_width, cfe_dispersion)


def _sub_seeds(master: int, n: int, role: str) -> list[int]:
    """Derive named sub-seed streams from the master seed (process-stable)."""
    root = np.random.SeedSequence([master, zlib.crc32(role.encode())])
    return [int(s) for s in root.generate_state(n)]


def _load_datasets(cfg: ExperimentConfig) -> tuple[Dataset, Dataset]:
    d = cfg["dataset"]
    if d["source"] == "file":
        if not d["train_path"] or not d["test_path"]:
            raise FileNotFoundError("dataset.source=file requires train_path and test_path")
        for p in (d["train_path"], d["test_path"]):
            if not Path(p).exists():
                raise FileNotFoundError(f"dataset file not found: {p}")
        train = parse_ts_dataset(d["train_path"], d["sample_rate_hz"], zscore=d["zscore"])
        test = parse_ts_dataset(d["test_path"], d["sample_rate_hz"], zscore=d["zscore"])
        return train, test
    s = d["synthetic"]
    train_seed, test_seed = _sub_seeds(int(cfg["seed"]), 2, "dataset-synth")
    rng = np.random.default_rng(train_seed)
    lo, hi = float(s["label_min"]), float(s["label_max"])

    def draw_labels(n, seed):
        r = np.random.default_rng(seed)
        labels = []
        band = s.get("exclude_band")
        while len(labels) < n:
            v = r.uniform(lo, hi)
            if band and band[0] <= v < band[1]:
                continue
            labels.append(v)
        return labels

    train_labels = draw_labels(int(s["n_train"]), train_seed)
    test_rng = np.random.default_rng(test_seed)
    test_labels = list(test_rng.uniform(lo, hi, size=int(s["n_test"])))
    train = synth_ppg_dataset(train_labels, s["duration_s"], d["sample_rate_hz"],
                              s["noise_std"], train_seed, name="synthetic-train")
    test = synth_ppg_dataset(test_labels, s["duration_s"], d["sample_rate_hz"],
                             s["noise_std"], test_seed, name="synthetic-test")
    return train, test


def _fit_dataset(cfg: ExperimentConfig, train: Dataset, refset) -> Dataset:
    r = cfg["regressor"]
    if r.get("augment_with_reference", True) and r["kind"] != "spectral":
        return augment_with_reference(train, refset)
    return train


def _regressor_factory(cfg: ExperimentConfig, band):
    r = cfg["regressor"]
    if r["kind"] == "ridge":
        return lambda d: ridge_descriptor_regressor(d, float(r["ridge_lambda"]))
    if r["kind"] == "spectral":
        return lambda d: spectral_rate_regressor()
    if r["kind"] == "knn":
        return lambda d: knn_dtw_regressor(d, int(r["knn_k"]), band)
    raise ValueError(f"unknown regressor kind: {r['kind']}")


def _ssa_config(cfg: ExperimentConfig, T: int) -> SsaConfig:
    s = cfg["ssa"]
    if s["window_len"] is None:
        base = default_ssa_config(T)
        return SsaConfig(base.window_len, int(s["n_components"]))
    return SsaConfig(int(s["window_len"]), int(s["n_components"]))


def _dtw_band(cfg: ExperimentConfig, T: int):
    return cfg["dtw_band"] if cfg["dtw_band"] is not None else default_dtw_band(T)


def _select_instances(cfg: ExperimentConfig, test: Dataset) -> list[int]:
    inst = cfg["instances"]
    if inst["indices"] is not None:
        return [int(i) for i in inst["indices"]]
    count = min(int(inst["count"]), len(test))
    (seed,) = _sub_seeds(int(cfg["seed"]), 1, "instance-select")
    rng = np.random.default_rng(seed)
    return sorted(int(i) for i in rng.choice(len(test), size=count, replace=False))


def _write_seed_manifest(out: Path, cfg: ExperimentConfig, indices) -> None:
    lines = [f"master {cfg['seed']}"]
    ds = _sub_seeds(int(cfg["seed"]), 2, "dataset-synth")
    lines.append(f"dataset-train {ds[0]}")
    lines.append(f"dataset-test {ds[1]}")
    run_seeds = _sub_seeds(int(cfg["seed"]), len(indices), "instance-run")
    for idx, s in zip(indices, run_seeds):
        lines.append(f"run-instance-{idx} {s}")
    (out / "seed_manifest.txt").write_text("\n".join(lines) + "\n")


def cmd_generate(cfg: ExperimentConfig) -> int:
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    train, test = _load_datasets(cfg)
    T = len(train.items[0].series)
    band = _dtw_band(cfg, T)
    refset = build_reference_set(train, _ssa_config(cfg, T))
    regressor = _regressor_factory(cfg, band)(_fit_dataset(cfg, train, refset))
    indices = _select_instances(cfg, test)
    run_seeds = _sub_seeds(int(cfg["seed"]), len(indices), "instance-run")
    _write_seed_manifest(out, cfg, indices)
    m = cfg["metrics"]
    report_rows = []
    for idx, run_seed in zip(indices, run_seeds):
        item = test.items[idx]
        target = TargetSpec(item.label, float(cfg["target"]["tolerance"]))
        run_cfg = cfg.run_config
        run_cfg = type(run_cfg)(**{**run_cfg.__dict__, "seed": run_seed})
        archive = nsga3.run(item.series, target, cfg.morph_spec, refset,
                            regressor, run_cfg, cfg.blend_params,
                            int(cfg["gamma"]))
        # archive waveforms labeled with the regressor prediction
        arch_ds = Dataset(
            [LabeledSeries(c.waveform, float(c.prediction))
             for c in archive.all_feasible] or
            [LabeledSeries(item.series, item.label)],
            name=f"archive-{idx}",
        )
        write_ts_dataset(arch_ds, out / f"archive_{idx}.ts")
        write_ts_dataset(Dataset([item], name=f"instance-{idx}"),
                         out / f"instance_{idx}.ts")
        with open(out / f"stats_{idx}.csv", "w") as fh:
            fh.write(nsga3.GenStats.CSV_HEADER + "\n")
            for st in archive.per_generation_stats:
                fh.write(st.csv_row() + "\n")
        report = metrics.evaluate_cfe_set(
            item.series, target, archive, train, regressor,
            k=int(m["k"]), n_bins=int(m["n_bins"]), atol=float(m["atol"]),
            band=band)
        (out / f"report_{idx}.json").write_text(report.to_json() + "\n")
        report_rows.append((idx, report))
        print(f"instance {idx}: archive size {len(archive)}")
    with open(out / "reports.csv", "w") as fh:
        fh.write("instance," + metrics.EvalReport.CSV_HEADER + "\n")
        for idx, report in report_rows:
            fh.write(f"{idx}," + report.csv_row() + "\n")
    return 0


_SUMMARY_METRICS = ["validity", "plausibility", "proximity",
                    "temporal_sparsity_segments", "temporal_sparsity_fraction",
                    "frequency_sparsity", "max_gradient", "diversity"]


def cmd_evaluate(cfg: ExperimentConfig, archive_dir) -> int:
    out = Path(archive_dir)
    reports_path = out / "reports.csv"
    if not reports_path.exists():
        raise FileNotFoundError(f"no reports.csv in {out}; run generate first")
    train, _ = _load_datasets(cfg)
    T = len(train.items[0].series)
    band = _dtw_band(cfg, T)
    refset = build_reference_set(train, _ssa_config(cfg, T))
    regressor = _regressor_factory(cfg, band)(_fit_dataset(cfg, train, refset))
    m = cfg["metrics"]

    rows = reports_path.read_text().strip().splitlines()
    header = rows[0].split(",")
    evo = {name: [] for name in _SUMMARY_METRICS}
    nun_stats = {name: [] for name in _SUMMARY_METRICS}
    for row in rows[1:]:
        vals = row.split(",")
        rec = dict(zip(header, vals))
        idx = int(rec["instance"])
        for name in _SUMMARY_METRICS:
            if rec[name] != "":
                evo[name].append(float(rec[name]))
        inst = parse_ts_dataset(out / f"instance_{idx}.ts",
                                cfg["dataset"]["sample_rate_hz"]).items[0]
        target = TargetSpec(inst.label, float(cfg["target"]["tolerance"]))
        nun = metrics.nun_baseline(inst.series, target, train, band)
        yhat = regressor.predict(nun.series)
        nun_stats["validity"].append(metrics.validity([yhat], target))
        nun_stats["plausibility"].append(metrics.plausibility(
            nun.series, yhat, train, int(m["k"]), target.tolerance, band))
        nun_stats["proximity"].append(metrics.proximity(inst.series, nun.series, band))
        nun_stats["temporal_sparsity_segments"].append(
            metrics.temporal_sparsity(inst.series, nun.series, float(m["atol"])))
        nun_stats["temporal_sparsity_fraction"].append(
            metrics.temporal_sparsity_fraction(inst.series, nun.series,
                                               float(m["atol"])))
        nun_stats["frequency_sparsity"].append(
            metrics.frequency_sparsity(inst.series, nun.series, int(m["n_bins"])))
        nun_stats["max_gradient"].append(
            descriptors.max_gradient(nun.series, scale_by_dt=False))
        nun_stats["diversity"].append(0)

    with open(out / "summary.csv", "w") as fh:
        fh.write("metric,cfe_mean,nun_mean\n")
        for name in _SUMMARY_METRICS:
            e = np.mean(evo[name]) if evo[name] else ""
            n = np.mean(nun_stats[name]) if nun_stats[name] else ""
            fh.write(f"{name},{e!r},{n!r}\n")
    print(f"wrote {out / 'summary.csv'}")
    return 0


def cmd_uncertainty(cfg: ExperimentConfig) -> int:
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    train, test = _load_datasets(cfg)
    T = len(train.items[0].series)
    band = _dtw_band(cfg, T)
    refset = build_reference_set(train, _ssa_config(cfg, T))
    fit_train = _fit_dataset(cfg, train, refset)
    regressor = _regressor_factory(cfg, band)(fit_train)
    u = cfg["uncertainty"]
    (boot_seed,) = _sub_seeds(int(cfg["seed"]), 1, "bootstrap")
    ensemble = fit_bootstrap_ensemble(fit_train, int(u["n_boot"]),
                                      _regressor_factory(cfg, band), boot_seed)
    kde = DescriptorKde(train, u["bandwidth"])
    indices = _select_instances(cfg, test)
    run_seeds = _sub_seeds(int(cfg["seed"]), len(indices), "instance-run")
    per_instance = []
    for idx, run_seed in zip(indices, run_seeds):
        item = test.items[idx]
        target = TargetSpec(item.label, float(cfg["target"]["tolerance"]))
        run_cfg = cfg.run_config
        run_cfg = type(run_cfg)(**{**run_cfg.__dict__, "seed": run_seed})
        archive = nsga3.run(item.series, target, cfg.morph_spec, refset,
                            regressor, run_cfg, cfg.blend_params,
                            int(cfg["gamma"]))
        boot_preds = ensemble_predict_all(ensemble, item.series)
        disp = cfe_dispersion(archive, ensemble)
        per_instance.append(InstanceUncertainty(
            label=item.label,
            bootstrap_ci_width=central_interval_width(boot_preds),
            cfe_ci_width=disp.ci_width,
            cfe_variance=disp.variance,
            kde_nll=kde.nll(item.series),
        ))
        print(f"instance {idx}: label {item.label:.1f}, archive {len(archive)}")
    reports = bin_report(per_instance, u["bin_edges"])
    with open(out / "bins.csv", "w") as fh:
        fh.write(BinReport.CSV_HEADER + "\n")
        for r in reports:
            fh.write(r.csv_row() + "\n")
    with open(out / "plot_ci_widths.csv", "w") as fh:
        fh.write("bin_center,bootstrap_ci_width,cfe_ci_width\n")
        for r in reports:
            if r.n > 0:
                fh.write(f"{(r.lo + r.hi) / 2!r},{r.mean_bootstrap_ci_width!r},"
                         f"{r.mean_cfe_ci_width!r}\n")
    with open(out / "plot_density.csv", "w") as fh:
        fh.write("bin_center,kde_nll,cfe_variance\n")
        for r in reports:
            if r.n > 0:
                fh.write(f"{(r.lo + r.hi) / 2!r},{r.mean_kde_nll!r},"
                         f"{r.mean_cfe_variance!r}\n")
    print(f"wrote {out / 'bins.csv'}")
    return 0


def cmd_synth(cfg: ExperimentConfig) -> int:
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    train, test = _load_datasets(cfg)
    write_ts_dataset(train, out / "train.ts")
    write_ts_dataset(test, out / "test.ts")
    print(f"wrote {out / 'train.ts'} ({len(train)} series) and "
          f"{out / 'test.ts'} ({len(test)} series)")
    return 0


def cmd_inspect(path, index: int, sample_rate_hz: float) -> int:
    ds = parse_ts_dataset(path, sample_rate_hz)
    item = ds.items[index]
    prof = descriptors.profile(item.series)
    print(f"series {index} of {path}: T={len(item.series)}, "
          f"f_s={item.series.sample_rate_hz} Hz, label={item.label}")
    for name, value in zip(descriptors.DESCRIPTOR_NAMES, prof.as_array()):
        print(f"  {name}: {value!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphcf",
        description="Morphology-aware counterfactual generation for "
                    "time-series regression",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_arg(p):
        p.add_argument("--config", help="YAML config file (defaults used otherwise)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config field, dotted path (repeatable)")

    p = sub.add_parser("generate", help="generate counterfactual archives")
    add_config_arg(p)
    p = sub.add_parser("evaluate", help="aggregate reports vs the NUN baseline")
    add_config_arg(p)
    p.add_argument("--archive-dir", help="directory written by generate "
                   "(defaults to the config output_dir)")
    p = sub.add_parser("uncertainty", help="run the uncertainty case study")
    add_config_arg(p)
    p = sub.add_parser("synth", help="emit a synthetic dataset as .ts files")
    add_config_arg(p)
    p = sub.add_parser("inspect", help="print descriptors of a stored series")
    p.add_argument("path")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--sample-rate-hz", type=float, default=125.0)
    p = sub.add_parser("print-config", help="print the default config document")
    return parser


def _apply_overrides(cfg_dict: dict, overrides: list[str]) -> dict:
    import copy
    out = copy.deepcopy(cfg_dict)
    for item in overrides:
        key, _, value = item.partition("=")
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = yaml.safe_load(value)
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "print-config":
            print(DEFAULT_CONFIG_TEXT, end="")
            return 0
        if args.command == "inspect":
            return cmd_inspect(args.path, args.index, args.sample_rate_hz)
        cfg = (ExperimentConfig.from_file(args.config) if args.config
               else ExperimentConfig())
        if args.set:
            cfg = ExperimentConfig.from_dict(_apply_overrides(cfg.raw, args.set))
        if args.command == "generate":
            return cmd_generate(cfg)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.archive_dir or cfg["output_dir"])
        if args.command == "uncertainty":
            return cmd_uncertainty(cfg)
        if args.command == "synth":
            return cmd_synth(cfg)
        raise ValueError(f"unknown command {args.command}")
    except (FileNotFoundError, ValueError, LookupError, ArithmeticError,
            RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
