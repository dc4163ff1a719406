"""Command-line front end: generate / fit / extract / evaluate / benchmark."""

import argparse
import os
import sys
from dataclasses import replace

from sparsemix import bench
from sparsemix.data import default_feature_names, load_csv, save_csv, scale_features
from sparsemix.errors import ConfigError, SparsemixError
from sparsemix.extract import (
    ExtractionSpec,
    extract,
    load_solution_features,
    save_solutions,
)
from sparsemix.kernels import BACKEND
from sparsemix.metrics import append_metrics_csv, categorize, score
from sparsemix.objective import FitConfig
from sparsemix.optimizer import fit
from sparsemix.posterior import load_state, save_state
from sparsemix.priors import PriorSpec
from sparsemix.synthgen import GeneratorSpec, generate, load_ground_truth, save_ground_truth

# flat config-file keys (upper case, matching the tuning vocabulary)
_CONFIG_KEYS = {
    "N_CANDIDATE_SOLUTIONS": int,
    "SPARSITY": int,
    "LAMBDA_JACCARD": float,
    "VAR_SPIKE": float,
    "VAR_SLAB": float,
    "NOISE_STD": float,
    "NAN_RATIO": float,
    "BATCH_SIZE": int,
    "N_ITERATIONS": int,
    "PRIOR": str,
    "TASK": str,
    "SCALING": str,
    "SEED": int,
    "LEARNING_RATE": float,
    "NOISE_VAR": float,
    "JACCARD_TAU": float,
    "SUPPORT_MODE": str,
    "INCLUSION_PROB": float,
    "STUDENT_DOF": float,
    "STUDENT_SCALE": float,
    "SOLUTION_TYPE": str,
    "TOP_D": int,
    "MU_THRESHOLD": float,
    "OUTLIER_MULTIPLIER": float,
    "OUTLIER_CENTER": str,
    "TARGET_COLUMN": str,
    "N_SAMPLES": int,
    "N_FEATURES": int,
    "N_SOLUTIONS": int,
    "CLASS_BALANCE": float,
}


def read_config_file(path):
    """Parse KEY=VALUE lines ('#' starts a comment) into typed values."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected KEY=VALUE, got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.upper()
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_KEYS[key](value)
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: bad value {value!r} for {key}"
                ) from None
    return values


def build_fit_config(cfg):
    """FitConfig (plus scaling mode and target column) from a config mapping."""
    sparsity = cfg.get("SPARSITY", 5)
    prior = PriorSpec(
        kind=cfg.get("PRIOR", "sss"),
        var_spike=cfg.get("VAR_SPIKE", 1e-3),
        var_slab=cfg.get("VAR_SLAB", 1.0),
        sparsity=sparsity,
        inclusion_prob=cfg.get("INCLUSION_PROB", 0.5),
        student_dof=cfg.get("STUDENT_DOF", 3.0),
        student_scale=cfg.get("STUDENT_SCALE", 1.0),
        support_mode=cfg.get("SUPPORT_MODE", "auto"),
    )
    return FitConfig(
        prior=prior,
        n_components=cfg.get("N_CANDIDATE_SOLUTIONS", 3),
        lambda_jaccard=cfg.get("LAMBDA_JACCARD", 500.0),
        noise_var=cfg.get("NOISE_VAR", 1.0),
        n_iterations=cfg.get("N_ITERATIONS", 4000),
        batch_size=cfg.get("BATCH_SIZE", 32),
        learning_rate=cfg.get("LEARNING_RATE", 0.05),
        jaccard_tau=cfg.get("JACCARD_TAU", 0.05),
        seed=cfg.get("SEED", 0),
    )


def build_extraction(cfg):
    mode = cfg.get("SOLUTION_TYPE", "top")
    return ExtractionSpec(
        mode=mode,
        mu_threshold=cfg.get("MU_THRESHOLD", 0.0 if mode == "full" else None),
        top_d=cfg.get("TOP_D", cfg.get("SPARSITY", 5)),
        outlier_multiplier=cfg.get("OUTLIER_MULTIPLIER", 3.0),
        outlier_center=cfg.get("OUTLIER_CENTER", "mean"),
    )


def _load_cfg(args):
    cfg = read_config_file(args.config) if getattr(args, "config", None) else {}
    if getattr(args, "set", None):
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            key = key.strip().upper()
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = _CONFIG_KEYS[key](value.strip())
    return cfg


def cmd_generate(args):
    cfg = _load_cfg(args)
    spec = GeneratorSpec(
        n_samples=cfg.get("N_SAMPLES", 100),
        n_features=cfg.get("N_FEATURES", 200),
        n_solutions=cfg.get("N_SOLUTIONS", 3),
        solution_sparsity=cfg.get("SPARSITY", 5),
        noise_std=cfg.get("NOISE_STD", 0.1),
        nan_ratio=cfg.get("NAN_RATIO", 0.0),
        task=cfg.get("TASK", "classification"),
        class_balance=cfg.get("CLASS_BALANCE", 0.5),
        seed=cfg.get("SEED", 0),
    )
    dataset, truth = generate(spec)
    save_csv(dataset, args.out, target_column=cfg.get("TARGET_COLUMN", "target"))
    truth_path = args.truth or args.out + ".truth.json"
    save_ground_truth(truth, truth_path)
    n_missing = int((~dataset.observed).sum())
    print(
        f"generate: wrote {dataset.n_samples}x{dataset.n_features} {spec.task} dataset "
        f"to {args.out} ({spec.n_solutions} planted solutions, {n_missing} missing cells; "
        f"ground truth in {truth_path})"
    )
    return 0


def cmd_fit(args):
    cfg = _load_cfg(args)
    config = build_fit_config(cfg)
    task = cfg.get("TASK")
    dataset = load_csv(args.data, cfg.get("TARGET_COLUMN", args.target), task=task)
    scaled, _ = scale_features(dataset, cfg.get("SCALING", "standard"))
    state, trace = fit(scaled, config)
    os.makedirs(args.outdir, exist_ok=True)
    state_path = os.path.join(args.outdir, "state.csv")
    trace_path = os.path.join(args.outdir, "trace.csv")
    save_state(state, state_path, dataset.feature_names)
    trace.save_csv(trace_path)
    final = trace.records[-1]
    print(
        f"fit: {config.n_iterations} iterations on {dataset.n_samples}x{dataset.n_features} "
        f"{dataset.task} data (kernel backend: {BACKEND}); final objective "
        f"{final.objective:.3f} (elbo {final.elbo:.3f}, penalty {final.penalty:.4f}); "
        f"state -> {state_path}, trace -> {trace_path}"
    )
    return 0


def cmd_extract(args):
    cfg = _load_cfg(args)
    if args.mode:
        cfg["SOLUTION_TYPE"] = args.mode
    spec = build_extraction(cfg)
    state, feature_names = load_state(args.state)
    solutions = extract(state, spec)
    save_solutions(solutions, args.out, feature_names)
    sizes = [len(s.features) for s in solutions]
    print(
        f"extract: mode={spec.mode} over {state.n_components} components; "
        f"solution sizes {sizes}; table -> {args.out}"
    )
    return 0


def cmd_evaluate(args):
    truth = load_ground_truth(args.truth)
    if truth.spec is None:
        raise ConfigError(f"{args.truth} lacks the generator spec echo; cannot infer p")
    p = truth.spec.n_features
    names = default_feature_names(p)
    found = load_solution_features(args.solutions, names)
    recovered = score(found, truth.all_features(), p)
    if args.out:
        append_metrics_csv(recovered, args.out, prefix=[args.solutions],
                           extra_header=["source"])
    print(
        f"evaluate: F1 {recovered.f1:.3f} ({categorize(recovered.f1).value}), "
        f"recall {recovered.recall:.3f}, precision {recovered.precision:.3f}, "
        f"SI {recovered.si:.2f}, ASI {recovered.asi:.2f} "
        f"({recovered.n_intersection}/{recovered.n_generating} generating features found)"
    )
    return 0


def cmd_benchmark(args):
    plan = bench.desk_plan(n_seeds=args.seeds)
    if args.cells:
        plan = [c for c in plan if any(tok in c.name for tok in args.cells)]
        if not plan:
            raise ConfigError(f"no benchmark cells match {args.cells}")
    if args.iterations:
        plan = [
            replace(c, config=replace(c.config, n_iterations=args.iterations))
            for c in plan
        ]
    if args.list:
        for cell in plan:
            gen = cell.generator
            print(f"{cell.name}: n={gen.n_samples} p={gen.n_features} task={gen.task} "
                  f"seeds={cell.n_seeds}")
        return 0
    run_rows, agg_rows = bench.run_benchmark(plan, outdir=args.outdir, jobs=args.jobs)
    for row in agg_rows:
        print(f"benchmark: {row[0]} mean F1 {row[4]:.3f} ({row[-1]})")
    print(f"benchmark: {len(run_rows)} runs over {len(plan)} cells -> {args.outdir}/summary.csv")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparsemix",
        description=(
            "Discover multiple diverse sparse feature subsets explaining a "
            "regression or binary-classification target."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="flat KEY=VALUE config file")
    shared.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a single config key (repeatable)")

    gen = sub.add_parser("generate", parents=[shared],
                         help="write a synthetic dataset with planted solutions")
    gen.add_argument("--out", required=True, help="output dataset CSV")
    gen.add_argument("--truth", help="ground-truth sidecar path (default <out>.truth.json)")
    gen.set_defaults(func=cmd_generate)

    fit_p = sub.add_parser("fit", parents=[shared], help="fit the variational mixture")
    fit_p.add_argument("--data", required=True, help="input dataset CSV")
    fit_p.add_argument("--target", default="target", help="target column name")
    fit_p.add_argument("--outdir", required=True, help="directory for state/trace files")
    fit_p.set_defaults(func=cmd_fit)

    ext = sub.add_parser("extract", parents=[shared],
                         help="extract candidate solutions from a fitted state")
    ext.add_argument("--state", required=True, help="state CSV written by fit")
    ext.add_argument("--mode", choices=["full", "top", "outlier"],
                     help="extraction mode (overrides SOLUTION_TYPE)")
    ext.add_argument("--out", required=True, help="solutions CSV to write")
    ext.set_defaults(func=cmd_extract)

    ev = sub.add_parser("evaluate", parents=[shared],
                        help="score extracted solutions against ground truth")
    ev.add_argument("--solutions", required=True, help="solutions CSV")
    ev.add_argument("--truth", required=True, help="ground-truth sidecar JSON")
    ev.add_argument("--out", help="metrics CSV to append to")
    ev.set_defaults(func=cmd_evaluate)

    bm = sub.add_parser("benchmark", help="run the desk-scale benchmark plan")
    bm.add_argument("--outdir", required=True, help="directory for artifacts + summary")
    bm.add_argument("--cells", action="append",
                    help="only run cells whose name contains this token (repeatable)")
    bm.add_argument("--seeds", type=int, default=3, help="runs per cell (default 3)")
    bm.add_argument("--iterations", type=int,
                    help="override per-fit iteration count (quick runs)")
    bm.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    bm.add_argument("--list", action="store_true", help="list matching cells and exit")
    bm.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SparsemixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
