#%%
# rulefuse Command Line
# -----------------------------------------------------------------------------------------
"""rulefuse synth | run | frontier | inspect

Exit codes: 0 success, 1 stage failure, 2 configuration or rule-file error.
"""
import argparse
import json
import logging
import os
import sys

from .config import PipelineConfig
from .data import write_csv
from .errors import ConfigError, RuleBindError, RulefuseError, RuleSyntaxError, StageError
from .frontier import parse_subset, run_frontier
from .pipeline import run_pipeline
from .ruledsl import format_ruleset
from .synthetic import ID_COLUMN, SynthConfig, generate_synthetic, planted_risk_rules, planted_safety_patterns

logger = logging.getLogger("rulefuse")

USAGE_ERRORS = (ConfigError, RuleSyntaxError, RuleBindError)

# Flag -> (PipelineConfig field, type, help)
PIPELINE_FLAGS = [
    ("--data", "data", str, "CSV file with features and label."),
    ("--schema", "schema", str, "JSON schema sidecar for --data."),
    ("--rules", "rules", str, "Expert risk rules file (.rules)."),
    ("--test_fraction", "test_fraction", float, "Held-out fraction (stratified)."),
    ("--split_seed", "split_seed", int, "Seed for the train/test split."),
    ("--n_quantiles", "n_quantiles", int, "Quantile thresholds per numeric feature."),
    ("--lambda1", "lambda1", float, "L1 strength; data-driven default when omitted."),
    ("--lambda2", "lambda2", float, "Complexity strength; lambda1/2 when omitted."),
    ("--lambda_ratio", "lambda_ratio", float, "Scale of the data-driven lambda1 default."),
    ("--tol", "tol", float, "LRR convergence tolerance."),
    ("--max_iters", "max_iters", int, "LRR sweep cap."),
    ("--max_degree", "max_degree", int, "Largest rule degree (1 or 2)."),
    ("--max_pairs", "max_pairs", int, "Number of scored pair rules in the candidate pool."),
    ("--min_coverage", "min_coverage", float, "Drop expert rules covering less of the churn rows."),
    ("--max_jaccard", "max_jaccard", float, "Drop expert rules overlapping a kept rule more than this."),
    ("--precedence", "precedence", str, "risk_first or safety_first."),
    ("--learning_rate", "learning_rate", float, "TED gradient step cap."),
    ("--epochs", "epochs", int, "TED training epochs."),
    ("--l2", "l2", float, "TED ridge strength."),
    ("--ted_seed", "ted_seed", int, "Seed recorded with the TED model."),
]


def _add_common(parser):
    parser.add_argument("--config", type=str, help="JSON config file; flags override its values.")
    parser.add_argument("--out", type=str, help="Output directory (default: out).")
    parser.add_argument("--verbose", action="store_true", help="Debug logging.")
    parser.add_argument("--quiet", action="store_true", help="Warnings and errors only.")


def _add_pipeline_flags(parser):
    for flag, dest, kind, text in PIPELINE_FLAGS:
        parser.add_argument(flag, dest=dest, type=kind, help=text)
    parser.add_argument("--no_pareto", action="store_true", help="Use every expert rule without selection.")


def build_parser():
    parser = argparse.ArgumentParser(prog="rulefuse",
                                     description="Safety-rule discovery fused with expert risk rules for churn explanation.")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="Generate a synthetic dataset with planted rules.")
    _add_common(synth)
    synth.add_argument("--n_rows", type=int, help="Override synthetic.n_rows.")
    synth.add_argument("--seed", type=int, help="Override synthetic.seed.")

    run = sub.add_parser("run", help="Run the full pipeline once.")
    _add_common(run)
    _add_pipeline_flags(run)

    frontier = sub.add_parser("frontier", help="Run the pipeline once per expert rule subset.")
    _add_common(frontier)
    _add_pipeline_flags(frontier)
    frontier.add_argument("--subset", action="append", default=[], metavar="NAME=PATH[:raw]",
                          help="Rule subset; repeat. An empty PATH means no expert rules; :raw skips rule selection.")

    inspect = sub.add_parser("inspect", help="Pretty-print a serialized artifact.")
    inspect.add_argument("path", type=str, help="JSON artifact written by run or frontier.")
    inspect.add_argument("--verbose", action="store_true", help=argparse.SUPPRESS)
    inspect.add_argument("--quiet", action="store_true", help=argparse.SUPPRESS)
    return parser


def _configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s")
    logging.getLogger().setLevel(level)


def load_config(args):
    cfg = PipelineConfig.from_json(args.config) if args.config else PipelineConfig()
    overrides = {dest: getattr(args, dest, None) for _, dest, _, _ in PIPELINE_FLAGS}
    overrides["out"] = args.out
    cfg = cfg.override(**overrides)
    if getattr(args, "no_pareto", False):
        cfg = cfg.override(apply_pareto=False)
    return cfg


# --- Subcommands ---
def cmd_synth(args):
    cfg = load_config(args)
    synth = cfg.synthetic or SynthConfig()
    if args.n_rows is not None or args.seed is not None:
        synth = SynthConfig.from_dict({**synth.to_dict(),
                                       **{k: v for k, v in (("n_rows", args.n_rows), ("seed", args.seed)) if v is not None}})
    ds, truth = generate_synthetic(synth)
    os.makedirs(cfg.out, exist_ok=True)
    write_csv(ds, os.path.join(cfg.out, "data.csv"), id_column=ID_COLUMN)
    ds.schema.to_json(os.path.join(cfg.out, "schema.json"))
    truth.to_frame(ds.row_index, "all").drop(columns="split").to_csv(
        os.path.join(cfg.out, "truth.csv"), index=False, lineterminator="\n")
    with open(os.path.join(cfg.out, "planted.rules"), "w", encoding="utf-8") as f:
        f.write("# Planted risk conjunctions\n")
        for pattern in planted_safety_patterns(synth):
            f.write(f"# safety pattern {pattern.name}: {pattern}\n")
        f.write(format_ruleset(planted_risk_rules(synth)))
    print(f"Wrote {len(ds)} rows ({ds.n_churn} churn) to {cfg.out}")
    return 0


def cmd_run(args):
    cfg = load_config(args).validate()
    result = run_pipeline(cfg)
    print("\n--- Held-out Classification Report ---")
    print(result.report.format_table())
    print(f"\nTrain Y+E accuracy: {result.train_report.ye_accuracy:.4f}")
    print(f"Expert rules used: {result.rule_count}")
    return 0


def cmd_frontier(args):
    cfg = load_config(args).validate()
    subsets = [parse_subset(s) for s in args.subset]
    run_frontier(cfg, subsets)
    return 0


def cmd_inspect(args):
    try:
        with open(args.path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read artifact {args.path}: {e}") from None
    print(describe_artifact(payload))
    return 0


def describe_artifact(payload):
    kind = payload.get("kind")
    lines = [f"kind: {kind}  version: {payload.get('version')}"]
    if kind == "binarizer":
        lines.append(f"{len(payload['column_layout'])} columns, n_quantiles={payload['n_quantiles']}")
        lines += [f"  {name}: {spec}" for name, spec in payload["features"].items()]
    elif kind == "rule_model":
        lines.append(f"lambda1={payload['lambda1']:.6g} lambda2={payload['lambda2']:.6g} "
                     f"converged={payload['converged']} sweeps={payload['n_iter']}")
        for c, w in zip(payload["candidates"], payload["weights"]):
            if w != 0:
                lines.append(f"  {w:+.4f}  {c['rule']}")
        for code, members in payload.get("safety_tiers", {}).get("tiers", {}).items():
            lines.append(f"  tier {code}: {len(members)} rules")
    elif kind == "selection":
        lines += [f"  kept     {r['rule']} (code {r['code']})" for r in payload["kept"]]
        lines += [f"  dropped  {d['rule']} ({d['reason']})" for d in payload["dropped"]]
        if "mean_jaccard" in payload:
            lines.append(f"  mean jaccard {payload['mean_jaccard']:.3f}, max {payload['max_jaccard']:.3f}")
    elif kind == "ted_model":
        lines.append(f"{len(payload['pairs'])} classes over {len(payload['offsets'])} features")
        lines.append("  pairs: " + ", ".join(f"({y},{e})" for y, e in payload["pairs"]))
    elif kind == "pipeline_report":
        from .metrics import EvalReport
        lines.append(f"expert rules: {payload['rule_count']} {payload['rules']}")
        for split in ("train", "test"):
            lines.append(f"\n[{split}]")
            lines.append(EvalReport.from_dict(payload[split]).format_table())
    elif kind == "eval_report":
        from .metrics import EvalReport
        lines.append(EvalReport.from_dict(payload).format_table())
    else:
        lines.append(json.dumps(payload, indent=2))
    return "\n".join(lines)


COMMANDS = {"synth": cmd_synth, "run": cmd_run, "frontier": cmd_frontier, "inspect": cmd_inspect}


def _root_cause(err):
    return err.cause if isinstance(err, StageError) else err


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    _configure_logging(args)

    try:
        return COMMANDS[args.command](args)
    except RulefuseError as e:
        cause = _root_cause(e)
        logger.error(str(e))
        return 2 if isinstance(cause, USAGE_ERRORS) else 1
    except (OSError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
