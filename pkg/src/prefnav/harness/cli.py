"""Command-line interface.

Subcommands: train, run, eval-translator, eval-context, serve, bench.
Global flags: --config (JSON file merged under explicit flags; the
PREF_NAV_CONFIG environment variable names a fallback path) and --log-level.
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

from ..config import load_config, pick, section
from ..translator import PreferenceVector
from ..morl.world import ScenarioError, bundled_scenario_names, load_scenario

log = logging.getLogger("prefnav")

DEFAULT_POLICY_RESOURCE = ("prefnav.data.policy", "nav-q.npz")


def _parse_lambda(text: str) -> PreferenceVector:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"expected 4 comma-separated values (effic,odist,hdist,velocity), got {len(parts)}"
        )
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric preference component in {text!r}")
    try:
        return PreferenceVector(*values)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _load_scenarios(spec_text: str):
    names = [s.strip() for s in spec_text.split(",") if s.strip()]
    if not names:
        raise SystemExit("no scenario given")
    return [load_scenario(name) for name in names]


def _resolve_policy(path: str | None):
    from ..morl.policy import LinearQPolicy

    if path is not None:
        return LinearQPolicy.load(path)
    ref = resources.files(DEFAULT_POLICY_RESOURCE[0]).joinpath(DEFAULT_POLICY_RESOURCE[1])
    with resources.as_file(ref) as concrete:
        if not concrete.is_file():
            raise SystemExit(
                "no bundled policy found; pass --policy or train one with 'prefnav train'"
            )
        return LinearQPolicy.load(concrete)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefnav",
        description="Preference-conditioned indoor navigation: training, "
        "evaluation, and the live gateway.",
    )
    parser.add_argument("--config", help="path to a JSON configuration file")
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging verbosity (default WARNING)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a preference-conditioned policy")
    p_train.add_argument("--scenario", help="bundled scenario name(s), comma separated, or a file path")
    p_train.add_argument("--episodes", type=int, default=None)
    p_train.add_argument("--seed", type=int, default=None)
    p_train.add_argument("--out", default=None, help="output policy file (default policy.bin)")
    p_train.add_argument("--alpha", type=float, default=None, help="learning-rate override")

    p_run = sub.add_parser("run", help="run seeded evaluation episodes under one condition")
    p_run.add_argument("--scenario", help="bundled scenario name or a file path")
    p_run.add_argument("--policy", default=None, help="policy file (default: bundled)")
    src = p_run.add_mutually_exclusive_group()
    src.add_argument("--lambda", dest="lam", type=_parse_lambda, default=None,
                     metavar="E,O,H,V", help="fixed preference vector")
    src.add_argument("--feedback-script", default=None,
                     help="JSON feedback script replayed through the rule pipeline")
    p_run.add_argument("--runs", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--report", default=None, help="write the report here")
    p_run.add_argument("--format", default=None, dest="report_format",
                       choices=["csv", "structured-text", "console-table"])
    p_run.add_argument("--name", default=None, help="condition name used in the report")

    p_et = sub.add_parser("eval-translator", help="score the preference translator on fixtures")
    p_et.add_argument("--fixtures", required=True, help="directory of fixture JSON files")
    p_et.add_argument("--backend", default="det", choices=["det", "remote", "cassette"])
    p_et.add_argument("--domain", default="cts", choices=["cts", "disc"])
    p_et.add_argument("--cassette", default=None, help="cassette file for cassette/record modes")

    p_ec = sub.add_parser("eval-context", help="score the context predictor on fixtures")
    p_ec.add_argument("--fixtures", required=True, help="directory of fixture JSON files")
    p_ec.add_argument("--backend", default="cassette", choices=["remote", "cassette"])
    p_ec.add_argument("--cassette", default=None, help="cassette file for cassette/record modes")

    p_serve = sub.add_parser("serve", help="serve the live gateway (HTTP + websocket)")
    p_serve.add_argument("--scenario", default=None)
    p_serve.add_argument("--policy", default=None)
    p_serve.add_argument("--host", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--rules", default=None, help="rule-store persistence path")
    p_serve.add_argument("--static", default=None, help="directory with a built UI bundle")
    p_serve.add_argument("--seed", type=int, default=None)

    p_bench = sub.add_parser("bench", help="latency report for the control loop")
    p_bench.add_argument("--scenario", default=None)
    p_bench.add_argument("--policy", default=None)
    p_bench.add_argument("--seconds", type=float, default=None)
    p_bench.add_argument("--reasoning-delay", type=float, default=None)
    p_bench.add_argument("--tick-hz", type=float, default=None)

    return parser


def _backend_config(args, config: dict, mode: str):
    from ..gateway.backends import BackendConfig, BackendMode

    base = dict(section(config, "backend"))
    base["mode"] = mode
    cassette = getattr(args, "cassette", None)
    if cassette is not None:
        base["cassette_path"] = cassette
    return BackendConfig.from_dict(base)


def _cmd_train(args, config: dict) -> int:
    from ..morl.train import TrainConfig, train_policy

    cfg = section(config, "train")
    scenario_spec = pick(args.scenario, cfg, "scenario", None)
    if not scenario_spec:
        raise SystemExit("train: --scenario is required")
    scenarios = _load_scenarios(scenario_spec)
    train_config = TrainConfig(
        episodes=int(pick(args.episodes, cfg, "episodes", TrainConfig.episodes)),
        seed=int(pick(args.seed, cfg, "seed", TrainConfig.seed)),
        alpha=float(pick(args.alpha, cfg, "alpha", TrainConfig.alpha)),
    )
    out = Path(pick(args.out, cfg, "out", "policy.bin"))

    def progress(episode: int, stats) -> None:
        log.info("episode %d / %d (%d steps so far)",
                 episode, train_config.episodes, stats.steps)

    policy, stats = train_policy(scenarios, train_config, progress=progress)
    policy.save(out)
    print(
        f"trained {stats.episodes} episodes ({stats.steps} steps) in "
        f"{stats.wall_time_s:.1f}s on {', '.join(s.name for s in scenarios)}"
    )
    print(f"outcomes: {dict(stats.outcomes)}")
    print(f"policy written to {out} (checksum {policy.checksum()})")
    return 0


def _cmd_run(args, config: dict) -> int:
    from .report import emit_report
    from .runner import Fixed, Pipeline, load_feedback_script, run_condition

    cfg = section(config, "run")
    scenario_spec = pick(args.scenario, cfg, "scenario", None)
    if not scenario_spec:
        raise SystemExit("run: --scenario is required")
    scenario = load_scenario(scenario_spec)

    lam = args.lam
    script_path = args.feedback_script
    if lam is None and script_path is None and "lambda" in cfg:
        lam = _parse_lambda(str(cfg["lambda"]))
    if lam is None and script_path is None:
        raise SystemExit("run: one of --lambda or --feedback-script is required")
    policy = _resolve_policy(pick(args.policy, cfg, "policy", None))
    if lam is not None:
        source = Fixed(lam)
        default_name = "lambda-" + "-".join(f"{v:g}" for v in lam.as_tuple())
    else:
        source = Pipeline(script=load_feedback_script(script_path))
        default_name = Path(script_path).stem

    report = run_condition(
        scenario,
        source,
        policy,
        runs=int(pick(args.runs, cfg, "runs", 20)),
        seed=int(pick(args.seed, cfg, "seed", 0)),
        name=pick(args.name, cfg, "name", default_name),
    )
    out_path = pick(args.report, cfg, "report", None)
    fmt = pick(args.report_format, cfg, "format", "csv" if out_path else "console-table")
    text = emit_report([report], format=fmt, path=out_path)
    if out_path:
        print(f"report written to {out_path}")
    else:
        print(text, end="")
    return 0


def _cmd_eval_translator(args, config: dict) -> int:
    from .evals import eval_translator, load_translator_fixtures

    fixtures = load_translator_fixtures(args.fixtures)
    updater = None
    client = None
    if args.backend != "det":
        from ..gateway.adapters import llm_update_rules
        from ..gateway.backends import LlmClient

        client = LlmClient(_backend_config(args, config, args.backend))

        def updater(store, text, context):
            llm_update_rules(client, store, text, context)

    try:
        report = eval_translator(fixtures, updater=updater, domain=args.domain)
    finally:
        if client is not None:
            client.close()
    print(report.render(), end="")
    return 0 if report.failures == 0 else 1


def _cmd_eval_context(args, config: dict) -> int:
    from .evals import eval_context, load_context_fixtures
    from ..gateway.adapters import llm_predict_context
    from ..gateway.backends import LlmClient

    fixtures = load_context_fixtures(args.fixtures)
    client = LlmClient(_backend_config(args, config, args.backend))
    try:
        report = eval_context(fixtures, lambda desc: llm_predict_context(client, desc))
    finally:
        client.close()
    print(report.render(), end="")
    return 0 if report.failures == 0 else 1


def _cmd_serve(args, config: dict) -> int:
    import uvicorn

    from ..gateway.adapters import RoleBindings
    from ..gateway.app import create_app
    from ..gateway.runtime import PipelineRuntime

    cfg = section(config, "serve")
    scenario = load_scenario(pick(args.scenario, cfg, "scenario", "office"))
    policy = _resolve_policy(pick(args.policy, cfg, "policy", None))
    backend_cfg = dict(section(config, "backend")) or {"mode": "deterministic"}
    from ..gateway.backends import BackendConfig

    bindings = RoleBindings(BackendConfig.from_dict(backend_cfg))
    runtime = PipelineRuntime(
        scenario=scenario,
        policy=policy,
        bindings=bindings,
        rules_path=pick(args.rules, cfg, "rules", None),
        seed=int(pick(args.seed, cfg, "seed", 0)),
    )
    app = create_app(runtime, static_dir=pick(args.static, cfg, "static", None))
    host = pick(args.host, cfg, "host", "127.0.0.1")
    port = int(pick(args.port, cfg, "port", 8000))
    runtime.start()
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        runtime.stop()
    return 0


def _cmd_bench(args, config: dict) -> int:
    from ..gateway.bench import run_bench

    cfg = section(config, "bench")
    scenario = load_scenario(pick(args.scenario, cfg, "scenario", "office"))
    policy = _resolve_policy(pick(args.policy, cfg, "policy", None))
    report = run_bench(
        scenario,
        policy,
        seconds=float(pick(args.seconds, cfg, "seconds", 30.0)),
        reasoning_delay_s=float(pick(args.reasoning_delay, cfg, "reasoning_delay", 2.0)),
        tick_hz=float(pick(args.tick_hz, cfg, "tick_hz", 10.0)),
    )
    print(report.render(), end="")
    return 0 if report.late == 0 else 1


_COMMANDS = {
    "train": _cmd_train,
    "run": _cmd_run,
    "eval-translator": _cmd_eval_translator,
    "eval-context": _cmd_eval_context,
    "serve": _cmd_serve,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    config = load_config(args.config)
    level = args.log_level or config.get("log_level", "WARNING")
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return _COMMANDS[args.command](args, config)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"file not found: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
