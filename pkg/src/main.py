"""
Command-line entry point: estimates on CSV data, Monte Carlo experiments,
bound evaluators, K calibration, the model catalog, synthetic samples and the
HTTP service.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from bounds import (
    BoundInputs,
    chernoff_lower,
    chernoff_upper,
    evaluate_bounds,
    uniform_ball_bound,
    vc_concentration_bound,
)
from connectors.appconfig import AppConfigClient
from connectors.csvfiles import read_sample_csv, write_sample_csv
from constants import (
    APP_NAME,
    DEFAULT_NORM,
    DEFAULT_WORKERS,
    EXIT_OK,
    RESULTS_DIR,
    SERVICE_PORT,
)
from dependencies import get_config, handle_exception
from estimators import estimate_at
from experiments import ExperimentSpec
from geometry import Norm, NormKind
from orchestration import Orchestrator
from synthetic import RngSpec, draw_sample, get_model, model_catalog
from telemetry import Telemetry
from util.tools import parse_point


def _print_json(payload) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _load_spec(path: str, seed: Optional[int]) -> ExperimentSpec:
    text = Path(path).read_text(encoding="utf-8")
    spec = ExperimentSpec.model_validate_json(text)
    if seed is not None:
        spec = spec.model_copy(update={"seed": seed})
    return spec


def _workers(args, spec: ExperimentSpec, cfg: AppConfigClient) -> int:
    if args.workers is not None:
        return args.workers
    if "workers" in spec.model_fields_set:
        return spec.workers
    return cfg.get(DEFAULT_WORKERS, 1, type=int)


def _out_dir(args, spec: ExperimentSpec, cfg: AppConfigClient) -> str:
    if args.out:
        return args.out
    if spec.output:
        return spec.output
    return str(Path(cfg.get(RESULTS_DIR, "results")) / spec.kind.value)


# ----------------------------------------
# Commands
# ----------------------------------------

def cmd_estimate(args, cfg: AppConfigClient) -> int:
    sample = read_sample_csv(args.data)
    norm = Norm(NormKind(args.norm or cfg.get(DEFAULT_NORM, "euclidean")), sample.dimension)
    result = estimate_at(sample, parse_point(args.x), args.k, args.functional, args.level, args.sigma2, norm)
    _print_json(result.model_dump(mode="json"))
    return EXIT_OK


def cmd_experiment(args, cfg: AppConfigClient) -> int:
    spec = _load_spec(args.spec, args.seed)
    orchestrator = Orchestrator.create(spec, workers=_workers(args, spec, cfg), out_dir=_out_dir(args, spec, cfg))
    result = orchestrator.run()
    _print_json({"kind": result.kind.value, "status": result.status, "notes": result.notes,
                 "aggregates": result.aggregates, "out": str(orchestrator.out_dir)})
    return EXIT_OK


def cmd_calibrate(args, cfg: AppConfigClient) -> int:
    spec = _load_spec(args.spec, args.seed)
    orchestrator = Orchestrator.create(spec, workers=_workers(args, spec, cfg), out_dir=_out_dir(args, spec, cfg))
    calibration = orchestrator.calibrate()
    _print_json(calibration.model_dump(mode="json"))
    return EXIT_OK


def cmd_bounds(args, cfg: AppConfigClient) -> int:
    inputs = BoundInputs(
        d=args.d, n=args.n, k=args.k, delta=args.delta, v=args.v, A=args.A,
        sigma2_G=args.sigma2_G, L=args.L, b_X=args.b_X, U_X=args.U_X, c=args.c, T=args.T,
        V_d=args.V_d, norm=NormKind(args.norm), K=args.K, f_x=args.f_x,
    )
    payload = evaluate_bounds(inputs).model_dump(mode="json")
    if args.mu is not None:
        payload["chernoff_lower"] = chernoff_lower(args.mu, args.delta)
        payload["chernoff_upper"] = chernoff_upper(args.mu, args.delta)
    if args.p_ball is not None:
        payload["uniform_ball_bound"] = uniform_ball_bound(args.p_ball, args.n, args.d, args.delta)
    if args.vc_U is not None and args.vc_sigma is not None:
        payload["vc_concentration_bound"] = vc_concentration_bound(
            args.n, args.v, args.A, args.vc_U, args.vc_sigma, args.delta, args.K_prime)
    _print_json(payload)
    return EXIT_OK


def cmd_models(args, cfg: AppConfigClient) -> int:
    _print_json([
        {"model_id": m.model_id, "description": m.description, "constants": m.constants()}
        for m in model_catalog(args.dimension)
    ])
    return EXIT_OK


def cmd_sample(args, cfg: AppConfigClient) -> int:
    truth = get_model(args.model, args.dimension)
    sample = draw_sample(truth, args.n, RngSpec(seed=args.seed, replication=args.replication))
    path = write_sample_csv(sample, args.out)
    logging.info("[cli] %s sample of size %d written to %s", truth.model_id, args.n, path)
    return EXIT_OK


def cmd_serve(args, cfg: AppConfigClient) -> int:
    import uvicorn

    port = args.port or cfg.get(SERVICE_PORT, 9000, type=int)
    uvicorn.run("app:app", host=args.host, port=port, log_level="info", timeout_keep_alive=60)
    return EXIT_OK


# ----------------------------------------
# Parser
# ----------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME, description="k-NN empirical measure toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="Estimate at a query point from a CSV sample")
    p.add_argument("--data", required=True, help="CSV with columns x_1..x_d, y")
    p.add_argument("--x", required=True, help="Query point, e.g. 0.5 or 0.2,0.7")
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--functional", default="mean", help="mean | cdf:t | quantile:u | loclin | square | const:c")
    p.add_argument("--level", type=float, default=None, help="Add a plug-in interval at this level")
    p.add_argument("--sigma2", type=float, default=None, help="Residual variance for loclin")
    p.add_argument("--norm", choices=[k.value for k in NormKind], default=None)
    p.set_defaults(handler=cmd_estimate)

    for name, handler, text in (
        ("experiment", cmd_experiment, "Run a Monte Carlo experiment from a JSON spec"),
        ("calibrate-k-constant", cmd_calibrate, "Calibrate K on a bound_validity spec"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--spec", required=True, help="Experiment spec JSON file")
        p.add_argument("--out", default=None, help="Output directory")
        p.add_argument("--seed", type=int, default=None, help="Override the spec's master seed")
        p.add_argument("--workers", type=int, default=None, help="Parallel workers")
        p.set_defaults(handler=handler)

    p = sub.add_parser("bounds", help="Evaluate the bound formulas")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--v", type=float, default=2.0)
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--sigma2-G", dest="sigma2_G", type=float, default=0.0)
    p.add_argument("--L", type=float, default=0.0)
    p.add_argument("--b-X", dest="b_X", type=float, default=1.0)
    p.add_argument("--U-X", dest="U_X", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--V-d", dest="V_d", type=float, default=None)
    p.add_argument("--norm", choices=[k.value for k in NormKind], default=NormKind.EUCLIDEAN.value)
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--f-x", dest="f_x", type=float, default=None)
    p.add_argument("--mu", type=float, default=None, help="Mean of a Binomial count for the Chernoff bounds")
    p.add_argument("--p-ball", dest="p_ball", type=float, default=None, help="Ball probability for the uniform ball bound")
    p.add_argument("--vc-U", dest="vc_U", type=float, default=None, help="Envelope U of the VC bound")
    p.add_argument("--vc-sigma", dest="vc_sigma", type=float, default=None, help="Standard deviation bound of the VC bound")
    p.add_argument("--K-prime", dest="K_prime", type=float, default=1.0)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("models", help="List the synthetic models")
    p.add_argument("--dimension", type=int, default=1)
    p.set_defaults(handler=cmd_models)

    p = sub.add_parser("sample", help="Draw a synthetic sample to CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dimension", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replication", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("serve", help="Run the HTTP service")
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    cfg: AppConfigClient = get_config()
    Telemetry.configure_logging(cfg)
    Telemetry.log_log_level_diagnostics(cfg)
    Telemetry.configure_tracing(cfg, APP_NAME)

    try:
        return args.handler(args, cfg)
    except Exception as e:
        return handle_exception(e)


if __name__ == "__main__":
    sys.exit(main())
