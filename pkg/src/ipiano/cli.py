"""Command-line runners for the three benchmark experiments.

Subcommands ``toy``, ``denoise`` and ``inpaint-mask`` each run one
experiment and write a self-contained run directory: the resolved
configuration, a ``trace.csv`` with one row per iteration, a
``certificates.csv`` summary, and the experiment's own artifacts
(basin map, iteration tables, images).

Exit codes: 0 ok, 1 certificate failure, 2 configuration error,
3 numerical error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .diagnostics import Certificate, lyapunov_certificate, rate_certificate
from .errors import ConfigurationError, NumericalError
from .objective import StopCriterion
from .rules import (DEFAULT_C1, DEFAULT_C2, BacktrackingStep, ConstantStep,
                    GeneralStep, LazyBacktrackingStep, StepRule,
                    constant_params)
from .solver import TraceRecord, solve
from .problems import (CompressionModel, GaussianNoise, SaltPepperNoise,
                       ToyProblem, add_noise, compression_objective,
                       compression_reconstruct, default_mrf_model,
                       mask_density, mrf_lipschitz_bound, mrf_objective,
                       mse, read_image, synthetic_image,
                       toy_objective, toy_stationary_points, write_image)

EXIT_OK = 0
EXIT_CERTIFICATE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

#: Tolerance thresholds for the iterations-to-threshold table.
DENOISE_TOLS = tuple(10.0 ** k for k in range(3, -6, -1))


def _fmt(v) -> str:
    """Fixed 17-significant-digit formatting so CSV reruns diff clean."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_trace_csv(path, trace: List[TraceRecord]) -> None:
    lines = [",".join(TraceRecord.CSV_FIELDS)]
    for rec in trace:
        lines.append(",".join(_fmt(v) for v in rec.csv_values()))
    Path(path).write_text("\n".join(lines) + "\n")


def write_certificates_csv(path, certs: List[Certificate]) -> None:
    lines = ["name,satisfied,worst_slack,location,note"]
    for c in certs:
        note = c.note.replace(",", ";")
        lines.append(f"{c.name},{c.satisfied},{_fmt(c.worst_slack)},{c.location},{note}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_resolved_config(path, cfg: dict) -> None:
    lines = [f"{k}={cfg[k]}" for k in sorted(cfg)]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_config_file(path) -> dict:
    """Plain-text ``key=value`` configuration, ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _parse_beta_list(text: str) -> List[float]:
    try:
        betas = [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad beta list {text!r}") from exc
    if not betas:
        raise ConfigurationError("beta list is empty")
    return betas


def make_rule(name: str, beta: float, lipschitz: Optional[float]) -> StepRule:
    """Build a step rule from its CLI name.

    ``constant`` and ``general`` need a known Lipschitz constant; problems
    without one must use a backtracking rule.
    """
    if name in ("constant", "general") and lipschitz is None:
        raise ConfigurationError(
            f"rule {name!r} needs a known Lipschitz constant; "
            "use backtracking or lazy for this problem")
    if name == "constant":
        return ConstantStep(beta=beta, lipschitz=lipschitz)
    if name == "backtracking":
        return BacktrackingStep()
    if name == "lazy":
        return LazyBacktrackingStep(beta=beta)
    if name == "general":
        alpha = constant_params(lipschitz, beta)[0]
        return GeneralStep(alpha_schedule=lambda n: alpha,
                           beta_schedule=lambda n: beta,
                           lipschitz=lipschitz)
    raise ConfigurationError(f"unknown rule {name!r}")


def _certs_for_trace(trace, lower_bound: float) -> List[Certificate]:
    certs = [lyapunov_certificate(trace)]
    if trace:
        certs.append(rate_certificate(trace, DEFAULT_C1, DEFAULT_C2,
                                      h_lower=lower_bound))
    return certs


def _exit_for_certs(certs: List[Certificate]) -> int:
    return EXIT_OK if all(c.satisfied for c in certs) else EXIT_CERTIFICATE


def _resolve(args, defaults: dict) -> dict:
    """Merge defaults, config file and explicit flags (flags win)."""
    cfg = dict(defaults)
    if getattr(args, "config", None):
        file_cfg = parse_config_file(args.config)
        unknown = set(file_cfg) - set(defaults)
        if unknown:
            raise ConfigurationError(
                f"unknown config keys: {', '.join(sorted(unknown))}")
        for key, value in file_cfg.items():
            kind = type(defaults[key])
            try:
                cfg[key] = kind(value) if defaults[key] is not None else value
            except ValueError as exc:
                raise ConfigurationError(f"bad value for {key}: {value!r}") from exc
    for key in defaults:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    return cfg


# ---------------------------------------------------------------------------
# toy

TOY_DEFAULTS = dict(rule="constant", beta="0,0.75", max_iters=500,
                    tol=1e-10, grid=10, out="runs/toy")


def run_toy(args) -> int:
    cfg = _resolve(args, TOY_DEFAULTS)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)

    prob = ToyProblem()
    obj = toy_objective(prob)
    betas = _parse_beta_list(cfg["beta"])
    grid = int(cfg["grid"])
    stop = StopCriterion(max_iters=int(cfg["max_iters"]),
                         tol_residual=float(cfg["tol"]))
    coords = np.linspace(-2.0, 3.0, grid)

    basin_lines = ["beta,x0,y0,x_final,y_final,h_final"]
    first_trace = None
    for beta in betas:
        rule = make_rule(cfg["rule"], beta, prob.lipschitz)
        for y0 in coords:
            for x0 in coords:
                x, trace = solve(obj, rule, np.array([x0, y0]), stop)
                if first_trace is None:
                    first_trace = trace
                basin_lines.append(",".join(
                    _fmt(v) for v in (beta, x0, y0, x[0], x[1], obj.value(x))))
    (out / "basins.csv").write_text("\n".join(basin_lines) + "\n")

    write_trace_csv(out / "trace.csv", first_trace)
    certs = _certs_for_trace(first_trace, obj.lower_bound)
    write_certificates_csv(out / "certificates.csv", certs)
    write_resolved_config(out / "config.txt", cfg)
    return _exit_for_certs(certs)


# ---------------------------------------------------------------------------
# denoise

#: lam = -1 selects the per-data-term default (0.05 for l2, 1.0 for l1).
DENOISE_DEFAULTS = dict(rule="constant", beta="0,0.4,0.8", max_iters=5000,
                        ref_iters=5000, tol=0.0, seed=0, lam=-1.0, sigma=25.0,
                        sp_fraction=0.0, data_term="l2", size=64, input="",
                        out="runs/denoise")


def run_denoise(args) -> int:
    cfg = _resolve(args, DENOISE_DEFAULTS)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)

    if cfg["input"]:
        clean = read_image(cfg["input"])
    else:
        clean = synthetic_image(int(cfg["size"]))
    noise = (SaltPepperNoise(float(cfg["sp_fraction"]))
             if float(cfg["sp_fraction"]) > 0
             else GaussianNoise(float(cfg["sigma"])))
    noisy = add_noise(clean, noise, int(cfg["seed"]))

    data_term = str(cfg["data_term"])
    lam = float(cfg["lam"])
    if lam < 0:
        lam = 0.05 if data_term == "l2" else 1.0
        cfg["lam"] = lam
    model = default_mrf_model(noisy.ravel(), noisy.shape, data_term=data_term,
                              lam=lam)
    obj = mrf_objective(model)
    bound = mrf_lipschitz_bound(model)
    x0 = noisy.ravel() if data_term == "l2" else np.zeros(noisy.size)

    # long reference run to estimate the limiting energy h*
    ref_rule = make_rule(cfg["rule"], 0.8, bound)
    x_ref, ref_trace = solve(obj, ref_rule, x0,
                             StopCriterion(max_iters=int(cfg["ref_iters"])))
    h_star = obj.value(x_ref)

    betas = _parse_beta_list(cfg["beta"])
    table = ["beta,tol,iters"]
    for beta in betas:
        rule = make_rule(cfg["rule"], beta, bound)
        _, trace = solve(obj, rule, x0,
                         StopCriterion(max_iters=int(cfg["max_iters"])))
        errors = np.array([rec.h - h_star for rec in trace])
        for tol in DENOISE_TOLS:
            hit = np.nonzero(errors <= tol)[0]
            iters = int(hit[0]) if hit.size else -1
            table.append(f"{_fmt(beta)},{_fmt(tol)},{iters}")
    (out / "iterations.csv").write_text("\n".join(table) + "\n")

    write_image(out / "noisy.pgm", noisy)
    write_image(out / "denoised.pgm", x_ref.reshape(noisy.shape))
    write_trace_csv(out / "trace.csv", ref_trace)
    certs = _certs_for_trace(ref_trace, obj.lower_bound)
    write_certificates_csv(out / "certificates.csv", certs)
    write_resolved_config(out / "config.txt", cfg)
    return _exit_for_certs(certs)


# ---------------------------------------------------------------------------
# inpaint-mask

INPAINT_DEFAULTS = dict(rule="backtracking", beta=0.8, max_iters=1500,
                        lam=1200.0, size=32, input="", out="runs/inpaint")


def run_inpaint_mask(args) -> int:
    cfg = _resolve(args, INPAINT_DEFAULTS)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)

    if cfg["input"]:
        img = read_image(cfg["input"])
    else:
        img = synthetic_image(int(cfg["size"]))
    model = CompressionModel(u0=img.ravel(), image_shape=img.shape,
                             lam=float(cfg["lam"]))
    obj = compression_objective(model)
    rule = make_rule(cfg["rule"], float(cfg["beta"]), None)

    c, trace = solve(obj, rule, np.ones(img.size),
                     StopCriterion(max_iters=int(cfg["max_iters"])))
    u = compression_reconstruct(c, model)
    density = mask_density(c)
    summary = ["iterations,final_energy,density_percent,mse",
               ",".join(_fmt(v) for v in (len(trace), obj.value(c),
                                          100.0 * density,
                                          mse(u, img.ravel())))]
    (out / "summary.csv").write_text("\n".join(summary) + "\n")

    mask_img = np.where(np.abs(c.reshape(img.shape)) > 1e-8, 255.0, 0.0)
    write_image(out / "mask.pgm", mask_img)
    write_image(out / "reconstruction.pgm", u.reshape(img.shape))
    write_trace_csv(out / "trace.csv", trace)
    certs = _certs_for_trace(trace, obj.lower_bound)
    write_certificates_csv(out / "certificates.csv", certs)
    write_resolved_config(out / "config.txt", cfg)
    return _exit_for_certs(certs)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipiano",
        description="Inertial proximal gradient experiments with certificates")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--rule", choices=("constant", "backtracking",
                                          "lazy", "general"))
        p.add_argument("--max-iters", dest="max_iters", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--out")
        p.add_argument("--config")

    toy = sub.add_parser("toy", help="2-D toy problem basin map")
    common(toy)
    toy.add_argument("--beta", help="comma-separated extrapolation factors")
    toy.add_argument("--grid", type=int, help="starts per axis on [-2, 3]^2")
    toy.set_defaults(func=run_toy)

    den = sub.add_parser("denoise", help="filter-bank image denoising")
    common(den)
    den.add_argument("--beta", help="comma-separated extrapolation factors")
    den.add_argument("--ref-iters", dest="ref_iters", type=int)
    den.add_argument("--seed", type=int)
    den.add_argument("--lambda", dest="lam", type=float)
    den.add_argument("--sigma", type=float)
    den.add_argument("--sp-fraction", dest="sp_fraction", type=float)
    den.add_argument("--data-term", dest="data_term", choices=("l2", "l1"))
    den.add_argument("--size", type=int)
    den.add_argument("--input")
    den.set_defaults(func=run_denoise)

    inp = sub.add_parser("inpaint-mask", help="diffusion mask optimization")
    common(inp)
    inp.add_argument("--beta", type=float)
    inp.add_argument("--lambda", dest="lam", type=float)
    inp.add_argument("--size", type=int)
    inp.add_argument("--input")
    inp.set_defaults(func=run_inpaint_mask)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
