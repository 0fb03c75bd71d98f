"""Command line front end.

Five subcommands: generate (run the sequence, report branch populations,
extracted amplitudes, and fidelity), wigner (conditional tomography cuts
to CSV), bell (theta sweeps, amplitude sweeps, per-term values, and shot
sampling), visibility (detection budget), optimize (tune alpha and tau).

Every run writes its primary output plus a <output>.manifest.json recording
the command line, config hash, seed, truncation dims, wall time, and the
files produced. Exit codes: 0 success, 1 numerical failure (truncation,
degenerate conditioning), 2 usage or config errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import replace

import numpy as np

from .detection import (
    channel_fidelities,
    load_detection,
    predicted_measured_bell,
    visibility,
)
from .device import config_text, load_device, standard_layout
from .ghzbuilder import (
    DEFAULT_ALPHA,
    IDEAL,
    KERR,
    SequenceParams,
    analytic_target_state,
    default_sequence,
    extract_beta,
    generate_ghz,
    resolved_sequence,
    sequence_encoding,
)
from .mermin import (
    auto_n_max,
    bell_theta_sweep,
    enumerate_terms,
    ideal_bell_vs_amplitude,
    optimize_bell,
    sample_correlation,
    sigma_y_single_cavity,
    term_expectation,
)
from .pulsesim import displace, excited_population
from .tomography import (
    CUT_IM_IM,
    CUT_PLANE,
    CUT_RE_RE,
    GridSpec,
    conditional_joint_wigner,
    conditional_single_wigner,
)

THREADS_ENV = "HYBRIDGHZ_THREADS"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _cjson(z: complex) -> list:
    return [z.real, z.imag]


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _apply_threads(args) -> None:
    """Pin BLAS thread counts; flag wins over the environment variable.

    Best effort: backends that read the variables at import time are
    already loaded and keep their pool size.
    """
    n = getattr(args, "threads", None)
    if n is None and os.environ.get(THREADS_ENV):
        n = int(os.environ[THREADS_ENV])
    if n is not None:
        if n < 1:
            raise ValueError("thread count must be >= 1")
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def _load(args) -> tuple:
    text = config_text(args.config)
    sha = hashlib.sha256(text.encode()).hexdigest()
    return text, load_device(text), sha


def _write_manifest(args, sha: str, layout, wall: float, outputs: list, seed=None) -> None:
    manifest = {
        "command": list(args.argv),
        "config": args.config,
        "config_sha256": sha,
        "seed": seed,
        "truncation_dims": list(layout.dims) if layout is not None else None,
        "wall_time_s": wall,
        "outputs": [str(p) for p in outputs],
    }
    with open(f"{args.out}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _write_csv(path: str, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [v if isinstance(v, str) else _fmt(v) if isinstance(v, float) else v for v in row]
            )


def _sequence_from_args(args, params) -> SequenceParams:
    mode = IDEAL if args.ideal else KERR
    seq = default_sequence(params, alpha=args.alpha, kerr_mode=mode)
    over = {}
    if args.alpha1 is not None:
        over["alpha1"] = args.alpha1
    if args.alpha2 is not None:
        over["alpha2"] = args.alpha2
    if args.tau_ns is not None:
        over["tau"] = args.tau_ns * 1e-9
    over["theta"] = args.theta
    over["tau_prime"] = args.tau_prime_ns * 1e-9
    return replace(seq, **over)


def cmd_generate(args) -> int:
    start = time.perf_counter()
    _, params, sha = _load(args)
    layout = standard_layout(args.n_max)
    seq = _sequence_from_args(args, params)
    state = generate_ghz(params, layout, seq)
    resolved = resolved_sequence(seq, params)
    enc = sequence_encoding(params, resolved)
    target = analytic_target_state(layout, enc, resolved.theta)
    fidelity = state.fidelity_to(target)
    p_e = excited_population(state, "q3")
    report = {
        "kerr_mode": resolved.kerr_mode,
        "sequence": {
            "alpha1": _cjson(resolved.alpha1),
            "alpha2": _cjson(resolved.alpha2),
            "alpha3": _cjson(resolved.alpha3),
            "alpha4": _cjson(resolved.alpha4),
            "tau_s": resolved.tau,
            "tau_prime_s": resolved.tau_prime,
            "theta": resolved.theta,
        },
        "encoding": {"beta1": _cjson(enc.beta1), "beta2": _cjson(enc.beta2)},
        "q3_branch": {"p_g": 1.0 - p_e, "p_e": p_e},
        "extracted": {
            "beta1": _cjson(extract_beta(state, params, layout, which=1)),
            "beta2": _cjson(extract_beta(state, params, layout, which=2)),
        },
        "fidelity_to_analytic": fidelity,
        "truncation_dims": list(layout.dims),
    }
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    print(f"fidelity to analytic target: {fidelity:.6f}")
    _write_manifest(args, sha, layout, time.perf_counter() - start, [args.out])
    return 0


def cmd_wigner(args) -> int:
    start = time.perf_counter()
    _, params, sha = _load(args)
    layout = standard_layout(args.n_max)
    seq = _sequence_from_args(args, params)
    state = generate_ghz(params, layout, seq)
    enc = sequence_encoding(params, resolved_sequence(seq, params))

    if args.single is not None:
        spec = GridSpec(
            cut=CUT_PLANE,
            centers=(args.center,),
            half_width=args.half_width,
            points_per_axis=args.points,
        )
        try:
            grid = conditional_single_wigner(state, args.project_q3, args.single, spec)
        except ValueError as err:
            # Degenerate conditioning is a numerical failure, not misuse.
            raise RuntimeError(str(err)) from err
        pts = args.center + grid.offsets()[None, :] + 1j * grid.offsets()[:, None]
        rows = (
            (pts[i, j].real, pts[i, j].imag, float(grid.values[i, j]))
            for i in range(args.points)
            for j in range(args.points)
        )
        _write_csv(args.out, ["re", "im", "w"], rows)
    else:
        if args.center_fringes:
            # Half-way pre-displacements park the two branch blobs
            # symmetrically about the origin, centering the fringes.
            state = displace(state, "s1", -enc.beta1 / 2.0)
            state = displace(state, "s2", -enc.beta2 / 2.0)
        cut = CUT_RE_RE if args.cut == "rere" else CUT_IM_IM
        spec = GridSpec(
            cut=cut,
            centers=(0j, 0j),
            half_width=args.half_width,
            points_per_axis=args.points,
        )
        try:
            grid = conditional_joint_wigner(state, args.condition, spec)
        except ValueError as err:
            raise RuntimeError(str(err)) from err
        step = grid.offsets() if cut == CUT_RE_RE else 1j * grid.offsets()
        p1 = np.asarray(spec.centers[0]) + step
        p2 = np.asarray(spec.centers[1]) + step
        rows = (
            (p1[i].real, p1[i].imag, p2[j].real, p2[j].imag, float(grid.values[i, j]))
            for i in range(args.points)
            for j in range(args.points)
        )
        _write_csv(args.out, ["re1", "im1", "re2", "im2", "w"], rows)
    print(f"conditioning probability: {grid.probability:.6f}")
    _write_manifest(args, sha, layout, time.perf_counter() - start, [args.out])
    return 0


def cmd_bell(args) -> int:
    start = time.perf_counter()
    _, params, sha = _load(args)
    layout = None
    seed = None

    if args.amplitude_sweep:
        betas = np.linspace(args.beta_min, args.beta_max, args.beta_points)
        curve = ideal_bell_vs_amplitude(betas)
        rows = [
            (beta, bell, sigma_y_single_cavity(beta)) for beta, bell in curve
        ]
        _write_csv(args.out, ["beta", "bell_ideal", "sigma_y"], rows)
        layout = standard_layout(auto_n_max(args.beta_max))
        print(f"bell at beta={args.beta_max:g}: {rows[-1][1]:.6f}")
    elif args.theta_sweep:
        layout = standard_layout(args.n_max)
        seq = _sequence_from_args(args, params)
        thetas = np.linspace(0.0, 2.0 * math.pi, args.theta_points)
        sweep = bell_theta_sweep(params, layout, seq, thetas)
        _write_csv(args.out, ["theta_rad", "bell"], sweep)
        best = max(sweep, key=lambda p: p[1])
        print(f"max bell {best[1]:.6f} at theta = {best[0]:.6f} rad")
    else:
        layout = standard_layout(args.n_max)
        seq = _sequence_from_args(args, params)
        state = generate_ghz(params, layout, seq)
        enc = sequence_encoding(params, resolved_sequence(seq, params))
        terms = enumerate_terms()
        if args.shots is not None:
            seed = args.seed
            detection = load_detection(config_text(args.config)) if args.with_detection else None
            rows = []
            total = 0.0
            var = 0.0
            for k, term in enumerate(terms):
                est = sample_correlation(
                    state, term, enc, args.shots, detection=detection, seed=seed + k
                )
                rows.append(
                    (k, "".join(term.letters), term.sign, est["estimate"], est["std_error"])
                )
                total += term.sign * est["estimate"]
                var += est["std_error"] ** 2
            _write_csv(args.out, ["term", "letters", "sign", "estimate", "std_error"], rows)
            print(f"sampled bell: {total:.4f} +- {math.sqrt(var):.4f}")
        else:
            rows = []
            total = 0.0
            for k, term in enumerate(terms):
                value = term_expectation(state, term, enc)
                rows.append((k, "".join(term.letters), term.sign, value))
                total += term.sign * value
            _write_csv(args.out, ["term", "letters", "sign", "value"], rows)
            print(f"bell expectation: {total:.6f}")
    _write_manifest(args, sha, layout, time.perf_counter() - start, [args.out], seed=seed)
    return 0


def cmd_visibility(args) -> int:
    start = time.perf_counter()
    text, _, sha = _load(args)
    model = load_detection(text)
    report = visibility(model)
    out = {
        "p0": report.p0,
        "p1": report.p1,
        "visibility": report.visibility,
        "exact_product": report.exact_product,
        "channels": channel_fidelities(model),
    }
    if args.ideal_bell is not None:
        out["ideal_bell"] = args.ideal_bell
        out["predicted_measured_bell"] = predicted_measured_bell(
            report.visibility, args.ideal_bell
        )
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    print(
        f"P0 = {report.p0:.4f}  P1 = {report.p1:.4f}  V = {report.visibility:.4f}"
    )
    _write_manifest(args, sha, None, time.perf_counter() - start, [args.out])
    return 0


def cmd_optimize(args) -> int:
    start = time.perf_counter()
    _, params, sha = _load(args)
    layout = standard_layout(args.n_max)
    mode = IDEAL if args.ideal else KERR
    init = default_sequence(params, alpha=args.init_alpha, kerr_mode=mode)
    if args.init_tau_ns is not None:
        init = replace(init, tau=args.init_tau_ns * 1e-9)
    bounds = (
        (args.alpha_min, args.alpha_max),
        (args.tau_min_ns * 1e-9, args.tau_max_ns * 1e-9),
    )
    result = optimize_bell(params, layout, init, bounds=bounds)
    best = result["best_seq"]
    out = {
        "kerr_mode": mode,
        "alpha": best.alpha1.real,
        "tau_s": best.tau,
        "theta": best.theta,
        "bell": result["best_bell"],
        "evaluations": len(result["trace"]),
    }
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    base, ext = os.path.splitext(args.out)
    trace_path = f"{base}_trace.csv"
    _write_csv(
        trace_path,
        ["stage", "alpha", "tau", "bell"],
        ((p["stage"], p["alpha"], p["tau"], p["bell"]) for p in result["trace"]),
    )
    print(
        f"best bell {result['best_bell']:.4f} at alpha = {out['alpha']:.4f},"
        f" tau = {best.tau * 1e9:.1f} ns"
    )
    _write_manifest(
        args, sha, layout, time.perf_counter() - start, [args.out, trace_path]
    )
    return 0


def _add_common(parser: argparse.ArgumentParser, default_out: str) -> None:
    parser.add_argument(
        "--config",
        default="paper_device",
        help="bundled config name or path to a JSON file",
    )
    parser.add_argument("--out", default=default_out, help="output file")
    parser.add_argument("--n-max", type=int, default=30, help="cavity Fock cutoff")
    parser.add_argument(
        "--threads", type=int, default=None, help=f"BLAS threads (or ${THREADS_ENV})"
    )


def _add_sequence(parser: argparse.ArgumentParser) -> None:
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--ideal", action="store_true", help="dispersive terms only")
    mode.add_argument(
        "--kerr", action="store_true", help="include Kerr and cross-Kerr (default)"
    )
    parser.add_argument(
        "--alpha",
        type=float,
        default=DEFAULT_ALPHA,
        help="symmetric initial displacement for the default sequence",
    )
    parser.add_argument("--alpha1", type=_complex_arg, default=None)
    parser.add_argument("--alpha2", type=_complex_arg, default=None)
    parser.add_argument("--tau-ns", type=float, default=None, help="wait time [ns]")
    parser.add_argument("--theta", type=float, default=0.0, help="branch phase [rad]")
    parser.add_argument(
        "--tau-prime-ns", type=float, default=0.0, help="post-sequence wait [ns]"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridghz",
        description="Five-partite hybrid GHZ state: generation, tomography, Bell test.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("generate", help="run the sequence and report the state")
    _add_common(p, "generate.json")
    _add_sequence(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("wigner", help="conditional Wigner cuts to CSV")
    _add_common(p, "wigner.csv")
    _add_sequence(p)
    p.add_argument("--cut", choices=("rere", "imim"), default="imim")
    p.add_argument(
        "--condition", type=int, choices=(1, -1), default=1,
        help="three-qubit x-product branch",
    )
    p.add_argument(
        "--center-fringes", action=argparse.BooleanOptionalAction, default=True,
        help="pre-displace each cavity by -beta/2",
    )
    p.add_argument("--single", choices=("s1", "s2"), default=None,
                   help="single-cavity plane instead of a joint cut")
    p.add_argument("--project-q3", choices=("g", "e"), default="g")
    p.add_argument("--center", type=_complex_arg, default=0j,
                   help="plane center (single-cavity mode)")
    p.add_argument("--half-width", type=float, default=2.5)
    p.add_argument("--points", type=int, default=51)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("bell", help="Bell operator sweeps, terms, and sampling")
    _add_common(p, "bell.csv")
    _add_sequence(p)
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--theta-sweep", action="store_true")
    kind.add_argument("--amplitude-sweep", action="store_true")
    kind.add_argument("--terms", action="store_true",
                      help="exact per-term expectations (default)")
    kind.add_argument("--shots", type=int, default=None,
                      help="sample each term with this many shots")
    p.add_argument("--theta-points", type=int, default=21)
    p.add_argument("--beta-min", type=float, default=0.8)
    p.add_argument("--beta-max", type=float, default=4.0)
    p.add_argument("--beta-points", type=int, default=17)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--with-detection", action="store_true",
                   help="apply detection flips to sampled shots")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("visibility", help="detection budget from the config")
    _add_common(p, "visibility.json")
    p.add_argument("--ideal-bell", type=float, default=None,
                   help="scale an ideal Bell value by the visibility")
    p.set_defaults(func=cmd_visibility)

    p = sub.add_parser("optimize", help="tune (alpha, tau) for the Bell value")
    _add_common(p, "optimize.json")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--ideal", action="store_true")
    mode.add_argument("--kerr", action="store_true")
    p.add_argument("--alpha-min", type=float, default=0.5)
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--tau-min-ns", type=float, default=10.0)
    p.add_argument("--tau-max-ns", type=float, default=1000.0)
    p.add_argument("--init-alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--init-tau-ns", type=float, default=None)
    p.set_defaults(func=cmd_optimize)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        _apply_threads(args)
        return args.func(args)
    except (FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except RuntimeError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
