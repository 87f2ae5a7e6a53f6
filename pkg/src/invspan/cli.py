"""Command-line front end.

Each subcommand runs one verification or simulation pipeline and emits a
JSON report (CSV for the raw-data outputs) that is byte-identical for
identical arguments and seed.  Exit codes: 0 all checks passed, 1 a
mathematical check failed, 2 usage error, 3 degenerate input.

The INVSPAN_THREADS environment variable caps the linear-algebra thread
pools (0 means automatic).  It is applied before the numeric modules are
imported, which is why every handler imports its dependencies lazily.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

DEFAULT_SEED = 1729

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3

_RADIAL_CHOICES = ("chi", "lognormal", "constant")


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: one command plus its numeric knobs."""

    command: str
    ell: int | None = None
    lmax: int | None = None
    n: int | None = None
    d: int | None = None
    seed: int = DEFAULT_SEED
    alpha: float = 0.01
    permutations: int = 999
    radial: str = "chi"
    spectrum: str | None = None
    out: str | None = None
    format: str = "json"
    odd: bool = False


def _apply_thread_cap() -> None:
    raw = os.environ.get("INVSPAN_THREADS")
    if raw is None:
        return
    count = int(raw)
    if count < 0:
        raise ValueError(f"INVSPAN_THREADS must be >= 0, got {count}")
    if count == 0:
        return
    for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, str(count))


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(payload: dict, out_path: str | None) -> None:
    text = _dump_json(payload)
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _report_dict(report) -> dict:
    return report.to_dict()


# ---------------------------------------------------------------------------
# Handlers: each returns (exit_code, payload or None)


def _run_verify_span(cfg: RunConfig):
    from .invariance_engine import verify_span

    report = verify_span(cfg.ell)
    payload = {
        "command": "verify-span",
        "ell": int(cfg.ell),
        "n": int(report.n),
        "generator_dim": int(report.generator_dim),
        "w_dim": int(report.span_dim),
        "full": bool(report.full),
        "rounds": int(report.rounds),
        "tol": float(report.tol),
        "hypothesis_satisfied": bool(report.hypothesis_satisfied),
    }
    return (EXIT_OK if report.full else EXIT_CHECK_FAILED), payload


def _run_decompose(cfg: RunConfig):
    from .invariance_engine import decompose_so_n

    report, _, _ = decompose_so_n(cfg.n)
    payload = {"command": "decompose"}
    payload.update(report.to_dict())
    return EXIT_OK, payload


def _run_character(cfg: RunConfig):
    from .invariance_engine import decompose_so_n

    report, _, _ = decompose_so_n(cfg.n)
    payload = {
        "command": "character",
        "n": int(cfg.n),
        "v1": float(report.standard_char_transposition),
        "v2": float(report.stabilizer_char_transposition),
    }
    return EXIT_OK, payload


def _run_block_check(cfg: RunConfig):
    from .invariance_engine import block_form_check

    report = block_form_check(cfg.n)
    payload = {"command": "block-check"}
    payload.update(report.to_dict())
    return (EXIT_OK if report.passed else EXIT_CHECK_FAILED), payload


def _resolve_spectrum(cfg: RunConfig, default_lmax: int):
    from .sphere_harmonics import PowerSpectrum, read_power_spectrum

    if cfg.spectrum is not None:
        return read_power_spectrum(cfg.spectrum)
    lmax = cfg.lmax if cfg.lmax is not None else default_lmax
    return PowerSpectrum.constant(lmax, 1.0)


def _run_simulate_field(cfg: RunConfig):
    import math

    import numpy as np

    from .monte_carlo_stats import SampleMatrix, dump_sample_matrix
    from .sphere_harmonics import (
        empirical_power_spectrum,
        gauss_legendre_grid,
        grid_mean_square,
        sample_coefficient_arrays,
        synthesize_batch,
    )

    spectrum = _resolve_spectrum(cfg, default_lmax=4)
    rows = sample_coefficient_arrays(spectrum, cfg.radial, cfg.n, cfg.seed)
    coefficients_path = None
    if cfg.format == "csv":
        dump_sample_matrix(SampleMatrix(rows), cfg.out)
        return EXIT_OK, None
    if cfg.out is not None:
        coefficients_path = cfg.out + ".coefficients.csv"
        dump_sample_matrix(SampleMatrix(rows), coefficients_path)
    estimated, _ = empirical_power_spectrum(rows)
    grid = gauss_legendre_grid(spectrum.lmax)
    fields = synthesize_batch(rows, spectrum.lmax, grid)
    per_sample = np.array([grid_mean_square(f, grid) for f in fields])
    identity_value = float(
        sum((2 * ell + 1) * c for ell, c in enumerate(spectrum.values)) / (4.0 * math.pi)
    )
    mean_square = float(per_sample.mean())
    stderr = float(per_sample.std(ddof=1) / math.sqrt(cfg.n)) if cfg.n > 1 else 0.0
    within = bool(abs(mean_square - identity_value) <= 3.0 * stderr) if cfg.n > 1 else True
    payload = {
        "command": "simulate-field",
        "lmax": int(spectrum.lmax),
        "n": int(cfg.n),
        "radial": cfg.radial,
        "seed": int(cfg.seed),
        "spectrum": [float(v) for v in spectrum.values],
        "empirical_spectrum": [float(v) for v in estimated.values],
        "variance_identity": identity_value,
        "grid_mean_square": mean_square,
        "standard_error": stderr,
        "within_3se": within,
        "coefficients_path": coefficients_path,
    }
    return EXIT_OK, payload


def _run_spectrum_estimate(cfg: RunConfig):
    import math

    import numpy as np

    from .sphere_harmonics import empirical_power_spectrum, sample_coefficient_arrays

    spectrum = _resolve_spectrum(cfg, default_lmax=4)
    rows = sample_coefficient_arrays(spectrum, cfg.radial, cfg.n, cfg.seed)
    estimated, moments = empirical_power_spectrum(rows)
    stderrs = []
    within = []
    for ell in range(spectrum.lmax + 1):
        block = rows[:, ell * ell : (ell + 1) ** 2]
        per_sample = np.einsum("ij,ij->i", block, block) / (2 * ell + 1)
        se = float(per_sample.std(ddof=1) / math.sqrt(cfg.n)) if cfg.n > 1 else 0.0
        stderrs.append(se)
        ok = abs(float(estimated.values[ell]) - float(spectrum.values[ell])) <= 3.0 * se
        within.append(bool(ok))
    off_max = 0.0
    for m in moments:
        off = np.abs(m - np.diag(np.diag(m)))
        if off.size:
            off_max = max(off_max, float(off.max()))
    payload = {
        "command": "spectrum-estimate",
        "lmax": int(spectrum.lmax),
        "n": int(cfg.n),
        "radial": cfg.radial,
        "seed": int(cfg.seed),
        "input_spectrum": [float(v) for v in spectrum.values],
        "estimated_spectrum": [float(v) for v in estimated.values],
        "standard_errors": stderrs,
        "within_3se": within,
        "all_within_3se": bool(all(within)),
        "max_offdiagonal_moment": off_max,
    }
    return EXIT_OK, payload


def _run_test_theorem2(cfg: RunConfig):
    import numpy as np

    from .monte_carlo_stats import (
        test_exchangeability,
        test_radial_angular_independence,
        test_rotational_invariance,
    )
    from .sphere_harmonics import sample_degree_block

    ss = np.random.SeedSequence(cfg.seed)
    seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(4)]
    block = sample_degree_block(cfg.ell, 1.0, cfg.radial, cfg.n, seeds[0])
    reports = {
        "exchangeability": test_exchangeability(block, cfg.permutations, seeds[1], cfg.alpha),
        "rotational_invariance": test_rotational_invariance(
            block, 1, cfg.permutations, seeds[2], cfg.alpha
        ),
        "radial_angular_independence": test_radial_angular_independence(
            block, cfg.permutations, seeds[3], cfg.alpha
        ),
    }
    all_passed = not any(r.reject for r in reports.values())
    payload = {
        "command": "test-theorem2",
        "ell": int(cfg.ell),
        "n": int(cfg.n),
        "radial": cfg.radial,
        "seed": int(cfg.seed),
        "alpha": float(cfg.alpha),
        "n_permutations": int(cfg.permutations),
        "reports": {k: _report_dict(r) for k, r in reports.items()},
        "all_passed": bool(all_passed),
    }
    return (EXIT_OK if all_passed else EXIT_CHECK_FAILED), payload


def _run_test_bernstein(cfg: RunConfig):
    import numpy as np

    from .monte_carlo_stats import test_gaussianity_1d, test_rotational_invariance
    from .sphere_harmonics import sample_degree_block

    ss = np.random.SeedSequence(cfg.seed)
    seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(6)]
    checks = []

    chi_block = sample_degree_block(2, 1.0, "chi", cfg.n, seeds[0])
    rep = test_gaussianity_1d(chi_block[:, 0], seeds[1], cfg.alpha)
    checks.append(("chi_radial_marginal_gaussian", False, rep))

    log_block = sample_degree_block(2, 1.0, "lognormal", cfg.n, seeds[2])
    rep = test_gaussianity_1d(log_block[:, 0], seeds[3], cfg.alpha)
    checks.append(("lognormal_radial_marginal_nongaussian", True, rep))

    data_rng = np.random.default_rng(seeds[4])
    expo = data_rng.exponential(1.0, (cfg.n, cfg.d)) - 1.0
    rep = test_rotational_invariance(expo, 1, cfg.permutations, seeds[5], cfg.alpha)
    checks.append(("centered_exponential_not_invariant", True, rep))

    entries = []
    all_ok = True
    for name, expected, rep in checks:
        ok = rep.reject == expected
        all_ok = all_ok and ok
        entries.append(
            {
                "name": name,
                "expected_reject": bool(expected),
                "as_expected": bool(ok),
                "report": _report_dict(rep),
            }
        )
    payload = {
        "command": "test-bernstein",
        "n": int(cfg.n),
        "d": int(cfg.d),
        "seed": int(cfg.seed),
        "alpha": float(cfg.alpha),
        "n_permutations": int(cfg.permutations),
        "checks": entries,
        "all_as_expected": bool(all_ok),
    }
    return (EXIT_OK if all_ok else EXIT_CHECK_FAILED), payload


def _run_orbit_walk(cfg: RunConfig):
    import numpy as np

    from .monte_carlo_stats import dump_sample_matrix, orbit_walk_samples, test_uniform_on_sphere

    ss = np.random.SeedSequence(cfg.seed)
    seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(2)]
    states = orbit_walk_samples(cfg.ell, cfg.n, cfg.odd, seeds[0])
    if cfg.format == "csv":
        dump_sample_matrix(states, cfg.out)
        return EXIT_OK, None
    states_path = None
    if cfg.out is not None:
        states_path = cfg.out + ".states.csv"
        dump_sample_matrix(states, states_path)
    rep = test_uniform_on_sphere(states, seeds[1], cfg.alpha)
    payload = {
        "command": "orbit-walk",
        "ell": int(cfg.ell),
        "n": int(cfg.n),
        "include_odd_permutation": bool(cfg.odd),
        "seed": int(cfg.seed),
        "alpha": float(cfg.alpha),
        "uniformity": _report_dict(rep),
        "passed": bool(not rep.reject),
        "states_path": states_path,
    }
    return (EXIT_OK if not rep.reject else EXIT_CHECK_FAILED), payload


def _run_calibrate(cfg: RunConfig):
    from .monte_carlo_stats import calibration_suite

    repetitions = cfg.n if cfg.n is not None else 200
    result = calibration_suite(cfg.seed, repetitions, cfg.alpha, cfg.permutations)
    payload = {"command": "calibrate"}
    payload.update(result)
    return (EXIT_OK if result["all_within_band"] else EXIT_CHECK_FAILED), payload


_HANDLERS = {
    "verify-span": _run_verify_span,
    "decompose": _run_decompose,
    "character": _run_character,
    "block-check": _run_block_check,
    "simulate-field": _run_simulate_field,
    "spectrum-estimate": _run_spectrum_estimate,
    "test-theorem2": _run_test_theorem2,
    "test-bernstein": _run_test_bernstein,
    "orbit-walk": _run_orbit_walk,
    "calibrate": _run_calibrate,
}

_CSV_COMMANDS = {"simulate-field", "orbit-walk"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invspan",
        description=(
            "Numerical certificates for permutation-plus-rotation invariance: "
            "Lie-algebra span checks, harmonic field simulation, and seeded "
            "Monte Carlo symmetry tests."
        ),
        epilog=f"The default seed is {DEFAULT_SEED}; identical invocations produce byte-identical reports.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add(name, help_text, **needed):
        cmd = sub.add_parser(name, help=help_text)
        if "ell" in needed:
            cmd.add_argument("--ell", type=int, required=needed["ell"] == "required", help="weight of the irreducible rotation representation (>= 1)")
        if "lmax" in needed:
            cmd.add_argument("--lmax", type=int, default=None, help="largest harmonic degree")
        if "n" in needed:
            cmd.add_argument("--n", type=int, default=needed["n"], help="sample count")
        if "d" in needed:
            cmd.add_argument("--d", type=int, default=needed["d"], help="vector dimension")
        if "radial" in needed:
            cmd.add_argument("--radial", choices=_RADIAL_CHOICES, default="chi", help="radial law for coefficient draws")
        if "spectrum" in needed:
            cmd.add_argument("--spectrum", default=None, help="power spectrum file ('ell value' lines)")
        if "alpha" in needed:
            cmd.add_argument("--alpha", type=float, default=0.01, help="test level in (0, 1)")
        if "permutations" in needed:
            cmd.add_argument("--permutations", type=int, default=999, help="permutation / replicate count (>= 99)")
        if "odd" in needed:
            cmd.add_argument("--odd", action="store_true", help="interleave a fixed odd coordinate swap into the walk")
        cmd.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
        cmd.add_argument("--out", default=None, help="write the report here instead of stdout")
        cmd.add_argument("--format", choices=("json", "csv"), default="json", help="report format (csv only for raw-data commands)")
        return cmd

    add("verify-span", "certify that conjugated generators span the full antisymmetric algebra", ell="required")
    add("decompose", "split so(n) into the standard-part and stabilizer-part components").add_argument(
        "--n", type=int, required=True, help="matrix side (>= 4)"
    )
    add("character", "transposition characters of the two components").add_argument(
        "--n", type=int, required=True, help="matrix side (>= 4)"
    )
    add("block-check", "verify the basis change splitting the permutation action").add_argument(
        "--n", type=int, required=True, help="matrix side (>= 4)"
    )
    add("simulate-field", "draw random harmonic coefficients and check the variance identity", lmax=True, n=1000, radial=True, spectrum=True)
    add("spectrum-estimate", "estimate the power spectrum from fresh coefficient draws", lmax=True, n=2000, radial=True, spectrum=True)
    add("test-theorem2", "exchangeability, rotation-invariance and radius/direction tests on one degree block", ell="required", n=1000, radial=True, alpha=True, permutations=True)
    add("test-bernstein", "Gaussian-characterization demonstrations", n=2000, d=5, alpha=True, permutations=True)
    add("orbit-walk", "random walk under conjugated rotations plus a uniformity test", ell="required", n=2000, alpha=True, odd=True)
    add("calibrate", "null rejection rates for every test", n=200, alpha=True, permutations=True).set_defaults(alpha=0.05, permutations=199)
    return parser


def _validate(cfg: RunConfig, parser: argparse.ArgumentParser) -> None:
    if cfg.ell is not None and cfg.ell < 1:
        parser.error(f"--ell must be >= 1, got {cfg.ell}")
    if cfg.lmax is not None and cfg.lmax < 0:
        parser.error(f"--lmax must be >= 0, got {cfg.lmax}")
    if cfg.n is not None and cfg.n < 1:
        parser.error(f"--n must be >= 1, got {cfg.n}")
    if cfg.d is not None and cfg.d < 2:
        parser.error(f"--d must be >= 2, got {cfg.d}")
    if cfg.command in ("decompose", "character", "block-check") and cfg.n < 4:
        parser.error(f"--n must be >= 4, got {cfg.n}")
    if not (0.0 < cfg.alpha < 1.0):
        parser.error(f"--alpha must lie in (0, 1), got {cfg.alpha}")
    if cfg.permutations < 99:
        parser.error(f"--permutations must be >= 99, got {cfg.permutations}")
    if cfg.format == "csv":
        if cfg.command not in _CSV_COMMANDS:
            parser.error(f"--format csv is not available for {cfg.command}")
        if cfg.out is None:
            parser.error("--format csv requires --out")


def main(argv=None) -> int:
    try:
        _apply_thread_cap()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    cfg = RunConfig(
        command=args.command,
        ell=getattr(args, "ell", None),
        lmax=getattr(args, "lmax", None),
        n=getattr(args, "n", None),
        d=getattr(args, "d", None),
        seed=args.seed,
        alpha=getattr(args, "alpha", 0.01),
        permutations=getattr(args, "permutations", 999),
        radial=getattr(args, "radial", "chi"),
        spectrum=getattr(args, "spectrum", None),
        out=args.out,
        format=args.format,
        odd=getattr(args, "odd", False),
    )
    try:
        _validate(cfg, parser)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    from .errors import DegenerateInputError, DimensionError

    handler = _HANDLERS[cfg.command]
    try:
        code, payload = handler(cfg)
    except DegenerateInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DimensionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if payload is not None:
        _emit(payload, cfg.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
