"""
HOPS simulator command line
Sweeps of the squeezing function, the closed-form vs oracle verification
report, and the hidden-vs-Stokes ensemble demonstration
"""
import argparse
import json
import logging
import math
import sys
from typing import Any, Dict, List, Optional

from config import (
    DEFAULT_N_MAX,
    DEFAULT_PHASE_SAMPLES,
    DEFAULT_WORKERS,
    ENSEMBLE_N_MAX,
    EXIT_CODES,
    GRID_FIXTURE_PATH,
    REPORT_DIR,
    SWEEP_OUTPUTS,
)
from ensembles import HopsEnsembleSpec, demo_rows, write_parameters_csv
from errors import FixtureError, HopsError, InvalidConfigError
from sweep_presets import PresetManager, preset_names, resolve_preset
from sweep_runner import SweepConfig, cmd_sweep
from verification_suites import load_grid_fixture, run_verification

logger = logging.getLogger(__name__)


def configure_logging(verbose: bool = False):
    """Stream handler at INFO, DEBUG with --verbose"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=[logging.StreamHandler()],
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hops_sim",
        description="Hidden optical-polarization squeezing in degenerate parametric amplification.",
    )
    parser.add_argument("--verbose", action="store_true", help="Debug logging.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    presets = preset_names()
    preset_help = "\n".join(f"  {preset.value:<6} {name}: {description}"
                            for preset, name, description in PresetManager().get_preset_list())
    sweep = subparsers.add_parser(
        "sweep", help="Evaluate Sq, moments, variances and degree over a (kt, Delta_h) grid.",
        epilog="presets:\n" + preset_help, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sweep.add_argument("--preset", choices=presets,
                       help="Named grid (fig1a, fig1b, point; equal and unequal are aliases).")
    sweep.add_argument("--config", help="JSON file with SweepConfig fields; flags override it.")
    sweep.add_argument("--ax-sq", type=float, help="Mean photon number |alpha_x|^2.")
    sweep.add_argument("--ph-mag", type=float, help="IHOP magnitude |p_h|.")
    sweep.add_argument("--kt-min", type=float, help="Smallest kt (default 0).")
    sweep.add_argument("--kt-max", type=float, help="Largest kt.")
    sweep.add_argument("--steps", type=int, help="Number of kt values.")
    sweep.add_argument("--delta-min", type=float, help="Open lower end of the Delta_h grid.")
    sweep.add_argument("--delta-max", type=float, help="Upper end of the Delta_h grid.")
    sweep.add_argument("--delta-steps", type=int, help="Number of Delta_h values.")
    sweep.add_argument("--outputs", help=f"Comma-separated subset of {','.join(SWEEP_OUTPUTS)}.")
    sweep.add_argument("--oracle", action="store_true", default=None, help="Add truncated-Fock oracle columns.")
    sweep.add_argument("--n-max", type=int, help="Oracle cutoff per mode.")
    sweep.add_argument("--k", type=float, help="Coupling k for the t0 column (default 1).")
    sweep.add_argument("--workers", type=int, default=DEFAULT_WORKERS, help="Worker threads.")
    sweep.add_argument("--out", default="sweep.csv", help="Output CSV path.")

    verify = subparsers.add_parser("verify", help="Run every closed-form vs oracle suite and write the report.")
    verify.add_argument("--n-max", type=int, default=DEFAULT_N_MAX, help="Oracle cutoff per mode.")
    verify.add_argument("--grid-fixture", default=GRID_FIXTURE_PATH, help="Pinned grid fixture (JSON).")
    verify.add_argument("--k", type=float, default=1.0, help="Coupling k for the critical-time suite.")
    verify.add_argument("--out", default=REPORT_DIR, help="Report directory.")

    demo = subparsers.add_parser("demo-hidden", help="Stokes vs hidden parameters of a HOPS ensemble and its mirror.")
    demo.add_argument("--a0", type=float, default=2.0, help="Real amplitude A0.")
    demo.add_argument("--chi-h", type=float, default=math.pi / 2.0, help="Polar angle chi_h in [0, pi].")
    demo.add_argument("--delta-h", type=float, default=0.0, help="Sum of phases Delta_h.")
    demo.add_argument("--n-phases", type=int, default=DEFAULT_PHASE_SAMPLES, help="Phase samples M (>= 4).")
    demo.add_argument("--n-max", type=int, default=ENSEMBLE_N_MAX, help="Cutoff for the quantum path.")
    demo.add_argument("--out", help="Optional CSV path.")
    return parser


def _load_config_file(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise InvalidConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InvalidConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise InvalidConfigError("config file must hold a JSON object")
    return data


def build_sweep_config(args: argparse.Namespace) -> SweepConfig:
    """Preset, then config file, then explicit flags"""
    settings: Dict[str, Any] = {}
    if args.preset:
        settings = PresetManager().apply_preset(args.preset, settings)
        settings['preset'] = resolve_preset(args.preset).value
    if args.config:
        settings.update(_load_config_file(args.config))

    for flag, key in (('ax_sq', 'ax_sq'), ('ph_mag', 'ph_mag'), ('n_max', 'n_max'), ('k', 'k'), ('oracle', 'oracle')):
        value = getattr(args, flag)
        if value is not None:
            settings[key] = value
    if args.outputs:
        settings['outputs'] = [name.strip() for name in args.outputs.split(',') if name.strip()]

    defaults = SweepConfig()
    try:
        kt_min, kt_max, kt_steps = settings.get('kt_range', defaults.kt_range)
        d_min, d_max, d_steps = settings.get('delta_range', defaults.delta_range)
    except (TypeError, ValueError):
        raise InvalidConfigError("kt_range and delta_range must be [min, max, steps]")
    settings['kt_range'] = (
        kt_min if args.kt_min is None else args.kt_min,
        kt_max if args.kt_max is None else args.kt_max,
        kt_steps if args.steps is None else args.steps,
    )
    settings['delta_range'] = (
        d_min if args.delta_min is None else args.delta_min,
        d_max if args.delta_max is None else args.delta_max,
        d_steps if args.delta_steps is None else args.delta_steps,
    )
    return SweepConfig.from_dict(settings).validate()


def run_sweep_command(args: argparse.Namespace) -> int:
    try:
        config = build_sweep_config(args)
    except HopsError as exc:
        print(f"❌ Configuración de barrido inválida: {exc}")
        return EXIT_CODES['USAGE_ERROR']

    if config.preset:
        print(PresetManager().get_preset(config.preset).get_description())
    path, rows = cmd_sweep(config, args.out, args.workers)
    flagged = sum(1 for row in rows if row.flagged)
    print(f"📄 {len(rows)} filas escritas en {path}")
    if flagged:
        print(f"⚠️ {flagged} filas marcadas: desborde de truncamiento del oráculo")
    return EXIT_CODES['SUCCESS']


def run_verify_command(args: argparse.Namespace) -> int:
    try:
        fixture = load_grid_fixture(args.grid_fixture)
    except FixtureError as exc:
        print(f"❌ {exc}")
        return EXIT_CODES['USAGE_ERROR']

    report = run_verification(args.n_max, fixture, args.k)
    paths = report.save_data(args.out)
    for summary in report.get_suite_summaries():
        mark = "✅" if summary.passed else "❌"
        print(f"{mark} {summary.suite:<24} casos={summary.cases:<4} desviación máx={summary.max_deviation:.3e}")
    for kind, path in paths.items():
        print(f"📄 {kind}: {path}")

    if report.passed:
        print("✅ Todas las concordancias exigidas se cumplen")
        return EXIT_CODES['SUCCESS']
    print(f"❌ {len(report.get_failures())} fallas de verificación")
    return EXIT_CODES['VERIFICATION_FAILURE']


def _format_demo_table(rows: List[Dict[str, Any]]) -> List[str]:
    lines = [f"{'ensemble':<10} {'path':<10} {'s0':>9} {'s1':>9} {'s2':>9} {'s3':>9}   "
             f"{'h0':>9} {'h1':>9} {'h2':>9} {'h3':>9}"]
    for row in rows:
        stokes = " ".join(f"{row[key]:>9.4f}" for key in ('s0', 's1', 's2', 's3'))
        hidden = " ".join(f"{row[key]:>9.4f}" for key in ('h0', 'h1', 'h2', 'h3'))
        lines.append(f"{row['ensemble']:<10} {row['path']:<10} {stokes}   {hidden}")
    return lines


def run_demo_command(args: argparse.Namespace) -> int:
    try:
        spec = HopsEnsembleSpec(a0=args.a0, chi_h=args.chi_h, delta_h=args.delta_h, n_phases=args.n_phases)
        rows = demo_rows(spec, args.n_max)
    except HopsError as exc:
        print(f"❌ {exc}")
        return EXIT_CODES['USAGE_ERROR']

    print("🔭 Parámetros de Stokes vs ocultos")
    for line in _format_demo_table(rows):
        print(line)
    if args.out:
        path = write_parameters_csv(rows, args.out)
        print(f"📄 {path}")
    return EXIT_CODES['SUCCESS']


COMMANDS = {
    'sweep': run_sweep_command,
    'verify': run_verify_command,
    'demo-hidden': run_demo_command,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        print("\n👋 Interrumpido")
        return EXIT_CODES['VERIFICATION_FAILURE']
    except Exception as e:
        print(f"❌ Error inesperado: {e}")
        import traceback
        traceback.print_exc()
        return EXIT_CODES['VERIFICATION_FAILURE']


if __name__ == "__main__":
    sys.exit(main())
