"""
decaylab Command-Line Application

Main entry point: exact decay rates, resonance and certified decay
constants of u'' + 2 f(A) u' + A u = 0 for a spectrum and damping given in a
JSON run configuration.

Subcommands:
    analyze     m*, sigma*, resonance, Lambda and per-mode records
    simulate    closed-form trajectory with region energies (CSV or JSON)
    envelope    semigroup norm N(t) on a time grid
    verify      certificate: envelope bound plus the four lemma checks
    fractional  closed-form case report for f(s) = a s^theta

Exit codes: 0 success, 2 a certified bound was violated, 1 usage or input error.

Author: Development Team
Created: 2025-01-27
Modified: 2026-10-17

Usage:
    python main.py verify --config configs/resonant_pendulum.json --out cert.json
"""

# Standard library imports
import json
import logging
import sys
from typing import Dict, Optional, Sequence

# Third-party imports
import click

# Local imports
from errors import ConfigError, DecayLabError
from fractional import analyze_fractional
from propagator import ENVELOPE_COLUMNS, envelope, fit_decay_rate
from simulation import (
    EXIT_BOUND_VIOLATED,
    EXIT_PASS,
    EXIT_USAGE,
    RunConfig,
    analyze_system,
    emit_report,
    load_config,
    report_to_dict,
    report_to_frame,
    run_verify,
    simulate,
)
from spectrum import Tail, make_spectrum, spectrum_from_config
from utils import CSV_FLOAT_FORMAT, log_status, setup_logging


# =========================
# SHARED OPTIONS
# =========================

def config_options(command):
    """Options every config-driven subcommand accepts."""
    options = [
        click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False),
                     help='JSON run configuration.'),
        click.option('--out', 'out_path', type=click.Path(dir_okay=False), default=None,
                     help='Output file (stdout when omitted).'),
        click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default='json'),
        click.option('--seed', type=int, default=None),
        click.option('--t-max', 't_max', type=float, default=None),
        click.option('--n-times', 'n_times', type=int, default=None),
        click.option('--epsilon', type=float, default=None),
        click.option('--K', 'K', type=str, default=None, help="'auto' or a value >= 2."),
        click.option('--tol', 'tols', multiple=True, metavar='NAME=VALUE',
                     help='Tolerance override (resonance, critical); repeatable.'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def parse_tolerances(items: Sequence[str]) -> Dict[str, float]:
    tolerances = {}
    for item in items:
        name, sep, value = item.partition('=')
        if not sep:
            raise click.BadParameter(f"expected NAME=VALUE, got {item!r}", param_hint='--tol')
        try:
            tolerances[name.strip()] = float(value)
        except ValueError:
            raise click.BadParameter(f"tolerance {name!r} needs a number, got {value!r}",
                                     param_hint='--tol')
    return tolerances


def parse_K(raw: Optional[str]) -> Optional[float]:
    if raw is None or raw.strip().lower() == 'auto':
        return None
    try:
        return float(raw)
    except ValueError:
        raise click.BadParameter(f"expected 'auto' or a number, got {raw!r}", param_hint='--K')


def build_config(config_path, seed, t_max, n_times, epsilon, K, tols) -> RunConfig:
    """Load the config file and apply CLI overrides."""
    config = load_config(config_path)
    tolerances = dict(config.tolerances)
    tolerances.update(parse_tolerances(tols))
    return config.with_overrides(
        seed=seed,
        t_max=t_max,
        n_points=n_times,
        epsilon=epsilon,
        K=parse_K(K),
        tolerances=tolerances,
    )


def write_output(report, out_path: Optional[str], fmt: str, component: str) -> None:
    """Write to a file, or echo JSON/CSV to stdout."""
    if out_path:
        emit_report(report, out_path, fmt)
        log_status(component, 'Output', f'💾 {fmt.upper()} report saved to {out_path}')
        return
    if fmt == 'json':
        click.echo(json.dumps(report_to_dict(report), indent=2, allow_nan=False))
    else:
        click.echo(report_to_frame(report).to_csv(index=False, float_format=CSV_FLOAT_FORMAT), nl=False)


# =========================
# COMMANDS
# =========================

@click.group()
@click.option('--verbose', is_flag=True, help='Log DEBUG detail.')
def cli(verbose: bool) -> None:
    """Decay rates and certified constants of damped wave equations."""
    setup_logging(verbose)


@cli.command()
@config_options
def analyze(config_path, out_path, fmt, seed, t_max, n_times, epsilon, K, tols) -> int:
    """Spectral decay report: m*, sigma*, resonance, Lambda, per-mode data."""
    config = build_config(config_path, seed, t_max, n_times, epsilon, K, tols)
    log_status('Analyze', 'Start', f'➡️ {len(config.spectrum)} modes, damping {config.damping.render()}')
    report = analyze_system(config)
    log_status('Analyze', 'Result',
               f"📊 m*={report.m_star!r} sigma*={report.sigma_star!r} "
               f"resonant={report.resonant} SSDG={report.ssdg}")
    write_output(report, out_path, fmt, 'Analyze')
    return EXIT_PASS


@cli.command('simulate')
@config_options
def simulate_command(config_path, out_path, fmt, seed, t_max, n_times, epsilon, K, tols) -> int:
    """Closed-form trajectory with total and per-region energies."""
    config = build_config(config_path, seed, t_max, n_times, epsilon, K, tols)
    log_status('Simulate', 'Start', f'➡️ {len(config.spectrum)} modes on {config.n_points} times')
    trajectory = simulate(config)
    log_status('Simulate', 'Result', f'📊 E(0)={trajectory.E[0]!r} E(t_max)={trajectory.E[-1]!r}')
    write_output(trajectory, out_path, fmt, 'Simulate')
    return EXIT_PASS


@cli.command('envelope')
@config_options
def envelope_command(config_path, out_path, fmt, seed, t_max, n_times, epsilon, K, tols) -> int:
    """Semigroup norm N(t) and the mode achieving it."""
    config = build_config(config_path, seed, t_max, n_times, epsilon, K, tols)
    log_status('Envelope', 'Start', f'➡️ {len(config.spectrum)} modes on {config.n_points} times')
    table = envelope(config.spectrum, config.damping, config.times)
    rate = fit_decay_rate(table['t'], table['log_N'])
    log_status('Envelope', 'Result', f'📊 fitted decay rate of N(t): {rate!r}')
    write_output(table[ENVELOPE_COLUMNS], out_path, fmt, 'Envelope')
    return EXIT_PASS


@cli.command('verify')
@config_options
@click.option('--constant-override', type=float, default=None, hidden=True,
              help='Replace the certified constant (test hook).')
def verify_command(config_path, out_path, fmt, seed, t_max, n_times, epsilon, K, tols,
                   constant_override) -> int:
    """Certify N(t) <= C (1+t)^p e^{-m* t} and the four lemma estimates."""
    if fmt != 'json':
        raise click.BadParameter('certificates are JSON only', param_hint='--format')
    config = build_config(config_path, seed, t_max, n_times, epsilon, K, tols)
    log_status('Verify', 'Start', f'➡️ {len(config.spectrum)} modes, {config.n_trials} trials per lemma')
    result = run_verify(config, constant_override)

    bound = result.certificate['bound']
    log_status('Verify', 'Bound',
               f"C_norm={bound['C_norm']!r} rate={bound['rate_norm']!r} poly={bound['poly_factor']}")
    for lemma in result.certificate['lemmas']:
        status = 'vacuous' if lemma['vacuous'] else f"worst {lemma['worst_ratio']:.6g} <= {lemma['constant']:.6g}"
        log_status('Verify', f"Lemma {lemma['region']}", f"{'✅' if lemma['passed'] else '❌'} {status}")
    write_output(result.certificate, out_path, 'json', 'Verify')

    logging.info("=" * 50)
    logging.info("📊 VERIFY SUMMARY")
    logging.info("=" * 50)
    if result.passed:
        log_status('Verify', 'Summary', '✅ all bounds hold')
    else:
        log_status('Verify', 'Summary', f'❌ bound violated: {result.first_failure}', level='error')
    return result.exit_code


@cli.command('fractional')
@click.option('--a', 'a', type=float, required=True)
@click.option('--theta', type=float, required=True)
@click.option('--s0', type=float, default=None, help='Single-mode spectrum {s0}.')
@click.option('--spectrum-config', '--config', 'config_path', type=click.Path(dir_okay=False),
              default=None, help='Take the spectrum from a run configuration.')
@click.option('--tail/--no-tail', default=None,
              help='Treat the spectrum as unbounded (default: on with --s0).')
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), default=None)
def fractional_command(a, theta, s0, config_path, tail, out_path) -> int:
    """Closed-form report for f(s) = a s^theta."""
    if (s0 is None) == (config_path is None):
        raise click.UsageError('give exactly one of --s0 and --spectrum-config')
    if s0 is not None:
        spec = make_spectrum([s0], Tail.NONE if tail is False else Tail.POWER)
    else:
        spectrum = _spectrum_entry(config_path)
        if tail is not None:
            spectrum = dict(spectrum, tail='power' if tail else 'none')
        spec = spectrum_from_config(spectrum)
    log_status('Fractional', 'Start', f'➡️ a={a!r} theta={theta!r} s0={spec.s0!r}')
    analysis = analyze_fractional(a, theta, spec)
    log_status('Fractional', 'Result', f'📊 m*={analysis.m_star!r} resonant={analysis.resonant}')
    write_output(analysis, out_path, 'json', 'Fractional')
    return EXIT_PASS


def _spectrum_entry(config_path: str) -> dict:
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {config_path}: {e}")
    if not isinstance(data, dict) or 'spectrum' not in data:
        raise ConfigError(f"config {config_path} has no 'spectrum' entry")
    return data['spectrum']


# =========================
# ENTRY POINT
# =========================

def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI and map every outcome onto the exit-code contract.

    Args:
        argv (Optional[Sequence[str]]): Arguments without the program name;
            sys.argv[1:] when omitted

    Returns:
        int: 0 success, 2 bound violated, 1 usage or input error
    """
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = cli.main(args=args, prog_name='decaylab', standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        logging.error(f"❌ {e.format_message()}")
        return EXIT_USAGE
    except click.exceptions.Abort:
        logging.error("❌ aborted")
        return EXIT_USAGE
    except DecayLabError as e:
        logging.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_USAGE
    if isinstance(result, int) and result in (EXIT_PASS, EXIT_BOUND_VIOLATED):
        return result
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
