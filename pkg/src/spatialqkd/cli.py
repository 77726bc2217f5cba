"""Command-line interface.

Each command resolves its configuration (flags over config file over
defaults), computes one analysis, and writes a CSV table, a PNG figure
and a JSON summary into the output directory. Everything written to
stdout and to files is a pure function of the resolved configuration,
so repeated runs are byte-identical; wall-clock timing goes to stderr.

Exit codes: 0 success, 1 configuration or usage problem, 2 numerical
failure inside the model.
"""

from __future__ import annotations

import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import click
import numpy as np

from . import __version__
from .adversary import (AttackParams, attacked_pixel_joint, negativity_curve,
                        security_curve)
from .config import RunConfig, load_config_file, resolve_config
from .detection import (ChannelParams, PixelJointDistribution,
                        bin_source_distribution, binned_witness,
                        pixel_conditional_variance, witness_threshold_scan)
from .errors import ConfigurationError, NumericalModelError
from .infotheory import discrete_mutual_information
from .montecarlo import (SimConfig, estimate_statistics, expected_class_rates,
                         hiding_report, simulate_pulses)
from .pdc_model import basis_mutual_information, schmidt_decompose_separable, \
    schmidt_number_full, transverse_entropies
from .reports import ReportWriter, format_number

_CONFIG_HELP = "TOML configuration file; flags override its values."


def common_options(fn):
    options = [
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help=_CONFIG_HELP),
        click.option("--out", "out_dir", default=None,
                     help="Output directory for tables, figures and summary."),
        click.option("--seed", type=int, default=None,
                     help="Random seed for stochastic commands."),
        click.option("--pulses", type=int, default=None,
                     help="Number of pump pulses to simulate."),
        click.option("--pixels", type=int, default=None,
                     help="Detectors per array."),
        click.option("--grid", type=int, default=None,
                     help="Grid points per axis for explicit-grid work."),
        click.option("--sweep", default=None, metavar="VAR=LO:HI:STEPS",
                     help="Sweep a variable over a linear range."),
        click.option("--mode", type=click.Choice(["1d", "2d"]), default=None,
                     help="Transverse treatment: one axis or full 2-D."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _resolve(config_path, **flags) -> RunConfig:
    file_data = load_config_file(config_path) if config_path else None
    return resolve_config(file_data, **flags)


def _echo_written(writer: ReportWriter) -> None:
    for path in writer.written:
        click.echo(f"wrote {path}")


@click.group(name="spatialqkd")
@click.version_option(__version__, prog_name="spatialqkd")
def cli():
    """Spatially entangled photon-pair QKD: simulation and security analysis."""


@cli.command(name="source-info")
@common_options
def cmd_source_info(config_path, out_dir, seed, pulses, pixels, grid, sweep,
                    mode):
    """Mutual information of the source state, optionally swept over w0 or L."""
    cfg = _resolve(config_path, out_dir=out_dir, seed=seed, pulses=pulses,
                   pixels=pixels, grid=grid, sweep=sweep, mode=mode)
    writer = ReportWriter(cfg, "source-info")

    if cfg.sweep is not None and cfg.sweep.name not in ("w0", "L"):
        raise ConfigurationError(
            f"source-info sweeps w0 or L, not {cfg.sweep.name!r}")

    if cfg.sweep is None:
        variants = [(None, cfg.source)]
    else:
        field = "waist_w0" if cfg.sweep.name == "w0" else "crystal_length"
        variants = [(float(v), replace(cfg.source, **{field: float(v)}))
                    for v in cfg.sweep.values]

    def evaluate(params):
        mi_k = basis_mutual_information(params, "momentum")
        mi_r = basis_mutual_information(params, "position")
        row = {"mi_momentum_bits": mi_k, "mi_position_bits": mi_r,
               "mi_symmetric_bits": 0.5 * (mi_k + mi_r)}
        if cfg.mode == "2d":
            row["mi_momentum_2d_bits"] = transverse_entropies(params, dims=2).mi
        return row

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        rows = list(pool.map(lambda vp: evaluate(vp[1]), variants))

    sweep_name = cfg.sweep.name if cfg.sweep else "point"
    table = {sweep_name: [v if v is not None else 0.0 for v, _ in variants]}
    for key in rows[0]:
        table[key] = [r[key] for r in rows]
    writer.write_table("source_info", table)
    if cfg.sweep is not None:
        writer.plot_curves(
            "source_info", table[sweep_name],
            {k.replace("_bits", ""): table[k] for k in rows[0]},
            xlabel=f"{sweep_name} (mm)", ylabel="mutual information (bits)",
            title="Shared information of the photon pair")
    else:
        writer.plot_curves(
            "source_info", [0.0], {k: table[k] for k in rows[0]},
            xlabel="", ylabel="bits", title="Shared information")
    writer.write_summary({"rows": len(rows), **rows[-1]})
    _echo_written(writer)
    last = rows[-1]
    click.echo("mutual information (bits): momentum "
               f"{format_number(last['mi_momentum_bits'])}, position "
               f"{format_number(last['mi_position_bits'])}, symmetric "
               f"{format_number(last['mi_symmetric_bits'])}")


@cli.command(name="witness")
@common_options
def cmd_witness(config_path, out_dir, seed, pulses, pixels, grid, sweep, mode):
    """Conditional-variance witness against channel loss, with threshold."""
    cfg = _resolve(config_path, out_dir=out_dir, seed=seed, pulses=pulses,
                   pixels=pixels, grid=grid, sweep=sweep, mode=mode)
    writer = ReportWriter(cfg, "witness")

    scan = witness_threshold_scan(cfg.source, cfg.array,
                                  throughput_alice=cfg.channel.throughput_alice)
    sig_k = bin_source_distribution(cfg.source, "momentum", cfg.array)
    sig_r = bin_source_distribution(cfg.source, "position", cfg.array)
    if cfg.sweep is not None and cfg.sweep.name == "t":
        throughputs = cfg.sweep.values
    else:
        throughputs = np.linspace(0.05, 1.0, 20)

    rows = {"throughput": [], "loss_db": [], "variance_momentum": [],
            "variance_position": [], "product": [], "satisfied": []}
    for t in throughputs:
        channel = ChannelParams(throughput_alice=cfg.channel.throughput_alice,
                                throughput_bob=float(t))
        report = binned_witness(sig_k, sig_r, cfg.source.pair_probability,
                                cfg.array, channel)
        rows["throughput"].append(float(t))
        rows["loss_db"].append(channel.loss_db)
        rows["variance_momentum"].append(report.variance_momentum)
        rows["variance_position"].append(report.variance_position)
        rows["product"].append(report.product)
        rows["satisfied"].append(report.satisfied)
    writer.write_table("witness_scan", rows)
    writer.plot_curves("witness_scan", rows["throughput"],
                       {"variance product": rows["product"]},
                       xlabel="Bob-arm throughput",
                       ylabel="conditional variance product",
                       title=f"Entanglement witness, {cfg.array.n_pixels} pixels",
                       hline=0.25, vline=scan.threshold_throughput, logy=True)
    summary = {
        "n_pixels": scan.n_pixels,
        "threshold_throughput": scan.threshold_throughput,
        "threshold_loss_db": scan.threshold_loss_db,
        "threshold_distance_km_at_1db_per_km": scan.threshold_distance_km(1.0),
        "holds_at_unity": scan.holds_at_unity,
    }
    writer.write_summary(summary)
    _echo_written(writer)
    if scan.threshold_throughput is None:
        state = "everywhere" if scan.holds_everywhere else "nowhere"
        click.echo(f"witness holds {state} in the scanned interval")
    else:
        click.echo(
            f"witness threshold: throughput {scan.threshold_throughput:.4f} "
            f"({scan.threshold_loss_db:.2f} dB, "
            f"{scan.threshold_distance_km(1.0):.2f} km at 1 dB/km)")


@cli.command(name="keyrate")
@common_options
def cmd_keyrate(config_path, out_dir, seed, pulses, pixels, grid, sweep, mode):
    """Worst-case key rate against channel loss under hidden interception."""
    cfg = _resolve(config_path, out_dir=out_dir, seed=seed, pulses=pulses,
                   pixels=pixels, grid=grid, sweep=sweep, mode=mode)
    writer = ReportWriter(cfg, "keyrate")

    loss_grid = None
    if cfg.sweep is not None:
        if cfg.sweep.name != "loss_db":
            raise ConfigurationError(
                f"keyrate sweeps loss_db, not {cfg.sweep.name!r}")
        loss_grid = cfg.sweep.values
    curve = security_curve(cfg.source, cfg.array, loss_db_grid=loss_grid)

    table = {
        "loss_db": [p.loss_db for p in curve.points],
        "throughput": [1.0 - p.loss_fraction for p in curve.points],
        "lambda_max": [p.lambda_max for p in curve.points],
        "i_ab_min_bits": [p.i_ab_min for p in curve.points],
        "i_ae_max_bits": [p.i_ae_max for p in curve.points],
        "delta_i_min_bits": [p.delta_i_min for p in curve.points],
    }
    writer.write_table("keyrate", table)
    writer.plot_curves("keyrate", table["loss_db"],
                       {"I(A:B) min": table["i_ab_min_bits"],
                        "I(A:E) max": table["i_ae_max_bits"],
                        "delta I min": table["delta_i_min_bits"]},
                       xlabel="Bob-arm loss (dB)", ylabel="bits",
                       title=f"Key-rate balance, {cfg.array.n_pixels} pixels",
                       hline=0.0, vline=curve.crossing_loss_db)
    writer.write_summary({"crossing_loss_db": curve.crossing_loss_db,
                          "crossing_lambda": curve.crossing_lambda,
                          "n_pixels": cfg.array.n_pixels})
    _echo_written(writer)
    if curve.crossing_loss_db is None:
        click.echo("no zero crossing of the certified rate in the scanned range")
    else:
        click.echo(f"certified rate reaches zero at "
                   f"{curve.crossing_loss_db:.2f} dB "
                   f"(intercept fraction {curve.crossing_lambda:.4f})")


@cli.command(name="simulate")
@common_options
@click.option("--events", "events_path", default=None, type=click.Path(),
              help="Write accepted events to this log (gzip if it ends in .gz).")
def cmd_simulate(config_path, out_dir, seed, pulses, pixels, grid, sweep, mode,
                 events_path):
    """Pulse-level Monte Carlo compared against the closed-form model."""
    cfg = _resolve(config_path, out_dir=out_dir, seed=seed, pulses=pulses,
                   pixels=pixels, grid=grid, sweep=sweep, mode=mode)
    writer = ReportWriter(cfg, "simulate")

    sim_config = SimConfig(pulses=cfg.pulses, seed=cfg.seed, source=cfg.source,
                           array=cfg.array, channel=cfg.channel,
                           attack=cfg.attack, batch_size=cfg.batch_size,
                           workers=cfg.workers, event_log=events_path)
    result = simulate_pulses(sim_config)
    stats = estimate_statistics(result)
    predicted = expected_class_rates(sim_config)

    labels = ["both_dark", "alice_photon_bob_dark", "alice_dark_bob_photon",
              "both_photons"]
    empirical_rates = result.class_counts / result.pulses
    pred_se = np.sqrt(predicted * (1.0 - predicted) / result.pulses)
    with np.errstate(divide="ignore", invalid="ignore"):
        sigmas = np.where(pred_se > 0,
                          (empirical_rates - predicted) / pred_se, 0.0)
    writer.write_table("class_rates", {
        "event_class": labels,
        "count": list(result.class_counts),
        "empirical_rate": list(empirical_rates),
        "predicted_rate": list(predicted),
        "predicted_se": list(pred_se),
        "deviation_sigma": list(sigmas),
    })

    analytic = {}
    for basis, counts, edges in (
            ("momentum", result.sifted_momentum, result.edges_momentum),
            ("position", result.sifted_position, result.edges_position)):
        signal = bin_source_distribution(cfg.source, basis, cfg.array)
        dists = attacked_pixel_joint(signal, cfg.source.pair_probability,
                                     cfg.array, cfg.channel, cfg.attack)
        container = PixelJointDistribution(
            basis=basis, edges=signal.edges, joint=dists.alice_bob,
            in_array_mass=signal.in_array_mass,
            alice_pixel_masses=signal.alice_pixel_masses,
            bob_pixel_masses=signal.bob_pixel_masses)
        analytic[basis] = {
            "mi": discrete_mutual_information(dists.alice_bob),
            "cond_var": pixel_conditional_variance(container),
            "bob_marginal": dists.alice_bob.sum(axis=0),
        }

    writer.write_table("information", {
        "basis": ["momentum", "position"],
        "sifted_events": [stats.momentum.events, stats.position.events],
        "mi_plugin_bits": [stats.momentum.mi_plugin, stats.position.mi_plugin],
        "mi_miller_madow_bits": [stats.momentum.mi_miller_madow,
                                 stats.position.mi_miller_madow],
        "mi_analytic_bits": [analytic["momentum"]["mi"],
                             analytic["position"]["mi"]],
        "conditional_variance": [stats.momentum.conditional_variance,
                                 stats.position.conditional_variance],
        "conditional_variance_analytic": [analytic["momentum"]["cond_var"],
                                          analytic["position"]["cond_var"]],
    })

    counts_k = result.sifted_momentum.sum(axis=0)
    total_k = max(counts_k.sum(), 1)
    centers_k = 0.5 * (result.edges_momentum[1:] + result.edges_momentum[:-1])
    writer.plot_histogram_pair(
        "bob_marginal_momentum", centers_k, counts_k / total_k,
        analytic["momentum"]["bob_marginal"],
        xlabel="transverse momentum (rad/mm)",
        title="Bob pixel distribution, momentum basis")

    summary = {
        "pulses": result.pulses,
        "accepted": result.accepted,
        "sifted": result.sifted,
        "sift_fraction": stats.sift_fraction,
        "rejected_multiclick": result.rejected_multiclick,
        "max_class_deviation_sigma": float(np.max(np.abs(sigmas))),
        "rng": result.metadata["rng"],
    }
    if cfg.attack.intercept_fraction > 0.0:
        hiding = hiding_report(result, sim_config)
        summary["hiding_p_value"] = hiding.p_value
        summary["hiding_cover_throughput"] = hiding.adjusted_throughput
    writer.write_summary(summary)
    _echo_written(writer)
    click.echo(f"accepted {result.accepted} of {result.pulses} pulses "
               f"({result.sifted} sifted); "
               f"largest class deviation "
               f"{format_number(summary['max_class_deviation_sigma'])} sigma")


@cli.command(name="schmidt")
@common_options
def cmd_schmidt(config_path, out_dir, seed, pulses, pixels, grid, sweep, mode):
    """Leading Schmidt spectrum and global mode count of the source state."""
    cfg = _resolve(config_path, out_dir=out_dir, seed=seed, pulses=pulses,
                   pixels=pixels, grid=grid, sweep=sweep, mode=mode)
    writer = ReportWriter(cfg, "schmidt")

    decomposition = schmidt_decompose_separable(cfg.source, n_modes=16)
    weights = decomposition.coefficients ** 2
    writer.write_table("schmidt_spectrum", {
        "mode": list(range(1, len(weights) + 1)),
        "coefficient": list(decomposition.coefficients),
        "weight": list(weights),
        "cumulative_weight": list(np.cumsum(weights)),
    })
    writer.plot_spectrum("schmidt_spectrum", weights,
                         ylabel="Schmidt weight",
                         title="Leading Schmidt weights")
    full_modes = schmidt_number_full(cfg.source)
    writer.write_summary({
        "captured_weight": decomposition.captured_weight,
        "entropy_bits_truncated": decomposition.entropy,
        "schmidt_number_truncated": decomposition.schmidt_number,
        "concurrence_truncated": decomposition.concurrence,
        "schmidt_number_full": full_modes,
    })
    _echo_written(writer)
    click.echo(f"leading 16 modes carry weight "
               f"{decomposition.captured_weight:.4f}; full effective mode "
               f"count {full_modes:.1f}")


@cli.command(name="negativity")
@common_options
def cmd_negativity(config_path, out_dir, seed, pulses, pixels, grid, sweep,
                   mode):
    """Logarithmic negativity of the attacked state across intercept fractions."""
    cfg = _resolve(config_path, out_dir=out_dir, seed=seed, pulses=pulses,
                   pixels=pixels, grid=grid, sweep=sweep, mode=mode)
    writer = ReportWriter(cfg, "negativity")

    if cfg.sweep is not None:
        if cfg.sweep.name != "lambda":
            raise ConfigurationError(
                f"negativity sweeps lambda, not {cfg.sweep.name!r}")
        lams = [float(v) for v in cfg.sweep.values]
    else:
        lams = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 1.0]
    reports = negativity_curve(cfg.source, lams, n_modes=16, array=cfg.array)

    writer.write_table("negativity", {
        "intercept_fraction": [r.intercept_fraction for r in reports],
        "log_negativity_bits": [r.value for r in reports],
    })
    writer.plot_curves("negativity",
                       [r.intercept_fraction for r in reports],
                       {"log negativity": [r.value for r in reports]},
                       xlabel="intercept fraction",
                       ylabel="log negativity (bits)",
                       title="Entanglement under partial interception",
                       hline=0.0)
    writer.write_summary({
        "ln_at_zero": reports[0].value,
        "ln_at_one": reports[-1].value,
        "n_modes": reports[0].n_modes,
        "captured_weight": reports[0].captured_weight,
    })
    _echo_written(writer)
    click.echo(f"log negativity falls from {reports[0].value:.4f} at "
               f"lambda=0 to {reports[-1].value:.4f} at lambda=1")


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    start = time.perf_counter()
    try:
        cli.main(args=argv, standalone_mode=False)
        code = 0
    except click.exceptions.Exit as exc:
        code = exc.exit_code
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        code = 1
    except click.Abort:
        print("aborted", file=sys.stderr)
        code = 1
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        code = 1
    except NumericalModelError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        code = 2
    finally:
        elapsed = time.perf_counter() - start
        print(f"wall time: {elapsed:.2f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
