"""Parameter sweeps, scheme crossover location, and validation reports.

A sweep walks one parameter (legitimate-link SNR in dB, transmit
antenna count, or the outage budget epsilon) across a fixed base
configuration, evaluates one metric with one or more evaluators per
scheme, and emits rows in a stable order with a fixed CSV schema.
Presets reproduce the figure-style experiment families.  Validation
runs the three evaluators against each other over a parameter grid and
reports hard threshold violations.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import yaml

from . import montecarlo
from .closedform import (
    closed_form_outage,
    eps_outage_capacity,
    outage_breakdown,
    prob_nonzero_secrecy,
)
from .config import Scheme, SystemConfig, db_to_linear
from .errors import NumericalFailureError, PrecisionExhaustedError
from .quadrature import outage_quadrature

__all__ = [
    "CSV_COLUMNS",
    "CrossoverResult",
    "EvaluatorSettings",
    "PRESET_NAMES",
    "SCHEMA_VERSION",
    "SweepRow",
    "SweepSpec",
    "SweepSpecError",
    "ValidationReport",
    "ValidationRow",
    "build_preset",
    "find_crossover",
    "load_sweep_spec",
    "run_preset",
    "run_sweep",
    "validate",
    "validation_grid",
    "write_rows_csv",
    "write_validation_csv",
]

SCHEMA_VERSION = "1"

CSV_COLUMNS = (
    "schema_version",
    "preset",
    "scheme",
    "n_alice",
    "n_bob",
    "n_eve",
    "gamma_bar_b_db",
    "gamma_bar_e_db",
    "rate_rs",
    "epsilon",
    "metric",
    "evaluator",
    "value",
    "stderr",
    "n_trials",
    "seed",
    "error",
    "wall_time_ms",
)

METRICS = ("P_out", "Pr_nonzero", "C_out")
EVALUATORS = ("closed-form", "quadrature", "monte-carlo")
SWEEP_PARAMETERS = ("gamma_bar_b_db", "n_alice", "epsilon")

PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6")

# Cross-evaluator thresholds used by validate().
CF_QUAD_TOL = 1e-6
MC_Z_LIMIT = 4.0
MC_PASS_FRACTION = 0.99


class SweepSpecError(ValueError):
    """A sweep description failed validation before any computation."""


@dataclass(frozen=True)
class EvaluatorSettings:
    """One evaluator to run, with its sampling settings.

    ``schemes`` restricts the evaluator to a subset of the sweep's
    schemes (None means all of them); the analytic evaluators only
    support the two-antenna selection scheme, so presets restrict them
    rather than emitting error rows.
    """

    name: str
    trials: int = 1_000_000
    seed: int = 0
    schemes: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.name not in EVALUATORS:
            raise SweepSpecError(
                f"unknown evaluator {self.name!r}; expected one of {EVALUATORS}"
            )
        if self.trials < 1:
            raise SweepSpecError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise SweepSpecError(f"seed must be >= 0, got {self.seed}")
        if self.schemes is not None:
            for name in self.schemes:
                Scheme.from_name(name)

    def applies_to(self, scheme: Scheme) -> bool:
        return self.schemes is None or scheme.value in self.schemes


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional sweep description.

    The swept ``parameter`` overrides the corresponding base field at
    each of ``values``; every (value, scheme, evaluator) combination
    becomes one output row.
    """

    name: str
    metric: str
    parameter: str
    values: tuple[float, ...]
    schemes: tuple[Scheme, ...]
    evaluators: tuple[EvaluatorSettings, ...]
    n_alice: int = 2
    n_bob: int = 1
    n_eve: int = 1
    gamma_bar_b_db: float = 10.0
    gamma_bar_e_db: float = 0.0
    rate_rs: float = 0.0
    epsilon: float | None = None
    output: str | None = None
    preset: str = ""

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise SweepSpecError(
                f"unknown metric {self.metric!r}; expected one of {METRICS}"
            )
        if self.parameter not in SWEEP_PARAMETERS:
            raise SweepSpecError(
                f"unknown sweep parameter {self.parameter!r}; "
                f"expected one of {SWEEP_PARAMETERS}"
            )
        if not self.values:
            raise SweepSpecError("sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise SweepSpecError("sweep values must be strictly increasing")
        if not self.schemes:
            raise SweepSpecError("sweep needs at least one scheme")
        if not self.evaluators:
            raise SweepSpecError("sweep needs at least one evaluator")
        if self.parameter == "n_alice":
            for v in self.values:
                if v != int(v) or int(v) < 1:
                    raise SweepSpecError(
                        f"n_alice sweep values must be integers >= 1, got {v!r}"
                    )
        if self.parameter == "epsilon":
            if self.metric != "C_out":
                raise SweepSpecError("an epsilon sweep only makes sense for C_out")
            for v in self.values:
                if not (0.0 < v < 1.0):
                    raise SweepSpecError(
                        f"epsilon values must lie in (0, 1), got {v!r}"
                    )
        if self.metric == "C_out" and self.parameter != "epsilon" and self.epsilon is None:
            raise SweepSpecError("metric C_out needs an epsilon in the base config")


@dataclass(frozen=True)
class SweepRow:
    """One evaluated point; mirrors the CSV schema."""

    preset: str
    scheme: str
    n_alice: int
    n_bob: int
    n_eve: int
    gamma_bar_b_db: float
    gamma_bar_e_db: float
    rate_rs: float | None
    epsilon: float | None
    metric: str
    evaluator: str
    value: float | None
    stderr: float | None
    n_trials: int | None
    seed: int | None
    error: str = ""
    wall_time_ms: float | None = None

    def to_record(self) -> list[str]:
        return [
            SCHEMA_VERSION,
            self.preset,
            self.scheme,
            str(self.n_alice),
            str(self.n_bob),
            str(self.n_eve),
            _fmt(self.gamma_bar_b_db),
            _fmt(self.gamma_bar_e_db),
            _fmt(self.rate_rs),
            _fmt(self.epsilon),
            self.metric,
            self.evaluator,
            _fmt(self.value),
            _fmt(self.stderr),
            "" if self.n_trials is None else str(self.n_trials),
            "" if self.seed is None else str(self.seed),
            self.error,
            _fmt(self.wall_time_ms),
        ]


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    return f"{value:.12g}"


def write_rows_csv(rows: Iterable[SweepRow], destination) -> None:
    """Write sweep rows with the fixed schema header.

    ``destination`` is a path or a text file object.  Output is
    byte-deterministic for deterministic rows.
    """
    if hasattr(destination, "write"):
        _write_rows(rows, destination)
    else:
        with open(destination, "w", newline="") as handle:
            _write_rows(rows, handle)


def _write_rows(rows: Iterable[SweepRow], handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.to_record())


def load_sweep_spec(path: str) -> SweepSpec:
    """Parse a sweep description from a YAML file.

    Layout: top-level ``name``, ``metric``, ``parameter``, ``values``,
    ``schemes``, optional ``output``; a ``base`` section with the fixed
    configuration (``n_alice``, ``n_bob``, ``n_eve``,
    ``gamma_bar_b_db``, ``gamma_bar_e_db``, ``rate_rs``, ``epsilon``);
    an ``evaluators`` section mapping evaluator names to their settings
    (``trials``, ``seed``, ``schemes``).
    """
    with open(path) as handle:
        try:
            raw = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise SweepSpecError(f"could not parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise SweepSpecError(f"{path} must hold a mapping at the top level")
    return _spec_from_dict(raw, origin=path)


def _spec_from_dict(raw: dict, origin: str) -> SweepSpec:
    known_top = {
        "name",
        "metric",
        "parameter",
        "values",
        "schemes",
        "base",
        "evaluators",
        "output",
    }
    unknown = set(raw) - known_top
    if unknown:
        raise SweepSpecError(f"{origin}: unknown keys {sorted(unknown)}")
    for key in ("metric", "parameter", "values", "schemes", "evaluators"):
        if key not in raw:
            raise SweepSpecError(f"{origin}: missing required key {key!r}")

    base = raw.get("base", {})
    if not isinstance(base, dict):
        raise SweepSpecError(f"{origin}: base must be a mapping")
    known_base = {
        "n_alice",
        "n_bob",
        "n_eve",
        "gamma_bar_b_db",
        "gamma_bar_e_db",
        "rate_rs",
        "epsilon",
    }
    unknown = set(base) - known_base
    if unknown:
        raise SweepSpecError(f"{origin}: unknown base keys {sorted(unknown)}")

    schemes_raw = raw["schemes"]
    if not isinstance(schemes_raw, (list, tuple)) or not schemes_raw:
        raise SweepSpecError(f"{origin}: schemes must be a non-empty list")
    try:
        schemes = tuple(Scheme.from_name(str(s)) for s in schemes_raw)
    except ValueError as exc:
        raise SweepSpecError(f"{origin}: {exc}") from exc

    evaluators_raw = raw["evaluators"]
    if not isinstance(evaluators_raw, dict) or not evaluators_raw:
        raise SweepSpecError(
            f"{origin}: evaluators must be a non-empty mapping of name -> settings"
        )
    evaluators = []
    for name in sorted(evaluators_raw):
        settings = evaluators_raw[name] or {}
        if not isinstance(settings, dict):
            raise SweepSpecError(f"{origin}: settings of {name!r} must be a mapping")
        unknown = set(settings) - {"trials", "seed", "schemes"}
        if unknown:
            raise SweepSpecError(
                f"{origin}: unknown evaluator keys {sorted(unknown)} under {name!r}"
            )
        kwargs = {"name": str(name)}
        if "trials" in settings:
            kwargs["trials"] = int(settings["trials"])
        if "seed" in settings:
            kwargs["seed"] = int(settings["seed"])
        if "schemes" in settings:
            kwargs["schemes"] = tuple(str(s) for s in settings["schemes"])
        evaluators.append(EvaluatorSettings(**kwargs))

    values_raw = raw["values"]
    if not isinstance(values_raw, (list, tuple)) or not values_raw:
        raise SweepSpecError(f"{origin}: values must be a non-empty list")

    try:
        return SweepSpec(
            name=str(raw.get("name", "sweep")),
            metric=str(raw["metric"]),
            parameter=str(raw["parameter"]),
            values=tuple(float(v) for v in values_raw),
            schemes=schemes,
            evaluators=tuple(evaluators),
            n_alice=int(base.get("n_alice", 2)),
            n_bob=int(base.get("n_bob", 1)),
            n_eve=int(base.get("n_eve", 1)),
            gamma_bar_b_db=float(base.get("gamma_bar_b_db", 10.0)),
            gamma_bar_e_db=float(base.get("gamma_bar_e_db", 0.0)),
            rate_rs=float(base.get("rate_rs", 0.0)),
            epsilon=None if base.get("epsilon") is None else float(base["epsilon"]),
            output=None if raw.get("output") is None else str(raw["output"]),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SweepSpecError):
            raise
        raise SweepSpecError(f"{origin}: {exc}") from exc


# ---------------------------------------------------------------------------
# Sweep execution
# ---------------------------------------------------------------------------


def _point_fields(spec: SweepSpec, value: float) -> dict:
    fields = {
        "n_alice": spec.n_alice,
        "n_bob": spec.n_bob,
        "n_eve": spec.n_eve,
        "gamma_bar_b_db": spec.gamma_bar_b_db,
        "gamma_bar_e_db": spec.gamma_bar_e_db,
        "rate_rs": spec.rate_rs,
        "epsilon": spec.epsilon,
    }
    if spec.parameter == "n_alice":
        fields["n_alice"] = int(value)
    else:
        fields[spec.parameter] = float(value)
    return fields


def _evaluate_point(
    spec: SweepSpec,
    value: float,
    scheme: Scheme,
    ev: EvaluatorSettings,
    timings: bool,
) -> SweepRow:
    fields = _point_fields(spec, value)
    metric = spec.metric
    rate = fields["rate_rs"] if metric == "P_out" else 0.0
    shared = dict(
        preset=spec.preset,
        scheme=scheme.value,
        n_alice=fields["n_alice"],
        n_bob=fields["n_bob"],
        n_eve=fields["n_eve"],
        gamma_bar_b_db=fields["gamma_bar_b_db"],
        gamma_bar_e_db=fields["gamma_bar_e_db"],
        rate_rs=None if metric == "C_out" else rate,
        epsilon=fields["epsilon"] if metric == "C_out" else None,
        metric=metric,
        evaluator=ev.name,
    )
    started = time.perf_counter()
    value_out: float | None = None
    stderr: float | None = None
    n_trials: int | None = None
    seed: int | None = None
    error = ""
    try:
        config = SystemConfig(
            n_alice=fields["n_alice"],
            n_bob=fields["n_bob"],
            n_eve=fields["n_eve"],
            gamma_bar_b=db_to_linear(fields["gamma_bar_b_db"]),
            gamma_bar_e=db_to_linear(fields["gamma_bar_e_db"]),
        )
        if ev.name == "monte-carlo":
            n_trials = ev.trials
            seed = ev.seed
            if metric == "P_out":
                result = montecarlo.estimate_outage(
                    config, scheme, rate, ev.trials, ev.seed
                )
            elif metric == "Pr_nonzero":
                result = montecarlo.estimate_nonzero_secrecy(
                    config, scheme, ev.trials, ev.seed
                )
            else:
                raise ValueError(
                    "the monte-carlo evaluator does not support the C_out metric"
                )
            value_out = result.estimate
            stderr = result.stderr
        else:
            if scheme is not Scheme.TAS_ALAMOUTI:
                raise ValueError(
                    f"the {ev.name} evaluator supports only the "
                    f"{Scheme.TAS_ALAMOUTI.value} scheme"
                )
            if ev.name == "closed-form":
                if metric == "P_out":
                    value_out = closed_form_outage(config, rate)
                elif metric == "Pr_nonzero":
                    value_out = prob_nonzero_secrecy(config)
                else:
                    value_out = eps_outage_capacity(config, fields["epsilon"])
            else:
                if metric == "P_out":
                    value_out = outage_quadrature(config, rate)
                elif metric == "Pr_nonzero":
                    value_out = 1.0 - outage_quadrature(config, 0.0)
                else:
                    raise ValueError(
                        "the quadrature evaluator does not support the C_out metric"
                    )
    except (ValueError, PrecisionExhaustedError, NumericalFailureError) as exc:
        error = str(exc)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    return SweepRow(
        **shared,
        value=value_out,
        stderr=stderr,
        n_trials=n_trials,
        seed=seed,
        error=error,
        wall_time_ms=elapsed_ms if timings else None,
    )


def run_sweep(
    spec: SweepSpec,
    *,
    workers: int = 1,
    timings: bool = False,
) -> list[SweepRow]:
    """Evaluate every (value, scheme, evaluator) combination of a sweep.

    Rows come back ordered by sweep value, then scheme order, then
    evaluator order, regardless of worker scheduling.  Evaluator
    failures are recorded in the row's error column instead of
    aborting.  ``timings`` fills the wall-time column; leaving it off
    keeps output files byte-identical across runs.
    """
    jobs = [
        (value, scheme, ev)
        for value in spec.values
        for scheme in spec.schemes
        for ev in spec.evaluators
        if ev.applies_to(scheme)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(
                pool.map(
                    lambda job: _evaluate_point(spec, *job, timings=timings), jobs
                )
            )
    else:
        rows = [_evaluate_point(spec, *job, timings=timings) for job in jobs]
    if spec.output is not None:
        write_rows_csv(rows, spec.output)
    return rows


# ---------------------------------------------------------------------------
# Presets: figure-style experiment families.  Each preset is a list of
# sweeps (one per curve); all rows share the preset tag.
# ---------------------------------------------------------------------------


def _db_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    count = int(round((stop - start) / step)) + 1
    return tuple(start + step * k for k in range(count))


def _analytic_and_mc(trials: int, seed: int) -> tuple[EvaluatorSettings, ...]:
    return (
        EvaluatorSettings(name="closed-form", schemes=(Scheme.TAS_ALAMOUTI.value,)),
        EvaluatorSettings(name="monte-carlo", trials=trials, seed=seed),
    )


def build_preset(name: str, *, trials: int = 1_000_000, seed: int = 0) -> list[SweepSpec]:
    """Construct the sweep family of one preset.

    fig2: outage vs. legitimate SNR for n_alice in {2,3,4}, both schemes.
    fig3: same with n_bob in {2,3,4} at n_alice=4.
    fig4: same with n_eve in {1,2,3} at n_alice=4, n_bob=3.
    fig5: probability of non-zero secrecy vs. legitimate SNR for
          eavesdropper SNR in {0, 5} dB, both schemes.
    fig6: epsilon-outage capacity vs. n_alice for n_eve in {1,2,3}.
    """
    if name not in PRESET_NAMES:
        raise SweepSpecError(
            f"unknown preset {name!r}; expected one of {PRESET_NAMES}"
        )
    both = (Scheme.TAS_ALAMOUTI, Scheme.SINGLE_TAS)
    gb_range = _db_range(0.0, 25.0, 2.5)
    if name == "fig2":
        return [
            SweepSpec(
                name=f"fig2-na{n_a}",
                preset="fig2",
                metric="P_out",
                parameter="gamma_bar_b_db",
                values=gb_range,
                schemes=both,
                evaluators=_analytic_and_mc(trials, seed),
                n_alice=n_a,
                n_bob=3,
                n_eve=2,
                gamma_bar_e_db=5.0,
                rate_rs=1.0,
            )
            for n_a in (2, 3, 4)
        ]
    if name == "fig3":
        return [
            SweepSpec(
                name=f"fig3-nb{n_b}",
                preset="fig3",
                metric="P_out",
                parameter="gamma_bar_b_db",
                values=gb_range,
                schemes=both,
                evaluators=_analytic_and_mc(trials, seed),
                n_alice=4,
                n_bob=n_b,
                n_eve=2,
                gamma_bar_e_db=5.0,
                rate_rs=1.0,
            )
            for n_b in (2, 3, 4)
        ]
    if name == "fig4":
        return [
            SweepSpec(
                name=f"fig4-ne{n_e}",
                preset="fig4",
                metric="P_out",
                parameter="gamma_bar_b_db",
                values=gb_range,
                schemes=both,
                evaluators=_analytic_and_mc(trials, seed),
                n_alice=4,
                n_bob=3,
                n_eve=n_e,
                gamma_bar_e_db=5.0,
                rate_rs=1.0,
            )
            for n_e in (1, 2, 3)
        ]
    if name == "fig5":
        return [
            SweepSpec(
                name=f"fig5-ge{int(ge)}",
                preset="fig5",
                metric="Pr_nonzero",
                parameter="gamma_bar_b_db",
                values=_db_range(-10.0, 20.0, 2.5),
                schemes=both,
                evaluators=_analytic_and_mc(trials, seed),
                n_alice=4,
                n_bob=3,
                n_eve=2,
                gamma_bar_e_db=ge,
            )
            for ge in (0.0, 5.0)
        ]
    return [
        SweepSpec(
            name=f"fig6-ne{n_e}",
            preset="fig6",
            metric="C_out",
            parameter="n_alice",
            values=tuple(float(v) for v in range(2, 9)),
            schemes=(Scheme.TAS_ALAMOUTI,),
            evaluators=(
                EvaluatorSettings(
                    name="closed-form", schemes=(Scheme.TAS_ALAMOUTI.value,)
                ),
            ),
            n_bob=2,
            n_eve=n_e,
            gamma_bar_b_db=20.0,
            gamma_bar_e_db=0.0,
            epsilon=0.01,
        )
        for n_e in (1, 2, 3)
    ]


def run_preset(
    name: str,
    *,
    trials: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
    timings: bool = False,
) -> list[SweepRow]:
    """Run every curve of a preset and return the concatenated rows."""
    rows: list[SweepRow] = []
    for spec in build_preset(name, trials=trials, seed=seed):
        rows.extend(run_sweep(spec, workers=workers, timings=timings))
    return rows


# ---------------------------------------------------------------------------
# Crossover between schemes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrossoverResult:
    """Location of equal performance between two schemes.

    ``found`` is False when the metric difference does not change sign
    over the bracket; ``half_width_db`` spans the region where the
    paired difference is not statistically distinguishable from zero
    (95% level).
    """

    found: bool
    gamma_db: float | None
    half_width_db: float | None
    bracket_db: tuple[float, float]
    metric: str
    n_trials: int
    seed: int
    message: str = ""


def find_crossover(
    config: SystemConfig,
    scheme_a: Scheme,
    scheme_b: Scheme,
    metric: str,
    bracket_db: tuple[float, float],
    n_trials: int,
    seed: int = 0,
    *,
    rate: float = 0.0,
    tol_db: float = 0.01,
) -> CrossoverResult:
    """Locate where two schemes' metric curves cross in gamma_bar_b.

    Both schemes are evaluated on the same channel draws at every
    probe, so the per-trial difference cancels most Monte Carlo noise;
    the crossover is the sign change of that paired difference, found
    by bisection.  ``config.gamma_bar_b`` is ignored (it is the swept
    quantity); ``rate`` matters only for the P_out metric.

    Returns a no-crossover result (found=False) when the difference
    has the same sign at both bracket ends.
    """
    if metric not in ("P_out", "Pr_nonzero"):
        raise ValueError(
            f"crossover metric must be P_out or Pr_nonzero, got {metric!r}"
        )
    lo_db, hi_db = float(bracket_db[0]), float(bracket_db[1])
    if not lo_db < hi_db:
        raise ValueError(f"bracket must satisfy lo < hi, got {bracket_db!r}")
    if scheme_a is Scheme.TAS_ALAMOUTI or scheme_b is Scheme.TAS_ALAMOUTI:
        config.require_two_transmit_antennas()

    draws = montecarlo.draw_components(
        config.n_alice, config.n_bob, config.n_eve, n_trials, seed
    )
    event_rate = rate if metric == "P_out" else 0.0

    def paired_difference(g_db: float) -> tuple[float, float]:
        gb = db_to_linear(g_db)
        ev_a = montecarlo.outage_events(
            draws, scheme_a, gb, config.gamma_bar_e, event_rate
        )
        ev_b = montecarlo.outage_events(
            draws, scheme_b, gb, config.gamma_bar_e, event_rate
        )
        # For Pr_nonzero the complement flips both signs; the
        # difference just negates, which bisection handles the same.
        diff = ev_a.astype(np.int8) - ev_b.astype(np.int8)
        mean = float(diff.sum()) / n_trials
        var = float(np.mean(diff.astype(np.float64) ** 2)) - mean * mean
        se = math.sqrt(max(var, 0.0) / n_trials)
        return mean, se

    d_lo, _ = paired_difference(lo_db)
    d_hi, _ = paired_difference(hi_db)
    if d_lo * d_hi < 0.0:
        lo, hi, d_at_lo = lo_db, hi_db, d_lo
    else:
        # An exact-zero endpoint (no events under either scheme) can
        # mask an interior sign change, so scan a coarse grid and look
        # for adjacent points with resolvable opposite signs.
        probes = [
            (lo_db + (hi_db - lo_db) * k / 16.0,) for k in range(17)
        ]
        signed = []
        for (x,) in probes:
            if x == lo_db:
                d = d_lo
            elif x == hi_db:
                d = d_hi
            else:
                d, _ = paired_difference(x)
            if d != 0.0:
                signed.append((x, d))
        pair = next(
            (
                (a, b)
                for a, b in zip(signed, signed[1:])
                if a[1] * b[1] < 0.0
            ),
            None,
        )
        if pair is None:
            return CrossoverResult(
                found=False,
                gamma_db=None,
                half_width_db=None,
                bracket_db=(lo_db, hi_db),
                metric=metric,
                n_trials=n_trials,
                seed=seed,
                message=(
                    f"no sign change of the {metric} difference on "
                    f"[{lo_db}, {hi_db}] dB (endpoints {d_lo:.3e}, {d_hi:.3e})"
                ),
            )
        (lo, d_at_lo), (hi, _d) = pair
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        d_mid, _ = paired_difference(mid)
        if d_mid == 0.0 or (d_mid > 0.0) == (d_at_lo > 0.0):
            lo, d_at_lo = mid, d_mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)

    half = 0.05
    while half < (hi_db - lo_db):
        grown = False
        for side in (root - half, root + half):
            probe = min(max(side, lo_db), hi_db)
            mean, se = paired_difference(probe)
            if abs(mean) <= 1.959963984540054 * se:
                grown = True
        if not grown:
            break
        half *= 2.0
    half = min(half, hi_db - lo_db)

    return CrossoverResult(
        found=True,
        gamma_db=root,
        half_width_db=half,
        bracket_db=(lo_db, hi_db),
        metric=metric,
        n_trials=n_trials,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Cross-evaluator validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationRow:
    """Three-way comparison at one grid point."""

    n_alice: int
    n_bob: int
    n_eve: int
    gamma_bar_b_db: float
    gamma_bar_e_db: float
    rate_rs: float
    closed_form: float | None
    quadrature: float | None
    mc_estimate: float | None
    mc_stderr: float | None
    cf_quad_diff: float | None
    mc_z_score: float | None
    psi3: float | None
    psi4: float | None
    cancellation_ratio: float | None
    error: str = ""

    @property
    def cf_quad_ok(self) -> bool:
        return self.cf_quad_diff is not None and self.cf_quad_diff <= CF_QUAD_TOL

    @property
    def mc_ok(self) -> bool:
        return self.mc_z_score is not None and self.mc_z_score <= MC_Z_LIMIT


@dataclass(frozen=True)
class ValidationReport:
    """Aggregate of a validation run with its pass/fail verdict."""

    grid: str
    rows: tuple[ValidationRow, ...]
    n_trials: int
    seed: int
    cf_quad_failures: int
    mc_violations: int
    error_points: int
    passed: bool
    lines: tuple[str, ...]


def validation_grid(name: str) -> list[dict]:
    """Point dictionaries of a named validation grid."""
    if name == "default":
        n_alice_values = (2, 3, 4, 6)
        n_bob_values = (1, 2, 3)
        n_eve_values = (1, 2, 3)
        gb_values = (0.0, 5.0, 10.0, 15.0, 20.0)
        ge_values = (0.0, 5.0)
        rate_values = (0.0, 1.0, 2.0)
    elif name == "quick":
        n_alice_values = (2, 3)
        n_bob_values = (1, 2)
        n_eve_values = (1, 2)
        gb_values = (0.0, 10.0)
        ge_values = (0.0, 5.0)
        rate_values = (0.0, 1.0)
    else:
        raise ValueError(f"unknown validation grid {name!r}")
    return [
        {
            "n_alice": n_a,
            "n_bob": n_b,
            "n_eve": n_e,
            "gamma_bar_b_db": gb,
            "gamma_bar_e_db": ge,
            "rate_rs": rs,
        }
        for n_a in n_alice_values
        for n_b in n_bob_values
        for n_e in n_eve_values
        for gb in gb_values
        for ge in ge_values
        for rs in rate_values
    ]


def validate(
    grid: str = "default",
    *,
    n_trials: int = 1_000_000,
    seed: int = 0,
    points: Sequence[dict] | None = None,
) -> ValidationReport:
    """Compare the three evaluators across a parameter grid.

    Hard failures: any |closed-form - quadrature| above 1e-6, a
    Monte Carlo agreement fraction below 99%, or an evaluator error on
    a grid point.  The Monte Carlo z-score uses the binomial standard
    error under the closed-form value, so zero-event points at tiny
    probabilities are judged correctly.

    ``points`` overrides the named grid (used for focused reports).
    """
    grid_points = list(points) if points is not None else validation_grid(grid)

    draws_cache: dict[tuple[int, int, int], montecarlo.NormalizedDraws] = {}
    rows: list[ValidationRow] = []
    for pt in grid_points:
        key = (pt["n_alice"], pt["n_bob"], pt["n_eve"])
        if key not in draws_cache:
            draws_cache[key] = montecarlo.draw_components(*key, n_trials, seed)
        draws = draws_cache[key]
        config = SystemConfig(
            n_alice=pt["n_alice"],
            n_bob=pt["n_bob"],
            n_eve=pt["n_eve"],
            gamma_bar_b=db_to_linear(pt["gamma_bar_b_db"]),
            gamma_bar_e=db_to_linear(pt["gamma_bar_e_db"]),
        )
        rate = float(pt["rate_rs"])
        cf = quad = mc_est = mc_se = diff = z = p3 = p4 = ratio = None
        error = ""
        try:
            breakdown = outage_breakdown(config, rate)
            cf = breakdown.value
            p3 = breakdown.psi[2]
            p4 = breakdown.psi[3]
            ratio = breakdown.cancellation_ratio
            quad = outage_quadrature(config, rate)
            diff = abs(cf - quad)
            events = montecarlo.outage_events(
                draws,
                Scheme.TAS_ALAMOUTI,
                config.gamma_bar_b,
                config.gamma_bar_e,
                rate,
            )
            mc_est = float(events.sum()) / n_trials
            mc_se = math.sqrt(max(mc_est * (1.0 - mc_est), 0.0) / n_trials)
            se_h0 = math.sqrt(max(cf * (1.0 - cf), 0.0) / n_trials)
            if se_h0 > 0.0:
                z = abs(mc_est - cf) / se_h0
            else:
                z = 0.0 if mc_est == cf else math.inf
        except (ValueError, PrecisionExhaustedError, NumericalFailureError) as exc:
            error = str(exc)
        rows.append(
            ValidationRow(
                n_alice=pt["n_alice"],
                n_bob=pt["n_bob"],
                n_eve=pt["n_eve"],
                gamma_bar_b_db=pt["gamma_bar_b_db"],
                gamma_bar_e_db=pt["gamma_bar_e_db"],
                rate_rs=rate,
                closed_form=cf,
                quadrature=quad,
                mc_estimate=mc_est,
                mc_stderr=mc_se,
                cf_quad_diff=diff,
                mc_z_score=z,
                psi3=p3,
                psi4=p4,
                cancellation_ratio=ratio,
                error=error,
            )
        )

    error_points = sum(1 for r in rows if r.error)
    cf_quad_failures = sum(1 for r in rows if not r.error and not r.cf_quad_ok)
    mc_violations = sum(1 for r in rows if not r.error and not r.mc_ok)
    clean = [r for r in rows if not r.error]
    mc_fraction = (
        (len(clean) - mc_violations) / len(clean) if clean else 0.0
    )
    passed = (
        not error_points
        and not cf_quad_failures
        and mc_fraction >= MC_PASS_FRACTION
    )

    worst_diff = max((r.cf_quad_diff for r in clean), default=0.0)
    worst_z = max((r.mc_z_score for r in clean), default=0.0)
    lines = (
        f"validation grid {grid!r}: {len(rows)} points, "
        f"{n_trials} trials per Monte Carlo estimate, seed {seed}",
        f"closed-form vs quadrature: worst |diff| = {worst_diff:.3e} "
        f"(budget {CF_QUAD_TOL:g}); {cf_quad_failures} failures",
        f"closed-form vs Monte Carlo: worst z = {worst_z:.2f}; "
        f"{mc_violations} points beyond {MC_Z_LIMIT}-sigma "
        f"({100.0 * mc_fraction:.2f}% within, need "
        f"{100.0 * MC_PASS_FRACTION:.0f}%)",
        f"evaluator errors: {error_points}",
        "PASS" if passed else "FAIL",
    )
    return ValidationReport(
        grid=grid,
        rows=tuple(rows),
        n_trials=n_trials,
        seed=seed,
        cf_quad_failures=cf_quad_failures,
        mc_violations=mc_violations,
        error_points=error_points,
        passed=passed,
        lines=lines,
    )


_VALIDATION_COLUMNS = (
    "n_alice",
    "n_bob",
    "n_eve",
    "gamma_bar_b_db",
    "gamma_bar_e_db",
    "rate_rs",
    "closed_form",
    "quadrature",
    "mc_estimate",
    "mc_stderr",
    "cf_quad_diff",
    "mc_z_score",
    "psi3",
    "psi4",
    "cancellation_ratio",
    "error",
)


def write_validation_csv(report: ValidationReport, destination) -> None:
    """Write per-point validation rows as CSV."""
    if hasattr(destination, "write"):
        handle = destination
        close = False
    else:
        handle = open(destination, "w", newline="")
        close = True
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(_VALIDATION_COLUMNS)
        for r in report.rows:
            writer.writerow(
                [
                    str(r.n_alice),
                    str(r.n_bob),
                    str(r.n_eve),
                    _fmt(r.gamma_bar_b_db),
                    _fmt(r.gamma_bar_e_db),
                    _fmt(r.rate_rs),
                    _fmt(r.closed_form),
                    _fmt(r.quadrature),
                    _fmt(r.mc_estimate),
                    _fmt(r.mc_stderr),
                    _fmt(r.cf_quad_diff),
                    _fmt(r.mc_z_score),
                    _fmt(r.psi3),
                    _fmt(r.psi4),
                    _fmt(r.cancellation_ratio),
                    r.error,
                ]
            )
    finally:
        if close:
            handle.close()
