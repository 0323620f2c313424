"""Command-line driver.

Examples::

    oamwalk --mode ideal --steps 100 --coin symmetric --output p.csv
    oamwalk --mode ring --steps 20 --mu 0.5 --output ring.json --format json
    oamwalk --mode hom --output hom.json --format json

Exit codes: 0 success, 1 invalid configuration, 2 output I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from .coherent import CoherentField, evolve_coherent, mean_photon_spectrum
from .fock import coincidence_amplitudes, distinguishable_coincidence_probability, hom_two_roundtrips
from .jones import JonesField, apply, coin_from_qwp, qwp_step_operator
from .modes import shift_magnitude, sort_modes
from .ring import DetectorConfig, IterationRecord, RingConfig, run_ring, audit
from .walk import COIN_PRESETS, CoinVector, StepParams, WalkState, distribution, run

MODES = ("ideal", "jones", "ring", "coherent", "hom")
FORMATS = ("csv", "json")
MAX_STEPS_DEFAULT = 100

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str = "ideal"
    steps: int = MAX_STEPS_DEFAULT
    q: str = "1/2"
    coin: str | list = "symmetric"
    qwp_angle: float = math.pi / 4
    mu: float | None = None
    window_center: int = 0
    window_halfwidth: int = 50
    odd_even_split: bool = False
    alpha: str | list = "1"
    output: str = ""
    format: str = "csv"
    seed: int = 0

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode: unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        if self.format not in FORMATS:
            raise ConfigError(f"format: must be csv or json, got {self.format!r}")
        if not self.output:
            raise ConfigError("output: an output path is required")
        if not isinstance(self.steps, int) or self.steps < 1:
            raise ConfigError(f"steps: must be a positive integer, got {self.steps!r}")
        try:
            shift_magnitude(self.q_value)
        except ValueError as exc:
            raise ConfigError(f"q: {exc}") from None
        self.initial_coin()
        if self.mode == "ring":
            if self.mu is None or not (0 < self.mu <= 1):
                raise ConfigError(f"mu: ring mode needs mu in (0, 1], got {self.mu!r}")
            if self.window_halfwidth < 1:
                raise ConfigError("window-halfwidth: must be a positive integer")
        elif self.mu is not None:
            raise ConfigError("mu: only valid with --mode ring")
        if self.mode == "coherent":
            self.alpha_value()
        if self.mode == "hom":
            if self.q_value != Fraction(1, 2):
                raise ConfigError("q: hom mode requires q = 1/2")
            if not math.isclose(self.qwp_angle, math.pi / 4, abs_tol=1e-12):
                raise ConfigError("qwp-angle: hom mode requires the 45 degree quarter-wave plate")
            if self.format != "json":
                raise ConfigError("format: hom mode writes a JSON report only")

    @property
    def q_value(self) -> Fraction:
        try:
            return Fraction(str(self.q))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"q: not a number: {self.q!r}") from None

    def step_params(self) -> StepParams:
        return StepParams(self.q_value, coin_from_qwp(self.qwp_angle))

    def initial_coin(self) -> CoinVector:
        c = self.coin
        if isinstance(c, str) and c in COIN_PRESETS:
            return COIN_PRESETS[c]
        if c == "random":
            rng = np.random.default_rng(self.seed)
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            return CoinVector.from_array(v / np.linalg.norm(v))
        try:
            parts = c.split(",") if isinstance(c, str) else list(c)
            up, down = (_parse_complex(p) for p in parts)
        except (ValueError, TypeError):
            raise ConfigError(
                f"coin: expected a preset ({', '.join(COIN_PRESETS)}, random) "
                f"or two complex numbers 'a,b', got {c!r}"
            ) from None
        norm = math.hypot(abs(up), abs(down))
        if norm == 0:
            raise ConfigError("coin: zero vector")
        return CoinVector(up / norm, down / norm)

    def alpha_value(self) -> complex:
        try:
            return _parse_complex(self.alpha)
        except (ValueError, TypeError):
            raise ConfigError(f"alpha: not a complex number: {self.alpha!r}") from None


def _parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(float(re), float(im))
    if isinstance(v, (int, float, complex)):
        return complex(v)
    return complex(str(v).strip().replace(" ", "").replace("i", "j"))


def _records_for(cfg: RunConfig) -> list[IterationRecord]:
    params = cfg.step_params()
    coin = cfg.initial_coin()
    if cfg.mode == "ideal":
        states = run(WalkState({0: coin}), params, cfg.steps)[1:]
        return [IterationRecord(s.step_count, 1.0, distribution(s)) for s in states]
    if cfg.mode == "jones":
        op = qwp_step_operator(cfg.q_value, cfg.qwp_angle)
        f = JonesField.from_polarization(coin.up, coin.down)
        out = []
        for n in range(1, cfg.steps + 1):
            f = apply(op, f)
            out.append(IterationRecord(n, 1.0, f.intensity()))
        return out
    if cfg.mode == "coherent":
        alpha = cfg.alpha_value()
        c = CoherentField.from_polarization(alpha, coin.up, coin.down)
        out = []
        for n in range(1, cfg.steps + 1):
            c = evolve_coherent(c, params)
            out.append(IterationRecord(n, c.mean_photon_number, mean_photon_spectrum(c)))
        return out
    if cfg.mode == "ring":
        ring = RingConfig(
            cfg.mu,
            cfg.steps,
            params,
            DetectorConfig(cfg.window_center, cfg.window_halfwidth, cfg.odd_even_split),
        )
        result = run_ring(JonesField.from_polarization(coin.up, coin.down), ring)
        print(f"energy audit residual: {audit(result):.3e}")
        return result.records
    raise ConfigError(f"mode: {cfg.mode!r} has no spectrum table")


def records_to_json(records: list[IterationRecord]) -> str:
    data = [
        {
            "iteration": r.iteration,
            "detected_power": r.detected_power,
            "clipped_power": r.clipped_power,
            "spectrum": [[ell, p] for ell, p in sorted(r.spectrum.items())],
        }
        for r in records
    ]
    return json.dumps(data, indent=1)


def records_from_json(text: str) -> list[IterationRecord]:
    return [
        IterationRecord(
            d["iteration"],
            d["detected_power"],
            {int(ell): p for ell, p in d["spectrum"]},
            d["clipped_power"],
        )
        for d in json.loads(text)
    ]


def records_to_csv(records: list[IterationRecord], ring_columns: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["iteration", "ell", "probability_or_power"]
    if ring_columns:
        header += ["detected_power", "clipped_power"]
    w.writerow(header)
    for r in records:
        for ell, p in sorted(r.spectrum.items()):
            row = [r.iteration, ell, repr(p)]
            if ring_columns:
                row += [repr(r.detected_power), repr(r.clipped_power)]
            w.writerow(row)
    return buf.getvalue()


def emit_spectrum_table(
    records: list[IterationRecord], fmt: str, path: str | Path, ring_columns: bool = False
) -> Path:
    """Write records as a tidy CSV table or a JSON array; raises OSError on I/O failure."""
    if not records:
        raise ValueError("no records to write")
    text = records_to_json(records) if fmt == "json" else records_to_csv(records, ring_columns)
    path = Path(path)
    path.write_text(text)
    return path


def _cplx(z: complex) -> list[float]:
    return [z.real, z.imag]


def hom_report(ell: int = 0) -> dict:
    state = hom_two_roundtrips(ell)
    coinc = coincidence_amplitudes(state, ell, ell + 2)
    worst = max((abs(a) for a in coinc.values()), default=0.0)
    terms = []
    for config in sorted(state.terms, key=lambda c: [(m[1], m[0].index) for m in c]):
        terms.append(
            {
                "modes": [[m[0].value, m[1]] for m in sort_modes(config)],
                "amplitude": _cplx(state.terms[config]),
            }
        )
    return {
        "input": [["R", ell], ["L", ell + 2]],
        "roundtrips": 2,
        "coincidence_amplitude": worst,
        "coincidence_probability": math.fsum(abs(a) ** 2 for a in coinc.values()),
        "distinguishable_coincidence_probability": distinguishable_coincidence_probability(ell),
        "norm": state.norm2,
        "terms": terms,
    }


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oamwalk", description="Quantum walk in OAM space.")
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--mode", help="ideal | jones | ring | coherent | hom")
    p.add_argument("--steps", type=int)
    p.add_argument("--q")
    p.add_argument("--coin", help="symmetric | up | down | random | 'a,b'")
    p.add_argument("--qwp-angle", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--window-center", type=int)
    p.add_argument("--window-halfwidth", type=int)
    p.add_argument("--odd-even-split", action="store_true", default=None)
    p.add_argument("--alpha")
    p.add_argument("--output")
    p.add_argument("--format")
    p.add_argument("--seed", type=int)

    def error(message):
        p.print_usage(sys.stderr)
        print(f"oamwalk: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)

    p.error = error
    return p


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        try:
            values = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}") from None
        if not isinstance(values, dict):
            raise ConfigError("config: top level must be a JSON object")
        values = {k.replace("-", "_"): v for k, v in values.items()}
        known = {f.name for f in fields(RunConfig)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"config: unknown field(s) {', '.join(unknown)}")
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def run_cli(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args)
        if cfg.mode == "hom":
            text = json.dumps(hom_report(), indent=1)
            Path(cfg.output).write_text(text)
        else:
            records = _records_for(cfg)
            emit_spectrum_table(records, cfg.format, cfg.output, ring_columns=cfg.mode == "ring")
    except ConfigError as exc:
        print(f"oamwalk: bad config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"oamwalk: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
