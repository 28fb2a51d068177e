"""Batch command-line front end.

Subcommands: analyze, prune, ansatz, calibrate, experiment, mitigate.
All randomness flows from a single --seed (default 1729); sub-streams are
derived per task, so the same invocation and seed give byte-identical
outputs (the optional "timestamp" metadata field in JSON artifacts can be
suppressed with --no-timestamp).

Exit codes: 0 success, 1 usage error, 2 data/format error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone

from .circuits import circuit_from_dict, circuit_to_dict, ParametricCircuit
from .experiments import (
    EigenvalueScanResult,
    HistogramResult,
    ScalingResult,
    TransverseIsingModel,
    eigenvalue_shot_experiment,
    histogram_experiment,
    planted_redundancy_circuit,
    scaling_experiment,
)
from .expressivity import (
    classify_parameters,
    inductive_ansatz,
    random_point,
    remove_redundant,
)
from .mitigation import (
    CalibrationRecord,
    ReadoutNoiseModel,
    SingularGammaError,
    calibrate,
    mitigated_expectation,
    simulated_executor,
)
from .paulis import PauliSum
from .rng import DEFAULT_SEED
from .simulate import ShotCounts


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage problems; this tool reserves 2 for
    # data errors and uses 1 for usage errors
    def error(self, message):
        raise _UsageError(message)


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from None


def _write_json(data: dict, path: str | None, timestamp: bool) -> None:
    if timestamp:
        data = dict(data)
        data["timestamp"] = datetime.now(timezone.utc).isoformat()
    text = json.dumps(data, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _write_csv(header: str, rows, path: str | None) -> None:
    out = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(header.split(","))
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    finally:
        if path:
            out.close()


def _parse_point(text: str | None, circuit: ParametricCircuit, seed: int):
    if text is None:
        return random_point(circuit, seed)
    values = [float(x) for x in text.split(",") if x.strip()]
    if len(values) != circuit.num_parameters:
        raise ValueError(
            f"--point has {len(values)} values, circuit has "
            f"{circuit.num_parameters} parameters"
        )
    return values


def _noise_from_data(data) -> ReadoutNoiseModel:
    if isinstance(data, str):
        data = _load_json(data)
    return ReadoutNoiseModel.from_dict(data)


def _cmd_analyze(args) -> int:
    circuit = circuit_from_dict(_load_json(args.circuit))
    point = _parse_point(args.point, circuit, args.seed)
    report = classify_parameters(
        circuit, point, args.epsilon, mode=args.mode, shots=args.shots,
        seed=args.seed, dim_target=args.dim_target)
    _write_json(report.to_dict(), args.out, not args.no_timestamp)
    return 0


def _cmd_prune(args) -> int:
    circuit = circuit_from_dict(_load_json(args.circuit))
    point = _parse_point(args.point, circuit, args.seed)
    report = classify_parameters(circuit, point, args.epsilon,
                                 mode=args.mode, shots=args.shots,
                                 seed=args.seed)
    freeze = {}
    for item in args.freeze or []:
        name, _, value = item.partition("=")
        freeze[name] = float(value) if value else 0.0
    reduced = remove_redundant(circuit, report, freeze)
    _write_json(circuit_to_dict(reduced), args.out, not args.no_timestamp)
    return 0


def _cmd_ansatz(args) -> int:
    circuit = inductive_ansatz(args.qubits, include_phase=not args.mod_phase,
                               seed=args.seed)
    _write_json(circuit_to_dict(circuit), args.out, not args.no_timestamp)
    return 0


def _cmd_calibrate(args) -> int:
    noise = _noise_from_data(args.noise)
    qubits = ([int(q) for q in args.qubits.split(",")] if args.qubits
              else list(noise.qubits))
    record = calibrate(simulated_executor(noise), qubits, args.shots,
                       args.seed, run_index=args.run_index)
    _write_json(record.to_dict(), args.out, not args.no_timestamp)
    return 0


def _cmd_mitigate(args) -> int:
    counts = ShotCounts.from_dict(_load_json(args.counts))
    observable = PauliSum.from_dict(_load_json(args.observable))
    noise_data = _load_json(args.noise)
    entries = noise_data.get("qubits") if isinstance(noise_data, dict) else None
    if entries and "stderr0" in entries[0]:
        model = CalibrationRecord.from_dict(noise_data).model
    else:
        model = ReadoutNoiseModel.from_dict(noise_data)
    value = mitigated_expectation(counts, observable, model)
    print(_fmt(value))
    return 0


def _ti_model_from_config(config: dict) -> TransverseIsingModel:
    model = config.get("model", {})
    return TransverseIsingModel(
        sites=int(model.get("sites", 4)),
        coupling=float(model.get("coupling", -1.0)),
        field=float(model.get("field", 1.0)),
        boundary=model.get("boundary", "periodic"),
    )


def _cmd_experiment(args) -> int:
    config = _load_json(args.config)
    kind = config.get("experiment")
    seed = int(args.seed if args.seed is not None
               else config.get("seed", DEFAULT_SEED))
    out = args.out if args.out is not None else config.get("output")

    if kind == "histogram":
        model = _ti_model_from_config(config)
        noise = _noise_from_data(config["noise"])
        result = histogram_experiment(
            model, noise,
            experiments=int(config.get("repetitions", 2048)),
            shots_per_setting=int(config.get("shots", 2048)),
            seed=seed,
            calibration_shots=config.get("calibration_shots"),
            state_preparation=config.get("state_preparation", "exact"),
        )
        _write_csv(HistogramResult.CSV_HEADER, result.csv_rows(), out)
    elif kind == "scaling":
        noise = _noise_from_data(config["noise"])
        shots_grid = config.get("shots", [2**k for k in range(4, 14)])
        result = scaling_experiment(
            int(config.get("repetitions", 1024)), shots_grid, noise, seed,
            calibration_shots=int(config.get("calibration_shots", 8192)),
        )
        _write_csv(ScalingResult.CSV_HEADER, result.csv_rows(), out)
    elif kind == "eigenvalue":
        if "circuit" in config:
            data = config["circuit"]
            circuit = circuit_from_dict(
                _load_json(data) if isinstance(data, str) else data)
        else:
            circuit = planted_redundancy_circuit()
        point = (config["point"] if "point" in config
                 else random_point(circuit, seed))
        shots_list = config.get("shots", [1000, 4000, 8000])
        result = eigenvalue_shot_experiment(circuit, point, shots_list, seed)
        _write_csv(EigenvalueScanResult.CSV_HEADER, result.csv_rows(), out)
    else:
        raise ValueError(
            f"unknown experiment {kind!r}; expected histogram, scaling or "
            "eigenvalue"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vqetools",
                     description="Circuit expressivity analysis and readout "
                                 "error mitigation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"master seed (default {DEFAULT_SEED})")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the timestamp field from JSON artifacts")

    p = sub.add_parser("analyze", help="classify circuit parameters")
    p.add_argument("--circuit", required=True)
    p.add_argument("--point", help="comma-separated parameter values")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--shots", type=int)
    p.add_argument("--dim-target", type=int)
    common(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("prune", help="freeze redundant parameters")
    p.add_argument("--circuit", required=True)
    p.add_argument("--point", help="comma-separated parameter values")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--shots", type=int)
    p.add_argument("--freeze", action="append",
                   help="name=value freeze override (repeatable)")
    common(p)
    p.set_defaults(func=_cmd_prune)

    p = sub.add_parser("ansatz", help="emit an inductive ansatz candidate")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--mod-phase", action="store_true",
                   help="prune the global-phase direction")
    common(p)
    p.set_defaults(func=_cmd_ansatz)

    p = sub.add_parser("calibrate",
                       help="simulated readout calibration record")
    p.add_argument("--noise", required=True,
                   help="true noise model JSON for the simulated device")
    p.add_argument("--qubits", help="comma-separated qubit list")
    p.add_argument("--shots", type=int, default=4096)
    p.add_argument("--run-index", type=int, default=0)
    common(p)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("experiment", help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    p.add_argument("--out", default=None, help="override the config output")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("mitigate",
                       help="print the mitigated expectation of counts")
    p.add_argument("--counts", required=True)
    p.add_argument("--observable", required=True)
    p.add_argument("--noise", required=True,
                   help="noise model or calibration record JSON")
    p.set_defaults(func=_cmd_mitigate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except SingularGammaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
