"""Command-line driver: run a netlist sweep and emit CSV noise budgets.

`qnoise run <file> [--out DIR] [--json] [--set key=value ...]`

Frequencies are Hz at every user boundary and angular internally (factor of
exactly 2 pi).  Estimator PSDs of field readouts are reported as energy
spectral densities hbar|omega| * Sigma (the k_B Theta equivalent of the
occupation budget); the muscope force estimator is reported in
(kg m s^-2)^2/Hz and its acceleration ASD in m s^-2/sqrt(Hz).

Exit codes: 0 success, 1 parse error, 2 numeric/model error.
"""

import argparse
import dataclasses
import json
import math
import os
import sys
from typing import Dict, List, Optional, Tuple

import numpy as np

from .accelerometer import (MUSCOPE, AccelerometerConfig,
                            build_accelerometer, sensitivity_report)
from .amplifier import IdealOpAmp, opamp_scattering, recombine_noise_sources
from .constants import HBAR, K_B
from .errors import QNoiseError
from .estimator import NoiseBudget, added_noise_spectrum, integrate_budget, \
    normalize_estimator
from .netlist import (MeasureDecl, NetlistDocument,
                      NetlistParseError, OpAmpDecl, PresetDecl, SweepDecl,
                      parse_netlist)
from .network import (ModeCoefficient, NoiseLine, SpectrumTable,
                      capacitor_impedance, impedance_matrix,
                      inductor_impedance, scattering_from_impedance)
from .spectra import symmetrized_occupation

__all__ = ["run", "main", "sweep_grid", "preset_config"]

DEFAULT_PRESET_SWEEP = SweepDecl(1e-4, 1e-3, 1000, "log")


def sweep_grid(sweep: SweepDecl) -> np.ndarray:
    """Frequency grid in Hz, ascending."""
    if sweep.n_points == 1:
        return np.array([sweep.f_min_hz])
    if sweep.scale == "log":
        return np.logspace(math.log10(sweep.f_min_hz),
                           math.log10(sweep.f_max_hz), sweep.n_points)
    return np.linspace(sweep.f_min_hz, sweep.f_max_hz, sweep.n_points)


def preset_config(preset: PresetDecl,
                  extra: Optional[Dict[str, float]] = None,
                  ) -> AccelerometerConfig:
    """Muscope reference parameters with declaration and CLI overrides."""
    params = dict(preset.overrides)
    if extra:
        params.update(extra)
    kwargs = {}
    for key, value in params.items():
        if key == "measure_freq_hz":
            kwargs["measure_omega"] = 2.0 * math.pi * value
        elif key == "carrier_freq_hz":
            kwargs["carrier_omega"] = 2.0 * math.pi * value
        else:
            kwargs[key] = value
    return dataclasses.replace(MUSCOPE, **kwargs)


def _passive_budgets(doc: NetlistDocument, measure: MeasureDecl,
                     freqs_hz: np.ndarray) -> List[NoiseBudget]:
    opamp_lines = {d.left for d in doc.opamps} | {d.right for d in doc.opamps}
    lines = [NoiseLine(d.resistance, d.temperature, d.name)
             for d in doc.lines if d.name not in opamp_lines]
    index = {line.label: i for i, line in enumerate(lines)}
    gains = [g for g in doc.gains if g.input_line == measure.line]
    budgets = []
    for f_hz in freqs_hz:
        omega = 2.0 * math.pi * f_hz
        stamps = []
        for cap in doc.caps:
            z = capacitor_impedance(cap.capacitance, omega)
            stamps.append((z, *_port_indices(cap.ports, index)))
        for ind in doc.inds:
            z = inductor_impedance(ind.inductance, omega)
            stamps.append((z, *_port_indices(ind.ports, index)))
        z_mat = impedance_matrix(len(lines), stamps)
        smap = scattering_from_impedance(z_mat, lines)
        row = smap.row(measure.line)
        occupations = {line.label: symmetrized_occupation(omega,
                                                          line.temperature)
                       for line in lines}
        for g in gains:
            gain = complex(g.gain)
            row = {lab: ModeCoefficient(gain * c.amplitude, c.conjugated)
                   for lab, c in row.items()}
            b_label = f"{g.name}_b"
            row[b_label] = ModeCoefficient(
                math.sqrt(abs(gain) ** 2 - 1.0), True)
            occupations[b_label] = symmetrized_occupation(
                omega, g.noise_temperature)
        signal = row[measure.signal].amplitude
        est = normalize_estimator(row, signal)
        budget = added_noise_spectrum(est, SpectrumTable(occupations))
        # report as energy PSD hbar|w| Sigma (k_B Theta equivalent)
        scale = HBAR * abs(omega)
        budgets.append(NoiseBudget(
            {lab: scale * v for lab, v in budget.terms.items()}, units="J"))
    return budgets


def _port_indices(ports: Tuple[str, str], index: Dict[str, int]
                  ) -> Tuple[int, int]:
    i = index[ports[0]] if ports[0] != "gnd" else index[ports[1]]
    if ports[0] == "gnd" or ports[1] == "gnd":
        return i, -1
    return index[ports[0]], index[ports[1]]


def _opamp_budgets(doc: NetlistDocument, decl: OpAmpDecl,
                   measure: MeasureDecl, freqs_hz: np.ndarray,
                   ) -> List[NoiseBudget]:
    line_decls = {d.name: d for d in doc.lines}
    left = line_decls[decl.left]
    right = line_decls[decl.right]
    budgets = []
    for f_hz in freqs_hz:
        omega = 2.0 * math.pi * f_hz
        sigma_amp = K_B * decl.amp_temperature / (HBAR * omega)
        pair = recombine_noise_sources(decl.amp_impedance, sigma_amp,
                                       sigma_amp, omega)
        amp = IdealOpAmp(left.resistance, right.resistance,
                         lambda w: capacitor_impedance(
                             decl.feedback_capacitance, w),
                         pair)
        labels = (decl.left, decl.right, f"{decl.name}_a",
                  f"{decl.name}_a_conj")
        smap = opamp_scattering(amp, decl.amp_impedance, omega, labels=labels)
        row = smap.row(measure.line)
        table = SpectrumTable({
            decl.left: symmetrized_occupation(omega, left.temperature),
            decl.right: symmetrized_occupation(omega, right.temperature),
            labels[2]: sigma_amp,
            labels[3]: sigma_amp,
        })
        signal = row[measure.signal].amplitude
        est = normalize_estimator(row, signal)
        budget = added_noise_spectrum(est, table)
        scale = HBAR * abs(omega)
        budgets.append(NoiseBudget(
            {lab: scale * v for lab, v in budget.terms.items()}, units="J"))
    return budgets


def _muscope_budgets(config: AccelerometerConfig, freqs_hz: np.ndarray,
                     ) -> List[NoiseBudget]:
    model = build_accelerometer(config)
    return [model.budget(2.0 * math.pi * f_hz) for f_hz in freqs_hz]


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def run(doc: NetlistDocument, out_dir: str, json_mirror: bool = False,
        overrides: Optional[Dict[str, float]] = None) -> Dict[str, str]:
    """Execute a parsed netlist: sweep, write spectra.csv and budget.csv
    (plus budget.json with --json).  Returns the written paths."""
    sweep = doc.sweep
    if sweep is None:
        if doc.preset is None:
            raise QNoiseError("document has no sweep")
        sweep = DEFAULT_PRESET_SWEEP
    freqs_hz = sweep_grid(sweep)

    if overrides and doc.preset is None:
        raise QNoiseError("--set overrides require a preset in the netlist")

    measures = list(doc.measures)
    config = None
    if doc.preset is not None:
        config = preset_config(doc.preset, overrides)
        if not any(m.line == "muscope" for m in measures):
            measures.append(MeasureDecl("muscope", "force", "force"))

    opamp_by_line = {}
    for amp_decl in doc.opamps:
        opamp_by_line[amp_decl.left] = amp_decl
        opamp_by_line[amp_decl.right] = amp_decl

    results = []  # (measure, budgets per frequency)
    for measure in measures:
        if measure.line == "muscope":
            budgets = _muscope_budgets(config, freqs_hz)
        elif measure.line in opamp_by_line:
            budgets = _opamp_budgets(doc, opamp_by_line[measure.line],
                                     measure, freqs_hz)
        else:
            budgets = _passive_budgets(doc, measure, freqs_hz)
        results.append((measure, budgets))

    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    spectra_path = os.path.join(out_dir, "spectra.csv")
    header = ["frequency_Hz"]
    for measure, budgets in results:
        header.append(f"{measure.label}_total")
        header.extend(f"{measure.label}_{src}" for src in budgets[0].terms)
    rows = [",".join(header)]
    for k, f_hz in enumerate(freqs_hz):
        cells = [_fmt(f_hz)]
        for measure, budgets in results:
            budget = budgets[k]
            cells.append(_fmt(budget.total))
            cells.extend(_fmt(v) for v in budget.terms.values())
        rows.append(",".join(cells))
    _write_text(spectra_path, "\n".join(rows) + "\n")
    paths["spectra"] = spectra_path

    budget_path = os.path.join(out_dir, "budget.csv")
    budget_records = []
    lines = ["estimator,source,band_integrated,fraction_of_total,dominant"]
    for measure, budgets in results:
        integrated = integrate_budget(budgets, freqs_hz)
        total = integrated.total
        dominant = integrated.dominant
        for src, value in integrated.terms.items():
            frac = value / total if total > 0.0 else 0.0
            flag = 1 if src in dominant else 0
            lines.append(f"{measure.label},{src},{_fmt(value)},"
                         f"{_fmt(frac)},{flag}")
            budget_records.append({
                "estimator": measure.label, "source": src,
                "band_integrated": value, "fraction_of_total": frac,
                "dominant": bool(flag),
            })
        lines.append(f"{measure.label},TOTAL,{_fmt(total)},1,0")
        budget_records.append({
            "estimator": measure.label, "source": "TOTAL",
            "band_integrated": total, "fraction_of_total": 1.0,
            "dominant": False,
        })
        if measure.line == "muscope":
            report = sensitivity_report(config)
            lines.append(f"{measure.label},sigma_FF_at_measure_freq,"
                         f"{_fmt(report.sigma_ff)},,")
            lines.append(f"{measure.label},acceleration_asd,"
                         f"{_fmt(report.acceleration_asd)},,")
            budget_records.append({
                "estimator": measure.label,
                "source": "sigma_FF_at_measure_freq",
                "band_integrated": report.sigma_ff,
            })
            budget_records.append({
                "estimator": measure.label, "source": "acceleration_asd",
                "band_integrated": report.acceleration_asd,
            })
    _write_text(budget_path, "\n".join(lines) + "\n")
    paths["budget"] = budget_path

    if json_mirror:
        json_path = os.path.join(out_dir, "budget.json")
        _write_text(json_path,
                    json.dumps(budget_records, indent=2, sort_keys=True)
                    + "\n")
        paths["json"] = json_path
    return paths


def _write_text(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise QNoiseError(f"cannot write {path}: {exc}") from exc


def _parse_set(values: List[str]) -> Dict[str, float]:
    from .netlist import PRESET_KEYS, _NUMBER_RE, _SI_SUFFIXES
    out = {}
    for item in values:
        key, sep, raw = item.partition("=")
        if not sep or key not in PRESET_KEYS:
            raise QNoiseError(f"bad --set {item!r}: expected key=value with "
                              f"key in {', '.join(PRESET_KEYS)}")
        match = _NUMBER_RE.match(raw)
        if not match:
            raise QNoiseError(f"bad --set value {raw!r}")
        value = float(match.group(1))
        if match.group(2):
            value *= _SI_SUFFIXES[match.group(2)]
        out[key] = value
    return out


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qnoise",
        description="Frequency-domain quantum/thermal noise network solver")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run a netlist sweep")
    run_p.add_argument("file", help="netlist file")
    run_p.add_argument("--out", default=".", help="output directory")
    run_p.add_argument("--json", action="store_true",
                       help="also write budget.json")
    run_p.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="override a preset parameter")
    args = parser.parse_args(argv)

    try:
        with open(args.file, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"qnoise: cannot read {args.file}: {exc}", file=sys.stderr)
        return 2

    try:
        doc = parse_netlist(text)
    except NetlistParseError as exc:
        print(f"qnoise: {args.file}:{exc}", file=sys.stderr)
        return 1

    try:
        overrides = _parse_set(args.set)
        paths = run(doc, args.out, json_mirror=args.json,
                    overrides=overrides or None)
    except QNoiseError as exc:
        print(f"qnoise: {exc}", file=sys.stderr)
        return 2
    for path in paths.values():
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
