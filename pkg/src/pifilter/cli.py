"""Command-line front end.

Exit codes: 0 success, 2 netlist or argument error (argparse usage errors
included), 3 solver error, 4 unknown qubit node, 5 unresolvable parameter
path, 6 validation tolerance exceeded.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import design, example_names, example_path
from .elements import LineSpec, pi_filter_abcd
from .interference import InterferenceConfig, LorentzianStub, TanStub, gamma_ratio, suppression_window, total_reflection
from .mna import MNAError, s21_mna
from .netlist import C0, Line, NetlistError, OpenStub, ParameterPathError, load_netlist
from .network import chain_of, pi_impedance_analytic, response_sweep, terminated_impedance
from .purcell import protected_band, purcell_curve

EXIT_PARSE, EXIT_SOLVER, EXIT_NODE, EXIT_PATH, EXIT_TOLERANCE = 2, 3, 4, 5, 6

TOL_DUAL = 1e-8
TOL_ANALYTIC = 1e-10
TOL_LOSSLESS = 1e-9


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# helpers

def fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def svg_path(out) -> Path:
    return Path(out).with_suffix(".svg")


def sibling(out, tag: str) -> Path:
    p = Path(out)
    return p.with_name(f"{p.stem}{tag}{p.suffix or '.csv'}")


def resolve_netlist(arg: str):
    path = Path(arg)
    if not path.exists() and arg.removesuffix(".nl") + ".nl" in example_names():
        path = example_path(arg)
    try:
        return load_netlist(path)
    except OSError as exc:
        raise CliError(f"cannot read netlist: {exc}", EXIT_PARSE) from None
    except NetlistError as exc:
        raise CliError(f"{arg}: {exc}", EXIT_PARSE) from None


def grid(args) -> np.ndarray:
    if args.points < 2:
        raise CliError("--points must be at least 2", EXIT_PARSE)
    if not 0 < args.fstart < args.fstop:
        raise CliError("need 0 < --fstart < --fstop", EXIT_PARSE)
    return np.linspace(args.fstart, args.fstop, args.points)


def parse_range(text: str, log: bool) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise CliError(f"range must be start:stop:count, got {text!r}", EXIT_PARSE) from None
    if n < 1 or (log and not (lo > 0 and hi > 0)):
        raise CliError(f"invalid range {text!r}", EXIT_PARSE)
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def velocity_of(args) -> float:
    if args.velocity is not None:
        return args.velocity
    return C0 / np.sqrt(args.eps_eff)


def qubit_nodes(net, requested):
    nodes = net.nodes()
    if requested:
        for n in requested:
            if n not in nodes:
                raise CliError(f"unknown qubit node {n!r}; netlist nodes: {', '.join(nodes) or 'none'}", EXIT_NODE)
        return list(requested)
    picked = [n for n, node in nodes.items() if node.fq is not None] or list(nodes)
    if not picked:
        raise CliError("netlist declares no nodes", EXIT_NODE)
    return picked


# --------------------------------------------------------------------------
# subcommands

def cmd_analyze(args) -> int:
    net = resolve_netlist(args.netlist)
    f = grid(args)
    sp = response_sweep(net, f)
    rows = []
    for k in range(len(f)):
        row = [fmt(f[k])]
        for s in (sp.s11, sp.s21, sp.s12, sp.s22):
            row += [fmt(s[k].real), fmt(s[k].imag)]
        rows.append(row + [int(np.asarray(sp.saturated)[k]) if np.ndim(sp.saturated) else 0])
    header = ["freq_hz"] + [f"{n}_{p}" for n in ("s11", "s21", "s12", "s22") for p in ("re", "im")] + ["saturated"]
    write_csv(args.out, header, rows)
    if args.svg:
        from .plotting import plot_s21
        plot_s21(svg_path(args.out), f, sp.s21)
    return 0


def cmd_purcell(args) -> int:
    net = resolve_netlist(args.netlist)
    f = grid(args)
    nodes = qubit_nodes(net, args.node)
    curves = []
    for name in nodes:
        try:
            curve = purcell_curve(net, name, args.c_sigma, f)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_PARSE) from None
        curves.append(curve)
        out = args.out if len(nodes) == 1 else sibling(args.out, f".{name}")
        rows = [[fmt(f[k]), fmt(curve.env_admittance[k].real), fmt(curve.env_admittance[k].imag),
                 fmt(curve.t_p[k]), int(curve.capped[k])] for k in range(len(f))]
        write_csv(out, ["freq_hz", "re_yenv_s", "im_yenv_s", "tp_s", "capped"], rows)
        ivs = protected_band(curve, args.threshold)
        f_max, t_max = curve.max()
        fq = net.nodes()[name].fq
        record = {"node": name, "c_sigma_f": curve.c_sigma, "threshold_s": args.threshold,
                  "intervals_hz": [[lo, hi] for lo, hi in ivs], "max_tp_s": t_max, "max_at_hz": f_max,
                  "csv": str(out)}
        if fq is not None:
            record["fq_hz"] = fq
            record["tp_at_fq_s"] = curve.at(fq) if f[0] <= fq <= f[-1] else None
            record["fq_protected"] = any(lo <= fq <= hi for lo, hi in ivs)
        emit(record)
    if args.svg:
        from .plotting import plot_purcell
        plot_purcell(svg_path(args.out), curves, args.threshold)
    return 0


def cmd_design(args) -> int:
    v = velocity_of(args)
    bands = []
    for text in args.band:
        try:
            lo, hi = (float(x) for x in text.split(":"))
        except ValueError:
            raise CliError(f"--band must be LO:HI in Hz, got {text!r}", EXIT_PARSE) from None
        bands.append((lo, hi))
    try:
        if len(bands) == 1:
            fd = design.synthesize(*bands[0], v, args.ztl)
            elements = fd.elements(lumped=args.lumped, prefix=args.prefix)
        else:
            if args.lumped:
                raise CliError("--lumped supports a single band", EXIT_PARSE)
            elements = design.multi_stub(bands, v, args.ztl, prefix=args.prefix)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    text = design.fragment_text(elements)
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def cmd_sweep(args) -> int:
    net = resolve_netlist(args.netlist)
    f = grid(args)
    given = [x is not None for x in (args.range, args.log_range, args.values)]
    if sum(given) != 1:
        raise CliError("give exactly one of --range, --log-range, --values", EXIT_PARSE)
    if args.range:
        values = parse_range(args.range, log=False)
    elif args.log_range:
        values = parse_range(args.log_range, log=True)
    else:
        try:
            values = np.array([float(x) for x in args.values.split(",")])
        except ValueError:
            raise CliError(f"--values must be comma separated numbers, got {args.values!r}", EXIT_PARSE) from None
    node = qubit_nodes(net, [args.node] if args.node else None)[0]
    try:
        if args.delta_stubs:
            plus, minus = args.delta_stubs.split(",")
            param = design.stub_difference_setter(net, plus, minus)
        elif args.param:
            net.get_value(args.param)
            param = args.param
        else:
            raise CliError("give --param or --delta-stubs", EXIT_PARSE)
    except (ParameterPathError, ValueError) as exc:
        raise CliError(f"unresolvable parameter path: {exc.args[0]}", EXIT_PATH) from None
    try:
        sm = design.sweep_2d(net, param, values, f, node, args.c_sigma, args.threshold)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    rows = [[fmt(v)] + [fmt(t) for t in sm.t_p[k]] for k, v in enumerate(sm.values)]
    write_csv(args.out, [f"{sm.param}\\freq_hz"] + [fmt(x) for x in f], rows)
    contour_out = sibling(args.out, "_contour")
    crow = [[k, fmt(p), fmt(q)] for k, seg in enumerate(sm.contours) for p, q in seg]
    write_csv(contour_out, ["contour", "param", "freq_hz"], crow)
    for k, v in enumerate(sm.values):
        emit({"param": sm.param, "value": float(v),
              "bandwidth_hz": design.bandwidth_metric(f, sm.t_p[k], args.threshold, args.center)})
    if args.svg:
        from .plotting import plot_sweep
        plot_sweep(svg_path(args.out), sm)
    return 0


def _parse_stubs(args):
    stubs = []
    for text in args.stub or ():
        try:
            fj, kj = (float(x) for x in text.split(":"))
        except ValueError:
            raise CliError(f"--stub must be FREQ_HZ:KAPPA_HZ, got {text!r}", EXIT_PARSE) from None
        if not (fj > 0 and kj > 0):
            raise CliError("--stub values must be positive", EXIT_PARSE)
        stubs.append(LorentzianStub(2 * np.pi * fj, 2 * np.pi * kj))
    for length in args.stub_len or ():
        if not length > 0:
            raise CliError("--stub-len must be positive", EXIT_PARSE)
        stubs.append(TanStub(length))
    return stubs


def cmd_interference(args) -> int:
    f = grid(args)
    stubs = _parse_stubs(args)
    try:
        positions = [float(x) for x in args.positions.split(",")] if args.positions else []
        cfg = InterferenceConfig(args.g, velocity_of(args), stubs, positions)
    except ValueError as exc:
        raise CliError(f"bad geometry: {exc}", EXIT_PARSE) from None
    if not 0 < args.factor < 1:
        raise CliError("--factor must lie in (0, 1)", EXIT_PARSE)
    w = 2 * np.pi * f
    l1, pole = total_reflection(cfg, w)
    ratio, _ = gamma_ratio(cfg, w)
    rows = [[fmt(f[k]), fmt(ratio[k]), fmt(l1[k].real), fmt(l1[k].imag)] for k in range(len(f))]
    write_csv(args.out, ["freq_hz", "gamma_ratio", "re_l1", "im_l1"], rows)
    windows = suppression_window(cfg, f, args.factor)
    emit({"gamma0": cfg.gamma0, "factor": args.factor, "windows_hz": [[lo, hi] for lo, hi in windows],
          "pole_frequencies_hz": [float(x) for x in f[np.asarray(pole, bool)]]})
    if args.svg:
        from .plotting import plot_interference
        plot_interference(svg_path(args.out), f, ratio)
    return 0


def _pi_sections(net):
    """Consecutive (stub, tline, stub) chain items sharing one impedance."""
    ch = net.chain
    for i in range(len(ch) - 2):
        a, b, c = ch[i:i + 3]
        if isinstance(a, OpenStub) and isinstance(b, Line) and isinstance(c, OpenStub) and a.z == b.z == c.z:
            yield a, b, c


def _worst(dev, f):
    if dev.size == 0:
        return 0.0, None
    k = int(np.argmax(dev))
    return float(dev[k]), float(f[k])


def cmd_validate(args) -> int:
    net = resolve_netlist(args.netlist)
    f = grid(args)
    sp = response_sweep(net, f)
    ok = ~np.broadcast_to(np.asarray(sp.saturated, bool), f.shape)
    s21 = np.broadcast_to(sp.s21, f.shape)
    try:
        mna = np.array([s21_mna(net, 2 * np.pi * x) if good else np.nan for x, good in zip(f, ok)])
    except MNAError as exc:
        raise CliError(f"solver error: {exc}", EXIT_SOLVER) from None
    dual = np.abs(mna - s21)[ok] / np.maximum(np.abs(s21[ok]), 1e-12)
    s11 = np.broadcast_to(sp.s11, f.shape)
    lossless = np.abs(np.abs(s11) ** 2 + np.abs(s21) ** 2 - 1)[ok]

    analytic = np.zeros(0)
    af = np.zeros(0)
    w = 2 * np.pi * f
    for plus, inline, minus in _pi_sections(net):
        specs = [LineSpec(e.length, e.z, net.velocity) for e in (plus, minus, inline)]
        tp = pi_filter_abcd(*specs, w)
        good = ~np.asarray(tp.saturated, bool)
        z_cascade = terminated_impedance(chain_of((plus, inline, minus), net, w), net.z_out)
        z_eq = pi_impedance_analytic(*specs, net.z_out, w)
        dev = np.abs(z_eq - z_cascade) / np.abs(z_cascade)
        analytic = np.concatenate([analytic, dev[good]])
        af = np.concatenate([af, f[good]])

    checks = {
        "dual_path": (*_worst(dual, f[ok]), TOL_DUAL),
        "analytic_pi": (*_worst(analytic, af), TOL_ANALYTIC),
        "lossless": (*_worst(lossless, f[ok]), TOL_LOSSLESS),
    }
    failed = False
    for name, (dev, at, tol) in checks.items():
        passed = dev <= tol
        failed |= not passed
        emit({"check": name, "max_deviation": dev, "worst_freq_hz": at, "tolerance": tol, "pass": bool(passed)})
        if not passed:
            print(f"validate: {name} deviation {dev:.3g} exceeds {tol:g} at {at:.9g} Hz", file=sys.stderr)
    return EXIT_TOLERANCE if failed else 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pifilter", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, netlist=True, out_required=True):
        if netlist:
            p.add_argument("--netlist", required=True,
                           help="netlist file, or the name of a shipped example (e.g. fig1a.nl)")
        p.add_argument("--fstart", type=float, default=2e9, help="Hz (default 2e9)")
        p.add_argument("--fstop", type=float, default=7e9, help="Hz (default 7e9)")
        p.add_argument("--points", type=int, default=2001)
        p.add_argument("--out", required=out_required, help="CSV output path")
        p.add_argument("--svg", action="store_true", help="also write a figure next to --out")

    p = sub.add_parser("analyze", help="S-parameter sweep")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("purcell", help="environmental admittance and Purcell time at qubit nodes")
    common(p)
    p.add_argument("--node", action="append", help="qubit node (repeatable; default: nodes with fq=)")
    p.add_argument("--c-sigma", type=float, help="F (default: node cground plus adjacent series caps)")
    p.add_argument("--threshold", type=float, default=1e-3, help="s (default 1e-3)")
    p.set_defaults(func=cmd_purcell)

    p = sub.add_parser("design", help="emit a filter netlist fragment for a band")
    p.add_argument("--band", action="append", required=True, help="LO:HI in Hz (repeatable for multi-band)")
    p.add_argument("--eps-eff", type=float, default=5.95)
    p.add_argument("--velocity", type=float, help="m/s (overrides --eps-eff)")
    p.add_argument("--ztl", type=float, default=50.0)
    p.add_argument("--lumped", action="store_true", help="series-LC branches instead of stubs")
    p.add_argument("--prefix", default="filter")
    p.add_argument("--out", help="also write the fragment here")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("sweep", help="T_P map over one parameter and frequency")
    common(p)
    p.add_argument("--param", help="dotted parameter path, e.g. filter.inline.len or cout")
    p.add_argument("--delta-stubs", metavar="PLUS,MINUS",
                   help="sweep the length difference of two stubs around their mean")
    p.add_argument("--range", help="start:stop:count")
    p.add_argument("--log-range", help="start:stop:count, log spaced")
    p.add_argument("--values", help="comma separated values")
    p.add_argument("--node")
    p.add_argument("--c-sigma", type=float)
    p.add_argument("--threshold", type=float, default=1e-3)
    p.add_argument("--center", type=float, help="Hz; report the width of the interval containing it")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("interference", help="two-stub waveguide interference model")
    common(p, netlist=False)
    p.add_argument("--stub", action="append", help="Lorentzian stub FREQ_HZ:KAPPA_HZ (cyclic units)")
    p.add_argument("--stub-len", action="append", type=float, help="directly connected stub length (m); placed after any --stub entries")
    p.add_argument("--positions", help="d1[,d2] in m")
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--eps-eff", type=float, default=5.95)
    p.add_argument("--velocity", type=float)
    p.add_argument("--factor", type=float, default=0.01)
    p.set_defaults(func=cmd_interference)

    p = sub.add_parser("validate", help="cross-check cascade, nodal and closed-form paths")
    common(p, out_required=False)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"pifilter: {exc}", file=sys.stderr)
        return exc.code
    except MNAError as exc:
        print(f"pifilter: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except np.linalg.LinAlgError as exc:
        print(f"pifilter: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
