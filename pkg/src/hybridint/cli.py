"""Command-line front end: ``hybridint {simulate,certify,chart,report}``.

Settings come from built-in defaults, then an optional flat ``key = value`` config
file (``--config``), then command-line flags. Exit codes: 0 ok or pass, 1 the
certificate failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import TIME_LIMIT, ZENO_GUARD, DomainError, make_state
from .flow import SCHEMES, IntegratorConfig, simulate
from .models import MODEL_NAMES, PARAMS, build_model
from .verify import SamplingConfig, certify_model, render_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

MODEL_PARAM_KEYS = ("m", "R", "k", "Omega", "h", "g", "l", "e")

DEFAULT_STATE = {
    "disk": ([0.5, 2.0, 0.0], [0.3, -0.8, 0.3]),
    "pendulum": ([0.0], [math.sqrt(3.0)]),  # kappa = 0.75
}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration (exit code 2)."""


@dataclass
class RunConfig:
    model: str
    params: dict
    q: list
    p: list
    integrator: IntegratorConfig
    sampling: SamplingConfig
    out: str = "."
    plots: tuple = ()
    trajectory: Optional[str] = None

    def build(self):
        try:
            return build_model(self.model, **self.params)
        except (TypeError, ValueError) as err:
            raise ConfigError(str(err)) from err


# ---------------------------------------------------------------- config


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as err:
        raise ConfigError(f"cannot read config file {path!r}: {err}") from err
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _floats(text, name) -> list:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as err:
        raise ConfigError(f"{name} must be a comma-separated list of numbers, got {text!r}") from err


def _number(value, name, kind=float):
    try:
        return kind(value)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{name} must be a number, got {value!r}") from err


def resolve_config(args: argparse.Namespace) -> RunConfig:
    settings = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "config"):
            settings[key] = value
    known = {a.dest for a in _common_parser()._actions} | {"trajectory", "plot", "n_states", "n_rank", "n_surface", "tol"}
    unknown = sorted(set(settings) - known)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")

    model = settings.get("model")
    if model is None:
        raise ConfigError("a model is required (--model or 'model = ...' in the config file)")
    if model not in MODEL_NAMES:
        raise ConfigError(f"unknown model {model!r}; choose from {', '.join(MODEL_NAMES)}")
    allowed = {f.name for f in dataclasses.fields(PARAMS[model])}
    params = {}
    for key in MODEL_PARAM_KEYS:
        if key in settings:
            if key not in allowed:
                raise ConfigError(f"parameter {key!r} does not apply to model {model!r}")
            params[key] = _number(settings[key], key)

    q, p = DEFAULT_STATE[model]
    if "kappa" in settings:
        if model != "pendulum":
            raise ConfigError("--kappa applies to the pendulum only")
        kappa = _number(settings["kappa"], "kappa")
        if not 0.0 <= kappa:
            raise ConfigError("kappa must be non-negative")
        # start at the bottom, moving up: H = p^2/2 = 2 kappa in units m = g = l = 1
        q, p = [0.0], [2.0 * math.sqrt(kappa)]
    if "q" in settings:
        q = _floats(settings["q"], "q")
    if "p" in settings:
        p = _floats(settings["p"], "p")

    try:
        integrator = IntegratorConfig(
            scheme=settings.get("scheme", IntegratorConfig.scheme),
            h=_number(settings.get("step", IntegratorConfig.h), "step"),
            t_max=_number(settings.get("t_max", IntegratorConfig.t_max), "t_max"),
            event_tol=_number(settings.get("event_tol", IntegratorConfig.event_tol), "event_tol"),
        )
        sampling = SamplingConfig(
            seed=_number(settings.get("seed", SamplingConfig.seed), "seed", int),
            n_states=_number(settings.get("n_states", SamplingConfig.n_states), "n_states", int),
            n_rank=_number(settings.get("n_rank", SamplingConfig.n_rank), "n_rank", int),
            n_surface=_number(settings.get("n_surface", SamplingConfig.n_surface), "n_surface", int),
            tol=_number(settings.get("tol", SamplingConfig.tol), "tol"),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err
    if sampling.seed < 0:
        raise ConfigError("seed must be a non-negative integer")

    plots = settings.get("plot") or ()
    if isinstance(plots, str):
        plots = tuple(s.strip() for s in plots.split(",") if s.strip())
    return RunConfig(
        model=model,
        params=params,
        q=list(q),
        p=list(p),
        integrator=integrator,
        sampling=sampling,
        out=str(settings.get("out", ".")),
        plots=tuple(plots),
        trajectory=settings.get("trajectory"),
    )


# ---------------------------------------------------------------- trajectory files


def trajectory_rows(trajectory):
    """(t, z, arc_id, event) per output row; event is 'pre'/'post' at impacts."""
    n_events = len(trajectory.events)
    for k, arc in enumerate(trajectory.arcs):
        last = len(arc) - 1
        for i in range(len(arc)):
            event = "none"
            if i == last and k < n_events:
                event = "pre"
            elif i == 0 and k > 0:
                event = "post"
            yield arc.t[i], arc.z[i], k, event


def _fmt(v) -> str:
    return format(float(v), ".17g")


def write_trajectory(path, system, trajectory) -> int:
    header = ["t", *system.coordinate_names, "arc_id", "event"]
    count = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t, z, arc_id, event in trajectory_rows(trajectory):
            w.writerow([_fmt(t), *map(_fmt, z), arc_id, event])
            count += 1
    return count


def write_events(path, system, trajectory) -> None:
    names = system.coordinate_names
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "t", "component_id", *(f"{c}_pre" for c in names), *(f"{c}_post" for c in names)])
        for i, ev in enumerate(trajectory.events):
            w.writerow([i, _fmt(ev.t), ev.component_id, *map(_fmt, ev.state_pre.z), *map(_fmt, ev.state_post.z)])


def read_trajectory(path) -> dict:
    """Parse a trajectory CSV into {'names', 't', 'z', 'arc_id', 'event'}."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise ConfigError(f"cannot read trajectory {path!r}: {err}") from err
    if not rows or rows[0][:1] != ["t"] or "arc_id" not in rows[0]:
        raise ConfigError(f"{path} is not a trajectory file (missing header)")
    header = rows[0]
    if len(rows) == 1:
        raise ConfigError(f"{path} contains no trajectory rows")
    i_arc = header.index("arc_id")
    names = header[1:i_arc]
    body = rows[1:]
    try:
        data = np.array([[float(v) for v in r[: i_arc]] for r in body])
        arc_id = np.array([int(r[i_arc]) for r in body])
    except (ValueError, IndexError) as err:
        raise ConfigError(f"{path}: malformed row: {err}") from err
    event = [r[i_arc + 1] if len(r) > i_arc + 1 else "none" for r in body]
    return {"names": names, "t": data[:, 0], "z": data[:, 1:], "arc_id": arc_id, "event": event}


def _svg_plot(path, xs_by_arc, ys_by_arc, xlabel, ylabel, angular_x=False, angular_y=False) -> None:
    width, height, pad = 480, 360, 40
    all_x = np.concatenate(xs_by_arc)
    all_y = np.concatenate(ys_by_arc)
    x0, x1 = float(all_x.min()), float(all_x.max())
    y0, y1 = float(all_y.min()), float(all_y.max())
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0

    def place(x, y):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad), height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#888"/>',
        f'<text x="{width / 2}" y="{height - 8}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="12" y="{height / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 12 {height / 2})">{ylabel}</text>',
    ]
    for xs, ys in zip(xs_by_arc, ys_by_arc):
        # angles wrap inside an arc; break the polyline at the seam
        cuts = np.zeros(len(xs), dtype=bool)
        if angular_x:
            cuts[1:] |= np.abs(np.diff(xs)) > math.pi
        if angular_y:
            cuts[1:] |= np.abs(np.diff(ys)) > math.pi
        starts = [0, *np.flatnonzero(cuts), len(xs)]
        for a, b in zip(starts[:-1], starts[1:]):
            pts = " ".join("{:.2f},{:.2f}".format(*place(xs[i], ys[i])) for i in range(a, b))
            lines.append(f'<polyline fill="none" stroke="#1f4e9c" stroke-width="1" points="{pts}"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------- commands


def _ensure_out(out: str) -> None:
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as err:
        raise ConfigError(f"cannot create output directory {out!r}: {err}") from err
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out!r} is not writable")


def cmd_simulate(cfg: RunConfig) -> int:
    model = cfg.build()
    system = model.system
    if len(cfg.q) != system.n or len(cfg.p) != system.n:
        raise ConfigError(f"model {cfg.model!r} needs q and p with {system.n} entries each")
    try:
        x0 = make_state(cfg.q, cfg.p, system.angular)
    except ValueError as err:
        raise ConfigError(str(err)) from err
    names = system.coordinate_names
    for proj in cfg.plots:
        parts = proj.split(":")
        if len(parts) != 2 or any(p not in names for p in parts):
            raise ConfigError(f"plot projection {proj!r} must be 'a:b' with a, b in {names}")
    _ensure_out(cfg.out)
    traj = simulate(system, x0, cfg.integrator)
    n_rows = write_trajectory(os.path.join(cfg.out, "trajectory.csv"), system, traj)
    write_events(os.path.join(cfg.out, "events.csv"), system, traj)
    for proj in cfg.plots:
        a, b = proj.split(":")
        ia, ib = names.index(a), names.index(b)
        _svg_plot(
            os.path.join(cfg.out, f"plot-{a}-{b}.svg"),
            [arc.z[:, ia] for arc in traj.arcs],
            [arc.z[:, ib] for arc in traj.arcs],
            a,
            b,
            ia < system.n and system.angular[ia],
            ib < system.n and system.angular[ib],
        )
    print(f"{cfg.model}: {n_rows} rows, {len(traj.arcs)} arcs, {len(traj.events)} impacts, termination={traj.termination}")
    if traj.termination == ZENO_GUARD:
        print(f"warning: zeno guard stopped the run: {traj.message}")
    elif traj.termination != TIME_LIMIT:
        print(f"warning: run ended with {traj.termination}: {traj.message}")
    return EXIT_OK


def cmd_certify(cfg: RunConfig) -> int:
    model = cfg.build()
    _ensure_out(cfg.out)
    cert = certify_model(model, cfg.sampling)
    text = cert.to_text()
    with open(os.path.join(cfg.out, "certificate.txt"), "w") as fh:
        fh.write(text)
    with open(os.path.join(cfg.out, "certificate.json"), "w") as fh:
        fh.write(cert.to_json())
    print(text, end="")
    return EXIT_OK if cert.passed else EXIT_FAIL


def _unwrap_fit_residual(t, y, periodic) -> tuple:
    y = np.unwrap(y) if periodic else y
    if len(t) < 2:
        return 0.0, float("nan")
    A = np.vstack([np.ones_like(t), t]).T
    coef = np.linalg.lstsq(A, y, rcond=None)[0]
    return float(np.max(np.abs(A @ coef - y))), float(coef[1])


def cmd_chart(cfg: RunConfig) -> int:
    if not cfg.trajectory:
        raise ConfigError("chart needs --trajectory <path to trajectory.csv>")
    data = read_trajectory(cfg.trajectory)
    model = cfg.build()
    try:
        chart = model.require_chart()
    except ValueError as err:
        raise ConfigError(str(err)) from err
    system = model.system
    if tuple(data["names"]) != system.coordinate_names:
        raise ConfigError(f"trajectory columns {data['names']} do not match model {cfg.model!r}")
    charts = {1.0: chart}
    if cfg.model == "disk":
        from .charts.disk_chart import disk_chart

        charts[-1.0] = disk_chart(model.params, -1.0)

    n = system.n
    rows = []
    for t, z, arc_id in zip(data["t"], data["z"], data["arc_id"]):
        x = make_state(z[:n], z[n:], system.angular)
        use = charts[1.0] if cfg.model != "disk" else charts.get(math.copysign(1.0, x.p[2]), chart)
        phi = s = np.full(n, np.nan)
        valid = False
        if use.domain(x):
            try:
                phi, s = use.forward(x)
                valid = True
            except DomainError:
                pass
        rows.append((t, phi, s, arc_id, valid))

    _ensure_out(cfg.out)
    with open(os.path.join(cfg.out, "chart.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *chart.angle_names, *chart.action_names, "arc_id", "valid"])
        for t, phi, s, arc_id, valid in rows:
            w.writerow([_fmt(t), *map(_fmt, phi), *map(_fmt, s), arc_id, int(valid)])

    summary = [f"chart {chart.name}: {len(rows)} rows, {sum(not r[4] for r in rows)} outside the chart domain"]
    for arc_id in sorted(set(data["arc_id"])):
        sel = [r for r in rows if r[3] == arc_id and r[4]]
        if not sel:
            summary.append(f"arc {arc_id}: no valid rows")
            continue
        t = np.array([r[0] for r in sel])
        phi = np.array([r[1] for r in sel])
        s = np.array([r[2] for r in sel])
        spreads = np.ptp(s, axis=0)
        fits = [_unwrap_fit_residual(t, phi[:, i], chart.periodic_angles[i]) for i in range(n)]
        parts = [f"arc {arc_id}: rows={len(sel)}"]
        parts += [f"{nm}_spread={v:.3e}" for nm, v in zip(chart.action_names, spreads)]
        parts += [f"{nm}_linear_residual={r:.3e} rate={w:.12g}" for nm, (r, w) in zip(chart.angle_names, fits)]
        summary.append(" ".join(parts))
    valid_s = np.array([r[2] for r in rows if r[4]])
    if valid_s.size:
        glob = np.ptp(valid_s, axis=0)
        summary.append("global: " + " ".join(f"{nm}_spread={v:.3e}" for nm, v in zip(chart.action_names, glob)))
    text = "\n".join(summary) + "\n"
    with open(os.path.join(cfg.out, "chart-summary.txt"), "w") as fh:
        fh.write(text)
    print(text, end="")
    return EXIT_OK


def cmd_report(out: str) -> int:
    """Summarize the artifacts found in an output directory."""
    found = False
    cert_path = os.path.join(out, "certificate.json")
    if os.path.exists(cert_path):
        found = True
        with open(cert_path) as fh:
            print(render_text(json.load(fh)), end="")
    traj_path = os.path.join(out, "trajectory.csv")
    if os.path.exists(traj_path):
        found = True
        data = read_trajectory(traj_path)
        n_impacts = data["event"].count("pre")
        print(
            f"trajectory: {len(data['t'])} rows, {len(set(data['arc_id']))} arcs, {n_impacts} impacts, "
            f"t in [{data['t'][0]:.6g}, {data['t'][-1]:.6g}]"
        )
    summary = os.path.join(out, "chart-summary.txt")
    if os.path.exists(summary):
        found = True
        with open(summary) as fh:
            print(fh.read(), end="")
    if not found:
        raise ConfigError(f"no certificate, trajectory or chart summary found in {out!r}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    p.add_argument("--model", choices=MODEL_NAMES)
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--step", type=float, help="integrator step h")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--event-tol", dest="event_tol", type=float)
    p.add_argument("--q", help="initial configuration, comma separated")
    p.add_argument("--p", help="initial momenta, comma separated")
    p.add_argument("--kappa", type=float, help="pendulum start at the bottom with energy 2 kappa")
    for key in MODEL_PARAM_KEYS:
        p.add_argument(f"--{key}", type=float, help="restitution coefficient" if key == "e" else "model parameter")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="hybridint", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", parents=[common], help="simulate and write trajectory.csv, events.csv", allow_abbrev=False)
    sim.add_argument("--plot", action="append", help="2D projection a:b to draw as plot-a-b.svg (repeatable)")
    cer = sub.add_parser("certify", parents=[common], help="write certificate.txt and certificate.json", allow_abbrev=False)
    cer.add_argument("--n-states", dest="n_states", type=int)
    cer.add_argument("--n-rank", dest="n_rank", type=int)
    cer.add_argument("--n-surface", dest="n_surface", type=int)
    cer.add_argument("--tol", type=float)
    ch = sub.add_parser("chart", parents=[common], help="map a trajectory into action-angle coordinates", allow_abbrev=False)
    ch.add_argument("--trajectory", help="trajectory.csv written by simulate")
    rep = sub.add_parser("report", help="summarize the artifacts in an output directory", allow_abbrev=False)
    rep.add_argument("--out", default=".")
    return parser


def _infer_model(args) -> None:
    """chart: take the model from the trajectory header when --model is omitted."""
    if args.command != "chart" or args.model or not args.trajectory or args.config:
        return
    try:
        with open(args.trajectory, newline="") as fh:
            header = next(csv.reader(fh), [])
    except OSError:
        return
    for name in MODEL_NAMES:
        names = build_model(name).system.coordinate_names
        if tuple(header[1 : 1 + len(names)]) == names and header[1 + len(names)] == "arc_id":
            args.model = name


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "report":
            return cmd_report(args.out)
        _infer_model(args)
        cfg = resolve_config(args)
        return {"simulate": cmd_simulate, "certify": cmd_certify, "chart": cmd_chart}[args.command](cfg)
    except ConfigError as err:
        print(f"hybridint: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"hybridint: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
