"""Command-line front end.

Subcommands: fbar, dist, profile, tlk-probe, sensitivity, katok.  Every
run is a pure function of its flags and seed; see README for schemas.
Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

import argparse
import os
import sys

from . import probes, pseudometrics, report, systems

ENV_OUT_DIR = "FKDYN_OUT_DIR"


class ConfigError(Exception):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def _parse_alpha(text, field):
    if text == "golden":
        return systems.GOLDEN
    try:
        return float(text)
    except ValueError:
        raise ConfigError(field, f"expected a decimal or 'golden', got {text!r}")


def _parse_word(text, field):
    try:
        return tuple(int(c) for c in text)
    except ValueError:
        raise ConfigError(field, f"expected digits, got {text!r}")


_PRESETS = {
    "morse": systems.morse_source,
    "chacon": systems.chacon_source,
    "fibonacci": systems.fibonacci_source,
}


def _parse_rules(text, field):
    # custom substitution: "0->01,1->10" optionally ";seed=0"
    seed = 0
    if ";" in text:
        text, seed_part = text.split(";", 1)
        if not seed_part.startswith("seed="):
            raise ConfigError(field, f"expected seed=<symbol> after ';', got {seed_part!r}")
        seed = int(seed_part[5:])
    rules = {}
    for item in text.split(","):
        if "->" not in item:
            raise ConfigError(field, f"rule {item!r} is not of the form sym->word")
        sym, image = item.split("->", 1)
        rules[int(sym)] = _parse_word(image, field)
    return rules, seed


def build_system(spec, args, field):
    """Resolve a system spec string plus parameter flags into a source."""
    kind, _, inline = spec.partition(":")
    try:
        if kind == "periodic":
            if not inline:
                raise ConfigError(field, "periodic needs a word, e.g. periodic:01")
            return systems.PeriodicSource(_parse_word(inline, field))
        if kind == "explicit":
            if not inline:
                raise ConfigError(field, "explicit needs a word, e.g. explicit:0110")
            return systems.ExplicitSource(_parse_word(inline, field))
        if kind == "substitution":
            if inline in _PRESETS:
                return _PRESETS[inline]()
            if not inline:
                raise ConfigError(field, "substitution needs a preset name or rules")
            rules, seed = _parse_rules(inline, field)
            return systems.SubstitutionSource(rules, seed)
        if kind == "sturmian":
            return systems.SturmianSource(_parse_alpha(args.alpha, "--alpha"), args.beta)
        if kind == "bernoulli":
            return systems.BernoulliSource(args.gen_seed, args.p)
        if kind == "rotation":
            return systems.RotationSource(_parse_alpha(args.alpha, "--alpha"), args.theta0)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(field, str(exc))
    raise ConfigError(field, f"unknown system kind {kind!r}")


def build_vs(spec, base, args):
    if spec.startswith("shift:"):
        try:
            return base.shifted(int(spec[6:]))
        except ValueError:
            raise ConfigError("--vs", f"shift offset must be an integer, got {spec!r}")
    return build_system(spec, args, "--vs")


def _require(cond, field, message):
    if not cond:
        raise ConfigError(field, message)


def _parse_int_list(text, field):
    try:
        values = [int(v) for v in text.split(",") if v]
    except ValueError:
        raise ConfigError(field, f"expected comma-separated integers, got {text!r}")
    _require(bool(values), field, "list is empty")
    return values


def _parse_float_list(text, field):
    try:
        values = [float(v) for v in text.split(",") if v]
    except ValueError:
        raise ConfigError(field, f"expected comma-separated reals, got {text!r}")
    _require(bool(values), field, "list is empty")
    return values


def _add_system_flags(p, with_vs=False):
    p.add_argument("--system", required=True, help="kind[:params], e.g. periodic:01, "
                   "substitution:morse, sturmian, bernoulli, rotation")
    if with_vs:
        p.add_argument("--vs", required=True,
                       help="second system spec, or shift:K for a shifted copy")
    p.add_argument("--alpha", default="golden",
                   help="rotation/Sturmian angle; decimal or 'golden'")
    p.add_argument("--beta", type=float, default=0.0, help="Sturmian intercept")
    p.add_argument("--p", type=float, default=0.5, help="Bernoulli success probability")
    p.add_argument("--gen-seed", type=int, default=1, help="Bernoulli generator seed")
    p.add_argument("--theta0", type=float, default=0.0, help="rotation initial point")


def _add_output_flags(p):
    p.add_argument("--out", help="output file; default stdout "
                   f"(relative paths resolve under ${ENV_OUT_DIR} when set)")
    p.add_argument("--format", choices=("csv", "tsv"), default="csv")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG figure next to --out")


def make_parser():
    ap = argparse.ArgumentParser(prog="fkdyn",
                                 description="finite-horizon Feldman-Katok and "
                                             "Besicovitch pseudometric experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fbar", help="edit distance between two literal words")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_output_flags(p)

    p = sub.add_parser("dist", help="rho_FK / rho_B / rho_B' for one pair")
    _add_system_flags(p, with_vs=True)
    p.add_argument("--n", type=int)
    p.add_argument("--schedule", help="comma-separated horizons (alternative to --n)")
    p.add_argument("--grid-step", type=float, default=pseudometrics.DEFAULT_GRID_STEP)
    _add_output_flags(p)

    p = sub.add_parser("profile", help="fbar_{n,delta} on the full delta grid")
    _add_system_flags(p, with_vs=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid-step", type=float, default=pseudometrics.DEFAULT_GRID_STEP)
    _add_output_flags(p)

    p = sub.add_parser("tlk-probe", help="loosely-Kronecker evidence probe")
    _add_system_flags(p)
    p.add_argument("--schedule", required=True)
    p.add_argument("--pairs", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-step", type=float, default=pseudometrics.DEFAULT_GRID_STEP)
    _add_output_flags(p)

    p = sub.add_parser("sensitivity", help="FK-sensitivity scan over sampled balls")
    _add_system_flags(p)
    p.add_argument("--eps-grid", required=True)
    p.add_argument("--ball-grid", required=True)
    p.add_argument("--centers", type=int, default=3)
    p.add_argument("--samples", type=int, default=6)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-step", type=float, default=pseudometrics.DEFAULT_GRID_STEP)
    _add_output_flags(p)

    p = sub.add_parser("katok", help="loose-Kronecker word criterion check")
    _add_system_flags(p)
    p.add_argument("--partition", default="symbols",
                   help="'symbols' or arcs:<count> (rotation systems)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    _add_output_flags(p)
    return ap


def _char_word(text, field):
    _require(bool(text), field, "word is empty")
    alphabet = sorted(set(text))
    index = {c: i for i, c in enumerate(alphabet)}
    return systems.Word(tuple(index[c] for c in text), len(alphabet))


def _horizons(args):
    if args.schedule:
        ns = _parse_int_list(args.schedule, "--schedule")
    elif args.n is not None:
        ns = [args.n]
    else:
        raise ConfigError("--n", "either --n or --schedule is required")
    _require(all(n >= 1 for n in ns), "--n", "horizons must be >= 1")
    return ns


def _grid_step(args):
    _require(0.0 < args.grid_step <= 1.0, "--grid-step", "must lie in (0, 1]")
    return args.grid_step


def run_fbar(args):
    u = _char_word(args.a, "--a")
    w = _char_word(args.b, "--b")
    _require(len(u) == len(w), "--b", "words must have equal length")
    value = pseudometrics.fbar_word(u, w)
    config = {"command": "fbar", "a": args.a, "b": args.b}
    return config, ("a", "b", "n", "fbar"), [(args.a, args.b, len(u), value)], f"{value:.6f}"


def run_dist(args):
    base = build_system(args.system, args, "--system")
    other = build_vs(args.vs, base, args)
    step = _grid_step(args)
    rows = []
    for n in _horizons(args):
        fk = pseudometrics.rho_fk_estimate(base, other, n, step)
        b = pseudometrics.rho_b_estimate(base, other, n)
        bp = pseudometrics.rho_b_prime_estimate(base, other, n, step)
        rows.append((0, n, fk.value, b.value, bp.value))
    config = {"command": "dist", "system": base.describe(), "vs": other.describe(),
              "schedule": ",".join(str(r[1]) for r in rows), "grid_step": f"{step!r}"}
    return config, ("pair_id", "n", "rho_fk", "rho_b", "rho_b_prime"), rows, None


def run_profile(args):
    base = build_system(args.system, args, "--system")
    other = build_vs(args.vs, base, args)
    step = _grid_step(args)
    _require(args.n >= 1, "--n", "must be >= 1")
    grid, _ = pseudometrics.delta_grid(step, pseudometrics.pair_diameter(base, other))
    prof = pseudometrics.delta_profile(base, other, args.n, grid)
    rows = list(zip(prof.grid, prof.values))
    config = {"command": "profile", "system": base.describe(), "vs": other.describe(),
              "n": args.n, "grid_step": f"{step!r}"}
    return config, ("delta", "fbar"), rows, None


def run_tlk(args):
    base = build_system(args.system, args, "--system")
    schedule = _parse_int_list(args.schedule, "--schedule")
    _require(all(b > a for a, b in zip(schedule, schedule[1:])),
             "--schedule", "must be strictly increasing")
    _require(args.pairs >= 1, "--pairs", "must be >= 1")
    rep = probes.tlk_probe(base, schedule, args.pairs, args.seed, _grid_step(args))
    rows = [(s.horizon, s.maximum, s.median, s.minimum, rep.pair_count, rep.seed)
            for s in rep.per_horizon]
    config = {"command": "tlk-probe", "system": base.describe(),
              "schedule": args.schedule, "pairs": args.pairs, "seed": args.seed,
              "grid_step": f"{rep.grid_step!r}"}
    return config, ("n", "max", "median", "min", "pairs", "seed"), rows, None


def run_sensitivity(args):
    base = build_system(args.system, args, "--system")
    eps_grid = _parse_float_list(args.eps_grid, "--eps-grid")
    ball_grid = _parse_float_list(args.ball_grid, "--ball-grid")
    _require(args.centers >= 1, "--centers", "must be >= 1")
    _require(args.samples >= 2, "--samples", "must be >= 2")
    _require(args.n >= 1, "--n", "must be >= 1")
    try:
        scan = probes.sensitivity_scan(base, eps_grid, ball_grid, args.centers,
                                       args.samples, args.n, args.seed,
                                       _grid_step(args))
    except probes.InvalidBallError as exc:
        raise ConfigError("--ball-grid", str(exc))
    rows = [(eps, verdict, scan.min_sup) for eps, verdict in scan.verdicts]
    config = {"command": "sensitivity", "system": base.describe(),
              "eps_grid": args.eps_grid, "ball_grid": args.ball_grid,
              "centers": args.centers, "samples": args.samples, "n": args.n,
              "seed": args.seed, "grid_step": f"{scan.grid_step!r}"}
    return config, ("epsilon", "verdict", "min_ball_sup"), rows, None


def run_katok(args):
    base = build_system(args.system, args, "--system")
    if args.partition == "symbols":
        spec = "symbols"
    elif args.partition.startswith("arcs:"):
        spec = ("arcs", int(args.partition[5:]))
    else:
        raise ConfigError("--partition", f"expected 'symbols' or arcs:<count>, "
                          f"got {args.partition!r}")
    _require(args.n >= 1, "--n", "must be >= 1")
    _require(args.samples >= 2, "--samples", "must be >= 2")
    _require(args.eps > 0, "--eps", "must be positive")
    try:
        fraction = probes.katok_check(base, spec, args.n, args.eps, args.samples,
                                      args.seed)
    except ValueError as exc:
        raise ConfigError("--partition", str(exc))
    rows = [(args.n, args.eps, args.samples, fraction)]
    config = {"command": "katok", "system": base.describe(),
              "partition": args.partition, "n": args.n, "eps": f"{args.eps!r}",
              "samples": args.samples, "seed": args.seed}
    return config, ("n", "epsilon", "samples", "fraction"), rows, None


_RUNNERS = {
    "fbar": run_fbar,
    "dist": run_dist,
    "profile": run_profile,
    "tlk-probe": run_tlk,
    "sensitivity": run_sensitivity,
    "katok": run_katok,
}


def _resolve_out(path):
    if path is None:
        return None
    base_dir = os.environ.get(ENV_OUT_DIR)
    if base_dir and not os.path.isabs(path):
        return os.path.join(base_dir, path)
    return path


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        config, columns, rows, stdout_line = _RUNNERS[args.command](args)
        out = _resolve_out(args.out)
        if args.plot and out is None:
            raise ConfigError("--plot", "requires --out")
    except (ConfigError, ValueError) as exc:
        print(f"fkdyn: error: {exc}", file=sys.stderr)
        return 2
    config["format"] = args.format
    text = report.table_text(config, columns, rows, args.format)
    try:
        if out is None:
            sys.stdout.write(stdout_line + "\n" if stdout_line else text)
        else:
            report.write_atomic(out, text)
            if stdout_line:
                print(stdout_line)
            if args.plot:
                png = os.path.splitext(out)[0] + ".png"
                report.render_figure(args.command, columns, rows, png, config)
    except OSError as exc:
        print(f"fkdyn: io error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
