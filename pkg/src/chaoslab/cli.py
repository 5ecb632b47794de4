"""Unified command-line front end.

Every run resolves its full configuration (flags, optional --config file,
defaults), executes one subcommand, and writes its outputs plus a manifest
JSON (resolved config, package versions, wall-clock timings) into the output
directory.  Data outputs (CSV and report JSON) are deterministic for a fixed
config and seed; the manifest carries timings and is excluded from the
byte-identical guarantee.  Files are written atomically (temp + rename).

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 precondition
violation.  CHAOSLAB_OUTDIR sets the default output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__, kernels
from .errors import NumericError, PreconditionError


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    """Shortest round-trip decimal form."""
    return repr(float(x))


def write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def write_json(path: str, obj) -> None:
    _write_atomic(path, json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _parse_pair(text: str, kind=int):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values: {text!r}")
    try:
        return (kind(parts[0]), kind(parts[1]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _int_pair(text: str):
    return _parse_pair(text, int)


def _float_pair(text: str):
    return _parse_pair(text, float)


def _load_config_file(path: str) -> dict:
    """Flat key=value text, or a manifest/report JSON with a 'config' map."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(text)
        return obj.get("config", obj)
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise PreconditionError(f"bad config line: {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


class _Run:
    """Output-directory handle that accumulates the manifest."""

    def __init__(self, command: str, config: dict, outdir: str):
        self.command = command
        self.config = config
        self.outdir = outdir
        self.outputs: list[str] = []
        self.t0 = time.monotonic()
        os.makedirs(outdir, exist_ok=True)

    def path(self, name: str) -> str:
        self.outputs.append(name)
        return os.path.join(self.outdir, name)

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "config": self.config,
            "outputs": self.outputs,
            "versions": {
                "chaoslab": __version__,
                "numpy": np.__version__,
                "kernels": kernels.BACKEND,
            },
            "timings": {"wall_seconds": time.monotonic() - self.t0},
        }
        write_json(os.path.join(self.outdir, "manifest.json"), manifest)
        print(f"wrote {', '.join(self.outputs)} and manifest.json to {self.outdir}")


# -- subcommand handlers --------------------------------------------------------


def _cmd_spectrum(args) -> int:
    from .fourier import ClassIndex
    from .spectra import (build_class_operator, continued_fraction_eigen,
                          truncated_spectrum)

    cfg = {"khat": list(args.khat), "p": list(args.p),
           "gamma": list(args.gamma), "trunc": args.trunc,
           "refine": args.refine, "tol": args.tol}
    run = _Run("spectrum", cfg, args.output_dir)
    cls = ClassIndex(khat=args.khat, p=args.p)
    gamma = complex(args.gamma[0], args.gamma[1])
    op = build_class_operator(cls, gamma, args.trunc)
    report = truncated_spectrum(op)
    doc = report.to_json_dict()
    normalized = report.normalized()
    doc["normalized_eigenvalues"] = [[z.real, z.imag] for z in normalized]
    if args.refine and gamma != 0:
        candidates = normalized[np.abs(normalized.real) > args.tol]
        if candidates.size:
            pick = candidates[np.argmax(candidates.real + candidates.imag)]
            seed = pick * abs(gamma) / 2.0
            refined = continued_fraction_eigen(op, seed)
            doc["refined"] = [refined.real, refined.imag]
            lam_t = 2.0 * refined / abs(gamma)
            doc["refined_normalized"] = [lam_t.real, lam_t.imag]
    write_json(run.path("spectrum.json"), doc)
    write_csv(run.path("eigenvalues.csv"), ["re", "im"],
              [(z.real, z.imag) for z in np.sort_complex(report.eigenvalues)])
    run.finish()
    return 0


def _cmd_euler_sim(args) -> int:
    from .fourier import CoefficientField, integrate_galerkin

    cfg = {"box": args.box, "dt": args.dt, "steps": args.steps,
           "sample_every": args.sample_every, "rng_seed": args.rng_seed,
           "amplitude": args.amplitude, "decay": args.decay}
    if args.box < 1 or args.dt <= 0 or args.steps < 1:
        raise PreconditionError("box >= 1, dt > 0, steps >= 1 required")
    run = _Run("euler-sim", cfg, args.output_dir)
    rng = np.random.default_rng(args.rng_seed)
    state = CoefficientField.random(args.box, rng, decay=args.decay)
    state = state.scaled(args.amplitude / np.sqrt(state.enstrophy()))
    rows = [(0.0, state.energy(), state.enstrophy())]

    sample_every = args.sample_every
    current = state
    remaining = args.steps
    t = 0.0
    while remaining > 0:
        chunk = min(sample_every, remaining)
        current = integrate_galerkin(current, args.dt, chunk)
        remaining -= chunk
        t += chunk * args.dt
        rows.append((t, current.energy(), current.enstrophy()))
    write_csv(run.path("energy.csv"), ["t", "energy", "enstrophy"], rows)
    write_json(run.path("final_state.json"), current.to_json_dict())
    run.finish()
    return 0


def _cmd_dashed_line(args) -> int:
    from .dashed_line import (DashedLineParams, DashedLineState,
                              HeteroclinicParams, analytic_heteroclinic,
                              integrate, orbit_residual)

    cfg = {"gamma": args.gamma, "epsilon": args.epsilon, "trunc": args.trunc,
           "dt": args.dt, "steps": args.steps, "sample_every": args.sample_every,
           "from_analytic": list(args.from_analytic) if args.from_analytic else None}
    run = _Run("dashed-line", cfg, args.output_dir)
    params = DashedLineParams(gamma=args.gamma, epsilon=args.epsilon,
                              trunc=args.trunc)
    if args.from_analytic is not None:
        tau0, theta0, sign = args.from_analytic
        het = HeteroclinicParams(tau0=float(tau0), theta0=float(theta0),
                                 kappa_sign=int(float(sign)))
        state0 = analytic_heteroclinic(0.0, het, args.gamma, trunc=args.trunc)
        residual = orbit_residual(het, args.gamma, np.linspace(-5.0, 5.0, 100))
        write_json(run.path("residual.json"),
                   {"config": cfg, "max_orbit_residual": residual})
    else:
        state0 = DashedLineState.fixed_point(params)
        state0.omega[params.index(1)] += args.kick
    traj = integrate(state0, params, args.dt, args.steps, args.sample_every)
    header = ["t", "omega_p"] + [f"omega_{n}" for n in range(-args.trunc, args.trunc + 1)]
    rows = [(traj.times[i], traj.omega_p[i], *traj.omega[i])
            for i in range(traj.times.size)]
    write_csv(run.path("trajectory.csv"), header, rows)
    run.finish()
    return 0


def _cmd_nls_sim(args) -> int:
    from .nls import (NLSParams, NLSLatticeState, center_wing_encode,
                      discrete_saddle, simulate)

    cfg = {"N": args.N, "omega": args.omega, "alpha": args.alpha,
           "beta": args.beta, "epsilon": args.epsilon, "dt": args.dt,
           "steps": args.steps, "sample_every": args.sample_every,
           "encode": args.encode, "kick": args.kick, "rng_seed": args.rng_seed}
    run = _Run("nls-sim", cfg, args.output_dir)
    params = NLSParams(N=args.N, omega=args.omega, alpha=args.alpha,
                       beta=args.beta, epsilon=args.epsilon)
    saddle = discrete_saddle(params)
    rng = np.random.default_rng(args.rng_seed)
    q0 = saddle.state.q.copy()
    if args.kick != 0.0:
        n = np.arange(args.N)
        q0 = q0 * (1.0 + args.kick * np.cos(2 * np.pi * n / args.N))
    state0 = NLSLatticeState(q0)
    traj = simulate(state0, params, args.dt, args.steps, args.sample_every)
    header = (["t"] + [f"re_q{n}" for n in range(args.N)]
              + [f"im_q{n}" for n in range(args.N)])
    rows = [(traj.times[i], *traj.samples[i].real, *traj.samples[i].imag)
            for i in range(traj.times.size)]
    write_csv(run.path("trajectory.csv"), header, rows)
    saddle_doc = {"Q": [saddle.Q.real, saddle.Q.imag],
                  "I": abs(saddle.Q) ** 2,
                  "theta": float(np.angle(saddle.Q)),
                  "eigenvalues": [[z.real, z.imag] for z in
                                  np.sort_complex(saddle.eigenvalues)]}
    write_json(run.path("saddle.json"), saddle_doc)
    if args.encode:
        enc = center_wing_encode(traj.samples)
        _write_atomic(run.path("symbols.txt"), enc.symbols + "\n")
    run.finish()
    return 0


def _cmd_nls_saddle(args) -> int:
    from .nls import eigenvalue_table

    cfg = {"omega": args.omega, "alpha": args.alpha, "beta": args.beta,
           "epsilon": args.epsilon, "n_max": args.n_max, "n_cut": args.n_cut,
           "variant": args.variant}
    run = _Run("nls-saddle", cfg, args.output_dir)
    info, _ = eigenvalue_table(args.omega, args.alpha, args.beta, args.epsilon,
                               n_max=args.n_max, n_cut=args.n_cut,
                               variant=args.variant)
    write_json(run.path("saddle.json"), info.to_json_dict())
    run.finish()
    return 0


def _cmd_lax_check(args) -> int:
    from .fourier import (CoefficientField, GridField2D, coefficients_to_grid,
                          grid_bracket)
    from .laxpairs import (LaxReport, VectorField3D, compatibility_residual_2d,
                           isospectrality_check, jacobi_defect, lax_3d_scalar,
                           lax_3d_vector, rossby_L)

    cfg = {"case": args.case, "resolution": args.resolution, "T": args.T,
           "dt": args.dt, "rng_seed": args.rng_seed, "box": args.box}
    run = _Run("lax-check", cfg, args.output_dir)
    rng = np.random.default_rng(args.rng_seed)
    n = args.resolution

    def rand_grid(kmax=None):
        box = kmax or max(2, n // 8)
        return coefficients_to_grid(CoefficientField.random(box, rng, decay=0.2), n)

    report = LaxReport()
    if args.case == "jacobi":
        worst = 0.0
        for _ in range(5):
            worst = max(worst, jacobi_defect(rand_grid(), rand_grid(), rand_grid()))
        report.residuals["jacobi_max"] = worst
    elif args.case == "compat2d":
        omega = CoefficientField.random(args.box, rng, decay=0.2)
        phis = [rand_grid() for _ in range(3)]
        report = compatibility_residual_2d(omega, phis, n)
    elif args.case == "isospec":
        omega0 = CoefficientField.random(args.box, rng, decay=0.3)
        omega0 = omega0.scaled(0.1 / np.sqrt(omega0.enstrophy()))
        report = isospectrality_check(omega0, args.T, args.dt)
    elif args.case == "rossby":
        omega = rand_grid()
        phi = rand_grid()
        lhs = rossby_L(omega, args.beta_param, phi)
        zero_beta = rossby_L(omega, 0.0, phi)
        bracket = grid_bracket(omega, phi)
        report.residuals["beta0_reduction"] = float(
            np.max(np.abs(zero_beta.values - bracket.values)))
        report.residuals["rossby_norm"] = float(np.max(np.abs(lhs.values)))
    elif args.case in ("3dscalar", "3dvector"):
        m = min(args.resolution, 32)
        u = VectorField3D.abc_flow(m)
        omega3 = u.curl()
        if args.case == "3dscalar":
            x, y, z = VectorField3D.coordinates(m)
            phi = np.cos(x) * np.sin(y) + np.cos(z)
            L, A = lax_3d_scalar(omega3, u, phi)
            report.residuals["beltrami_L_minus_A"] = float(np.max(np.abs(L - A)))
        else:
            L, A = lax_3d_vector(omega3, u, omega3)
            report.residuals["L_of_omega"] = float(
                max(np.max(np.abs(L.components[i])) for i in range(3)))
        report.residuals["div_u"] = u.divergence_defect()
    else:  # pragma: no cover
        raise PreconditionError(f"unknown case {args.case}")
    write_json(run.path("report.json"), report.to_json_dict())
    run.finish()
    return 0


def _cmd_darboux(args) -> int:
    from .darboux import shear_power_construction, verify_darboux
    from .fourier import GridField2D

    cfg = {"construction": args.construction, "c": args.c,
           "resolution": args.resolution, "custom_file": args.custom_file}
    run = _Run("darboux", cfg, args.output_dir)
    if args.construction == "shear-power":
        omega, psi, p, f, F = shear_power_construction(args.c, args.resolution)
    else:
        with open(args.custom_file) as fh:
            spec = json.load(fh)
        arrays = {k: np.asarray(spec[k], dtype=float)
                  for k in ("omega", "psi", "p", "f", "F")}
        omega, psi, p, f, F = (GridField2D(arrays[k])
                               for k in ("omega", "psi", "p", "f", "F"))
    report = verify_darboux(omega, psi, F, p, f)
    write_json(run.path("report.json"), report.to_json_dict())
    run.finish()
    return 0


def _cmd_shadow(args) -> int:
    from .shadowing import (find_shadow, hyperbolicity_estimate,
                            linear_map_system, palmer_assembly)

    cfg = {"map": args.map, "word": args.word, "m": args.m, "delta": args.delta,
           "rng_seed": args.rng_seed}
    run = _Run("shadow", cfg, args.output_dir)
    rng = np.random.default_rng(args.rng_seed)

    if args.map == "linear-test":
        system = linear_map_system(np.diag([2.0, 0.5]))
        x0 = np.zeros(2)
        # synthetic segment through a point near the saddle (not homoclinic;
        # exercises the bookkeeping on an exactly known map)
        seed_pt = np.array([1e-9, 1.0])
        seg = system.orbit(seed_pt, 2 * args.m + 1)
    elif args.map == "dashed-line":
        from .dashed_line import DashedLineParams, flow_map
        params = DashedLineParams(gamma=args.gamma, epsilon=0.0, trunc=5)
        fmap, fjac = flow_map(params, dt=0.05, steps=10)
        from .shadowing import MapSystem
        system = MapSystem(dimension=params.size + 1, map=fmap, jacobian=fjac)
        x0 = np.concatenate(([args.gamma], np.zeros(params.size)))
        from .dashed_line import HeteroclinicParams, analytic_heteroclinic
        het = HeteroclinicParams(tau0=0.0, theta0=0.0, kappa_sign=1)
        ts = 0.5 * np.arange(-args.m, args.m + 1)
        seg = np.array([
            np.concatenate(([s.omega_p], s.omega))
            for s in (analytic_heteroclinic(t, het, args.gamma, trunc=5) for t in ts)])
    elif args.map == "nls-poincare":
        from .nls import NLSParams, discrete_saddle, flow_map
        params = NLSParams(N=args.N, omega=args.omega, alpha=args.alpha,
                           beta=args.beta, epsilon=args.epsilon)
        dt = 0.5 * params.max_stable_dt()
        fmap, fjac = flow_map(params, dt=dt, steps=20)
        from .shadowing import MapSystem
        system = MapSystem(dimension=2 * args.N, map=fmap, jacobian=fjac)
        sad = discrete_saddle(params)
        x0 = np.concatenate([sad.state.q.real, sad.state.q.imag])
        kick = 1e-3 * rng.standard_normal(2 * args.N)
        seg = system.orbit(x0 + kick, 2 * args.m + 1)
    else:  # pragma: no cover
        raise PreconditionError(f"unknown map {args.map}")

    pseudo = palmer_assembly(x0, seg, args.word, system)
    report = {"delta": pseudo.delta, "word": args.word, "map": args.map}
    write_csv(run.path("pseudo_orbit.csv"),
              [f"x{i}" for i in range(system.dimension)], pseudo.points)
    if pseudo.delta > args.delta:
        report["note"] = (f"assembled defect {pseudo.delta:.3e} above requested "
                          f"delta {args.delta:.3e}; shadow solve skipped")
    else:
        result = find_shadow(pseudo, system)
        report["epsilon"] = result.epsilon
        report["newton_residuals"] = result.residual_history
        write_csv(run.path("shadow_orbit.csv"),
                  [f"x{i}" for i in range(system.dimension)], result.orbit)
        est = hyperbolicity_estimate(result.orbit, system)
        report["dichotomy"] = {
            "rates": list(map(float, est.rates)),
            "tail_rates": list(map(float, est.tail_rates)),
            "angle_min": est.angle_min,
            "hyperbolic": bool(est.hyperbolic),
        }
    write_json(run.path("report.json"), report)
    run.finish()
    return 0


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaoslab",
        description="Numerics for truncated vorticity spectra, lattice NLS "
                    "chaos diagnostics, Lax/Darboux checks, and shadowing.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--output-dir", default=os.environ.get("CHAOSLAB_OUTDIR", "."),
                        help="output directory (default: CHAOSLAB_OUTDIR or cwd)")
        sp.add_argument("--config", default=None,
                        help="key=value file or manifest JSON supplying defaults")
        sp.add_argument("--rng-seed", type=int, default=0)

    sp = sub.add_parser("spectrum", help="class-operator spectrum and refinement")
    add_common(sp)
    sp.add_argument("--khat", type=_int_pair, default=(-3, -2))
    sp.add_argument("--p", type=_int_pair, default=(1, 1))
    sp.add_argument("--gamma", type=_float_pair, default=(2.0, 0.0))
    sp.add_argument("--trunc", type=int, default=50)
    sp.add_argument("--refine", action="store_true")
    sp.add_argument("--tol", type=float, default=0.05)
    sp.set_defaults(func=_cmd_spectrum)

    sp = sub.add_parser("euler-sim", help="truncated vorticity evolution")
    add_common(sp)
    sp.add_argument("--box", type=int, default=8)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--sample-every", type=int, default=100)
    sp.add_argument("--amplitude", type=float, default=1.0)
    sp.add_argument("--decay", type=float, default=0.15)
    sp.set_defaults(func=_cmd_euler_sim)

    sp = sub.add_parser("dashed-line", help="dashed-line model trajectories")
    add_common(sp)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--epsilon", type=float, default=0.0)
    sp.add_argument("--trunc", type=int, default=10)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--steps", type=int, default=10000)
    sp.add_argument("--sample-every", type=int, default=100)
    sp.add_argument("--kick", type=float, default=1e-4)
    sp.add_argument("--from-analytic", type=lambda s: s.split(","), default=None,
                    metavar="TAU0,THETA0,SIGN")
    sp.set_defaults(func=_cmd_dashed_line)

    sp = sub.add_parser("nls-sim", help="perturbed lattice NLS simulation")
    add_common(sp)
    sp.add_argument("--N", type=int, default=8)
    sp.add_argument("--omega", type=float, default=3.5)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=4.0)
    sp.add_argument("--epsilon", type=float, default=0.01)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--steps", type=int, default=100000)
    sp.add_argument("--sample-every", type=int, default=100)
    sp.add_argument("--kick", type=float, default=0.05)
    sp.add_argument("--encode", action="store_true")
    sp.set_defaults(func=_cmd_nls_sim)

    sp = sub.add_parser("nls-saddle", help="continuum saddle data and eigenvalues")
    add_common(sp)
    sp.add_argument("--omega", type=float, default=0.8)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=2.0)
    sp.add_argument("--epsilon", type=float, default=0.01)
    sp.add_argument("--n-max", type=int, default=6)
    sp.add_argument("--n-cut", type=int, default=10)
    sp.add_argument("--variant", choices=("regular", "singular"), default="regular")
    sp.set_defaults(func=_cmd_nls_saddle)

    sp = sub.add_parser("lax-check", help="Lax pair consistency batteries")
    add_common(sp)
    sp.add_argument("--case", required=True,
                    choices=("jacobi", "compat2d", "isospec", "rossby",
                             "3dscalar", "3dvector"))
    sp.add_argument("--resolution", type=int, default=64)
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--box", type=int, default=4)
    sp.add_argument("--beta-param", type=float, default=0.5)
    sp.set_defaults(func=_cmd_lax_check)

    sp = sub.add_parser("darboux", help="gauge/potential transform verification")
    add_common(sp)
    sp.add_argument("--construction", choices=("shear-power", "custom-file"),
                    default="shear-power")
    sp.add_argument("--c", type=float, default=0.3)
    sp.add_argument("--resolution", type=int, default=64)
    sp.add_argument("--custom-file", default=None)
    sp.set_defaults(func=_cmd_darboux)

    sp = sub.add_parser("shadow", help="pseudo-orbit assembly and shadow solving")
    add_common(sp)
    sp.add_argument("--map", choices=("linear-test", "dashed-line", "nls-poincare"),
                    default="linear-test")
    sp.add_argument("--word", default="010")
    sp.add_argument("--m", type=int, default=8)
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--N", type=int, default=8)
    sp.add_argument("--omega", type=float, default=3.5)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=4.0)
    sp.add_argument("--epsilon", type=float, default=0.01)
    sp.set_defaults(func=_cmd_shadow)

    return parser


def _apply_config_file(parser, argv):
    """Use --config values as defaults, with explicit flags winning."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        return argv
    overrides = _load_config_file(argv[idx + 1])
    command = argv[0]
    sub_actions = next(a for a in parser._actions
                       if isinstance(a, argparse._SubParsersAction))
    subparser = sub_actions.choices[command]
    known = {a.dest for a in subparser._actions}
    unknown = set(overrides) - known
    if unknown:
        raise PreconditionError(f"unknown config keys: {sorted(unknown)}")
    flag_dests = {a.dest for a in subparser._actions
                  if isinstance(a, (argparse._StoreTrueAction,
                                    argparse._StoreFalseAction))}
    extra = []
    present = set()
    for token in argv[1:]:
        if token.startswith("--"):
            present.add(token[2:].split("=", 1)[0].replace("-", "_"))
    for key, value in overrides.items():
        if key in present or key == "config":
            continue
        flag = "--" + key.replace("_", "-")
        if key in flag_dests:
            truthy = value if isinstance(value, bool) else \
                str(value).strip().lower() in ("1", "true", "yes", "on")
            if truthy:
                extra.append(flag)
        elif isinstance(value, list):
            extra.extend([flag, ",".join(str(v) for v in value)])
        elif value is not None:
            extra.extend([flag, str(value)])
    return [command] + extra + argv[1:]


_PAIR_FLAGS = ("--khat", "--p", "--gamma", "--from-analytic")


def _merge_pair_values(argv: list[str]) -> list[str]:
    """Join '--khat -3,-2' into '--khat=-3,-2' so negatives parse."""
    out = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in _PAIR_FLAGS and i + 1 < len(argv) and "," in argv[i + 1]:
            out.append(f"{token}={argv[i + 1]}")
            i += 2
        else:
            out.append(token)
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if argv and not argv[0].startswith("-"):
            argv = _apply_config_file(parser, argv)
        args = parser.parse_args(_merge_pair_values(argv))
        return args.func(args)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return 0 if code == 0 else 2
    except PreconditionError as exc:
        print(f"precondition violation: {exc}", file=sys.stderr)
        return 4
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
