"""Command-line front end.

Every command has a dataclass config.  Values come from the dataclass
defaults, then an optional JSON file (``--config``), then ISOENT_SEED for the
seed, then explicit flags.  Output goes to stdout or, with ``--out``, to a
file written atomically.

Exit codes: 0 success, 2 invalid configuration or parameters, 3 invalid
input data, 4 non-convergence.
"""

import argparse
import dataclasses
import os
import sys
import typing
from dataclasses import dataclass, field, fields
from typing import List, Optional

import numpy as np

from . import highdim as hd
from . import io
from . import network as nw
from .equivalence import NotIsoEntangled, classify, fit_to_general
from .families import (
    FAMILY_NAMES,
    I5,
    General,
    PhaseInfeasible,
    SingularConstraint,
    gen_family,
    general_constraint_tau,
    iso_residuals,
    params_to_dict,
)
from .linalg import orthonormality_residual, tangles
from .oracle import DegenerateSubspace, NonConvergence, canonicalize, solve_iso_basis

EXIT_OK, EXIT_CONFIG, EXIT_INPUT, EXIT_NONCONVERGENCE = 0, 2, 3, 4
INPUT_TOL = 1e-8
# angles typed with ~10 decimals cannot resolve a denominator below this
SINGULAR_INPUT_TOL = 1e-9


class ConfigError(ValueError):
    pass


def _opt(help, **kw):
    return field(default=kw.pop("default", None), metadata={"help": help, **kw})


@dataclass
class GenConfig:
    family: str = _opt("family name", default="elegant", choices=sorted(FAMILY_NAMES))
    tau: Optional[float] = _opt("skewed-frame angle")
    theta: Optional[float] = _opt("theta")
    zeta: Optional[float] = _opt("zeta")
    delta: Optional[float] = _opt("delta")
    beta: Optional[float] = _opt("beta")
    sign: Optional[int] = _opt("branch sign of the General family (+1 or -1)")
    x: Optional[float] = _opt("canonical Bell x")
    y: Optional[float] = _opt("canonical Bell y")
    z: Optional[float] = _opt("canonical Bell z")
    phase_sign: Optional[int] = _opt("canonical Bell phase branch (+1 or -1)")
    phi: Optional[float] = _opt("interpolation angle of the i5 family")


@dataclass
class InputConfig:
    input: Optional[str] = _opt("basis JSON file")


@dataclass
class ClassifyConfig:
    input: Optional[str] = _opt("basis JSON file")
    seeds: int = _opt("number of fit starts", default=32)


@dataclass
class TriangleCmdConfig:
    input: Optional[str] = _opt("basis JSON file used by every party, or {'bases': [A, B, C]}; EJM if omitted")
    eps: List[float] = _opt("edge noise, one value or three (AB AC BC)", default=(0.0,), nargs="+")
    edge: str = _opt("edge state", default=nw.DEFAULT_EDGE, choices=sorted(nw.EDGE_STATES))
    wiring: str = _opt("qubit wiring", default=nw.DEFAULT_WIRING, choices=sorted(nw.WIRINGS))


@dataclass
class ScanConfig:
    curve: str = _opt("curve", default="ejm-noise", choices=["ejm-noise", "elegant-opi"])
    grid: int = _opt("number of grid points", default=11)
    edge: str = _opt("edge state", default=nw.DEFAULT_EDGE, choices=sorted(nw.EDGE_STATES))
    wiring: str = _opt("qubit wiring", default=nw.DEFAULT_WIRING, choices=sorted(nw.WIRINGS))


@dataclass
class EmbedConfig:
    grid: int = _opt("number of phi values in [0, pi/2]", default=11)
    threshold: float = _opt("acceptance threshold on the Gram cost", default=1e-12)
    seeds: int = _opt("number of fit starts", default=32)


@dataclass
class HighdimConfig:
    d: int = _opt("local dimension", default=3)
    construction: str = _opt("construction", default="robust", choices=["hadamard", "robust", "conditional"])
    chi: float = _opt("robust Hadamard angle", default=1.0)
    latin: str = _opt("Latin square method", default="cyclic", choices=["cyclic", "seeded"])
    emit: str = _opt("what to print", default="report", choices=["report", "basis", "latin"])
    seed: int = _opt("random seed", default=0)


@dataclass
class SolveConfig:
    seed: int = _opt("first seed", default=0)
    count: int = _opt("number of consecutive seeds", default=1)
    tol: float = _opt("iso residual tolerance", default=1e-10)


# config plumbing -----------------------------------------------------------------


def _field_type(f):
    args = [a for a in typing.get_args(f.type) if a is not type(None)]
    base = args[0] if args else f.type
    return base if base in (int, float, str) else str


def _coerce(f, value, from_flag=False):
    conv = _field_type(f)
    if f.metadata.get("nargs"):
        vals = value if isinstance(value, (list, tuple)) else [value]
        try:
            return [conv(v) for v in vals]
        except (TypeError, ValueError):
            raise ConfigError(f"{f.name}: expected a list of {conv.__name__}") from None
    if value is None:
        return None
    if conv is int and isinstance(value, float) and not value.is_integer():
        raise ConfigError(f"{f.name}: expected an integer, got {value!r}")
    if conv in (int, float) and (isinstance(value, bool) or (isinstance(value, str) and not from_flag)):
        raise ConfigError(f"{f.name}: expected a number, got {value!r}")
    try:
        out = conv(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{f.name}: cannot interpret {value!r} as {conv.__name__}") from None
    choices = f.metadata.get("choices")
    if choices and out not in choices:
        raise ConfigError(f"{f.name}: {out!r} is not one of {choices}")
    return out


def build_config(cls, command, file_values, flag_values, env=None):
    env = os.environ if env is None else env
    known = {f.name: f for f in fields(cls)}
    values = {}
    file_values = dict(file_values or {})
    cmd = file_values.pop("command", command)
    if cmd != command:
        raise ConfigError(f"config file is for command {cmd!r}, not {command!r}")
    unknown = sorted(set(file_values) - set(known))
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {unknown}")
    for k, v in file_values.items():
        values[k] = _coerce(known[k], v)
    if "seed" in known and env.get("ISOENT_SEED") not in (None, ""):
        try:
            values["seed"] = int(env["ISOENT_SEED"])
        except ValueError:
            raise ConfigError(f"ISOENT_SEED must be an integer, got {env['ISOENT_SEED']!r}") from None
    for k, v in flag_values.items():
        if v is not None:
            values[k] = _coerce(known[k], v, from_flag=True)
    return cls(**values)


# commands ------------------------------------------------------------------------


def _basis_summary(m):
    xi = tangles(m)
    return {
        "tangles": [float(x) for x in xi],
        "iso_residuals": [float(r) for r in iso_residuals(m)],
        "orthonormality_residual": orthonormality_residual(m),
    }


def _load_input(path, size=4):
    if path is None:
        raise ConfigError("--input is required")
    m = io.read_basis(path)
    if m.shape != (size, size):
        raise io.InvalidInput(f"expected a {size}x{size} basis, got {m.shape}")
    return m


def _load_orthonormal(path):
    m = _load_input(path)
    res = orthonormality_residual(m)
    if res > INPUT_TOL:
        raise io.InvalidInput(f"basis is not orthonormal (residual {res:.3e} > {INPUT_TOL:.0e})")
    return m


def cmd_gen(cfg: GenConfig):
    cls = FAMILY_NAMES[cfg.family]
    names = [f.name for f in fields(cls)]
    given = {f.name: getattr(cfg, f.name) for f in fields(cfg) if f.name != "family" and getattr(cfg, f.name) is not None}
    extra = sorted(set(given) - set(names))
    if extra:
        raise ConfigError(f"family {cfg.family!r} takes {names}, not {extra}")
    required = [f.name for f in fields(cls) if f.default is dataclasses.MISSING]
    missing = [n for n in required if n not in given]
    if missing:
        raise ConfigError(f"family {cfg.family!r} needs {missing}")
    params = cls(**given)
    if isinstance(params, General):
        general_constraint_tau(params.delta, params.theta, params.beta, eps=SINGULAR_INPUT_TOL)
    m = gen_family(params).computational().matrix
    out = {"params": params_to_dict(params), "frame": "computational"}
    out.update(_basis_summary(m))
    out["tangle"] = float(np.mean(out["tangles"]))
    out["basis"] = io.complex_to_json(m)
    return io.dumps(out)


def cmd_tangle(cfg: InputConfig):
    m = _load_input(cfg.input)
    return io.dumps({"tangles": [float(x) for x in tangles(m)]})


def cmd_check(cfg: InputConfig):
    m = _load_input(cfg.input)
    out = _basis_summary(m)
    out["orthonormal"] = out["orthonormality_residual"] <= INPUT_TOL
    out["iso_entangled"] = max(abs(r) for r in out["iso_residuals"]) <= 1e-10
    return io.dumps(out)


def cmd_classify(cfg: ClassifyConfig):
    m = _load_orthonormal(cfg.input)
    label, report = classify(m, seeds=cfg.seeds)
    out = {"label": label}
    if report is not None:
        out.update({k: v for k, v in report.to_dict().items() if k != "label"})
    return io.dumps(out)


def cmd_canonicalize(cfg: InputConfig):
    m = _load_orthonormal(cfg.input)
    try:
        r = canonicalize(m)
    except DegenerateSubspace as exc:
        raise io.InvalidInput(str(exc)) from None
    return io.dumps(r.to_dict())


def _triangle_bases(path):
    if path is None:
        b = nw.ejm_basis().matrix
        return (b, b, b)
    data = io.read_json(path)
    if isinstance(data, dict) and "bases" in data:
        if len(data["bases"]) != 3:
            raise io.InvalidInput("'bases' must list three bases")
        mats = tuple(io.basis_from_dict(b) for b in data["bases"])
    else:
        b = io.basis_from_dict(data)
        mats = (b, b, b)
    for m in mats:
        if m.shape != (4, 4) or orthonormality_residual(m) > INPUT_TOL:
            raise io.InvalidInput("party bases must be orthonormal 4x4 matrices")
    return mats


def cmd_triangle(cfg: TriangleCmdConfig):
    bases = _triangle_bases(cfg.input)
    if len(cfg.eps) not in (1, 3):
        raise ConfigError("--eps takes one value or three")
    eps = cfg.eps[0] if len(cfg.eps) == 1 else tuple(cfg.eps)
    d = nw.triangle_distribution(nw.TriangleConfig(bases, cfg.edge, eps, cfg.wiring))
    lines = ["a,b,c,p"]
    for a, b, c in np.ndindex(4, 4, 4):
        lines.append(f"{a},{b},{c},{d.p[a, b, c]:.12g}")
    return "\n".join(lines) + "\n"


_CURVES = {"ejm-noise": "ejm_noise", "elegant-opi": "elegant_opi_subfamily"}


def cmd_scan(cfg: ScanConfig):
    rows = nw.scan_p1p3(_CURVES[cfg.curve], cfg.grid, cfg.edge, cfg.wiring)
    return nw.scan_csv(rows)


EMBED_HEADER = "phi,beta,theta,delta,cost,accepted"


def cmd_embed(cfg: EmbedConfig):
    if cfg.grid < 2:
        raise ConfigError("grid must have at least two points")
    lines = [EMBED_HEADER]
    for phi in np.linspace(0.0, np.pi / 2, cfg.grid):
        m = gen_family(I5(phi)).computational().matrix
        r = fit_to_general(m, seeds=cfg.seeds, threshold=cfg.threshold)
        f = r.fitted
        vals = ",".join(f"{v:.12g}" for v in (phi, f["beta"], f["theta"], f["delta"], r.cost))
        lines.append(f"{vals},{'true' if r.accepted else 'false'}")
    return "\n".join(lines) + "\n"


def cmd_highdim(cfg: HighdimConfig):
    if cfg.d < 2:
        raise ConfigError("d must be at least 2")
    ls = hd.latin_square(cfg.d, cfg.latin, cfg.seed)
    if cfg.emit == "latin":
        return ls.to_csv()
    if cfg.construction == "conditional":
        from .sampling import haar_unitary, make_rng

        rng = make_rng(cfg.seed)
        v = hd.conditional_product_basis([haar_unitary(cfg.d, rng) for _ in range(cfg.d)])
        if cfg.emit == "basis":
            return io.dumps(io.basis_to_dict(v, d=cfg.d, construction=cfg.construction))
        spectra = hd.schmidt_spectra(v, cfg.d)
        return io.dumps(
            {
                "d": cfg.d,
                "construction": cfg.construction,
                "orthonormality": orthonormality_residual(v),
                "spectra": [[float(x) for x in s] for s in spectra],
            }
        )
    if cfg.construction == "hadamard":
        mats = [hd.flat_hadamard(cfg.d)] * cfg.d
    else:
        mats = [hd.robust_hadamard(cfg.d, cfg.chi).matrix] * cfg.d
    basis = hd.shift_multiply(ls, mats)
    if cfg.emit == "basis":
        return io.dumps(io.basis_to_dict(basis.vectors(), d=cfg.d, construction=cfg.construction))
    rep = hd.report(basis, cfg.construction).to_dict()
    if cfg.construction == "robust":
        r = hd.robust_hadamard(cfg.d, cfg.chi)
        rep.update(a=r.a, b=r.b)
    return io.dumps(rep)


def cmd_solve(cfg: SolveConfig):
    from .oracle import completeness_report

    if cfg.count < 1:
        raise ConfigError("count must be positive")
    if cfg.count == 1:
        b = solve_iso_basis(cfg.seed, tol=cfg.tol)
        out = {"seed": cfg.seed}
        out.update(_basis_summary(b))
        out["basis"] = io.complex_to_json(b)
        return io.dumps(out)
    recs = completeness_report(range(cfg.seed, cfg.seed + cfg.count), tol=cfg.tol)
    return io.dumps([r.to_dict() for r in recs])


COMMANDS = {
    "gen": (GenConfig, cmd_gen, "generate a family member"),
    "tangle": (InputConfig, cmd_tangle, "tangles of the columns of a basis file"),
    "check": (InputConfig, cmd_check, "orthonormality and iso-entanglement residuals"),
    "classify": (ClassifyConfig, cmd_classify, "family label of a basis"),
    "canonicalize": (InputConfig, cmd_canonicalize, "six-angle canonical form of a basis"),
    "triangle": (TriangleCmdConfig, cmd_triangle, "triangle-network distribution as CSV"),
    "scan": (ScanConfig, cmd_scan, "(p1, p2, p3) along a curve as CSV"),
    "embed": (EmbedConfig, cmd_embed, "fit the i5 family into the General family, CSV"),
    "highdim": (HighdimConfig, cmd_highdim, "Latin-square and Hadamard constructions in dimension d"),
    "solve": (SolveConfig, cmd_solve, "numerically solve the iso-entanglement constraints"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="isoent", description="Iso-entangled two-qubit bases.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (cls, _, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--out", help="output file (default: stdout)")
        for f in fields(cls):
            kw = {"dest": f.name, "default": None, "help": f.metadata.get("help")}
            if f.metadata.get("nargs"):
                kw["nargs"] = f.metadata["nargs"]
            # values are validated in build_config so file and flags share one path
            p.add_argument("--" + f.name.replace("_", "-"), **kw)
    return parser


def run(argv=None, env=None):
    """Parse, execute and return (exit code, output text, error message)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_CONFIG), "", ""
    cls, fn, _ = COMMANDS[args.command]
    try:
        file_values = {}
        if args.config:
            file_values = io.read_json(args.config)
            if not isinstance(file_values, dict):
                raise ConfigError("config file must hold a JSON object")
        flags = {f.name: getattr(args, f.name) for f in fields(cls)}
        cfg = build_config(cls, args.command, file_values, flags, env)
        text = fn(cfg)
    except (ConfigError, SingularConstraint, PhaseInfeasible) as exc:
        return EXIT_CONFIG, "", str(exc)
    except (io.InvalidInput, NotIsoEntangled) as exc:
        return EXIT_INPUT, "", str(exc)
    except NonConvergence as exc:
        return EXIT_NONCONVERGENCE, "", str(exc)
    except ValueError as exc:
        return EXIT_CONFIG, "", str(exc)
    if args.out:
        io.write_text(args.out, text)
        return EXIT_OK, "", ""
    return EXIT_OK, text, ""


def main(argv=None):
    code, text, err = run(argv)
    if text:
        sys.stdout.write(text)
    if err:
        sys.stderr.write(f"isoent: error: {err}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
