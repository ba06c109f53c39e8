"""Command-line front end.

One binary, a subcommand tree per module, JSON/CSV artifacts, no
interactive mode. Exit codes: 0 success, 1 input error, 2 numeric or
capacity error; failures print one machine-parsable JSON line on stderr.
Randomized commands require an explicit --seed and are bit-reproducible;
environment variables are never consulted.
"""

import argparse
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from . import causal_group as cg
from . import cones
from . import events as ev
from . import lorentz as lz
from . import posets as ps
from . import serialization as ser
from .errors import CapacityError, InputError, NumericError

TOLERANCE_DEFAULTS = {
    "feasibility": cones.FEASIBILITY_TOL,
    "ray_equality": cones.RAY_SET_TOL,
    "ray_dedup_angle": cones.RAY_DEDUP_TOL,
    "boundary": lz.BOUNDARY_TOL,
    "causal_band": ev.CAUSAL_BAND,
    "decompose": 1e-9,
}

CAP_DEFAULTS = {
    "enum": ps.ENUM_CAP,
    "bridge": ps.BRIDGE_CAP,
    "witness": ev.WITNESS_CAP,
    "dual_dim": cones.DUAL_MAX_DIM,
    "dual_rays": cones.DUAL_MAX_RAYS,
}


@dataclass
class Config:
    tolerances: dict = field(default_factory=dict)
    caps: dict = field(default_factory=dict)
    seed: int | None = None
    output_format: str = "json"

    def tol(self, name, override=None):
        if override is not None:
            return float(override)
        return float(self.tolerances.get(name, TOLERANCE_DEFAULTS[name]))

    def cap(self, name):
        return int(self.caps.get(name, CAP_DEFAULTS[name]))


def load_config(path):
    if path is None:
        return Config()
    obj = ser.load_json(path)
    if not isinstance(obj, dict):
        raise InputError("config must be a JSON object")
    unknown = set(obj) - {"tolerances", "caps", "seed", "output_format"}
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    tolerances = obj.get("tolerances", {})
    caps = obj.get("caps", {})
    for name, value in tolerances.items():
        if name not in TOLERANCE_DEFAULTS:
            raise InputError(f"unknown tolerance name {name!r}")
        if not (isinstance(value, (int, float)) and value > 0):
            raise InputError(f"tolerance {name!r} must be positive")
    for name, value in caps.items():
        if name not in CAP_DEFAULTS:
            raise InputError(f"unknown cap name {name!r}")
        if not (isinstance(value, int) and value > 0):
            raise InputError(f"cap {name!r} must be a positive integer")
    fmt = obj.get("output_format", "json")
    if fmt not in ("json", "csv"):
        raise InputError(f"output_format must be json or csv, got {fmt!r}")
    seed = obj.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise InputError("config seed must be an integer")
    return Config(tolerances=tolerances, caps=caps, seed=seed, output_format=fmt)


_NUMERIC_LIST = re.compile(r"^-?\d+(\.\d*)?([eE][-+]?\d+)?(,-?\d+(\.\d*)?([eE][-+]?\d+)?)*$")


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on bad flags; remap to the input class.

    The negative-number matcher is widened so values like '-1,-1,1,1'
    (box corners) parse as values, not unknown options.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = _NUMERIC_LIST

    def error(self, message):
        raise InputError(message)


def _parse_floats(text, what="value list"):
    try:
        return np.array([float(x) for x in text.split(",") if x.strip() != ""])
    except ValueError as exc:
        raise InputError(f"{what} must be comma-separated reals: {exc}") from exc


def _parse_box(text, q):
    vals = _parse_floats(text, "box")
    n = 1 + q
    if vals.size != 2 * n:
        raise InputError(f"box needs {2 * n} values (lo then hi), got {vals.size}")
    return vals[:n], vals[n:]


def _emit(text, out):
    data = text if text.endswith("\n") else text + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data)


def _emit_json(obj, out):
    _emit(ser.canonical_json(obj), out)


# cone subcommands

def _cone_input(args):
    if getattr(args, "infile", None):
        return ser.cone_from_obj(ser.load_json(args.infile))
    if getattr(args, "generators", None) is not None:
        if args.dim is None:
            raise InputError("--dim is required with --generators")
        vecs = [_parse_floats(v, "generator") for v in args.generators.split(";") if v.strip()]
        if len({len(v) for v in vecs}) > 1:
            raise InputError("generators have mixed lengths")
        return cones.make_cone(args.dim, np.array(vecs))
    raise InputError("provide --in FILE or --dim/--generators")


def cmd_cone_make(args, cfg):
    cone = _cone_input(args)
    if cone.generators is None:
        raise InputError("cone make needs a V-representation input")
    cone = cones.make_cone(cone.dim, cone.generators, dedup_tol=cfg.tol("ray_dedup_angle"))
    _emit_json(ser.cone_to_obj(cone), args.out)
    return 0


def cmd_cone_member(args, cfg):
    cone = _cone_input(args)
    x = _parse_floats(args.x, "--x")
    tol = cfg.tol("feasibility", args.tol)
    residual = cones.membership_residual(cone, x)
    _emit_json({"member": bool(residual <= tol), "residual": residual, "tolerance": tol},
               args.out)
    return 0


def cmd_cone_dual(args, cfg):
    cone = _cone_input(args)
    out = cones.dual(cone, max_dim=cfg.cap("dual_dim"), max_rays=cfg.cap("dual_rays"))
    _emit_json(ser.cone_to_obj(out), args.out)
    return 0


def cmd_cone_classify(args, cfg):
    cone = _cone_input(args)
    report = cones.classification_report(cone, tol=cfg.tol("ray_equality", args.tol),
                                         feas_tol=cfg.tol("feasibility"))
    _emit_json(report, args.out)
    return 0


# lorentz subcommands

def cmd_lorentz_classify(args, cfg):
    v = _parse_floats(args.v, "--v")
    region = lz.lc_classify(args.q, v, tol=cfg.tol("boundary", args.tol))
    _emit_json({"region": region.value}, args.out)
    return 0


def cmd_lorentz_boost(args, cfg):
    _emit_json(ser.matrix_to_obj(lz.boost(args.q, args.t, args.axis)), args.out)
    return 0


def cmd_lorentz_decompose(args, cfg):
    v = _parse_floats(args.v, "--v")
    factors = lz.orbit_decompose(args.q, v, tol=cfg.tol("decompose", args.tol))
    recon = lz.reconstruct_orbit(args.q, factors)
    _emit_json({"lambda": factors.lam, "t": factors.t,
                "rotation": ser.matrix_to_obj(factors.rotation),
                "reconstruction_residual": float(np.abs(recon - v).max())}, args.out)
    return 0


def cmd_lorentz_check_map(args, cfg):
    m = ser.matrix_from_obj(ser.load_json(args.infile))
    q = args.q if args.q is not None else m.shape[0] - 1
    frame = lz.LorentzFrame(1, q)
    tol = cfg.tol("boundary", args.tol)
    pseudo = lz.is_pseudo_orthogonal(frame, m, tol)
    ortho = lz.is_orthochronous(frame, m, tol) if pseudo else None
    _emit_json({"pseudo_orthogonal": pseudo, "orthochronous": ortho}, args.out)
    return 0


# group subcommands

def _map_input(args):
    return ser.affine_map_from_obj(ser.load_json(args.infile))


def cmd_group_is_causal(args, cfg):
    f = _map_input(args)
    q = args.q if args.q is not None else f.dim - 1
    verdict = cg.is_causal_map(f, q, samples=args.samples, seed=args.seed)
    _emit_json({"causal": verdict, "samples": args.samples, "seed": args.seed}, args.out)
    return 0


def cmd_group_zeeman(args, cfg):
    f = _map_input(args)
    q = args.q if args.q is not None else f.dim - 1
    factors = cg.zeeman_decompose(f, q, tol=cfg.tol("decompose", args.tol))
    _emit_json(ser.zeeman_to_obj(factors), args.out)
    return 0


def cmd_group_random_element(args, cfg):
    f = cg.random_causal_element(args.q, args.length, args.seed)
    _emit_json(ser.affine_map_to_obj(f), args.out)
    return 0


# events subcommands

def cmd_events_sprinkle(args, cfg):
    lo, hi = _parse_box(args.box, args.q)
    e = ev.sprinkle(args.q, args.n, (lo, hi), args.seed, periodic_time=args.periodic_time)
    _emit_json(ser.eventset_to_obj(e), args.out)
    return 0


def _events_input(args):
    return ser.eventset_from_obj(ser.load_json(args.infile))


_REL_KINDS = {
    "chronological": lambda e: ev.chronological_relation(e),
    "causal": lambda e: ev.causal_relation(e),
    "k-closed": lambda e: ev.k_relation(e, "closed"),
    "k-ideal": lambda e: ev.k_relation(e, "ideal"),
}


def cmd_events_relations(args, cfg):
    e = _events_input(args)
    rel = _REL_KINDS[args.kind](e)
    fmt = args.format or cfg.output_format
    if fmt == "csv":
        _emit(ser.relation_to_csv(rel), args.out)
    else:
        _emit_json(ser.relation_to_obj(rel), args.out)
    return 0


def cmd_events_interval(args, cfg):
    e = _events_input(args)
    idx = ev.interval(e, args.a, args.b, variant=args.variant)
    _emit_json({"a": args.a, "b": args.b, "variant": args.variant,
                "indices": [int(i) for i in idx]}, args.out)
    return 0


def cmd_events_hierarchy(args, cfg):
    e = _events_input(args)
    rep = ev.hierarchy_report(e, cap=cfg.cap("witness"))
    payload = dict(rep.flags())
    payload["witnesses"] = {k: [list(p) for p in v] for k, v in rep.witnesses.items()}
    payload["proxy_notes"] = rep.proxy_notes
    _emit_json(payload, args.out)
    return 0


def cmd_events_cone_preserving(args, cfg):
    e = _events_input(args)
    if e.periodic_time is not None:
        raise InputError("cone-preserving checks need a flat sample: an affine "
                         "map does not preserve the time identification")
    f = ser.affine_map_from_obj(ser.load_json(args.map))
    moved = f.apply(e.events)
    lo = moved.min(axis=0) - 1e-9
    hi = moved.max(axis=0) + 1e-9
    moved_set = ev.EventSet(e.q, moved, (lo, hi), periodic_time=None, seed=e.seed)
    r = ev.causal_relation(e)
    s = ev.causal_relation(moved_set)
    ok, witnesses = ev.cone_preserving_check(r, s, np.arange(e.n), cap=cfg.cap("witness"))
    _emit_json({"preserving": ok,
                "witnesses": [[a, diff] for a, diff in witnesses]}, args.out)
    return 0


# poset subcommands

def _poset_input(args):
    return ser.poset_from_obj(ser.load_json(args.infile))


def cmd_poset_make(args, cfg):
    obj = ser.load_json(args.infile)
    rel = ser.relation_from_obj(obj["order"]) if "order" in obj else ser.relation_from_obj(obj)
    p = ps.make_poset(rel)
    _emit_json(ser.poset_to_obj(p), args.out)
    return 0


def cmd_poset_waybelow(args, cfg):
    p = _poset_input(args)
    wb = ps.way_below(p, cap=cfg.cap("enum"))
    _emit_json({"way_below": ser.relation_to_obj(wb),
                "compact": [int(i) for i in ps.compact_elements(wb)]}, args.out)
    return 0


def _emit_basis(p, kind, args, cfg):
    basis = ps.basis_sets(p, kind, f_max=getattr(args, "f_max", 2), cap=cfg.cap("enum"))
    _emit_json({"kind": basis.kind, "sets": [list(s) for s in basis.sets]}, args.out)
    return 0


def cmd_poset_scott(args, cfg):
    return _emit_basis(_poset_input(args), "scott", args, cfg)


def cmd_poset_lawson(args, cfg):
    return _emit_basis(_poset_input(args), "lawson", args, cfg)


def cmd_poset_interval_basis(args, cfg):
    return _emit_basis(_poset_input(args), "interval", args, cfg)


def cmd_poset_bicontinuous(args, cfg):
    p = _poset_input(args)
    _emit_json({"bicontinuous": ps.is_bicontinuous(p, cap=cfg.cap("enum")),
                "continuous": ps.is_continuous(p, cap=cfg.cap("enum"))}, args.out)
    return 0


def cmd_poset_bridge(args, cfg):
    e = _events_input(args)
    rep = ps.causal_bridge_checks(e, f_max=args.f_max, cap=cfg.cap("bridge"))
    _emit_json({
        "n": rep.n,
        "k_is_partial_order": rep.k_is_partial_order,
        "interval_matches_alexandrov": rep.interval_matches_alexandrov,
        "chronological_within_k": rep.chronological_within_k,
        "lawson_sets_covered": rep.lawson_sets_covered,
        "witnesses": {k: [list(map(_jsonable, pair)) for pair in v]
                      for k, v in rep.witnesses.items()},
        "notes": rep.notes,
    }, args.out)
    return 0


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(i) for i in x]
    if isinstance(x, (int, np.integer)):
        return int(x)
    return x


def build_parser():
    parser = _Parser(prog="causalcones", description=__doc__)
    parser.add_argument("--config", help="JSON config file (tolerances, caps, output_format)")
    top = parser.add_subparsers(dest="group", required=True)

    def sub(group, name, func, **kw):
        p = group.add_parser(name, **kw)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write the artifact here instead of stdout")
        return p

    cone = parser_group(top, "cone")
    p = sub(cone, "make", cmd_cone_make)
    _cone_flags(p)
    p = sub(cone, "member", cmd_cone_member)
    _cone_flags(p)
    p.add_argument("--x", required=True, help="probe vector, comma-separated")
    p.add_argument("--tol", type=float)
    p = sub(cone, "dual", cmd_cone_dual)
    _cone_flags(p)
    p = sub(cone, "classify", cmd_cone_classify)
    _cone_flags(p)
    p.add_argument("--tol", type=float)

    lor = parser_group(top, "lorentz")
    p = sub(lor, "classify", cmd_lorentz_classify)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--tol", type=float)
    p = sub(lor, "boost", cmd_lorentz_boost)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--axis", type=int, default=1)
    p = sub(lor, "decompose", cmd_lorentz_decompose)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--tol", type=float)
    p = sub(lor, "check-map", cmd_lorentz_check_map)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--tol", type=float)

    grp = parser_group(top, "group")
    p = sub(grp, "is-causal", cmd_group_is_causal)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True)
    p = sub(grp, "zeeman", cmd_group_zeeman)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--tol", type=float)
    p = sub(grp, "random-element", cmd_group_random_element)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    evt = parser_group(top, "events")
    p = sub(evt, "sprinkle", cmd_events_sprinkle)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--box", required=True, help="lo then hi corner, comma-separated")
    p.add_argument("--periodic-time", type=float, dest="periodic_time")
    p = sub(evt, "relations", cmd_events_relations)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--kind", choices=sorted(_REL_KINDS), required=True)
    p.add_argument("--format", choices=("json", "csv"))
    p = sub(evt, "interval", cmd_events_interval)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--variant", choices=("open", "closed"), default="open")
    p = sub(evt, "hierarchy", cmd_events_hierarchy)
    p.add_argument("--in", dest="infile", required=True)
    p = sub(evt, "cone-preserving", cmd_events_cone_preserving)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--map", required=True, help="affine map JSON file")

    pos = parser_group(top, "poset")
    p = sub(pos, "make", cmd_poset_make)
    p.add_argument("--in", dest="infile", required=True)
    p = sub(pos, "waybelow", cmd_poset_waybelow)
    p.add_argument("--in", dest="infile", required=True)
    p = sub(pos, "scott", cmd_poset_scott)
    p.add_argument("--in", dest="infile", required=True)
    p = sub(pos, "lawson", cmd_poset_lawson)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--f-max", dest="f_max", type=int, default=2)
    p = sub(pos, "interval-basis", cmd_poset_interval_basis)
    p.add_argument("--in", dest="infile", required=True)
    p = sub(pos, "bicontinuous", cmd_poset_bicontinuous)
    p.add_argument("--in", dest="infile", required=True)
    p = sub(pos, "bridge", cmd_poset_bridge)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--f-max", dest="f_max", type=int, default=1)

    return parser


def parser_group(top, name):
    p = top.add_parser(name)
    g = p.add_subparsers(dest="command", required=True)
    return g


def _fail(kind, message, code):
    sys.stderr.write(ser.canonical_json({"error": message, "kind": kind}) + "\n")
    return code


def main(argv=None):
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except InputError as exc:
        return _fail("input", str(exc), 1)
    except CapacityError as exc:
        return _fail("capacity", str(exc), 2)
    except NumericError as exc:
        return _fail("numeric", str(exc), 2)
    except BrokenPipeError:
        return 0


def _cone_flags(p):
    p.add_argument("--in", dest="infile", help="cone JSON file")
    p.add_argument("--dim", type=int)
    p.add_argument("--generators", help="semicolon-separated comma vectors: '1,1;1,-1'")


if __name__ == "__main__":
    sys.exit(main())
