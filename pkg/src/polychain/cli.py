"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 size guard exceeded, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .polytope import GuardExceeded
from .simplicial import InvariantViolation

EXIT_OK, EXIT_INPUT, EXIT_GUARD, EXIT_INVARIANT = 0, 2, 3, 4


def _emit(args, obj, inputs=(), csv=None):
    """Write the JSON artifact (or print it) and the manifest next to it."""
    text = io.dumps(obj)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if csv is not None and getattr(args, "csv", None):
        header, rows = csv
        io.write_csv(args.csv, header, rows)
    anchor = args.output or getattr(args, "csv", None)
    if anchor:
        params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output", "csv")}
        man = io.RunManifest.build(args.command, inputs, params)
        io.write_json(str(anchor) + ".manifest.json", man.to_json())


def _coeff(text):
    from .cohomology import parse_ring
    return parse_ring(text)


# --- verbs ----------------------------------------------------------------------

def cmd_tri(args):
    from .polytope import triangulate_polytope
    P = io.load_polytope(args.polytope)
    T = triangulate_polytope(P)
    out = T.to_json()
    out["volume"] = P.volume()
    _emit(args, out, [args.polytope])


def cmd_refine(args):
    from .embed import embed, locality_report
    K = io.load_complex(args.complex)
    polys = [io.load_polytope(p) for p in args.polytopes]
    R = embed(K, polys)
    affected = [t for pl in R.plans for t in pl.affected]
    out = {
        "complex": io.complex_to_json(R.complex),
        "plans": [pl.to_json() for pl in R.plans],
        "locality": locality_report(K, R.complex, affected),
    }
    _emit(args, out, [args.complex, *args.polytopes])


def cmd_homology(args):
    from .cohomology import cohomology, homology
    K = io.load_complex(args.complex)
    p = _coeff(args.coeff)
    H = homology(K, p)
    out = dict(H.as_dict())
    out["ring"] = H.ring
    if args.generators:
        groups, bases = cohomology(K, p)
        out["cohomology"] = groups.as_dict()
        if bases is not None:
            out["generators"] = {str(b.degree): [{"order": o, "cochain": g.to_json()}
                                                 for g, o in zip(b.generators, b.orders)] for b in bases}
    _emit(args, out, [args.complex])


def cmd_flatnorm(args):
    from .flatnorm import flat_norm_bruteforce, flat_norm_lp
    K = io.load_complex(args.complex, close=True)
    T = io.load_chain(K, args.chain)
    D = flat_norm_bruteforce(T, K, args.brute) if args.brute else flat_norm_lp(T, K)
    out = D.to_json()
    row = [float(D.value), float(D.mass_R), float(D.mass_S), D.status]
    _emit(args, out, [args.complex, args.chain], csv=(["value", "massR", "massS", "status"], [row]))


def cmd_steenrod(args):
    from . import steenrod as st
    if args.action == "reduce":
        w = st.parse_word(args.word, args.p)
        e = st.adem_reduce(w, args.p)
        out = {"p": args.p, "word": st.format_word(w, args.p), "degree": st.degree(w, args.p),
               "admissible": [{"word": st.format_word(m, args.p), "coeff": c} for m, c in e.terms.items()],
               "text": str(e)}
        if args.text:
            sys.stdout.write(f"{out['word']} = {out['text']}\n")
        _emit(args, out)
        return
    if args.complex is None:
        raise io.InputError("steenrod apply needs a complex file")
    if args.mod != 2:
        raise io.InputError("cochain-level operations are implemented mod 2")
    from .cohomology import ModPCohomology
    K = io.load_complex(args.complex)
    H = ModPCohomology(K, 2)
    basis = H.basis(args.degree)
    if not 0 <= args.class_id < len(basis):
        raise io.InputError(f"class id {args.class_id} out of range (H^{args.degree} has dimension {len(basis)})")
    word = st.parse_word(args.word, 2) if args.word else (args.i,)
    c = st.apply_word(word, basis[args.class_id])
    coords = list(H.coordinates(c)) if c.degree <= K.dim else []
    out = {"degree": c.degree, "word": st.format_word(word, 2), "class": args.class_id,
           "coordinates": coords, "zero": not any(coords), "cochain": c.to_json()}
    if args.text:
        sys.stdout.write(f"{out['word']} x_{args.class_id} = {coords}\n")
    _emit(args, out, [args.complex])


def cmd_bockstein(args):
    from .cohomology import ModPCohomology, bockstein
    K = io.load_complex(args.complex)
    H = ModPCohomology(K, args.p)
    basis = H.basis(args.degree)
    if not 0 <= args.class_id < len(basis):
        raise io.InputError(f"class id {args.class_id} out of range (dimension {len(basis)})")
    b = bockstein(basis[args.class_id])
    coords = list(H.coordinates(b)) if b.degree <= K.dim else []
    out = {"p": args.p, "degree": args.degree, "class": args.class_id, "coordinates": coords,
           "zero": not any(coords), "cochain": b.to_json()}
    _emit(args, out, [args.complex])


def cmd_profile(args):
    from . import deform as df
    params = df.ProfileParams(args.mu, args.delta_a, args.eta)
    t = np.linspace(0.0, args.t_max or 1.25 * args.eta, args.points)
    if args.kind == "phi":
        vals = df.phi_profile(params, t)
        slopes = np.diff(vals) / np.diff(t)
    else:
        vals = df.smooth_profile(params, t)
        slopes = df.smooth_profile(params, t, derivative=True)
    out = {"kind": args.kind, "mu": args.mu, "delta_a": args.delta_a, "eta": args.eta,
           "points": args.points, "max_slope": float(np.max(slopes)), "slope_bound": params.slope_bound}
    rows = [[float(a), float(b)] for a, b in zip(t, vals)]
    _emit(args, out, csv=(["t", args.kind], rows))


def cmd_experiment(args):
    from . import deform as df
    if args.kind == "squash":
        Z = df.cube_chain(args.m, args.n)
        res = [df.mass_contraction_experiment(Z, args.k, g, delta=args.delta, eta=args.eta, level=args.level)
               for g in args.gamma]
        out = {"m": args.m, "k": args.k, "results": [r.to_json() for r in res]}
        if len(res) >= 2:
            out["fitted_exponent"] = df.fit_exponent(res)
        rows = [[r.gamma, r.ratio, r.bound] for r in res]
        _emit(args, out, csv=(["gamma", "ratio", "bound"], rows))
        return
    if args.complex is None:
        raise io.InputError("experiment audit needs a complex file")
    K = io.load_complex(args.complex)
    delta = args.delta_bar if args.delta_bar else df.default_delta(K)
    N = df.GradedNeighborhood(K, args.j if args.j is not None else K.dim - 1, delta, args.C0)
    rep = df.boundary_regularity_audit(N, samples=args.samples, rng=np.random.default_rng(args.seed),
                                       adversarial=args.adversarial)
    out = rep.to_json()
    out.update({"C0": N.C0, "delta": N.delta, "j": N.j})
    _emit(args, out, [args.complex])


def cmd_subdivide(args):
    from .simplicial import barycentric_subdivision
    K = io.load_complex(args.complex)
    _emit(args, io.complex_to_json(barycentric_subdivision(K)), [args.complex])


def cmd_dual(args):
    from .cohomology import homology
    from .simplicial import full_subcomplex_complement
    K = io.load_complex(args.complex)
    D = full_subcomplex_complement(K, args.j)
    out = {"j": args.j, "complex": io.complex_to_json(D), "f_vector": D.f_vector(),
           "euler_characteristic": D.euler_characteristic(), "homology": homology(D).as_dict()}
    _emit(args, out, [args.complex])


def cmd_validate(args):
    data = io.read_json(args.file)
    cdata = io.read_json(args.complex) if args.complex else None
    rep = io.validate_data(data, cdata)
    sys.stdout.write(rep.text())
    if args.output:
        _emit(args, rep.to_json(), [args.file])
    return EXIT_OK if rep.passed else EXIT_INPUT


def cmd_fixture(args):
    from .fixtures import REGISTRY
    if args.name not in REGISTRY:
        raise io.InputError(f"unknown fixture {args.name}; choose from {', '.join(sorted(REGISTRY))}")
    obj = REGISTRY[args.name]()
    K = obj[0] if isinstance(obj, tuple) else obj
    _emit(args, io.complex_to_json(K))


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polychain", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--seed", type=int, default=0, help="seed for every sampling RNG stream")
    sub = ap.add_subparsers(dest="command", required=True, metavar="VERB")

    def verb(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("-o", "--output", help="write the JSON artifact here (default: stdout)")
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        p.set_defaults(func=func)
        return p

    p = verb("tri", cmd_tri, "triangulate a convex polytope")
    p.add_argument("polytope")

    p = verb("refine", cmd_refine, "refine a complex so polytopes become skeleton unions")
    p.add_argument("complex")
    p.add_argument("polytopes", nargs="+")

    p = verb("homology", cmd_homology, "homology groups and cohomology generators")
    p.add_argument("complex")
    p.add_argument("--coeff", default="z", choices=["z", "z2", "z3", "z5"])
    p.add_argument("--no-generators", dest="generators", action="store_false")

    p = verb("flatnorm", cmd_flatnorm, "simplicial flat norm of a chain")
    p.add_argument("complex")
    p.add_argument("chain")
    p.add_argument("--brute", type=int, default=0, metavar="B",
                   help="exhaustive search with |coefficients| <= B instead of the LP")
    p.add_argument("--csv")

    p = verb("steenrod", cmd_steenrod, "Adem reduction and Steenrod squares on classes")
    p.add_argument("action", choices=["reduce", "apply"])
    p.add_argument("complex", nargs="?")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--word", default="")
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--mod", type=int, default=2)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--class", dest="class_id", type=int, default=0)
    p.add_argument("--text", action="store_true", help="also print a one-line summary")

    p = verb("bockstein", cmd_bockstein, "Bockstein of a mod-p cohomology class")
    p.add_argument("complex")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--class", dest="class_id", type=int, default=0)

    p = verb("profile", cmd_profile, "sample the phi or psi profile")
    p.add_argument("kind", choices=["phi", "psi"])
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--delta-a", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--points", type=int, default=1001)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--csv")

    p = verb("experiment", cmd_experiment, "mass-contraction or neighbourhood-audit experiments")
    p.add_argument("kind", choices=["squash", "audit"])
    p.add_argument("complex", nargs="?")
    p.add_argument("--gamma", type=float, nargs="+", default=[0.5, 0.25, 0.125])
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--n", type=int, default=4, help="cube cells per side for the test chain")
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--level", type=int, default=6)
    p.add_argument("--C0", type=int, default=4)
    p.add_argument("--delta-bar", type=str, default=None)
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--adversarial", action="store_true")
    p.add_argument("--csv")

    p = verb("subdivide", cmd_subdivide, "barycentric subdivision")
    p.add_argument("complex")

    p = verb("dual", cmd_dual, "complement of Bs(K^j) in Bs(K)")
    p.add_argument("complex")
    p.add_argument("--j", type=int, default=0)

    p = verb("validate", cmd_validate, "check a complex, chain or polytope file")
    p.add_argument("file")
    p.add_argument("--complex", help="host complex for a chain file")

    p = verb("fixture", cmd_fixture, "write a built-in fixture complex")
    p.add_argument("name")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        rc = args.func(args)
        return EXIT_OK if rc is None else rc
    except GuardExceeded as e:
        sys.stderr.write(f"guard exceeded: {e}\n")
        return EXIT_GUARD
    except (InvariantViolation, AssertionError) as e:
        sys.stderr.write(f"invariant violation: {e}\n")
        return EXIT_INVARIANT
    except (ValueError, OSError, KeyError) as e:
        sys.stderr.write(f"input error: {e}\n")
        return EXIT_INPUT
    except RuntimeError as e:
        sys.stderr.write(f"internal error: {e}\n")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
