"""File formats: JSON complexes, chains and polytopes with "p/q" rationals,
OFF surfaces, deterministic dumps and run manifests."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__, exact
from .chains import Chain, ChainError, chain_from_json
from .polytope import Polytope
from .simplicial import ComplexError, SimplicialComplex


class InputError(ValueError):
    """Malformed or inconsistent input file."""


# --- deterministic serialization ---------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return exact.q_str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, mpmath.mpf):
        return _Float(float(obj))
    if hasattr(obj, "item"):  # numpy scalar
        return _plain(obj.item())
    if isinstance(obj, float):
        return _Float(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


class _Float(float):
    pass


def fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def _encode(obj, indent=0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, _Float):
        return fmt_float(obj)
    return json.dumps(obj)


def dumps(obj) -> str:
    """JSON text with sorted keys and floats at 17 significant digits."""
    return _encode(_plain(obj)) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- complexes ----------------------------------------------------------------

def complex_to_json(K: SimplicialComplex) -> dict:
    out = {"dim": K.dim, "simplices": {str(k): [list(s) for s in K.simplices(k)] for k in range(K.dim + 1)}}
    if K.coords is not None:
        out["vertices"] = [[exact.q_str(c) for c in p] for p in K.coords]
    else:
        out["vertices"] = K.nverts
    return out


def complex_from_json(data, close: bool = False) -> SimplicialComplex:
    """Parse the complex format.  ``vertices`` is either a list of rational
    coordinate rows or a bare vertex count.  With ``close=False`` the listed
    simplices must already be closed under taking faces."""
    if not isinstance(data, dict) or "simplices" not in data:
        raise InputError("complex needs a 'simplices' field")
    raw = data["simplices"]
    try:
        if isinstance(raw, dict):
            sims = [tuple(int(v) for v in s) for k in sorted(raw, key=int) for s in raw[k]]
        else:
            sims = [tuple(int(v) for v in s) for s in raw]
    except (TypeError, ValueError) as e:
        raise InputError(f"bad simplex list: {e}") from e
    verts = data.get("vertices")
    coords = None
    if isinstance(verts, list):
        try:
            coords = [exact.point(p) for p in verts]
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad vertex coordinates: {e}") from e
    elif verts is not None and not isinstance(verts, int):
        raise InputError("'vertices' must be a coordinate list or a count")
    if isinstance(raw, dict):
        for k, group in raw.items():
            for s in group:
                if len(s) != int(k) + 1:
                    raise InputError(f"simplex {s} listed under dimension {k}")
    K = SimplicialComplex(sims, coords=coords, close=close)
    if isinstance(verts, int) and K.nverts > verts:
        raise InputError("simplex refers to a vertex beyond the declared count")
    if "dim" in data and int(data["dim"]) != K.dim:
        raise InputError(f"declared dim {data['dim']} but simplices reach {K.dim}")
    return K


def read_off(path) -> SimplicialComplex:
    """Triangle/polygon surfaces in OFF; polygons are fanned from their first
    vertex."""
    tokens = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise InputError("not an OFF file")
    try:
        nv, nf = int(tokens[1]), int(tokens[2])
        pos = 4
        coords = []
        for _ in range(nv):
            coords.append([exact.to_q(t) for t in tokens[pos:pos + 3]])
            pos += 3
        sims = []
        for _ in range(nf):
            n = int(tokens[pos])
            face = [int(t) for t in tokens[pos + 1:pos + 1 + n]]
            pos += 1 + n
            for i in range(1, n - 1):
                sims.append((face[0], face[i], face[i + 1]))
    except (IndexError, ValueError) as e:
        raise InputError(f"truncated or malformed OFF data: {e}") from e
    return SimplicialComplex(sims, coords=coords)


def load_complex(path, close: bool = False) -> SimplicialComplex:
    if str(path).lower().endswith(".off"):
        return read_off(path)
    return complex_from_json(read_json(path), close=close)


def load_chain(K: SimplicialComplex, path) -> Chain:
    return chain_from_json(K, read_json(path))


def polytope_from_json(data, check: bool = True) -> Polytope:
    if not isinstance(data, dict) or "points" not in data:
        raise InputError("polytope needs a 'points' field")
    try:
        pts = [exact.point(p) for p in data["points"]]
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise InputError(f"bad point coordinates: {e}") from e
    return Polytope(pts, check=check)


def load_polytope(path, check: bool = True) -> Polytope:
    return polytope_from_json(read_json(path), check=check)


def detect_kind(data) -> str:
    if isinstance(data, dict):
        if "terms" in data:
            return "chain"
        if "points" in data and "simplices" not in data:
            return "polytope"
        if "simplices" in data:
            return "complex"
    raise InputError("cannot tell whether the file holds a complex, chain or polytope")


# --- validation ---------------------------------------------------------------

@dataclass
class ValidationReport:
    kind: str
    checks: list = field(default_factory=list)  # (name, ok, detail)

    def add(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def text(self) -> str:
        lines = [f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "")
                 for name, ok, detail in self.checks]
        lines.append(f"{self.kind}: {'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"kind": self.kind, "passed": self.passed,
                "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in self.checks]}


def validate_data(data, complex_data=None) -> ValidationReport:
    kind = detect_kind(data)
    rep = ValidationReport(kind)
    if kind == "complex":
        try:
            K = complex_from_json(data, close=False)
            rep.add("face closure", True)
            rep.add("vertex coordinates", K.coords is None or len({len(c) for c in K.coords}) <= 1)
        except ComplexError as e:
            msg = str(e)
            rep.add("face closure" if "face closure" in msg else "structure", False, msg)
        except InputError as e:
            rep.add("structure", False, str(e))
    elif kind == "chain":
        terms = data.get("terms", [])
        zero = [t for t in terms if t.get("coeff") == 0]
        rep.add("nonzero coefficients", not zero, f"{len(zero)} zero terms" if zero else "")
        ints = all(isinstance(t.get("coeff"), int) for t in terms)
        rep.add("integer coefficients", ints)
        dims = {len(t.get("simplex", [])) - 1 for t in terms}
        rep.add("uniform dimension", dims <= {data.get("dim")}, "" if dims <= {data.get("dim")} else f"found {sorted(dims)}")
        if complex_data is not None and not zero:
            try:
                chain_from_json(complex_from_json(complex_data, close=True), data)
                rep.add("supported on complex", True)
            except (ChainError, ComplexError) as e:
                rep.add("supported on complex", False, str(e))
    else:
        try:
            P = polytope_from_json(data, check=False)
            ext = Polytope.hull(P.points)
            rep.add("extremality", len(ext.points) == len(P.points),
                    "" if len(ext.points) == len(P.points) else f"{len(P.points) - len(ext.points)} non-extremal points")
        except (InputError, ValueError) as e:
            rep.add("structure", False, str(e))
    return rep


# --- manifests ----------------------------------------------------------------

def digest_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    """Provenance record written next to every artifact.  Timing is left out
    unless asked for, since it would break byte-determinism."""
    command: str
    inputs: dict
    parameters: dict
    version: str = __version__
    timing: float | None = None

    @classmethod
    def build(cls, command, input_paths, parameters, timing=None) -> "RunManifest":
        inputs = {str(p): digest_file(p) for p in input_paths if p is not None}
        return cls(command, inputs, parameters, timing=timing)

    def to_json(self) -> dict:
        return {"command": self.command, "inputs": self.inputs, "parameters": self.parameters,
                "tool_version": self.version, "timing_seconds": self.timing}
