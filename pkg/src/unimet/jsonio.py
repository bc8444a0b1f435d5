"""JSON wire formats for every object the command line reads or writes.

Scalars travel as exact strings ("p/q", or "p" for integers; decimal
strings parse too).  Floats inside data files are rejected so rounding
error never enters the exact layer.  Point labels map JSON arrays to
tuples recursively; rational labels serialize to their scalar strings and
come back as strings, which is fine because labels are opaque identifiers.

Shapes:
  FiniteMetricSpace   {"points": [label], "dist": [[scalar]], "pseudo"?: bool}
  map                 {"pairs": [[srcIdx, tgtIdx]]} (or a bare image array)
  Cover               {"ground": n, "sets": [[indices]]}
  FundamentalSequence {"covers": [Cover]}
  Surjection          {"class_of": [classIdx per point]}
  NormedPointSet      {"dim": k, "points": [[scalar]], "norm": "sup"|"l1"}
  SequencePoint       {"support": {"idx": scalar}, "tail": scalar}
  Cubohedron          {"level": n, "cubes": [{"base": support, "extent": [i]}]}
  truncation          {"levels": [FiniteMetricSpace], "bonds": [map]}
  ladder              truncation plus {"cross": [map], "alphas": [scalar],
                      "betas": [scalar]} and optional {"target": truncation,
                      "indices": [n_i]}

All malformed input raises StructuralError, never a bare JSON or key error.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .conemodels import NormedPointSet
from .covers import Cover, FundamentalSequence
from .cubohedra import Cube, Cubohedron
from .errors import StructuralError
from .invlim import InverseSequenceTruncation, LadderData, inverse_sequence, ladder
from .quotients import Surjection
from .scalars import Scalar, as_scalar, format_scalar
from .sequences import SequencePoint
from .spaces import FiniteMetricSpace


# ---- primitives ----


def scalar_from_json(value) -> Scalar:
    if isinstance(value, bool) or isinstance(value, float):
        raise StructuralError(
            f"scalars must be exact strings or integers, got {value!r}"
        )
    try:
        return as_scalar(value)
    except (ValueError, TypeError) as exc:
        raise StructuralError(str(exc)) from exc


def scalar_to_json(value: Scalar) -> str:
    return format_scalar(value)


def label_from_json(value):
    if isinstance(value, list):
        return tuple(label_from_json(v) for v in value)
    if isinstance(value, float):
        raise StructuralError(f"float label {value!r}; use a scalar string")
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    raise StructuralError(f"unsupported label {value!r}")


def label_to_json(value):
    if isinstance(value, tuple):
        return [label_to_json(v) for v in value]
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    raise StructuralError(f"unsupported label {value!r}")


def _expect(obj, key: str, what: str):
    if not isinstance(obj, dict):
        raise StructuralError(f"{what} must be a JSON object")
    if key not in obj:
        raise StructuralError(f"{what} is missing the {key!r} key")
    return obj[key]


def _index_list(value, what: str) -> list:
    if not isinstance(value, list) or not all(
        isinstance(i, int) and not isinstance(i, bool) for i in value
    ):
        raise StructuralError(f"{what} must be an array of integers")
    return list(value)


# ---- spaces and maps ----


def space_from_json(obj) -> FiniteMetricSpace:
    points = _expect(obj, "points", "a metric space")
    dist = _expect(obj, "dist", "a metric space")
    if not isinstance(points, list) or not isinstance(dist, list):
        raise StructuralError("space points and dist must be arrays")
    labels = tuple(label_from_json(p) for p in points)
    rows = []
    for row in dist:
        if not isinstance(row, list):
            raise StructuralError("dist must be an array of arrays")
        rows.append(tuple(scalar_from_json(v) for v in row))
    pseudo = obj.get("pseudo", False)
    if not isinstance(pseudo, bool):
        raise StructuralError("pseudo must be a boolean")
    try:
        return FiniteMetricSpace(labels, tuple(rows), pseudo)
    except StructuralError:
        raise
    except ValueError as exc:
        raise StructuralError(str(exc)) from exc


def space_to_json(space: FiniteMetricSpace) -> dict:
    out = {
        "points": [label_to_json(p) for p in space.points],
        "dist": [[scalar_to_json(v) for v in row] for row in space.dist],
    }
    if space.pseudo:
        out["pseudo"] = True
    return out


def mapping_from_json(obj) -> dict:
    """A map as {"pairs": [[src, tgt]]} or a bare array of images."""
    if isinstance(obj, list):
        images = _index_list(obj, "a map image array")
        return {i: t for i, t in enumerate(images)}
    pairs = _expect(obj, "pairs", "a map")
    if not isinstance(pairs, list):
        raise StructuralError("map pairs must be an array")
    out: dict = {}
    for pair in pairs:
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in pair)
        ):
            raise StructuralError(f"map pair {pair!r} must be [srcIdx, tgtIdx]")
        if pair[0] in out:
            raise StructuralError(f"map defines source index {pair[0]} twice")
        out[pair[0]] = pair[1]
    return out


def mapping_to_json(mapping) -> dict:
    if isinstance(mapping, dict):
        items = sorted(mapping.items())
    else:
        items = list(enumerate(mapping))
    return {"pairs": [[s, t] for s, t in items]}


def subset_from_json(obj) -> tuple:
    return tuple(sorted(set(_index_list(obj, "a subset"))))


# ---- covers ----


def cover_from_json(obj) -> Cover:
    ground = _expect(obj, "ground", "a cover")
    sets = _expect(obj, "sets", "a cover")
    if not isinstance(ground, int) or isinstance(ground, bool):
        raise StructuralError("cover ground must be an integer")
    if not isinstance(sets, list):
        raise StructuralError("cover sets must be an array")
    members = tuple(tuple(_index_list(member, "a cover member")) for member in sets)
    try:
        return Cover(ground, members)
    except StructuralError:
        raise
    except ValueError as exc:
        raise StructuralError(str(exc)) from exc


def cover_to_json(cover: Cover) -> dict:
    return {"ground": cover.ground, "sets": [list(m) for m in cover.members]}


def fundamental_sequence_from_json(obj) -> FundamentalSequence:
    covers = _expect(obj, "covers", "a fundamental sequence")
    if not isinstance(covers, list) or not covers:
        raise StructuralError("a fundamental sequence needs a nonempty covers array")
    levels = tuple(cover_from_json(c) for c in covers)
    return FundamentalSequence(levels[0].ground, levels)


def fundamental_sequence_to_json(seq: FundamentalSequence) -> dict:
    return {"covers": [cover_to_json(c) for c in seq.levels]}


def surjection_from_json(obj, space: FiniteMetricSpace) -> Surjection:
    class_of = _index_list(_expect(obj, "class_of", "a surjection"), "class_of")
    count = max(class_of) + 1 if class_of else 0
    return Surjection(space, count, tuple(class_of))


def surjection_to_json(sur: Surjection) -> dict:
    return {"class_of": list(sur.class_of)}


# ---- normed points, sequence points, cube complexes ----


def normed_point_set_from_json(obj) -> NormedPointSet:
    dim = _expect(obj, "dim", "a normed point set")
    points = _expect(obj, "points", "a normed point set")
    norm = obj.get("norm", "sup")
    if not isinstance(points, list):
        raise StructuralError("normed point set points must be an array")
    vectors = []
    for p in points:
        if not isinstance(p, list):
            raise StructuralError("each point must be a coordinate array")
        vectors.append(tuple(scalar_from_json(c) for c in p))
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise StructuralError("dim must be an integer")
    if not isinstance(norm, str):
        raise StructuralError("norm must be a string")
    return NormedPointSet(dim, tuple(vectors), norm)


def normed_point_set_to_json(points: NormedPointSet) -> dict:
    return {
        "dim": points.dim,
        "points": [[scalar_to_json(c) for c in p] for p in points.points],
        "norm": points.norm,
    }


def _support_from_json(obj, what: str) -> dict:
    if not isinstance(obj, dict):
        raise StructuralError(f"{what} must be an object of index: scalar")
    out = {}
    for key, value in obj.items():
        try:
            idx = int(key)
        except ValueError as exc:
            raise StructuralError(f"{what} index {key!r} is not an integer") from exc
        if idx < 0:
            raise StructuralError(f"{what} index {idx} must be nonnegative")
        out[idx] = scalar_from_json(value)
    return out


def _support_to_json(pairs) -> dict:
    return {str(i): scalar_to_json(v) for i, v in sorted(pairs)}


def sequence_point_from_json(obj) -> SequencePoint:
    support = _support_from_json(_expect(obj, "support", "a sequence point"), "support")
    tail = scalar_from_json(obj.get("tail", 0))
    return SequencePoint.from_dict(support, tail)


def sequence_point_to_json(point: SequencePoint) -> dict:
    return {
        "support": _support_to_json(point.support),
        "tail": scalar_to_json(point.tail),
    }


def cubohedron_from_json(obj) -> Cubohedron:
    level = _expect(obj, "level", "a cube complex")
    cubes = _expect(obj, "cubes", "a cube complex")
    if not isinstance(level, int) or isinstance(level, bool):
        raise StructuralError("complex level must be an integer")
    if not isinstance(cubes, list):
        raise StructuralError("cubes must be an array")
    built = []
    for cube in cubes:
        base = _support_from_json(_expect(cube, "base", "a cube"), "cube base")
        extent = _index_list(_expect(cube, "extent", "a cube"), "cube extent")
        built.append(Cube(tuple(sorted(base.items())), tuple(extent)))
    try:
        return Cubohedron(level, tuple(built))
    except StructuralError:
        raise
    except ValueError as exc:
        raise StructuralError(str(exc)) from exc


def cubohedron_to_json(complex_: Cubohedron) -> dict:
    return {
        "level": complex_.level,
        "cubes": [
            {"base": _support_to_json(c.base), "extent": list(c.extent)}
            for c in complex_.cubes
        ],
    }


# ---- truncations and ladders ----


def truncation_from_json(obj) -> InverseSequenceTruncation:
    levels = _expect(obj, "levels", "a truncation")
    bonds = _expect(obj, "bonds", "a truncation")
    if not isinstance(levels, list) or not isinstance(bonds, list):
        raise StructuralError("truncation levels and bonds must be arrays")
    spaces = [space_from_json(level) for level in levels]
    maps = [mapping_from_json(bond) for bond in bonds]
    return inverse_sequence(spaces, maps)


def truncation_to_json(truncation: InverseSequenceTruncation) -> dict:
    return {
        "levels": [space_to_json(level) for level in truncation.levels],
        "bonds": [mapping_to_json(bond) for bond in truncation.bonds],
    }


def ladder_from_json(obj) -> LadderData:
    """Ladder file: the truncation keys plus cross maps and budgets.

    Without a "target" key the ladder runs against the file's own
    truncation (cross maps perturb the levels in place); "alphas" omitted
    means measured defects, "betas" omitted means the per-level defaults.
    """
    source = truncation_from_json(obj)
    target = truncation_from_json(obj["target"]) if "target" in obj else source
    cross_raw = _expect(obj, "cross", "a ladder")
    if not isinstance(cross_raw, list):
        raise StructuralError("ladder cross maps must be an array")
    cross = [mapping_from_json(m) for m in cross_raw]
    indices: Optional[tuple] = None
    if "indices" in obj:
        indices = tuple(_index_list(obj["indices"], "ladder indices"))
    alphas = None
    if "alphas" in obj:
        if not isinstance(obj["alphas"], list):
            raise StructuralError("ladder alphas must be an array")
        alphas = [scalar_from_json(a) for a in obj["alphas"]]
    betas = None
    if "betas" in obj:
        if not isinstance(obj["betas"], list):
            raise StructuralError("ladder betas must be an array")
        betas = [scalar_from_json(b) for b in obj["betas"]]
    return ladder(source, target, cross, indices=indices, alphas=alphas, betas=betas)


# ---- file plumbing ----


def parse_document(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"invalid JSON: {exc}") from exc


def load_document(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return parse_document(handle.read())
    except OSError as exc:
        raise StructuralError(f"cannot read {path}: {exc}") from exc
