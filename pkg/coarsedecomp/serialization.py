# coarsedecomp/serialization.py

"""
serialization.py

Reading and writing the JSON documents of the toolkit: spaces, group specs,
norms, certificates, exactness witnesses, complexes and reports.

Documents are written with sorted keys and a two-space indent, so equal
objects give byte-identical files. Rationals are "p/q" strings and infinity
is "inf". Certificates and witnesses refer to points by their index in the
ambient space's point order. Bundled fixtures live in ``coarsedecomp.data``.
"""

import importlib.resources
import json
import logging
from pathlib import Path

from .decomposition import DecompositionCertificate, DecompositionStep, GameRound
from .errors import CoarseDecompError, MalformedCertificateError, SerializationError
from .groups import MatrixGroup, ball, group_from_json
from .matrices import MatrixOverRing, unipotent_generators, wreath_matrix
from .metric import FiniteMetricSpace, MetricFamily, Subspace, format_rational, to_rational
from .norms import norm_from_json
from .property_a import ExactnessWitness
from .rings import RingSpec, parse_element
from .rips import MetricSimplicialComplex

logger = logging.getLogger(__name__)

FIXTURES = ("path8", "grid5", "glued", "interval100")


def dumps(document):
    """The canonical text of a JSON document."""
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def write_document(document, path=None):
    """
    Writes a document to ``path``, or returns its text when path is None.

    Returns:
        str: The text written.
    """
    text = dumps(document)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.debug("Wrote %s", path)
    return text


def read_document(path):
    """
    Reads a JSON document from a file.

    Raises:
        CoarseDecompError: FILE_NOT_FOUND if the file does not exist.
        SerializationError: If the file is not valid JSON.
    """
    try:
        with open(path, "r", encoding="utf-8") as file:
            return json.load(file)
    except FileNotFoundError as e:
        raise CoarseDecompError("FILE_NOT_FOUND", f"no such file: {path}") from e
    except json.JSONDecodeError as e:
        raise SerializationError(f"{path} is not valid JSON: {e}") from e


def _point_to_json(point):
    if isinstance(point, tuple):
        return [_point_to_json(p) for p in point]
    return point


def _point_from_json(value):
    if isinstance(value, list):
        return tuple(_point_from_json(v) for v in value)
    return value


def point_from_text(text):
    """Reads a point id given on the command line: an integer, a JSON list or a label."""
    try:
        return _point_from_json(json.loads(text))
    except json.JSONDecodeError:
        return text


# Spaces

def space_to_json(space):
    """
    A space as JSON: the generator form for group balls, the distance table otherwise.
    """
    if space.source is not None:
        spec, radius = space.source
        return {"name": space.name, "generator": spec.to_json(),
                "radius": format_rational(radius), "size": len(space)}
    n = len(space)
    dist = {}
    for i in range(n):
        row = space.row(i)
        for j in range(i + 1, n):
            dist[f"{i},{j}"] = format_rational(space.decode(row[j]))
    return {"name": space.name, "points": [_point_to_json(p) for p in space.points],
            "dist": dist, "size": n}


def _coordinate_metric(kind):
    def coords(point):
        return point if isinstance(point, tuple) else (point,)

    if kind == "l1":
        return lambda p, q: sum(abs(a - b) for a, b in zip(coords(p), coords(q)))
    if kind == "linf":
        return lambda p, q: max(abs(a - b) for a, b in zip(coords(p), coords(q)))
    raise SerializationError(f"unknown coordinate metric '{kind}'")


def space_from_json(data):
    """
    Builds a space from JSON.

    Accepted forms: {"fixture": name}, {"generator": <group>, "radius": r},
    {"points": [...], "metric": "l1"|"linf"} for integer coordinates, and
    {"points": [...], "dist": {"i,j": "p/q"}}.

    Raises:
        SerializationError: If a required field is missing.
    """
    try:
        if "fixture" in data:
            return load_fixture(data["fixture"])
        name = data.get("name", "space")
        if "generator" in data:
            return ball(group_spec_from_json(data["generator"]), to_rational(data["radius"]))
        points = [_point_from_json(p) for p in data["points"]]
        if "metric" in data:
            return FiniteMetricSpace.from_function(points, _coordinate_metric(data["metric"]),
                                                   name=name)
        table = {}
        for key, value in data["dist"].items():
            i, j = (int(part) for part in key.split(","))
            table[(i, j)] = to_rational(value)
        return FiniteMetricSpace.from_table(points, table, name=name)
    except KeyError as e:
        raise SerializationError(f"space document is missing the field {e}") from e
    except (TypeError, ValueError) as e:
        if isinstance(e, CoarseDecompError):
            raise
        raise SerializationError(f"unreadable space document: {e}") from e


def load_fixture(name):
    """
    Loads one of the bundled spaces: path8, grid5, glued or interval100.

    Raises:
        CoarseDecompError: UNKNOWN_FIXTURE for other names.
    """
    if name not in FIXTURES:
        raise CoarseDecompError("UNKNOWN_FIXTURE",
                                f"unknown fixture '{name}', expected one of {', '.join(FIXTURES)}")
    resource = importlib.resources.files("coarsedecomp.data") / f"{name}.json"
    with resource.open("r", encoding="utf-8") as file:
        data = json.load(file)
    data.setdefault("name", name)
    return space_from_json(data)


def load_space(ref):
    """A space from a fixture name or a space file path."""
    if ref in FIXTURES:
        return load_fixture(ref)
    return space_from_json(read_document(ref))


# Groups and matrices

def matrix_from_text(text, ring):
    """
    Reads a matrix given as "wreath:n=1,p=X^2", "unipotent:n=2,i=0,j=1,x=X"
    or rows "1,X;0,1".

    Args:
        text (str): The matrix.
        ring (RingSpec or str): Ring of the entries.

    Returns:
        MatrixOverRing: The matrix.
    """
    if isinstance(ring, str):
        ring = RingSpec.parse(ring)
    kind, _, rest = text.partition(":")
    if rest:
        params = dict(item.split("=", 1) for item in rest.split(",") if item)
        if kind == "wreath":
            p = parse_element(params.get("p", "0"), RingSpec("poly", 0, 1))
            return wreath_matrix(int(params.get("n", 0)), p)
        if kind == "unipotent":
            n = int(params.get("n", 2))
            value = parse_element(params.get("x", "X"), ring)
            i, j = int(params.get("i", 0)), int(params.get("j", n - 1))
            pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
            return unipotent_generators(n, [value])[pairs.index((i, j))]
        raise SerializationError(f"unknown matrix form '{kind}'")
    rows = [[parse_element(entry, ring) for entry in row.split(",")]
            for row in text.split(";")]
    return MatrixOverRing(rows)


def group_spec_from_json(data):
    """
    Builds any catalog group from JSON, matrix groups included.

    Matrix groups read {"type": "matrix", "ring": name, "generators": [text],
    "length": [norm]} with generators in the matrix_from_text forms.
    """
    try:
        if data.get("type") != "matrix":
            return group_from_json(data)
        ring = RingSpec.parse(data["ring"])
        generators = tuple(matrix_from_text(text, ring) for text in data["generators"])
        norms = tuple(norm_from_json(norm, ring) for norm in data["length"])
        return MatrixGroup(generators, norms, name=data.get("name", "matrix group"),
                           ring=data["ring"], sources=list(data["generators"]))
    except KeyError as e:
        raise SerializationError(f"group document is missing the field {e}") from e


# Certificates and witnesses

def _indices_to_json(subspace):
    return [int(i) for i in subspace.indices]


def certificate_to_json(cert, space_ref=None):
    """
    A certificate as JSON.

    Args:
        cert (DecompositionCertificate): The transcript.
        space_ref: A fixture name or path to record instead of embedding the space.
    """
    return {
        "ambient": space_ref if space_ref is not None else space_to_json(cert.ambient),
        "initial": [_indices_to_json(member) for member in cert.initial],
        "steps": [{"r": format_rational(round_.r),
                   "members": [{"part0": [_indices_to_json(p) for p in step.part0],
                                "part1": [_indices_to_json(p) for p in step.part1]}
                               for step in round_.steps]}
                  for round_ in cert.rounds],
        "bound": format_rational(cert.bound),
    }


def _ambient_from_json(ref):
    if isinstance(ref, str):
        return load_space(ref)
    return space_from_json(ref)


def _subspace(ambient, indices):
    indices = [int(i) for i in indices]
    if any(i < 0 or i >= len(ambient) for i in indices):
        raise MalformedCertificateError(f"point index out of range in {indices[:5]}")
    return Subspace(ambient, indices)


def certificate_from_json(data, ambient=None):
    """
    Rebuilds a certificate; each round's steps decompose the previous family in order.

    Args:
        data (dict): The certificate document.
        ambient (FiniteMetricSpace): Space to read indices against instead of
            the one the document names. Certificates sharing an ambient
            object can be merged into one strategy tree.

    Raises:
        MalformedCertificateError: For missing fields, bad indices or a step
            count that does not match the family.
    """
    try:
        if ambient is None:
            ambient = _ambient_from_json(data["ambient"])
        initial = data.get("initial")
        family = (MetricFamily([ambient.whole()]) if initial is None
                  else MetricFamily(_subspace(ambient, m) for m in initial))
        start = family
        rounds = []
        for k, entry in enumerate(data["steps"]):
            r = to_rational(entry["r"])
            members = entry["members"]
            if len(members) != len(family):
                raise MalformedCertificateError(
                    f"round {k} has {len(members)} steps for {len(family)} members")
            steps = [DecompositionStep(member, r,
                                       tuple(_subspace(ambient, p) for p in item["part0"]),
                                       tuple(_subspace(ambient, p) for p in item["part1"]))
                     for member, item in zip(family, members)]
            round_ = GameRound(r, steps)
            rounds.append(round_)
            family = round_.next_family()
        return DecompositionCertificate(start, tuple(rounds), to_rational(data["bound"]))
    except KeyError as e:
        raise MalformedCertificateError(f"certificate is missing the field {e}") from e
    except SerializationError as e:
        raise MalformedCertificateError(e.message) from e


def witness_to_json(witness, member, space_ref=None):
    """
    An exactness witness as JSON, with values keyed by point index.

    Args:
        witness (ExactnessWitness): The partition of unity.
        member (Subspace): The points it lives on.
        space_ref: A fixture name or path to record instead of embedding the space.
    """
    return {
        "ambient": space_ref if space_ref is not None else space_to_json(member.ambient),
        "member": _indices_to_json(member),
        "cover": [_indices_to_json(u) for u in witness.cover],
        "phi": [{"piece": k, "values": {str(i): format_rational(v)
                                        for i, v in sorted(values.items())}}
                for k, values in enumerate(witness.phi)],
        "R": format_rational(witness.R),
        "eps": format_rational(witness.eps),
        "B": format_rational(witness.B),
    }


def witness_from_json(data):
    """
    Rebuilds an exactness witness and the member it lives on.

    A document without "member" covers the whole ambient space.

    Returns:
        tuple: (Subspace, ExactnessWitness).

    Raises:
        MalformedCertificateError: For missing fields or bad indices.
    """
    try:
        ambient = _ambient_from_json(data["ambient"])
        member = (ambient.whole() if data.get("member") is None
                  else _subspace(ambient, data["member"]))
        cover = [_subspace(ambient, u) for u in data["cover"]]
        phi = [dict() for _ in cover]
        for entry in data["phi"]:
            piece = int(entry["piece"])
            if not 0 <= piece < len(cover):
                raise MalformedCertificateError(f"phi refers to cover set {piece}")
            phi[piece] = {int(i): to_rational(v) for i, v in entry["values"].items()}
        witness = ExactnessWitness(cover, phi, data["R"], data["eps"], data["B"])
        return member, witness
    except KeyError as e:
        raise MalformedCertificateError(f"witness is missing the field {e}") from e
    except SerializationError as e:
        raise MalformedCertificateError(e.message) from e


# Complexes

def complex_to_json(complex_, space_ref=None):
    """A complex as {"vertices", "maximal_simplices", "tags"} plus its space."""
    points = complex_.space.points
    return {
        "space": space_ref if space_ref is not None else space_to_json(complex_.space),
        "vertices": [_point_to_json(points[v]) for v in complex_.vertices],
        "maximal_simplices": [[_point_to_json(points[v]) for v in simplex]
                              for simplex in complex_.maximal],
        "tags": _json_tags(complex_.tags()),
    }


def _json_tags(tags):
    result = {}
    for key, value in tags.items():
        if isinstance(value, list):
            result[key] = [_point_to_json(v) if not isinstance(v, list)
                           else [_point_to_json(p) for p in v] for v in value]
        else:
            result[key] = value
    return result


def complex_from_json(data):
    """
    Rebuilds a complex from its JSON export.

    Raises:
        SerializationError: If a required field is missing.
    """
    try:
        space = _ambient_from_json(data["space"])
        tags = data["tags"]
        maximal = [tuple(space.index(_point_from_json(p)) for p in simplex)
                   for simplex in data["maximal_simplices"]]
        marked = [space.index(_point_from_json(p)) for p in tags.get("marked", [])]
        return MetricSimplicialComplex(space, maximal, tags["kind"], tags.get("a"),
                                       tags.get("b"), marked, tags.get("m"))
    except KeyError as e:
        raise SerializationError(f"complex document is missing the field {e}") from e


# Reports

def merge_reports(documents):
    """
    Combines report documents into one, in the given order.

    Returns:
        dict: {"reports": [...], "count": n, "all_passed": bool}.
    """
    documents = list(documents)

    def passed(document):
        if "status" in document:
            return document["status"] == "PASS"
        if "valid" in document:
            return bool(document["valid"])
        return bool(document.get("success", True))

    return {"reports": documents, "count": len(documents),
            "all_passed": all(passed(d) for d in documents)}


__all__ = [
    "FIXTURES", "certificate_from_json", "certificate_to_json",
    "complex_from_json", "complex_to_json", "dumps", "group_spec_from_json", "load_fixture",
    "load_space", "matrix_from_text", "merge_reports", "point_from_text", "read_document",
    "space_from_json", "space_to_json", "witness_from_json", "witness_to_json",
    "write_document",
]
