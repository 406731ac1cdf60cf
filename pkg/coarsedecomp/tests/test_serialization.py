# tests/test_serialization.py

"""
Unit tests for the serialization module.
"""

import json
from fractions import Fraction

import pytest

from coarsedecomp.decomposition import (
    DecompositionCertificate, DecompositionStep, GameRound, verify_certificate)
from coarsedecomp.errors import (
    CoarseDecompError, EXIT_BAD_INPUT, EXIT_MALFORMED, MalformedCertificateError,
    SerializationError)
from coarsedecomp.groups import FreeAbelian, Lamplighter, ball
from coarsedecomp.matrices import length_gl, wreath_matrix
from coarsedecomp.metric import INF, FiniteMetricSpace, MetricFamily
from coarsedecomp.norms import DegreeNorm
from coarsedecomp.property_a import constant_witness, verify_witness
from coarsedecomp.rings import parse_element
from coarsedecomp.rips import build_relative_rips
from coarsedecomp.serialization import (
    certificate_from_json, certificate_to_json, complex_from_json, complex_to_json, dumps,
    group_spec_from_json, load_fixture, load_space, matrix_from_text, merge_reports,
    point_from_text, read_document, space_from_json, space_to_json, witness_from_json,
    witness_to_json, write_document)


@pytest.fixture
def line():
    """
    Fixture providing the integers {0..9} with the usual distance.
    """
    return FiniteMetricSpace.from_function(range(10), lambda a, b: abs(a - b), name="line")


def one_round(space):
    """A depth-1 certificate splitting {0..9} into slabs at r = 3."""
    step = DecompositionStep(space.whole(), 3,
                             (space.subspace(range(0, 3)), space.subspace(range(6, 9))),
                             (space.subspace(range(3, 6)), space.subspace([9])))
    return DecompositionCertificate(MetricFamily([space.whole()]), (GameRound(3, (step,)),), 2)


def test_dumps_is_canonical():
    """
    Test sorted keys, two-space indent and a trailing newline.
    """
    text = dumps({"b": 1, "a": [1, 2]})
    assert text.endswith("}\n")
    assert text.index('"a"') < text.index('"b"')
    assert dumps({"a": [1, 2], "b": 1}) == text


def test_write_and_read_document(tmp_path):
    """
    Test that a written document reads back unchanged.
    """
    path = tmp_path / "doc.json"
    text = write_document({"x": "1/2"}, path)
    assert path.read_text(encoding="utf-8") == text
    assert read_document(path) == {"x": "1/2"}


def test_read_missing_file(tmp_path):
    """
    Test that a missing file is a bad-input error.
    """
    with pytest.raises(CoarseDecompError) as exc_info:
        read_document(tmp_path / "absent.json")
    assert exc_info.value.code == "FILE_NOT_FOUND"
    assert exc_info.value.exit_code == EXIT_BAD_INPUT


def test_read_invalid_json(tmp_path):
    """
    Test that unparsable text is a malformed-file error.
    """
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(SerializationError) as exc_info:
        read_document(path)
    assert exc_info.value.exit_code == EXIT_MALFORMED


def test_fixtures():
    """
    Test the bundled spaces.
    """
    path = load_fixture("path8")
    assert len(path) == 8
    assert path.dist(0, 7) == 7
    grid = load_fixture("grid5")
    assert len(grid) == 25
    assert grid.dist((0, 0), (4, 4)) == 8
    glued = load_fixture("glued")
    assert glued.dist("A", "D") == 2
    assert glued.dist("B", "C") == 1
    assert len(load_space("interval100")) == 100


def test_unknown_fixture():
    """
    Test UNKNOWN_FIXTURE.
    """
    with pytest.raises(CoarseDecompError) as exc_info:
        load_fixture("torus")
    assert exc_info.value.code == "UNKNOWN_FIXTURE"


def test_table_space_document(line):
    """
    Test the distance-table form of a space.
    """
    document = space_to_json(line)
    assert document["dist"]["0,9"] == "9/1"
    assert len(document["dist"]) == 45
    rebuilt = space_from_json(document)
    assert rebuilt.points == line.points
    assert rebuilt.dist(2, 7) == 5


def test_infinite_distances_survive():
    """
    Test "inf" entries between components.
    """
    space = space_from_json({"points": ["a", "b"], "dist": {"0,1": "inf"}})
    assert space.dist("a", "b") == INF
    assert space_to_json(space)["dist"] == {"0,1": "inf"}


def test_generator_space_document():
    """
    Test that group balls are stored by generator and radius.
    """
    document = space_to_json(ball(FreeAbelian(2), 4))
    assert document["generator"]["type"] == "free_abelian"
    assert document["radius"] == "4/1"
    assert len(space_from_json(document)) == 41
    lamplighter = space_from_json({"generator": {"type": "lamplighter", "lamp": "z2"},
                                   "radius": 2})
    assert len(lamplighter) == 10
    assert lamplighter.source[0] == Lamplighter(2)


def test_coordinate_points():
    """
    Test the l1 and linf coordinate forms.
    """
    points = [[0, 0], [3, 4]]
    assert space_from_json({"points": points, "metric": "l1"}).dist((0, 0), (3, 4)) == 7
    assert space_from_json({"points": points, "metric": "linf"}).dist((0, 0), (3, 4)) == 4
    with pytest.raises(SerializationError):
        space_from_json({"points": points, "metric": "l2"})


def test_space_missing_field():
    """
    Test that a space without points is a malformed document.
    """
    with pytest.raises(SerializationError):
        space_from_json({"name": "empty"})


def test_point_from_text():
    """
    Test integers, coordinate lists and labels on the command line.
    """
    assert point_from_text("3") == 3
    assert point_from_text("[1, 2]") == (1, 2)
    assert point_from_text("A") == "A"


def test_wreath_matrix_from_text():
    """
    Test the wreath form used by the norms command.
    """
    g = matrix_from_text("wreath:n=1,p=X^2", "qx")
    assert g == wreath_matrix(1, parse_element("X^2", "qx"))
    assert length_gl(DegreeNorm(0), g) == 2


def test_matrix_rows_from_text():
    """
    Test a matrix written row by row.
    """
    g = matrix_from_text("1,X;0,1", "f2x")
    assert g.n == 2
    assert g[0, 0] == 1
    with pytest.raises(SerializationError):
        matrix_from_text("rotation:angle=1", "q")


def test_matrix_group_spec():
    """
    Test reading a matrix group with its length functions.
    """
    spec = group_spec_from_json({"type": "matrix", "ring": "qx",
                                 "generators": ["wreath:n=1,p=0", "wreath:n=0,p=1"],
                                 "length": [{"type": "degree"}]})
    assert len(spec.matrix_generators) == 2
    assert spec.to_json()["generators"] == ["wreath:n=1,p=0", "wreath:n=0,p=1"]
    assert group_spec_from_json(spec.to_json()).ring == "qx"


def test_certificate_document(line):
    """
    Test that a certificate rebuilt from JSON verifies like the original.
    """
    cert = one_round(line)
    document = certificate_to_json(cert)
    assert document["steps"][0]["members"][0]["part1"] == [[3, 4, 5], [9]]
    rebuilt = certificate_from_json(json.loads(dumps(document)))
    assert rebuilt.depth == 1
    assert rebuilt.bound == 2
    assert verify_certificate(rebuilt).valid
    assert certificate_to_json(rebuilt) == document


def test_certificate_with_fixture_reference():
    """
    Test a certificate that names its space by fixture.
    """
    space = load_fixture("path8")
    step = DecompositionStep(space.whole(), 1, (space.whole(),), ())
    cert = DecompositionCertificate(MetricFamily([space.whole()]), (GameRound(1, (step,)),), 7)
    document = certificate_to_json(cert, space_ref="path8")
    assert document["ambient"] == "path8"
    assert certificate_from_json(document).initial[0].indices == tuple(range(8))


def test_certificate_step_count_mismatch(line):
    """
    Test MalformedCertificateError when a round lists too many steps.
    """
    document = certificate_to_json(one_round(line))
    document["steps"][0]["members"].append({"part0": [], "part1": []})
    with pytest.raises(MalformedCertificateError) as exc_info:
        certificate_from_json(document)
    assert exc_info.value.exit_code == EXIT_MALFORMED


def test_certificate_index_out_of_range(line):
    """
    Test MalformedCertificateError for a point index past the ambient space.
    """
    document = certificate_to_json(one_round(line))
    document["steps"][0]["members"][0]["part1"][1] = [10]
    with pytest.raises(MalformedCertificateError):
        certificate_from_json(document)


def test_certificate_missing_field(line):
    """
    Test MalformedCertificateError for a missing bound.
    """
    document = certificate_to_json(one_round(line))
    del document["bound"]
    with pytest.raises(MalformedCertificateError):
        certificate_from_json(document)


def test_witness_document(line):
    """
    Test that a witness rebuilt from JSON verifies on its ambient space.
    """
    witness = constant_witness(line.whole(), 1, Fraction(1, 2))
    document = witness_to_json(witness, line.whole())
    assert document["member"] == list(range(10))
    assert document["phi"][0]["values"]["9"] == "1/1"
    assert document["B"] == "9/1"
    member, rebuilt = witness_from_json(document)
    assert len(member) == 10
    assert verify_witness(member, rebuilt).valid


def test_witness_bad_piece(line):
    """
    Test MalformedCertificateError for phi naming a missing cover set.
    """
    document = witness_to_json(constant_witness(line.whole(), 1, 1), line.whole())
    document["phi"][0]["piece"] = 4
    with pytest.raises(MalformedCertificateError):
        witness_from_json(document)


def test_complex_document(line):
    """
    Test the complex export with its relative tags.
    """
    complex_ = build_relative_rips(line, [0, 9], 1, 9)
    document = complex_to_json(complex_)
    assert [0, 9] in document["maximal_simplices"]
    assert document["tags"]["relative_only"] == [[0, 9]]
    assert document["tags"]["marked"] == [0, 9]
    rebuilt = complex_from_json(document)
    assert rebuilt.maximal == complex_.maximal
    assert rebuilt.relative_only() == [(0, 9)]


def test_merge_reports():
    """
    Test that merged reports pass only when every report passes.
    """
    merged = merge_reports([{"status": "PASS"}, {"valid": True}])
    assert merged["count"] == 2
    assert merged["all_passed"]
    assert not merge_reports([{"status": "PASS"}, {"status": "INCONCLUSIVE"}])["all_passed"]


def test_certificates_share_an_ambient(line):
    """
    Test that certificates read against one ambient object have equal initial families.
    """
    document = certificate_to_json(one_round(line))
    first = certificate_from_json(document, ambient=line)
    second = certificate_from_json(document, ambient=line)
    assert tuple(first.initial) == tuple(second.initial)
    assert first.ambient is line
