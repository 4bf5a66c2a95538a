import math

import pytest

from pipeline.report_stage import (
    export_csv,
    export_obj,
    format_csv,
    format_markdown_report,
    format_obj,
    format_ply,
    format_profile_csv,
    load_samples_csv,
)
from pipeline.sample_stage import CSV_COLUMNS, MeshGrid, build_mesh, grid_triangles, sample_surface
from pipeline.verify_stage import verify_surface
from tests.conftest import plane
from tools.cpd import cmc_profile
from tools.gallery import gallery
from tools.models import GridSpec, Interval, domain


@pytest.fixture
def square_mesh() -> MeshGrid:
    return build_mesh(plane(), GridSpec(2, 2))


def test_obj_of_two_triangles(square_mesh):
    lines = format_obj(square_mesh).splitlines()
    assert lines[:4] == ["v -1 -1 0", "v 1 -1 0", "v -1 1 0", "v 1 1 0"]
    assert lines[4:] == ["f 1 2 4", "f 1 4 3"]


def test_grid_mesh_counts():
    mesh = build_mesh(gallery("catenoid"), GridSpec(8, 5))
    assert len(mesh.vertices) == 40
    assert len(mesh.faces) == 2 * 7 * 4
    assert mesh.faces == grid_triangles(8, 5)


def test_ply_header(square_mesh):
    text = format_ply(square_mesh)
    header, body = text.split("end_header\n")
    assert header.startswith("ply\nformat ascii 1.0\n")
    assert "element vertex 4\n" in header
    assert "element face 2\n" in header
    for prop in ("x", "y", "z", "K", "H", "theta"):
        assert f"property double {prop}\n" in header
    rows = body.splitlines()
    assert len(rows) == 6
    assert rows[0].split() == ["-1", "-1", "0", "0", "0", "0"]
    assert rows[4] == "3 0 1 3"


class TestCsv:
    def test_header_and_row_order(self):
        S = gallery("catenoid", domain((-1.0, 1.0), (0.0, 2.0)))
        lines = format_csv(sample_surface(S, GridSpec(3, 2))).splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        coords = [tuple(float(v) for v in line.split(",")[:2]) for line in lines[1:]]
        assert coords == [(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (-1.0, 2.0), (0.0, 2.0), (1.0, 2.0)]

    def test_catenoid_waist_row(self):
        S = gallery("catenoid", domain((-1.0, 1.0), (-1.0, 1.0)))
        row = sample_surface(S, GridSpec(3, 3))[4]
        assert (row.x, row.y) == (0.0, 0.0)
        assert (row.rx, row.ry, row.rz) == pytest.approx((1.0, 0.0, 0.0))
        assert (row.E, row.F, row.G) == pytest.approx((1.0, 0.0, 1.0))
        assert row.K == pytest.approx(-1.0)
        assert row.H == pytest.approx(0.0, abs=1e-14)
        assert row.theta == pytest.approx(math.pi / 2)
        assert row.theta_x == pytest.approx(-1.0)
        assert row.theta_y == pytest.approx(0.0, abs=1e-14)

    def test_written_file_reloads_exactly(self, tmp_path):
        rows = sample_surface(gallery("enneper"), GridSpec(4, 3))
        path = tmp_path / "out" / "samples.csv"
        export_csv(rows, str(path))
        assert load_samples_csv(str(path)) == rows

    def test_output_is_deterministic(self):
        S = gallery("scherk")
        assert format_csv(sample_surface(S, GridSpec(5, 5))) == format_csv(sample_surface(S, GridSpec(5, 5), threads=3))


class TestMeshValidation:
    def test_vertex_count(self):
        with pytest.raises(ValueError, match="vertices"):
            MeshGrid(2, 2, [(0.0, 0.0, 0.0)] * 3)

    def test_nan_vertex(self):
        with pytest.raises(ValueError, match="NaN"):
            MeshGrid(2, 1, [(0.0, 0.0, 0.0), (float("nan"), 0.0, 0.0)], faces=[(0, 1, 1)])

    def test_face_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            MeshGrid(2, 2, [(0.0, 0.0, 0.0)] * 4, faces=[(0, 1, 4)])

    def test_scalar_length(self):
        with pytest.raises(ValueError, match="scalar"):
            MeshGrid(2, 2, [(0.0, 0.0, 0.0)] * 4, scalars={"K": [0.0]})


def test_stdout_when_no_path(square_mesh, capsys):
    export_obj(square_mesh, None)
    assert capsys.readouterr().out == format_obj(square_mesh)


def test_markdown_report(catenoid_c1):
    report = verify_surface(catenoid_c1, grid=GridSpec(4, 4))
    text = format_markdown_report([report])
    assert text.startswith("# Verification Report\n")
    assert f"## ✓ {catenoid_c1.name} (canonical)" in text
    assert "| canonical_theta_y |" in text


def test_profile_csv():
    prof = cmc_profile(0.0, 0.0, math.pi / 4, math.sqrt(2.0), Interval(1.0, 2.0), step=0.5)
    lines = format_profile_csv(prof).splitlines()
    assert lines[0] == "x,theta,phi"
    assert [float(line.split(",")[0]) for line in lines[1:]] == [1.0, 1.5, 2.0]
    assert float(lines[1].split(",")[1]) == pytest.approx(math.pi / 4)
