import csv
import io
import json
import sys
from pathlib import Path
from typing import Any

from pipeline.sample_stage import CSV_COLUMNS, MeshGrid, SampleRow
from pipeline.verify_stage import VerificationReport
from tools.cpd import CmcProfile


def _num(v: float) -> str:
    return f"{v:.17g}"


def write_output(text: str, output_path: str | None) -> None:
    """Write to a file (creating parent directories) or to stdout when no path is given."""
    if output_path is None:
        sys.stdout.write(text)
        return
    Path(output_path).parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", newline="") as f:
        f.write(text)


def format_obj(mesh: MeshGrid) -> str:
    lines = [f"v {_num(x)} {_num(y)} {_num(z)}" for x, y, z in mesh.vertices]
    lines.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces)
    return "\n".join(lines) + "\n"


def export_obj(mesh: MeshGrid, output_path: str | None) -> None:
    """Wavefront OBJ: 'v x y z' lines, then 1-based 'f i j k' triangles."""
    write_output(format_obj(mesh), output_path)


PLY_SCALARS = ("K", "H", "theta")


def format_ply(mesh: MeshGrid) -> str:
    lines = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(mesh.vertices)}",
        "property double x",
        "property double y",
        "property double z",
    ]
    lines.extend(f"property double {name}" for name in PLY_SCALARS)
    lines.extend(
        [
            f"element face {len(mesh.faces)}",
            "property list uchar int vertex_indices",
            "end_header",
        ]
    )
    for i, v in enumerate(mesh.vertices):
        extra = [mesh.scalars.get(name, [float("nan")] * len(mesh.vertices))[i] for name in PLY_SCALARS]
        lines.append(" ".join(_num(c) for c in (*v, *extra)))
    lines.extend(f"3 {a} {b} {c}" for a, b, c in mesh.faces)
    return "\n".join(lines) + "\n"


def export_ply(mesh: MeshGrid, output_path: str | None) -> None:
    """ASCII PLY with per-vertex x, y, z, K, H, theta."""
    write_output(format_ply(mesh), output_path)


def format_csv(rows: list[SampleRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(_num(v) for v in r.values())
    return buf.getvalue()


def export_csv(rows: list[SampleRow], output_path: str | None) -> None:
    """One row per grid point, y outer and x inner, 17 significant digits."""
    write_output(format_csv(rows), output_path)


def load_samples_csv(path: str) -> list[SampleRow]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        return [SampleRow(**{c: float(row[c]) for c in CSV_COLUMNS}) for row in reader]


def format_profile_csv(profile: CmcProfile) -> str:
    lines = ["x,theta,phi"]
    lines.extend(f"{_num(x)},{_num(t)},{_num(p)}" for x, t, p in profile.rows())
    return "\n".join(lines) + "\n"


def format_json(payload: dict[str, Any] | list[Any]) -> str:
    return json.dumps(payload, indent=2) + "\n"


def generate_json_report(payload: dict[str, Any] | list[Any], output_path: str | None) -> None:
    """Generate structured JSON report."""
    write_output(format_json(payload), output_path)


def format_markdown_report(reports: list[VerificationReport]) -> str:
    """Human-readable verification summary."""
    lines = [
        "# Verification Report",
        "",
        f"**Surfaces:** {len(reports)}",
        "",
    ]
    for report in reports:
        mark = "✓" if report.passed else "✗"
        lines.extend(
            [
                f"## {mark} {report.surface} ({report.kind})",
                "",
                f"**Grid:** {report.grid.nx} x {report.grid.ny}, margin {report.grid.margin} | "
                f"**Masked points:** {report.masked} | **Status:** {report.status}",
                "",
            ]
        )
        if report.checks:
            lines.extend(["| check | max | mean | tolerance | passed |", "|---|---|---|---|---|"])
            for c in report.checks:
                note = " (advisory)" if c.advisory else ""
                lines.append(
                    f"| {c.check} | {c.max_residual:.2e} | {c.mean_residual:.2e} | {c.tolerance:.0e} | "
                    f"{'yes' if c.passed else 'no'}{note} |"
                )
            lines.append("")
        lines.append("---")
        lines.append("")
    return "\n".join(lines)


def generate_markdown_report(reports: list[VerificationReport], output_path: str | None) -> None:
    write_output(format_markdown_report(reports), output_path)
