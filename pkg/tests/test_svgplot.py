import xml.etree.ElementTree as ET

import pytest

from hyperclust.svgplot import (
    SchemaError,
    SvgDocument,
    plot_ari_table,
    plot_convergence,
    plot_diagnostics,
    plot_scatter,
)


def grid_rows():
    rows = []
    for regime in ("growing", "fixed"):
        for n in (10, 20):
            for m in (99, 999, 9999):
                for rep in range(2):
                    value = 1.0 / (m**0.5) * (1 + 0.1 * rep)
                    rows.append(
                        {
                            "regime": regime,
                            "n": str(n),
                            "m": str(m),
                            "rep": str(rep),
                            "ari_true_k": "0.9",
                            "ari_gap_k": "0.8",
                            "norm_R_Gamma": str(value),
                            "norm_hollow": str(value * 2),
                            "norm_SW": str(value),
                            "norm_Sinv": str(value),
                            "norm_V_2inf": str(value),
                            "norm_VS_2inf": str(value),
                        }
                    )
    return rows


def embedding_rows(with_type=True):
    rows = []
    for i in range(20):
        row = {
            "interaction": str(i + 1),
            "coord_1": str(0.1 * i),
            "coord_2": str(0.2 * (i % 5)),
        }
        if with_type:
            row["type"] = str(i % 3)
        rows.append(row)
    return rows


def is_valid_svg(path) -> ET.Element:
    root = ET.fromstring(path.read_text())
    assert root.tag.endswith("svg")
    return root


class TestDocument:
    def test_timestamp_comment_present_by_default(self, tmp_path):
        doc = SvgDocument(100, 100)
        doc.text(10, 10, "hello & <goodbye>")
        out = doc.write(tmp_path / "x.svg")
        content = out.read_text()
        assert "<!-- generated" in content
        assert "&amp;" in content and "&lt;goodbye&gt;" in content
        is_valid_svg(out)

    def test_no_timestamp_is_reproducible(self, tmp_path):
        def render(path):
            doc = SvgDocument(100, 100, timestamp=False)
            doc.line(0, 0, 50, 50)
            doc.circle(10, 10, 2)
            return doc.write(path)

        a = render(tmp_path / "a.svg")
        b = render(tmp_path / "b.svg")
        assert a.read_bytes() == b.read_bytes()
        assert "generated" not in a.read_text()


class TestConvergence:
    def test_renders_curves_per_n(self, tmp_path):
        out = tmp_path / "conv.svg"
        plot_convergence(grid_rows(), out, timestamp=False)
        root = is_valid_svg(out)
        polylines = root.findall(".//{http://www.w3.org/2000/svg}polyline")
        # two n-curves plus the slope reference guide
        assert len(polylines) == 3
        text = out.read_text()
        assert "n=10" in text and "n=20" in text and "slope" in text
        assert "1e" in text  # log-scale decade tick labels

    def test_empty_rows_error_and_no_file(self, tmp_path):
        out = tmp_path / "conv.svg"
        with pytest.raises(SchemaError):
            plot_convergence([], out)
        assert not out.exists()

    def test_missing_metric_column(self, tmp_path):
        rows = [{"n": "10", "m": "99"}]
        with pytest.raises(SchemaError, match="missing"):
            plot_convergence(rows, tmp_path / "x.svg")


class TestAriTable:
    def test_writes_one_file_per_regime(self, tmp_path):
        out = tmp_path / "ari.svg"
        paths = plot_ari_table(grid_rows(), out, timestamp=False)
        assert len(paths) == 2
        names = {p.name for p in paths}
        assert names == {"ari-fixed.svg", "ari-growing.svg"}
        for p in paths:
            root = is_valid_svg(p)
            assert "0.900" in p.read_text()

    def test_single_regime_uses_given_name(self, tmp_path):
        rows = [r for r in grid_rows() if r["regime"] == "fixed"]
        paths = plot_ari_table(rows, tmp_path / "ari.svg", timestamp=False)
        assert [p.name for p in paths] == ["ari.svg"]


class TestScatter:
    def test_colored_points(self, tmp_path):
        out = tmp_path / "scatter.svg"
        plot_scatter(embedding_rows(), out, timestamp=False)
        root = is_valid_svg(out)
        circles = root.findall(".//{http://www.w3.org/2000/svg}circle")
        assert len(circles) == 20
        fills = {c.attrib["fill"] for c in circles}
        assert len(fills) == 3

    def test_untypes_points_single_color(self, tmp_path):
        out = tmp_path / "scatter.svg"
        plot_scatter(embedding_rows(with_type=False), out, timestamp=False)
        root = is_valid_svg(out)
        fills = {c.attrib["fill"] for c in root.findall(".//{http://www.w3.org/2000/svg}circle")}
        assert len(fills) == 1

    def test_needs_two_coordinates(self, tmp_path):
        with pytest.raises(SchemaError):
            plot_scatter([{"coord_1": "1.0"}], tmp_path / "x.svg")


class TestDiagnosticsPanels:
    def test_one_file_per_metric(self, tmp_path):
        paths = plot_diagnostics(grid_rows(), tmp_path / "diag.svg", timestamp=False)
        assert len(paths) == 6
        assert all(p.exists() for p in paths)
        assert {p.name for p in paths} == {
            "diag-norm_R_Gamma.svg",
            "diag-norm_hollow.svg",
            "diag-norm_SW.svg",
            "diag-norm_Sinv.svg",
            "diag-norm_V_2inf.svg",
            "diag-norm_VS_2inf.svg",
        }
