"""SVG figure contracts: well-formed XML with the promised geometry."""

import xml.dom.minidom

import numpy as np

from talktopo.persistence import PersistenceDiagram
from talktopo.pimage import PersistenceImage, PivConfig, rasterize
from talktopo.plots import plot_diagram_svg, plot_piv_svg


def diagram_of(points):
    return PersistenceDiagram(
        dims=[q for q, _, _ in points],
        births=[b for _, b, _ in points],
        deaths=[d for _, _, d in points],
    )


def parse_svg(path):
    doc = xml.dom.minidom.parse(str(path))
    root = doc.documentElement
    assert root.tagName == "svg"
    return doc


class TestDiagramPlot:
    def test_scatter_with_diagonal(self, tmp_path):
        out = tmp_path / "d.svg"
        plot_diagram_svg(diagram_of([(0, 0.0, 0.4), (1, 0.2, 0.9)]), out)
        doc = parse_svg(out)
        assert len(doc.getElementsByTagName("circle")) >= 2
        dashed = [
            ln
            for ln in doc.getElementsByTagName("line")
            if ln.getAttribute("stroke-dasharray")
        ]
        assert len(dashed) == 1

    def test_empty_diagram_has_axes_and_diagonal_only(self, tmp_path):
        out = tmp_path / "empty.svg"
        plot_diagram_svg(diagram_of([]), out)
        doc = parse_svg(out)
        assert len(doc.getElementsByTagName("line")) == 3  # two axes, one diagonal
        assert doc.getElementsByTagName("circle") == []
        assert doc.getElementsByTagName("polygon") == []

    def test_infinite_death_drawn_as_triangle(self, tmp_path):
        out = tmp_path / "inf.svg"
        plot_diagram_svg(diagram_of([(0, 0.0, float("inf")), (0, 0.0, 0.5)]), out)
        doc = parse_svg(out)
        assert len(doc.getElementsByTagName("polygon")) == 1
        assert len(doc.getElementsByTagName("circle")) >= 1


class TestPivPlot:
    def test_zero_image_renders_uniform_cells(self, tmp_path):
        cfg = PivConfig(pixels_per_axis=5)
        img = PersistenceImage(values=np.zeros(25), config=cfg)
        out = tmp_path / "zero.svg"
        plot_piv_svg(img, out)
        doc = parse_svg(out)
        fills = {
            r.getAttribute("fill")
            for r in doc.getElementsByTagName("rect")
            if r.getAttribute("fill").startswith("rgb")
        }
        assert len(fills) == 1

    def test_cell_count_and_shade_extremes(self, tmp_path):
        cfg = PivConfig(pixels_per_axis=6, weight_ceiling=1.0)
        img = rasterize(diagram_of([(1, 0.2, 0.8)]), dim=1, cfg=cfg)
        out = tmp_path / "piv.svg"
        plot_piv_svg(img, out)
        doc = parse_svg(out)
        cells = [
            r
            for r in doc.getElementsByTagName("rect")
            if r.getAttribute("fill").startswith("rgb")
        ]
        assert len(cells) == 36
        fills = [c.getAttribute("fill") for c in cells]
        assert "rgb(0,0,0)" in fills  # the max pixel is pure black
        assert len(set(fills)) > 1
