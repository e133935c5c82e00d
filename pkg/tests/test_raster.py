"""Rasterizer geometry, coverage, compositing, and PNG round trips."""

import io
import math

import numpy as np
import pytest

from svgforge.core import parse_svg
from svgforge.errors import RenderError
from svgforge.raster import (
    Raster,
    flatten_path,
    png_bytes,
    raster_from_png_bytes,
    rasterize,
    read_png,
    to_luminance,
    write_png,
)
from svgforge.core.parse import parse_path_data


def _doc(body: str, vb: str = "0 0 128 128"):
    return parse_svg(f'<svg viewBox="{vb}">{body}</svg>')


def _coverage_sum(img: Raster) -> float:
    return float((1.0 - to_luminance(img)).sum())


class TestFlatten:
    def test_line_is_its_own_flattening(self):
        subs = flatten_path(parse_path_data("M 0 0 L 10 0"), 0.1)
        assert subs == [([(0.0, 0.0), (10.0, 0.0)], False)]

    def test_close_appends_start(self):
        subs = flatten_path(parse_path_data("M 0 0 L 10 0 Z"), 0.1)
        pts, closed = subs[0]
        assert closed and pts[-1] == (0.0, 0.0)

    def test_cubic_within_tolerance_of_analytic_curve(self):
        tol = 0.1
        p0, p1, p2, p3 = (0, 0), (0, 10), (10, 10), (10, 0)
        subs = flatten_path(parse_path_data("M 0 0 C 0 10 10 10 10 0"), tol)
        poly = subs[0][0]

        def bezier(t):
            mt = 1 - t
            x = (mt**3 * p0[0] + 3 * mt**2 * t * p1[0]
                 + 3 * mt * t**2 * p2[0] + t**3 * p3[0])
            y = (mt**3 * p0[1] + 3 * mt**2 * t * p1[1]
                 + 3 * mt * t**2 * p2[1] + t**3 * p3[1])
            return x, y

        def dist_to_poly(px, py):
            best = math.inf
            for (x0, y0), (x1, y1) in zip(poly, poly[1:]):
                dx, dy = x1 - x0, y1 - y0
                L2 = dx * dx + dy * dy
                t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((px - x0) * dx + (py - y0) * dy) / L2))
                best = min(best, math.hypot(px - (x0 + t * dx), py - (y0 + t * dy)))
            return best

        # dense analytic sampling oracle
        worst = max(dist_to_poly(*bezier(k / 500)) for k in range(501))
        assert worst <= tol

    def test_arc_endpoints_exact(self):
        subs = flatten_path(parse_path_data("M 0 0 A 5 5 0 0 1 10 0"), 0.05)
        pts = subs[0][0]
        assert pts[0] == (0.0, 0.0)
        assert pts[-1] == (10.0, 0.0)
        # every point lies on the circle through the endpoints (radius 5, center (5, 0))
        for x, y in pts:
            assert math.hypot(x - 5.0, y) == pytest.approx(5.0, abs=0.06)

    def test_bad_tolerance(self):
        with pytest.raises(ValueError):
            flatten_path(parse_path_data("M 0 0 L 1 1"), 0.0)


class TestRasterize:
    def test_empty_document_all_white(self):
        img = rasterize(_doc(""), 64)
        assert (img.data == 255).all()

    def test_full_canvas_rect_exact(self):
        img = rasterize(_doc('<rect x="0" y="0" width="128" height="128" fill="#000"/>'), 128)
        assert (img.data[:, :, :3] == 0).all()
        assert (img.data[:, :, 3] == 255).all()

    def test_circle_area_within_2_percent(self):
        img = rasterize(_doc('<circle cx="64" cy="64" r="50" fill="#000"/>'), 256, 4)
        dark = int((img.data[:, :, :3] < 128).all(axis=2).sum())
        expected = math.pi * 100.0 * 100.0  # radius scales x2 at 256px
        assert abs(dark - expected) / expected < 0.02

    def test_painters_order_full_occlusion_pixel_exact(self):
        under = '<rect x="30" y="30" width="40" height="40" fill="#d02020"/>'
        over = '<rect x="10" y="10" width="100" height="100" fill="#304050"/>'
        both = rasterize(_doc(under + over), 128, 4)
        only = rasterize(_doc(over), 128, 4)
        assert both == only

    def test_painters_order_full_canvas(self):
        a = '<circle cx="64" cy="64" r="20" fill="#ff0000"/>'
        b = '<rect x="0" y="0" width="128" height="128" fill="#000"/>'
        assert rasterize(_doc(a + b), 96, 2) == rasterize(_doc(b), 96, 2)

    def test_coverage_conservation_convex_polygon(self):
        # hexagon fully inside the canvas; shoelace oracle
        pts = [(64 + 40 * math.cos(a), 64 + 40 * math.sin(a))
               for a in [k * math.pi / 3 for k in range(6)]]
        area = 0.5 * abs(sum(x0 * y1 - x1 * y0 for (x0, y0), (x1, y1)
                             in zip(pts, pts[1:] + pts[:1])))
        body = '<polygon points="{}" fill="#000"/>'.format(
            " ".join(f"{x:.2f},{y:.2f}" for x, y in pts))
        img = rasterize(_doc(body), 256, 4)
        painted = _coverage_sum(img)
        assert painted == pytest.approx(area * 4.0, rel=0.01)  # 2x scale => 4x area

    def test_supersample_monotonicity(self):
        # Sampling error is measured against the flattened polygon actually
        # rasterized (shoelace area), so the fixed flattening bias of the
        # circle outline does not mask the supersampling effect.
        from svgforge.raster import ellipse_outline

        pts = ellipse_outline(64, 64, 50, 50, 0.1)
        poly_area = 0.5 * abs(sum(x0 * y1 - x1 * y0
                                  for (x0, y0), (x1, y1) in zip(pts, pts[1:])))
        expected = poly_area * 4.0  # 2x device scale
        errs = []
        for ss in (2, 8):
            img = rasterize(_doc('<circle cx="64" cy="64" r="50" fill="#000"/>'), 256, ss)
            errs.append(abs(_coverage_sum(img) - expected))
        assert errs[1] <= errs[0]

    def test_group_opacity_composes(self):
        img = rasterize(_doc('<g opacity="0.5"><g opacity="0.5">'
                             '<rect x="0" y="0" width="128" height="128" fill="#000"/>'
                             '</g></g>'), 64, 2)
        lum = to_luminance(img)
        assert float(lum[32, 32]) == pytest.approx(0.75, abs=2 / 255)

    def test_fill_rule_evenodd_hole(self):
        body = ('<path d="M 14 14 L 114 14 L 114 114 L 14 114 Z '
                'M 44 44 L 84 44 L 84 84 L 44 84 Z" fill-rule="evenodd" fill="#000"/>')
        img = rasterize(_doc(body), 128, 4)
        lum = to_luminance(img)
        assert lum[64, 64] == pytest.approx(1.0)   # hole stays white
        assert lum[20, 20] == pytest.approx(0.0)   # ring is painted

    def test_nonzero_same_winding_no_hole(self):
        body = ('<path d="M 14 14 L 114 14 L 114 114 L 14 114 Z '
                'M 44 44 L 84 44 L 84 84 L 44 84 Z" fill-rule="nonzero" fill="#000"/>')
        img = rasterize(_doc(body), 128, 4)
        assert to_luminance(img)[64, 64] == pytest.approx(0.0)

    def test_stroke_area_matches_length_times_width(self):
        body = ('<line x1="24" y1="64" x2="104" y2="64" stroke="#000" '
                'stroke-width="4"/>')
        img = rasterize(_doc(body), 256, 4)
        assert _coverage_sum(img) == pytest.approx(80 * 4 * 4, rel=0.01)

    def test_stroked_square_ring_area(self):
        body = ('<path d="M 34 34 L 94 34 L 94 94 L 34 94 Z" fill="none" '
                'stroke="#000" stroke-width="4"/>')
        img = rasterize(_doc(body), 256, 4)
        # miter-joined closed ring: outer 64^2 minus inner 56^2 user units
        assert _coverage_sum(img) == pytest.approx((64 * 64 - 56 * 56) * 4, rel=0.01)

    def test_round_and_square_caps_area(self):
        # round caps add two half-discs; square caps extend by w/2 per end
        line = ('<line x1="34" y1="64" x2="94" y2="64" stroke="#000" '
                'stroke-width="8" stroke-linecap="{cap}"/>')
        round_img = rasterize(_doc(line.format(cap="round")), 256, 4)
        square_img = rasterize(_doc(line.format(cap="square")), 256, 4)
        assert _coverage_sum(round_img) == pytest.approx(
            (60 * 8 + math.pi * 16) * 4, rel=0.01)
        assert _coverage_sum(square_img) == pytest.approx((60 + 8) * 8 * 4, rel=0.01)

    def test_round_join_area(self):
        # L-shaped path: two rectangles minus their overlap plus a quarter disc
        body = ('<path d="M 20 100 L 20 30 L 90 30" fill="none" stroke="#000" '
                'stroke-width="8" stroke-linejoin="round"/>')
        img = rasterize(_doc(body), 256, 4)
        expected = (70 * 8 + 70 * 8 - 16 + math.pi * 16 / 4) * 4
        assert _coverage_sum(img) == pytest.approx(expected, rel=0.01)

    def test_transform_translate_moves_content(self):
        plain = rasterize(_doc('<rect x="20" y="20" width="30" height="30" fill="#000"/>'), 128, 2)
        moved = rasterize(_doc('<g transform="translate(10 0)">'
                               '<rect x="10" y="20" width="30" height="30" fill="#000"/></g>'), 128, 2)
        assert plain == moved

    def test_defs_and_use_not_painted(self):
        img = rasterize(_doc('<defs><g><rect x="0" y="0" width="99" height="99" '
                             'fill="#000"/></g></defs><use x="4" y="4"/>'), 64)
        assert (img.data == 255).all()

    def test_requires_normalized_viewbox(self):
        with pytest.raises(ValueError):
            rasterize(parse_svg('<svg viewBox="0 0 256 128"></svg>'), 64)

    def test_out_size_floor(self):
        with pytest.raises(ValueError):
            rasterize(_doc(""), 8)

    def test_nonfinite_transform_raises(self):
        doc = _doc('<g transform="matrix(1e308 0 0 1e308 0 0)">'
                   '<rect x="5" y="5" width="9" height="9" fill="#000"/></g>')
        with pytest.raises(RenderError):
            rasterize(doc, 64)

    def test_deterministic(self):
        doc = _doc('<circle cx="64" cy="64" r="33.3" fill="#336699" opacity="0.7"/>')
        assert rasterize(doc, 128, 4) == rasterize(doc, 128, 4)


class TestLuminance:
    def test_white_is_one(self):
        img = rasterize(_doc(""), 32, 1)
        assert to_luminance(img).max() == pytest.approx(1.0)
        assert to_luminance(img).min() == pytest.approx(1.0)

    def test_black_is_zero(self):
        img = rasterize(_doc('<rect x="0" y="0" width="128" height="128" fill="#000"/>'), 32, 1)
        assert to_luminance(img).max() == pytest.approx(0.0)

    def test_half_alpha_black_over_white(self):
        data = np.zeros((4, 4, 4), dtype=np.uint8)
        data[:, :, 3] = 128
        lum = to_luminance(Raster(data))
        assert np.allclose(lum, 0.5, atol=1 / 255)


class TestPng:
    def test_round_trip(self):
        img = rasterize(_doc('<g><circle cx="64" cy="64" r="40" fill="#336699"/></g>'), 96, 2)
        again = raster_from_png_bytes(png_bytes(img))
        assert again == img

    def test_file_round_trip(self, tmp_path):
        img = rasterize(_doc('<g><rect x="8" y="8" width="60" height="40" '
                             'fill="#22aa44" opacity="0.5"/></g>'), 64, 2)
        path = tmp_path / "out.png"
        write_png(img, str(path))
        assert read_png(str(path)) == img

    def test_from_pixels_validates_length(self):
        with pytest.raises(ValueError):
            Raster.from_pixels(2, 2, b"\x00" * 15)
