"""Shared fixtures: a deterministic 50-document SVG corpus and a corpus of
malformed model outputs for format-gate tests."""

from __future__ import annotations

import random

import pytest

CORPUS_SEED = 20260809
CORPUS_SIZE = 50

_PALETTE_HEX6 = ["#336699", "#ff6600", "#22aa44", "#993366", "#e0e0e0", "#101820"]
_PALETTE_HEX3 = ["#f00", "#0a0", "#06c", "#fc0"]
_PALETTE_KEYWORD = ["black", "red", "navy", "teal", "olive", "silver"]
_COMMENT_WORDS = ["sky", "sun", "ground", "tree", "roof", "window", "door",
                  "cloud", "hill", "stem", "petal", "frame", "shadow", "body"]


def _num(rng: random.Random, lo: float, hi: float) -> str:
    v = round(rng.uniform(lo, hi), rng.choice((0, 1, 2)))
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return s if s else "0"


def _color(rng: random.Random) -> str:
    kind = rng.randrange(4)
    if kind == 0:
        return rng.choice(_PALETTE_HEX6)
    if kind == 1:
        return rng.choice(_PALETTE_HEX3)
    if kind == 2:
        return rng.choice(_PALETTE_KEYWORD)
    return f"rgb({rng.randrange(256)}, {rng.randrange(256)}, {rng.randrange(256)})"


def _style(rng: random.Random, stroke_only: bool = False) -> str:
    parts = []
    if stroke_only:
        parts.append(f'stroke="{_color(rng)}"')
        parts.append(f'stroke-width="{_num(rng, 0.5, 6)}"')
        if rng.random() < 0.3:
            parts.append(f'stroke-linecap="{rng.choice(("butt", "round", "square"))}"')
    else:
        parts.append(f'fill="{_color(rng)}"')
        if rng.random() < 0.25:
            parts.append(f'stroke="{_color(rng)}" stroke-width="{_num(rng, 0.5, 4)}"')
        if rng.random() < 0.15:
            parts.append('fill-rule="evenodd"')
    if rng.random() < 0.2:
        parts.append(f'opacity="{round(rng.uniform(0.2, 1.0), 2)}"')
    if rng.random() < 0.2:
        kind = rng.randrange(3)
        if kind == 0:
            t = f"translate({_num(rng, -20, 20)} {_num(rng, -20, 20)})"
        elif kind == 1:
            t = f"scale({_num(rng, 0.5, 1.5)})"
        else:
            t = (f"matrix(1 0 0 1 {_num(rng, -10, 10)} {_num(rng, -10, 10)})")
        parts.append(f'transform="{t}"')
    return " ".join(parts)


def _path_d(rng: random.Random) -> str:
    x, y = rng.uniform(10, 110), rng.uniform(10, 110)
    parts = [f"M {_num(rng, 10, 110)} {_num(rng, 10, 110)}"]
    for _ in range(rng.randrange(2, 6)):
        op = rng.choice(("L", "C", "Q", "A"))
        if op == "L":
            parts.append(f"L {_num(rng, 4, 124)} {_num(rng, 4, 124)}")
        elif op == "C":
            parts.append(
                f"C {_num(rng, 4, 124)} {_num(rng, 4, 124)} "
                f"{_num(rng, 4, 124)} {_num(rng, 4, 124)} "
                f"{_num(rng, 4, 124)} {_num(rng, 4, 124)}")
        elif op == "Q":
            parts.append(
                f"Q {_num(rng, 4, 124)} {_num(rng, 4, 124)} "
                f"{_num(rng, 4, 124)} {_num(rng, 4, 124)}")
        else:
            parts.append(
                f"A {_num(rng, 5, 40)} {_num(rng, 5, 40)} 0 "
                f"{rng.randrange(2)} {rng.randrange(2)} "
                f"{_num(rng, 4, 124)} {_num(rng, 4, 124)}")
    if rng.random() < 0.5:
        parts.append("Z")
    return " ".join(parts)


def _shape(rng: random.Random) -> str:
    kind = rng.randrange(7)
    if kind == 0:
        return (f'<circle cx="{_num(rng, 20, 108)}" cy="{_num(rng, 20, 108)}" '
                f'r="{_num(rng, 4, 30)}" {_style(rng)}/>')
    if kind == 1:
        extra = ""
        if rng.random() < 0.3:
            extra = f' rx="{_num(rng, 1, 8)}"'
        return (f'<rect x="{_num(rng, 4, 80)}" y="{_num(rng, 4, 80)}" '
                f'width="{_num(rng, 8, 44)}" height="{_num(rng, 8, 44)}"{extra} '
                f'{_style(rng)}/>')
    if kind == 2:
        return (f'<ellipse cx="{_num(rng, 24, 104)}" cy="{_num(rng, 24, 104)}" '
                f'rx="{_num(rng, 4, 24)}" ry="{_num(rng, 4, 24)}" {_style(rng)}/>')
    if kind == 3:
        return (f'<line x1="{_num(rng, 4, 124)}" y1="{_num(rng, 4, 124)}" '
                f'x2="{_num(rng, 4, 124)}" y2="{_num(rng, 4, 124)}" '
                f'{_style(rng, stroke_only=True)}/>')
    if kind == 4:
        pts = " ".join(f"{_num(rng, 4, 124)},{_num(rng, 4, 124)}"
                       for _ in range(rng.randrange(3, 7)))
        return f'<polygon points="{pts}" {_style(rng)}/>'
    if kind == 5:
        pts = " ".join(f"{_num(rng, 4, 124)},{_num(rng, 4, 124)}"
                       for _ in range(rng.randrange(2, 6)))
        return f'<polyline points="{pts}" {_style(rng, stroke_only=True)}/>'
    return f'<path d="{_path_d(rng)}" {_style(rng)}/>'


def make_corpus_doc(index: int) -> str:
    """Deterministic corpus document #index (text form)."""
    rng = random.Random(CORPUS_SEED + index)
    if index % 10 == 7:
        vb = "0 0 512 512"
    elif index % 10 == 3:
        vb = "0 0 256 128"
    else:
        vb = "0 0 128 128"
    lines = [f'<svg viewBox="{vb}">']
    n_groups = rng.randrange(1, 5)
    for gi in range(n_groups):
        if rng.random() < 0.8:
            words = rng.sample(_COMMENT_WORDS, rng.randrange(1, 3))
            lines.append(f"  <!-- step {gi + 1}: {' '.join(words)} -->")
        g_style = f' fill="{_color(rng)}"' if rng.random() < 0.3 else ""
        lines.append(f"  <g{g_style}>")
        for _ in range(rng.randrange(1, 5)):
            lines.append(f"    {_shape(rng)}")
        if rng.random() < 0.15:  # nested group
            lines.append("    <g>")
            lines.append(f"      {_shape(rng)}")
            lines.append("    </g>")
        lines.append("  </g>")
    if index % 9 == 4:  # ungrouped top-level drawable (warning case)
        lines.append(f"  {_shape(rng)}")
    if index % 11 == 5:
        lines.append("  <defs>")
        lines.append(f'    <g id="def{index}">')
        lines.append(f"      {_shape(rng)}")
        lines.append("    </g>")
        lines.append("  </defs>")
        lines.append(f'  <use x="{_num(rng, 0, 20)}" y="{_num(rng, 0, 20)}"/>')
    lines.append("</svg>")
    return "\n".join(lines)


@pytest.fixture(scope="session")
def corpus() -> list[str]:
    return [make_corpus_doc(i) for i in range(CORPUS_SIZE)]


# Well-formed think/svg building blocks for format tests.
GOOD_SVG = ('<svg viewBox="0 0 128 128"><g><rect x="0" y="0" width="10" '
            'height="10" fill="#000"/></g></svg>')
GOOD_THINK = "<think>1. a tiny square</think>"

MALFORMED_OUTPUTS: list[tuple[str, str, str]] = [
    ("empty", "", "NoThink"),
    ("svg-only", GOOD_SVG, "NoThink"),
    ("think-only", GOOD_THINK, "NoSvg"),
    ("two-thinks", f"{GOOD_THINK}<think>more</think>{GOOD_SVG}", "MultipleThink"),
    ("two-svgs", f"{GOOD_THINK}{GOOD_SVG}{GOOD_SVG}", "MultipleSvg"),
    ("svg-before-think", f"{GOOD_SVG}{GOOD_THINK}", "TrailingThink"),
    ("unclosed-think", f"<think>plan{GOOD_SVG}", "NoThink"),
    ("junk-between", f"{GOOD_THINK}\nsome prose\n{GOOD_SVG}", "TrailingThink"),
    ("trailing-prose", f"{GOOD_THINK}{GOOD_SVG}\nAnd that is all.", "TrailingThink"),
    ("leading-prose", f"Sure!\n{GOOD_THINK}{GOOD_SVG}", "TrailingThink"),
    ("truncated-svg", f'{GOOD_THINK}<svg viewBox="0 0 128 128"><circle cx="64"',
     "NoSvg"),
    ("unsupported-element",
     f'{GOOD_THINK}<svg viewBox="0 0 128 128"><image href="x.png"/></svg>',
     "ParseFail"),
    ("bad-number",
     f'{GOOD_THINK}<svg viewBox="0 0 128 128"><g><circle cx="abc" cy="0" r="5"/></g></svg>',
     "ParseFail"),
    ("degenerate-viewbox",
     f'{GOOD_THINK}<svg viewBox="0 0 0 0"><g><rect x="0" y="0" width="1" height="1"/></g></svg>',
     "ParseFail"),
    ("nested-think", f"<think>a<think>b</think>c</think>{GOOD_SVG}", "TrailingThink"),
    ("no-viewbox", f"{GOOD_THINK}<svg><g><rect x=\"0\" y=\"0\" width=\"9\" height=\"9\"/></g></svg>",
     "ParseFail"),
    ("not-xml", f"{GOOD_THINK}<svg viewBox='0 0 128 128'><<<</svg>", "ParseFail"),
    ("group-in-circle",
     f'{GOOD_THINK}<svg viewBox="0 0 128 128"><circle cx="1" cy="1" r="1"><g></g></circle></svg>',
     "ParseFail"),
    ("path-no-move",
     f'{GOOD_THINK}<svg viewBox="0 0 128 128"><g><path d="L 10 10" fill="#000"/></g></svg>',
     "ParseFail"),
    ("overflow-transform",
     f'{GOOD_THINK}<svg viewBox="0 0 128 128"><g transform="matrix(1e308 0 0 1e308 0 0)">'
     f'<rect x="5" y="5" width="9" height="9"/></g></svg>',
     "RenderFail"),
]


@pytest.fixture(scope="session")
def malformed_outputs():
    return MALFORMED_OUTPUTS
