"""Structural checks and projections over parsed documents."""

from __future__ import annotations

import re

from .model import (
    CONTAINER_KINDS,
    Issue,
    NodeKind,
    Severity,
    SvgDocument,
    SvgNode,
    ValidationReport,
)

_WS_RUN = re.compile(r"\s+")


def validate_structure(doc: SvgDocument) -> ValidationReport:
    """Check the group-level structural convention.

    Warnings: drawable elements at the top level outside any group, and
    empty groups.  Anything that would be an error is already rejected at
    parse time, so reports from parsed documents carry warnings only.
    """
    issues: list[Issue] = []

    for i, node in enumerate(doc.root_children):
        path = f"/svg/{node.kind.value}[{i}]"
        if node.kind not in CONTAINER_KINDS and node.kind is not NodeKind.USE:
            issues.append(Issue(Severity.WARNING, path,
                                f"ungrouped drawable <{node.kind.value}> at top level"))

    def walk(node: SvgNode, path: str):
        if node.kind is NodeKind.GROUP and not node.children:
            issues.append(Issue(Severity.WARNING, path, "empty group"))
        for j, child in enumerate(node.children):
            walk(child, f"{path}/{child.kind.value}[{j}]")

    for i, node in enumerate(doc.root_children):
        walk(node, f"/svg/{node.kind.value}[{i}]")

    return ValidationReport(issues=tuple(issues))


def extract_groups(doc: SvgDocument) -> list[tuple[str, SvgNode]]:
    """Top-level groups in document order, paired with their leading comment."""
    return [(n.comment, n) for n in doc.root_children if n.kind is NodeKind.GROUP]


def code_length(text: str, mode: str = "chars") -> int:
    """Length of SVG code, in collapsed characters or in SVG tokens.

    chars: code points after collapsing every whitespace run to one space
    and stripping the ends.  svg_tokens: length of the encoded token
    sequence (lenient encoding, so arbitrary text still gets a length).
    """
    if mode == "chars":
        return len(_WS_RUN.sub(" ", text).strip())
    if mode == "svg_tokens":
        from ..tokenizer import default_vocabulary, encode

        return len(encode(text, default_vocabulary(), fallback=True).ids)
    raise ValueError(f"unknown length mode: {mode!r}")
