"""Task samples, SSIM-based dataset filters, CoT/group alignment, JSONL I/O.

Filter decisions are pure functions of the computed SSIM and the configured
thresholds; per-item failures never abort a batch, they become rejection
records so curation stays resumable and auditable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum

from .core.model import SvgDocument
from .core.normalize import normalize_viewbox
from .core.parse import parse_svg
from .core.structure import extract_groups
from .errors import MissingFieldError, SchemaError, SvgForgeError
from .raster.render import rasterize
from .raster.ssim import SsimParams, ssim


class Task(Enum):
    TEXT2SVG = "t2s"
    IMG2SVG = "i2s"
    REFINE = "refine"


@dataclass(frozen=True)
class TaskSample:
    """One dataset record; image references are a path plus content digest."""

    id: str
    task: Task
    instruction: str
    image_path: str | None = None
    image_sha256: str | None = None
    draft_svg: str | None = None
    target_think: str = ""
    target_svg: str = ""

    def validate(self) -> None:
        has_image = self.image_path is not None
        has_draft = self.draft_svg is not None
        if self.task is Task.TEXT2SVG and (has_image or has_draft):
            raise MissingFieldError(f"{self.id}: t2s sample must not carry image or draft")
        if self.task is Task.IMG2SVG and (not has_image or has_draft):
            raise MissingFieldError(f"{self.id}: i2s sample needs an image and no draft")
        if self.task is Task.REFINE and (not has_image or not has_draft):
            raise MissingFieldError(f"{self.id}: refine sample needs image and draft")


def build_context(sample: TaskSample) -> tuple:
    """The ordered context tuple the task variant conditions on.

    Text-to-SVG: (instruction,); Image-to-SVG: (instruction, image);
    refinement: (instruction, image, draft).
    """
    sample.validate()
    if sample.task is Task.TEXT2SVG:
        return (sample.instruction,)
    if sample.task is Task.IMG2SVG:
        return (sample.instruction, sample.image_path)
    return (sample.instruction, sample.image_path, sample.draft_svg)


# --------------------------------------------------------------------------
# SSIM filters
# --------------------------------------------------------------------------

class Decision(Enum):
    KEPT = "kept"
    REJECTED = "rejected"


@dataclass(frozen=True)
class FilterItem:
    id: str
    ssim: float | None
    decision: Decision
    reason: str


@dataclass(frozen=True)
class FilterReport:
    items: tuple[FilterItem, ...]

    @property
    def kept(self) -> int:
        return sum(1 for i in self.items if i.decision is Decision.KEPT)

    @property
    def rejected(self) -> int:
        return sum(1 for i in self.items if i.decision is Decision.REJECTED)

    def to_dict(self) -> dict:
        return {
            "kept": self.kept,
            "rejected": self.rejected,
            "items": [
                {"id": i.id, "ssim": i.ssim, "decision": i.decision.value,
                 "reason": i.reason}
                for i in self.items
            ],
        }

    def to_csv(self) -> str:
        lines = ["id,ssim,decision,reason"]
        for i in self.items:
            s = "" if i.ssim is None else f"{i.ssim:.6f}"
            lines.append(f"{i.id},{s},{i.decision.value},{i.reason}")
        return "\n".join(lines) + "\n"


def _render_pair(a_text: str, b_text: str, render_size: int, supersample: int,
                 params: SsimParams) -> float:
    ra = rasterize(normalize_viewbox(parse_svg(a_text)), render_size, supersample)
    rb = rasterize(normalize_viewbox(parse_svg(b_text)), render_size, supersample)
    return ssim(ra, rb, params)


def _run_filter(pairs, ids, keep_fn, render_size, supersample, params,
                jobs: int = 1) -> FilterReport:
    if ids is None:
        ids = [str(i) for i in range(len(pairs))]

    def evaluate(pair):
        a_text, b_text = pair
        try:
            return _render_pair(a_text, b_text, render_size, supersample, params), None
        except (SvgForgeError, ValueError) as exc:
            return None, f"RenderFail: {exc}"

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(evaluate, pairs))  # map preserves input order
    else:
        results = [evaluate(p) for p in pairs]

    items = []
    for item_id, (value, failure) in zip(ids, results):
        if failure is not None:
            items.append(FilterItem(id=item_id, ssim=None,
                                    decision=Decision.REJECTED, reason=failure))
            continue
        kept, reason = keep_fn(value)
        items.append(FilterItem(id=item_id, ssim=value,
                                decision=Decision.KEPT if kept else Decision.REJECTED,
                                reason=reason))
    return FilterReport(items=tuple(items))


def filter_refactored(pairs, threshold: float = 0.95, render_size: int = 256,
                      supersample: int = 4, ssim_params: SsimParams = SsimParams(),
                      ids=None, jobs: int = 1) -> FilterReport:
    """Keep (original, refactored) pairs whose renderings reach the SSIM floor."""

    def keep(v: float):
        if v >= threshold:
            return True, ""
        return False, "below-threshold"

    return _run_filter(pairs, ids, keep, render_size, supersample, ssim_params, jobs)


def filter_refinement_drafts(pairs, low: float = 0.30, high: float = 0.95,
                             render_size: int = 256, supersample: int = 4,
                             ssim_params: SsimParams = SsimParams(),
                             ids=None, jobs: int = 1) -> FilterReport:
    """Keep (draft, ground-truth) pairs in the moderately-flawed band
    low <= SSIM <= high, inclusive at both ends."""

    def keep(v: float):
        if v < low:
            return False, "below-band"
        if v > high:
            return False, "above-band"
        return True, ""

    return _run_filter(pairs, ids, keep, render_size, supersample, ssim_params, jobs)


# --------------------------------------------------------------------------
# CoT step <-> group alignment
# --------------------------------------------------------------------------

# Ordinal markers: "1." (dot followed by space/end), "Step 1", "(1)".
_STEP_RE = re.compile(
    r"(?:(?<=\s)|(?<=^))(?:Step\s+\d+\b|\(\d+\)|\d+\.(?=\s|$))",
    re.MULTILINE,
)


@dataclass(frozen=True)
class AlignmentReport:
    aligned: bool
    step_count: int
    group_count: int
    steps: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "aligned": self.aligned,
            "step_count": self.step_count,
            "group_count": self.group_count,
            "steps": list(self.steps),
        }


def validate_step_alignment(think_text: str, doc: SvgDocument) -> AlignmentReport:
    """Count enumerated steps in the reasoning text against top-level groups.

    Aligned iff both counts are equal and at least 1.  The marker grammar is
    fixed ("1.", "Step 1", "(1)"); pass pre-split text through a custom
    counter if a corpus uses another convention.
    """
    matches = list(_STEP_RE.finditer(think_text))
    steps = []
    for k, m in enumerate(matches):
        end = matches[k + 1].start() if k + 1 < len(matches) else len(think_text)
        steps.append(think_text[m.start():end].strip())
    group_count = len(extract_groups(doc))
    step_count = len(matches)
    return AlignmentReport(
        aligned=step_count == group_count and step_count >= 1,
        step_count=step_count,
        group_count=group_count,
        steps=tuple(steps),
    )


# --------------------------------------------------------------------------
# Dataset JSONL
# --------------------------------------------------------------------------

_SCHEMA_KEYS = ("id", "task", "instruction", "image_path", "image_sha256",
                "draft_svg", "target_think", "target_svg")
_TASK_BY_VALUE = {t.value: t for t in Task}


def sample_to_dict(sample: TaskSample) -> dict:
    out = {"id": sample.id, "task": sample.task.value,
           "instruction": sample.instruction}
    if sample.image_path is not None:
        out["image_path"] = sample.image_path
    if sample.image_sha256 is not None:
        out["image_sha256"] = sample.image_sha256
    if sample.draft_svg is not None:
        out["draft_svg"] = sample.draft_svg
    out["target_think"] = sample.target_think
    out["target_svg"] = sample.target_svg
    return out


def sample_from_dict(data: dict, line: int | None = None) -> TaskSample:
    if not isinstance(data, dict):
        raise SchemaError("record is not an object", line)
    unknown = set(data) - set(_SCHEMA_KEYS)
    if unknown:
        raise SchemaError(f"unknown fields: {sorted(unknown)}", line)
    for req in ("id", "task", "instruction", "target_think", "target_svg"):
        if req not in data:
            raise SchemaError(f"missing field {req!r}", line)
    task = _TASK_BY_VALUE.get(data["task"])
    if task is None:
        raise SchemaError(f"unknown task {data['task']!r}", line)
    sample = TaskSample(
        id=str(data["id"]),
        task=task,
        instruction=str(data["instruction"]),
        image_path=data.get("image_path"),
        image_sha256=data.get("image_sha256"),
        draft_svg=data.get("draft_svg"),
        target_think=str(data["target_think"]),
        target_svg=str(data["target_svg"]),
    )
    try:
        sample.validate()
    except MissingFieldError as exc:
        raise SchemaError(str(exc), line) from exc
    return sample


def write_dataset(samples, path) -> None:
    """One canonical JSON object per line (schema key order, no extra spaces)."""
    with open(path, "w", encoding="utf-8") as fp:
        for sample in samples:
            fp.write(json.dumps(sample_to_dict(sample), ensure_ascii=False,
                                separators=(",", ":")))
            fp.write("\n")


def read_dataset(path) -> list[TaskSample]:
    samples = []
    with open(path, encoding="utf-8") as fp:
        for lineno, raw in enumerate(fp, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                data = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc}", lineno) from exc
            samples.append(sample_from_dict(data, lineno))
    return samples
