"""Markdown and JSON serialisation of reports."""

from __future__ import annotations

import json
import re
from typing import Any, Optional

from .model import Category, CategoryResult, Report, RuleResult, Status

# caps keep a report table within 100 terminal columns
TABLE_WIDTH = 100
RULE_CELL_WIDTH = 38
SCORE_CELL_WIDTH = 6  # "100.0%"
WEIGHT_CELL_WIDTH = 6  # "Weight"; wider weights shrink the status cap
STATUS_CELL_WIDTH = TABLE_WIDTH - 13 - RULE_CELL_WIDTH - SCORE_CELL_WIDTH - WEIGHT_CELL_WIDTH


def format_score(score: Optional[float]) -> str:
    return "n/a" if score is None else f"{score:.1f}%"


def format_weight(weight: float) -> str:
    return f"{weight:.4g}"


def _cell(text: str, limit: int) -> str:
    text = " ".join(text.replace("|", "/").split())
    return text if len(text) <= limit else text[: limit - 1] + "…"


def status_text(result: RuleResult) -> str:
    if result.status is Status.EVALUATED:
        return "evaluated"
    return f"{result.status.value}: {result.reason}" if result.reason else result.status.value


def _status_cap(results) -> int:
    widest = max((len(format_weight(r.weight)) for r in results), default=0)
    return STATUS_CELL_WIDTH - max(0, widest - WEIGHT_CELL_WIDTH)


def _rule_row(result: RuleResult, status_cap: int) -> str:
    score = format_score(result.score) if result.status is Status.EVALUATED else "-"
    cells = (
        _cell(result.slug, RULE_CELL_WIDTH),
        score,
        format_weight(result.weight),
        _cell(status_text(result), status_cap),
    )
    return "| " + " | ".join(cells) + " |"


_FENCE_RE = re.compile(r"^ {0,3}(`{3,}|~{3,})")


def _close_fences(body: str) -> str:
    """Close a code fence left open by rule details so it cannot swallow the rest of the report."""
    open_fence = None
    for line in body.splitlines():
        match = _FENCE_RE.match(line)
        if not match:
            continue
        fence = match.group(1)
        if open_fence is None:
            if not (fence[0] == "`" and "`" in line[match.end():]):
                open_fence = fence
        elif fence[0] == open_fence[0] and len(fence) >= len(open_fence) and not line[match.end():].strip():
            open_fence = None
    return body if open_fence is None else f"{body}\n{open_fence}"


def _details_section(result: RuleResult, status_cap: int) -> list[str]:
    body = _close_fences(result.details.strip())
    status = status_text(result)
    if result.status is not Status.EVALUATED and len(status) > status_cap:
        body = f"**{result.status.value.capitalize()}:** {result.reason}" + ("\n\n" + body if body else "")
    if not body:
        return []
    title = " ".join((result.name or result.slug).replace("|", "/").split())
    return [f"### {title} (`{result.slug}`)", "", body, ""]


def render_markdown(report: Report, details: bool = True) -> str:
    """Render ``report`` as a CommonMark document with GFM-style tables."""
    lines = [
        f"# mllint report: {report.project}",
        "",
        f"Profile `{report.profile}`, mllint {report.tool_version}, config digest `{report.config_digest}`.",
        "",
        f"**Overall score: {format_score(report.overall_score)}**",
        "",
    ]
    for cat in report.categories:
        lines += [f"## {cat.title} ({format_score(cat.score)})", ""]
        lines += ["| Rule | Score | Weight | Status |", "|------|------:|-------:|--------|"]
        cap = _status_cap(cat.rule_results)
        lines += [_rule_row(r, cap) for r in cat.rule_results]
        lines.append("")
        if details:
            for result in cat.rule_results:
                lines += _details_section(result, cap)
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines) + "\n"


def report_to_dict(report: Report) -> dict[str, Any]:
    return {
        "project": report.project,
        "profile": report.profile,
        "overall_score": report.overall_score,
        "tool_version": report.tool_version,
        "config_digest": report.config_digest,
        "categories": [
            {
                "category": cat.category.value,
                "title": cat.title,
                "weight": cat.weight,
                "score": cat.score,
                "rules": [
                    {
                        "slug": r.slug,
                        "name": r.name,
                        "weight": r.weight,
                        "status": r.status.value,
                        "score": r.score,
                        "reason": r.reason,
                        "details": r.details,
                    }
                    for r in cat.rule_results
                ],
            }
            for cat in report.categories
        ],
    }


def _float(value: Any) -> Optional[float]:
    return None if value is None else float(value)


def report_from_dict(data: dict[str, Any]) -> Report:
    categories = tuple(
        CategoryResult(
            category=Category(cat["category"]),
            weight=float(cat["weight"]),
            score=_float(cat["score"]),
            rule_results=tuple(
                RuleResult(
                    slug=r["slug"],
                    status=Status(r["status"]),
                    score=_float(r["score"]),
                    details=r["details"],
                    reason=r["reason"],
                    name=r["name"],
                    weight=float(r["weight"]),
                )
                for r in cat["rules"]
            ),
        )
        for cat in data["categories"]
    )
    return Report(
        project=data["project"],
        profile=data["profile"],
        overall_score=_float(data["overall_score"]),
        categories=categories,
        tool_version=data["tool_version"],
        config_digest=data["config_digest"],
    )


def render_json(report: Report) -> str:
    """Canonical JSON: sorted keys, two-space indent, shortest round-tripping floats."""
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def parse_report_json(text: str) -> Report:
    return report_from_dict(json.loads(text))
