"""Report assembly from session state, retrieval, and optional text generation.

Every section is first built as a deterministic fact skeleton. A text
client may rephrase a section, but the draft is accepted only if every
number it contains also appears in the skeleton; otherwise the section
falls back to the template. With the built-in template client the whole
document is byte-reproducible.
"""

from __future__ import annotations

import json
import re
import urllib.error
import urllib.request
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Protocol

from .graph import CausalGraph, descendants
from .retrieval import Index
from .tabular import ColumnKind

if TYPE_CHECKING:  # pragma: no cover
    from .orchestrator import AnalysisState

MANDATORY_HEADINGS = (
    "Executive Summary",
    "Data Overview",
    "Methodology",
    "Key Causal Findings",
    "Limitations",
)

_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")


class GeneratedBy(str, Enum):
    TEMPLATE = "template"
    GENERATED_TEXT = "generated_text"


@dataclass(frozen=True)
class Section:
    heading: str
    body: str
    citations: tuple[str, ...] = ()


@dataclass(frozen=True)
class ReportDocument:
    sections: tuple[Section, ...]
    generated_by: GeneratedBy

    def section(self, heading: str) -> Section:
        for s in self.sections:
            if s.heading == heading:
                return s
        raise KeyError(heading)

    def to_dict(self) -> dict:
        return {
            "sections": [
                {"heading": s.heading, "body": s.body,
                 "citations": list(s.citations)}
                for s in self.sections
            ],
            "generated_by": self.generated_by.value,
        }


class TextGenClient(Protocol):
    def generate(self, instruction: str, context: str) -> str: ...


class DeterministicTemplateClient:
    """Fallback client: the facts are the text."""

    def generate(self, instruction: str, context: str) -> str:
        return context


class RemoteTextGenClient:
    """Minimal HTTP client: POST {instruction, context} -> {text}.

    One retry on failure; callers treat any exception as a cue to fall
    back to the template.
    """

    def __init__(self, endpoint: str, api_key: str | None = None,
                 timeout: float = 30.0):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout

    def generate(self, instruction: str, context: str) -> str:
        payload = json.dumps(
            {"instruction": instruction, "context": context}
        ).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error: Exception | None = None
        for _ in range(2):
            try:
                req = urllib.request.Request(
                    self.endpoint, data=payload, headers=headers
                )
                with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                    body = json.loads(resp.read().decode("utf-8"))
                return str(body["text"])
            except (urllib.error.URLError, OSError, KeyError, ValueError) as e:
                last_error = e
        raise RuntimeError(f"text generation failed: {last_error}")


def rank_regulators(g: CausalGraph) -> list[tuple[str, int, int]]:
    """Nodes ranked by directed descendant count, then out-degree.

    Undirected edges contribute to neither count; canonical node order
    breaks remaining ties.
    """
    rows = []
    for idx, node in enumerate(g.nodes):
        desc = len(descendants(g, node))
        out_deg = len(g.children(node))
        rows.append((node, desc, out_deg, idx))
    rows.sort(key=lambda r: (-r[1], -r[2], r[3]))
    return [(n, d, o) for n, d, o, _ in rows]


def numbers_in(text: str) -> set[float]:
    return {float(tok) for tok in _NUMBER_RE.findall(text)}


def _validated(candidate: str, skeleton: str) -> bool:
    allowed = numbers_in(skeleton)
    return all(v in allowed for v in numbers_in(candidate))


_SECTION_QUERIES = {
    "Executive Summary": "causal analysis workflow report",
    "Data Overview": "data profiling quality missing values correlation",
    "Methodology": "pc algorithm conditional independence test significance",
    "Key Causal Findings": "master regulators intervention descendants dag",
    "Limitations": "markov equivalence latent confounders assumptions limitations",
}


def _fmt_pct(x: float) -> str:
    return f"{100 * x:.1f}%"


def _data_overview(state: "AnalysisState") -> str:
    p = state.profile
    assert p is not None
    lines = [
        f"The dataset {state.dataset_name()!r} has {state.dataset.row_count} "
        f"rows and {len(p.columns)} columns."
    ]
    for c in p.columns:
        if c.kind is ColumnKind.CONTINUOUS and c.mean is not None:
            lines.append(
                f"- {c.name}: continuous, missing {_fmt_pct(c.missing_rate)}, "
                f"mean {c.mean:.4g}, std {c.std:.4g}, "
                f"range [{c.min:.4g}, {c.max:.4g}]"
            )
        else:
            lines.append(
                f"- {c.name}: {c.kind.value}, missing "
                f"{_fmt_pct(c.missing_rate)}, {c.unique_count} distinct values"
            )
    if p.warnings:
        lines.append("Data warnings: " + "; ".join(p.warnings) + ".")
    lines.append(
        f"Causal-analysis friendliness score: {p.friendliness}/100."
    )
    for reason in p.friendliness_reasons:
        lines.append(f"  {reason}")
    return "\n".join(lines)


def _methodology(state: "AnalysisState") -> str:
    lines = []
    if state.choice is not None:
        lines.append(
            f"Algorithm selection: {state.choice.algorithm.value.upper()} "
            f"({state.choice.rationale})."
        )
    if state.params is not None:
        cond = ("unlimited" if state.params.max_cond_size is None
                else str(state.params.max_cond_size))
        lines.append(
            f"Structure learning used the order-independent (stable) PC "
            f"search with the {state.params.test.value} test at significance "
            f"level {state.params.alpha}, conditioning sets up to size {cond}."
        )
    if state.missing_policy is not None:
        lines.append(
            f"Missing cells were handled by the {state.missing_policy.value} "
            f"policy before testing."
        )
    if state.diagnostics:
        d = state.diagnostics
        lines.append(
            f"The search ran {d.get('ci_tests', 0)} conditional-independence "
            f"tests; edges removed per conditioning level: "
            f"{d.get('edges_removed_per_level', [])}."
        )
        conflicts = d.get("orientation_conflicts", [])
        if conflicts:
            lines.append(
                f"{len(conflicts)} edge(s) received conflicting collider "
                f"orientations and were left undirected."
            )
    lines.append(
        "The friendliness score is a fixed in-house rubric (missingness, "
        "sample size, degenerate and high-cardinality columns); it stands in "
        "for a rating the methodology literature does not define."
    )
    if not lines:
        lines.append("No analysis has been run yet.")
    return "\n".join(lines)


def _findings(state: "AnalysisState") -> str:
    g = state.graph
    assert g is not None
    directed = g.directed_edges()
    undirected = g.undirected_edges()
    lines = [
        f"The learned structure has {len(directed)} directed and "
        f"{len(undirected)} undirected edges over {len(g.nodes)} variables."
    ]
    ranking = rank_regulators(g)
    top = [r for r in ranking[:3] if r[1] > 0]
    if top:
        named = ", ".join(
            f"{name} (reaches {d} variables, {o} direct)" for name, d, o in top
        )
        lines.append(f"Top regulators by downstream reach: {named}.")
        lines.append(
            f"{top[0][0]} ranks first and is the natural priority target "
            f"for interventions."
        )
    else:
        lines.append(
            "No variable has directed downstream reach; orientations are "
            "too ambiguous to rank regulators."
        )
    if directed:
        shown = ", ".join(f"{a} -> {b}" for a, b in directed[:8])
        more = "" if len(directed) <= 8 else f" (+{len(directed) - 8} more)"
        lines.append(f"Directed edges: {shown}{more}.")
    if state.repair_plan is not None and state.repair_plan.edits:
        lines.append(
            f"{len(state.repair_plan.edits)} edge(s) were edited to restore "
            f"acyclicity; see Limitations."
        )
    return "\n".join(lines)


def _limitations(state: "AnalysisState") -> str:
    lines = []
    if state.graph is None:
        lines.append("Structure learning not completed; findings are absent.")
    else:
        undirected = state.graph.undirected_edges()
        if undirected:
            lines.append(
                f"{len(undirected)} edge(s) remain undirected: the data "
                f"cannot distinguish their orientation within the Markov "
                f"equivalence class."
            )
    if state.diagnostics and state.diagnostics.get("orientation_conflicts"):
        n = len(state.diagnostics["orientation_conflicts"])
        lines.append(
            f"{n} collider conflict(s) were resolved conservatively by "
            f"leaving edges undirected."
        )
    if state.repair_plan is not None and state.repair_plan.edits:
        for e in state.repair_plan.edits:
            lines.append(
                f"Repair: {e.action.value} {e.edge[0]} -> {e.edge[1]} "
                f"(confidence {e.confidence:.4f})."
            )
    if state.profile is not None:
        if state.profile.friendliness < 70:
            lines.append(
                f"The friendliness score is low "
                f"({state.profile.friendliness}/100); treat results as "
                f"exploratory."
            )
        for reason in state.profile.friendliness_reasons:
            lines.append(f"Data caveat: {reason}")
    lines.append(
        "Results assume acyclicity, no latent confounders, and "
        "faithfulness; none of these is testable from this data alone."
    )
    if state.textgen_notice:
        lines.append(state.textgen_notice)
    return "\n".join(lines)


def _executive_summary(state: "AnalysisState") -> str:
    lines = []
    if state.profile is not None:
        lines.append(
            f"Analyzed {state.dataset_name()!r}: "
            f"{state.dataset.row_count} rows, "
            f"{len(state.profile.columns)} columns, friendliness "
            f"{state.profile.friendliness}/100."
        )
    if state.graph is not None:
        ranking = rank_regulators(state.graph)
        top = [r[0] for r in ranking[:3] if r[1] > 0]
        lines.append(
            f"A causal structure with {state.graph.edge_count()} edges was "
            f"learned."
        )
        if top:
            lines.append(
                f"The most influential variables are {', '.join(top)}."
            )
    else:
        lines.append("Structure learning has not been completed.")
    return "\n".join(lines)


def build_report(
    state: "AnalysisState",
    retrieval: Index | None,
    client: TextGenClient | None = None,
) -> ReportDocument:
    """Assemble the five mandatory sections; degrades, never fails."""
    client = client or DeterministicTemplateClient()
    skeletons: dict[str, str] = {}
    skeletons["Executive Summary"] = _executive_summary(state)
    skeletons["Data Overview"] = (
        _data_overview(state) if state.profile is not None
        else "No profile available."
    )
    skeletons["Methodology"] = _methodology(state)
    skeletons["Key Causal Findings"] = (
        _findings(state) if state.graph is not None
        else "Structure learning not completed."
    )
    skeletons["Limitations"] = _limitations(state)

    sections = []
    any_generated = False
    degraded = False
    for heading in MANDATORY_HEADINGS:
        skeleton = skeletons[heading]
        if heading == "Limitations" and degraded:
            skeleton += (
                "\nText generation was unavailable or inconsistent; "
                "deterministic template text is shown."
            )
        body = skeleton
        try:
            draft = client.generate(
                f"Rewrite the following analysis facts as a clear report "
                f"section titled {heading!r}. Keep every number exactly as "
                f"given.",
                skeleton,
            )
            if draft == skeleton:
                pass
            elif _validated(draft, skeleton):
                body = draft
                any_generated = True
            else:
                degraded = True  # numeric gate rejected the draft
        except Exception:
            degraded = True  # template body stands
        citations: tuple[str, ...] = ()
        if retrieval is not None:
            hits = retrieval.search(_SECTION_QUERIES[heading], 2)
            citations = tuple(doc_id for doc_id, _ in hits)
        sections.append(Section(heading=heading, body=body, citations=citations))
    return ReportDocument(
        sections=tuple(sections),
        generated_by=(
            GeneratedBy.GENERATED_TEXT if any_generated else GeneratedBy.TEMPLATE
        ),
    )


def render_markdown(r: ReportDocument) -> str:
    """Level-2 headings in order, then a footnote list of cited snippets."""
    parts = []
    cited: list[str] = []
    for s in r.sections:
        parts.append(f"## {s.heading}\n")
        body = s.body
        if s.citations:
            refs = "".join(f"[^{c}]" for c in s.citations)
            body = f"{body}\n\n{refs}" if body else refs
            for c in s.citations:
                if c not in cited:
                    cited.append(c)
        parts.append(f"{body}\n")
    if cited:
        parts.append("\n".join(f"[^{c}]: {c}" for c in cited) + "\n")
    return "\n".join(parts)
