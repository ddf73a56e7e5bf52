"""Explicit analysis state machine for multi-turn sessions.

A session walks Created -> Loaded -> Profiled -> Prepared -> Discovered
-> Validated -> Reported. Intents are parsed from chat utterances by a
deterministic rule grammar; each stage emits Started/Done/Failed
progress events with strictly increasing sequence numbers, and the full
state round-trips through a versioned JSON checkpoint.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from . import repair as repair_mod
from .discovery import (
    Algorithm,
    AlgorithmChoice,
    CiTestKind,
    DiscoveryParams,
    matrix_for_test,
    run_pc,
    select_algorithm,
)
from .errors import CorruptCheckpoint, InvalidTransition, VersionMismatch
from .graph import ARROW, LINE, CausalGraph, from_json, graph_to_dict
from .intervention import InterventionAnswer, InterventionQuery, answer_query
from .reporting import (
    DeterministicTemplateClient,
    GeneratedBy,
    ReportDocument,
    Section,
    TextGenClient,
    build_report,
    rank_regulators,
    render_markdown,
)
from .retrieval import Index, default_index
from .tabular import (
    Column,
    ColumnKind,
    ColumnProfile,
    Dataset,
    DatasetProfile,
    MissingPolicy,
    prepare_for_discovery,
    profile as profile_dataset,
)

TEST_MODE_ENV = "CAUSALAB_TEST_MODE"
CHECKPOINT_SCHEMA_VERSION = 1

LOAD_LABEL = "Load file and validate data"
PROFILE_LABEL = "Profile dataset"
PREPARE_LABEL = "Preprocess data"
DISCOVER_LABEL = "Learn causal structure"
VALIDATE_LABEL = "Validate DAG assumptions"
REPORT_LABEL = "Generate report"


class Stage(int, Enum):
    CREATED = 0
    LOADED = 1
    PROFILED = 2
    PREPARED = 3
    DISCOVERED = 4
    VALIDATED = 5
    REPORTED = 6

    @property
    def label(self) -> str:
        return self.name.lower()


class EventStatus(str, Enum):
    STARTED = "started"
    DONE = "done"
    FAILED = "failed"


@dataclass(frozen=True)
class ProgressEvent:
    seq: int
    stage: str
    status: str
    detail: str
    ts: float

    def to_dict(self) -> dict:
        return {"seq": self.seq, "stage": self.stage, "status": self.status,
                "detail": self.detail, "ts": self.ts}


class IntentKind(str, Enum):
    ANALYZE_FULL = "analyze_full"
    PROFILE_ONLY = "profile_only"
    WHAT_IF = "what_if"
    EXPLAIN_EDGE = "explain_edge"
    REGENERATE_REPORT = "regenerate_report"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Intent:
    kind: IntentKind
    target: str | None = None
    outcome: str | None = None
    edge: tuple[str, str] | None = None
    raw: str = ""
    confidence: float = 1.0


@dataclass
class AnalysisState:
    session_id: str
    stage: Stage = Stage.CREATED
    dataset: Dataset | None = None
    profile: DatasetProfile | None = None
    params: DiscoveryParams | None = None
    choice: AlgorithmChoice | None = None
    missing_policy: MissingPolicy | None = None
    bins: int = 20
    priors: tuple = ()
    graph: CausalGraph | None = None
    repair_plan: repair_mod.RepairPlan | None = None
    report: ReportDocument | None = None
    diagnostics: dict | None = None
    textgen_notice: str | None = None
    history: list = field(default_factory=list)
    progress_log: list = field(default_factory=list)

    def dataset_name(self) -> str:
        return self.dataset.name if self.dataset is not None else "(none)"

    def known_nodes(self) -> tuple[str, ...]:
        if self.graph is not None:
            return self.graph.nodes
        if self.dataset is not None:
            return self.dataset.column_names()
        return ()


@dataclass
class TurnResult:
    state: AnalysisState
    text: str
    events: list
    answer: InterventionAnswer | None = None
    graph_updated: bool = False
    report_updated: bool = False


# --- intent grammar ----------------------------------------------------------

_WHATIF_PHRASES = ("what if", "do(")
_WHATIF_WORDS = ("intervene", "intervening", "intervention")
_EXPLAIN_WORDS = ("why", "explain")
_PROFILE_WORDS = ("profile", "summary", "overview")


def _word_in(word: str, text: str) -> bool:
    return re.search(rf"\b{re.escape(word)}\b", text) is not None


def _node_mentions(utterance: str, known_nodes) -> list[str]:
    hits: list[tuple[int, str]] = []
    for node in known_nodes:
        m = re.search(rf"\b{re.escape(node)}\b", utterance, re.IGNORECASE)
        if m:
            hits.append((m.start(), node))
    hits.sort()
    return [n for _, n in hits]


def parse_intent(utterance: str, known_nodes=()) -> Intent:
    """Deterministic rule grammar; confidence 1.0 on any rule hit."""
    lowered = utterance.lower()
    mentions = _node_mentions(utterance, known_nodes)

    wants_whatif = (
        any(p in lowered for p in _WHATIF_PHRASES)
        or any(_word_in(w, lowered) for w in _WHATIF_WORDS)
    )
    if wants_whatif and mentions:
        return Intent(
            kind=IntentKind.WHAT_IF,
            target=mentions[0],
            outcome=mentions[1] if len(mentions) > 1 else None,
            raw=utterance,
        )
    if any(_word_in(w, lowered) for w in _EXPLAIN_WORDS) and len(mentions) >= 2:
        return Intent(
            kind=IntentKind.EXPLAIN_EDGE,
            edge=(mentions[0], mentions[1]),
            raw=utterance,
        )
    if _word_in("report", lowered) and (
        _word_in("regenerate", lowered) or _word_in("again", lowered)
    ):
        return Intent(kind=IntentKind.REGENERATE_REPORT, raw=utterance)
    if "causal analysis" in lowered or _word_in("analyze", lowered):
        return Intent(kind=IntentKind.ANALYZE_FULL, raw=utterance)
    if any(_word_in(w, lowered) for w in _PROFILE_WORDS) and "analysis" not in lowered:
        return Intent(kind=IntentKind.PROFILE_ONLY, raw=utterance)
    return Intent(kind=IntentKind.UNKNOWN, raw=utterance, confidence=0.0)


# --- engine ------------------------------------------------------------------

def _is_test_mode() -> bool:
    return os.environ.get(TEST_MODE_ENV, "") not in ("", "0")


class Engine:
    """Runs intents against session states; owns retrieval and text-gen."""

    def __init__(
        self,
        index: Index | None = None,
        client: TextGenClient | None = None,
        default_params: DiscoveryParams | None = None,
        missing_policy: MissingPolicy = MissingPolicy.DROP_ROWS,
        bins: int = 20,
        test_mode: bool | None = None,
    ):
        self.index = index if index is not None else default_index()
        self.client = client or DeterministicTemplateClient()
        self.default_params = default_params
        self.missing_policy = missing_policy
        self.bins = bins
        self.test_mode = _is_test_mode() if test_mode is None else test_mode

    # -- session plumbing --

    def new_session(self, session_id: str) -> AnalysisState:
        return AnalysisState(session_id=session_id, bins=self.bins)

    def _now(self) -> float:
        return 0.0 if self.test_mode else time.time()

    def _emit(self, state: AnalysisState, sink: list, label: str,
              status: EventStatus, detail: str = "",
              on_event: Callable | None = None) -> None:
        ev = ProgressEvent(
            seq=len(state.progress_log) + 1,
            stage=label,
            status=status.value,
            detail=detail,
            ts=self._now(),
        )
        state.progress_log.append(ev)
        sink.append(ev)
        if on_event is not None:
            on_event(ev)

    def attach_dataset(self, state: AnalysisState, ds: Dataset,
                       on_event: Callable | None = None) -> list:
        events: list = []
        self._emit(state, events, LOAD_LABEL, EventStatus.STARTED,
                   ds.name, on_event)
        state.dataset = ds
        state.stage = Stage.LOADED
        self._emit(
            state, events, LOAD_LABEL, EventStatus.DONE,
            f"{ds.row_count} rows, {len(ds.columns)} columns", on_event,
        )
        return events

    # -- turn processing --

    def run_turn(self, state: AnalysisState, utterance: str,
                 on_event: Callable | None = None) -> TurnResult:
        """Parse, advance, and always produce a chat-worthy response."""
        intent = parse_intent(utterance, state.known_nodes())
        try:
            return self.advance(state, intent, on_event=on_event)
        except InvalidTransition as e:
            text = f"I can't do that yet: {e}"
            state.history.append((utterance, f"[{intent.kind.value}] {text}"))
            return TurnResult(state=state, text=text, events=[])

    def advance(self, state: AnalysisState, intent: Intent,
                on_event: Callable | None = None) -> TurnResult:
        """Dispatch one intent; may raise InvalidTransition."""
        handler = {
            IntentKind.ANALYZE_FULL: self._do_analyze_full,
            IntentKind.PROFILE_ONLY: self._do_profile_only,
            IntentKind.WHAT_IF: self._do_what_if,
            IntentKind.EXPLAIN_EDGE: self._do_explain_edge,
            IntentKind.REGENERATE_REPORT: self._do_regenerate,
            IntentKind.UNKNOWN: self._do_unknown,
        }[intent.kind]
        result = handler(state, intent, on_event)
        first_line = (result.text.splitlines() or [""])[0]
        state.history.append(
            (intent.raw, f"[{intent.kind.value}] " + first_line[:160])
        )
        return result

    # -- stage bodies --

    def _stage_profile(self, state: AnalysisState) -> str:
        state.profile = profile_dataset(state.dataset, state.bins)
        state.stage = Stage.PROFILED
        return f"friendliness {state.profile.friendliness}/100"

    def _stage_prepare(self, state: AnalysisState) -> str:
        state.missing_policy = self.missing_policy
        prepared = prepare_for_discovery(state.dataset, self.missing_policy)
        state.stage = Stage.PREPARED
        return f"{prepared.row_count} complete rows ready"

    def _prepared_dataset(self, state: AnalysisState) -> Dataset:
        # deterministic, so recomputed on demand instead of checkpointed
        policy = state.missing_policy or self.missing_policy
        return prepare_for_discovery(state.dataset, policy)

    def _stage_discover(self, state: AnalysisState, instruction: str) -> str:
        choice = select_algorithm(state.profile, instruction)
        state.choice = choice
        base = self.default_params or DiscoveryParams()
        state.params = DiscoveryParams(
            alpha=base.alpha,
            max_cond_size=base.max_cond_size,
            algorithm=choice.algorithm,
            test=choice.test,
        )
        prepared = self._prepared_dataset(state)
        data = matrix_for_test(prepared, state.params.test)
        graph, diagnostics = run_pc(
            data, prepared.column_names(), state.params
        )
        state.graph = graph
        state.diagnostics = diagnostics.to_dict()
        state.stage = Stage.DISCOVERED
        return (
            f"{len(graph.directed_edges())} directed, "
            f"{len(graph.undirected_edges())} undirected edges "
            f"({diagnostics.ci_tests} CI tests)"
        )

    def _stage_validate(self, state: AnalysisState) -> str:
        cycles = repair_mod.detect_violations(state.graph)
        if not cycles:
            state.repair_plan = repair_mod.RepairPlan(
                edits=(), resulting_graph=state.graph
            )
            state.stage = Stage.VALIDATED
            return "no DAG violations"
        corr = None
        if state.profile is not None and state.profile.continuous_names == \
                state.graph.nodes:
            corr = state.profile.correlation
        plan = repair_mod.propose_repairs(state.graph, corr, state.priors)
        state.repair_plan = plan
        state.graph = plan.resulting_graph
        state.stage = Stage.VALIDATED
        return f"{len(cycles)} cycle(s) repaired with {len(plan.edits)} edit(s)"

    def _stage_report(self, state: AnalysisState) -> str:
        state.report = build_report(state, self.index, self.client)
        state.stage = Stage.REPORTED
        return f"{len(state.report.sections)} sections"

    def _do_analyze_full(self, state, intent, on_event) -> TurnResult:
        if state.dataset is None:
            raise InvalidTransition("upload a dataset before running analysis")
        # a fresh run recomputes everything downstream of the dataset
        state.stage = Stage.LOADED
        state.profile = None
        state.graph = None
        state.repair_plan = None
        state.report = None
        state.diagnostics = None
        state.choice = None
        events: list = []
        stages: list[tuple[str, Callable[[], str]]] = [
            (PROFILE_LABEL, lambda: self._stage_profile(state)),
            (PREPARE_LABEL, lambda: self._stage_prepare(state)),
            (DISCOVER_LABEL, lambda: self._stage_discover(state, intent.raw)),
            (VALIDATE_LABEL, lambda: self._stage_validate(state)),
            (REPORT_LABEL, lambda: self._stage_report(state)),
        ]
        for label, body in stages:
            self._emit(state, events, label, EventStatus.STARTED, "", on_event)
            try:
                detail = body()
            except Exception as e:  # any stage failure halts the run honestly
                detail = f"{type(e).__name__}: {e}"
                self._emit(state, events, label, EventStatus.FAILED,
                           detail, on_event)
                text = (
                    f"The analysis stopped at '{label}': {detail}. "
                    f"Earlier results are still available."
                )
                return TurnResult(state=state, text=text, events=events)
            self._emit(state, events, label, EventStatus.DONE, detail, on_event)

        top = [
            name for name, d, _ in rank_regulators(state.graph)[:3] if d > 0
        ]
        lead = (
            f"Analysis of {state.dataset_name()!r} is complete: "
            f"{state.graph.edge_count()} edges learned"
        )
        if top:
            lead += f"; most influential variables: {', '.join(top)}"
        text = lead + ". The full report is ready."
        return TurnResult(state=state, text=text, events=events,
                          graph_updated=True, report_updated=True)

    def _do_profile_only(self, state, intent, on_event) -> TurnResult:
        if state.dataset is None:
            raise InvalidTransition("upload a dataset before profiling")
        events: list = []
        if state.stage < Stage.PROFILED:
            self._emit(state, events, PROFILE_LABEL, EventStatus.STARTED,
                       "", on_event)
            detail = self._stage_profile(state)
            self._emit(state, events, PROFILE_LABEL, EventStatus.DONE,
                       detail, on_event)
        p = state.profile
        cont = sum(1 for c in p.columns if c.kind is ColumnKind.CONTINUOUS)
        text = (
            f"{state.dataset_name()!r}: {state.dataset.row_count} rows, "
            f"{len(p.columns)} columns ({cont} continuous). "
            f"Causal-analysis friendliness: {p.friendliness}/100."
        )
        if p.friendliness_reasons:
            text += " " + " ".join(p.friendliness_reasons)
        return TurnResult(state=state, text=text, events=events)

    def _do_what_if(self, state, intent, on_event) -> TurnResult:
        if state.dataset is None:
            raise InvalidTransition(
                "upload a dataset and run the analysis before asking "
                "what-if questions"
            )
        if state.stage < Stage.DISCOVERED or state.graph is None:
            raise InvalidTransition(
                "run the causal analysis first so there is a graph to "
                "intervene on"
            )
        query = InterventionQuery(target=intent.target, outcome=intent.outcome)
        ds = None
        if (
            state.dataset.kinds() == {ColumnKind.CONTINUOUS}
            and state.graph.is_fully_directed()
        ):
            ds = self._prepared_dataset(state)
        answer = answer_query(state.graph, query, ds)
        return TurnResult(state=state, text=answer.narrative, events=[],
                          answer=answer)

    def _do_explain_edge(self, state, intent, on_event) -> TurnResult:
        if state.stage < Stage.DISCOVERED or state.graph is None:
            raise InvalidTransition(
                "run the causal analysis first so there are edges to explain"
            )
        a, b = intent.edge
        g = state.graph
        if g.mark(a, b) == ARROW:
            rel = f"the learned graph orients {a} -> {b}"
        elif g.mark(b, a) == ARROW:
            rel = f"the learned graph orients {b} -> {a}"
        elif g.mark(a, b) == LINE:
            rel = (
                f"{a} and {b} are connected but the direction is not "
                f"identifiable from this data"
            )
        else:
            rel = (
                f"no edge links {a} and {b}: some conditioning set made "
                f"them statistically independent"
            )
        text = f"About {a} and {b}: {rel}."
        if state.profile is not None:
            r = state.profile.correlation_between(a, b)
            if r is not None:
                text += f" Their marginal correlation is {r:.3f}."
        hits = self.index.search("markov equivalence orientation collider", 1)
        if hits:
            text += f" (See also: {hits[0][0]}.)"
        return TurnResult(state=state, text=text, events=[])

    def _do_regenerate(self, state, intent, on_event) -> TurnResult:
        if state.stage < Stage.VALIDATED:
            raise InvalidTransition(
                "run the causal analysis first, then I can regenerate "
                "its report"
            )
        events: list = []
        self._emit(state, events, REPORT_LABEL, EventStatus.STARTED,
                   "regenerate", on_event)
        detail = self._stage_report(state)
        self._emit(state, events, REPORT_LABEL, EventStatus.DONE,
                   detail, on_event)
        return TurnResult(
            state=state, text="The report has been regenerated.",
            events=events, report_updated=True,
        )

    def _do_unknown(self, state, intent, on_event) -> TurnResult:
        nodes = state.known_nodes()
        hint = (
            f" Known variables: {', '.join(nodes)}." if nodes else
            " Upload a CSV dataset to get started."
        )
        text = (
            "I didn't recognize that request. I can run a causal analysis, "
            "profile the data, answer what-if intervention questions about "
            "known variables, explain edges, or regenerate the report." + hint
        )
        return TurnResult(state=state, text=text, events=[])


# --- checkpoints -------------------------------------------------------------

def _dataset_to_dict(ds: Dataset) -> dict:
    return {
        "name": ds.name,
        "row_count": ds.row_count,
        "columns": [
            {"name": c.name, "kind": c.kind.value, "values": list(c.values)}
            for c in ds.columns
        ],
    }


def _dataset_from_dict(d: dict) -> Dataset:
    cols = tuple(
        Column(c["name"], ColumnKind(c["kind"]), tuple(c["values"]))
        for c in d["columns"]
    )
    return Dataset(name=d["name"], columns=cols, row_count=d["row_count"])


def profile_to_dict(p: DatasetProfile) -> dict:
    return {
        "columns": [
            {
                "name": c.name,
                "kind": c.kind.value,
                "missing_rate": c.missing_rate,
                "unique_count": c.unique_count,
                "mean": c.mean,
                "std": c.std,
                "min": c.min,
                "max": c.max,
                "histogram": [list(b) for b in c.histogram],
            }
            for c in p.columns
        ],
        "continuous_names": list(p.continuous_names),
        "correlation": [list(row) for row in p.correlation],
        "friendliness": p.friendliness,
        "friendliness_reasons": list(p.friendliness_reasons),
        "warnings": list(p.warnings),
    }


def _profile_from_dict(d: dict) -> DatasetProfile:
    cols = tuple(
        ColumnProfile(
            name=c["name"],
            kind=ColumnKind(c["kind"]),
            missing_rate=c["missing_rate"],
            unique_count=c["unique_count"],
            mean=c["mean"],
            std=c["std"],
            min=c["min"],
            max=c["max"],
            histogram=tuple(tuple(b) for b in c["histogram"]),
        )
        for c in d["columns"]
    )
    return DatasetProfile(
        columns=cols,
        continuous_names=tuple(d["continuous_names"]),
        correlation=tuple(tuple(row) for row in d["correlation"]),
        friendliness=d["friendliness"],
        friendliness_reasons=tuple(d["friendliness_reasons"]),
        warnings=tuple(d["warnings"]),
    )


def _params_to_dict(p: DiscoveryParams) -> dict:
    return {
        "alpha": p.alpha,
        "max_cond_size": p.max_cond_size,
        "algorithm": p.algorithm.value,
        "test": p.test.value,
    }


def _params_from_dict(d: dict) -> DiscoveryParams:
    return DiscoveryParams(
        alpha=d["alpha"],
        max_cond_size=d["max_cond_size"],
        algorithm=Algorithm(d["algorithm"]),
        test=CiTestKind(d["test"]),
    )


def _choice_to_dict(c: AlgorithmChoice) -> dict:
    return {"algorithm": c.algorithm.value, "test": c.test.value,
            "rationale": c.rationale}


def _choice_from_dict(d: dict) -> AlgorithmChoice:
    return AlgorithmChoice(
        algorithm=Algorithm(d["algorithm"]),
        test=CiTestKind(d["test"]),
        rationale=d["rationale"],
    )


def _plan_to_dict(plan: repair_mod.RepairPlan) -> dict:
    # exact floats here: checkpoints must round-trip to identity
    return {
        "edits": [
            {"edge": list(e.edge), "action": e.action.value,
             "confidence": e.confidence, "justification": e.justification}
            for e in plan.edits
        ],
        "resulting_graph": graph_to_dict(plan.resulting_graph),
    }


def _plan_from_dict(d: dict) -> repair_mod.RepairPlan:
    edits = tuple(
        repair_mod.EdgeEdit(
            edge=tuple(e["edge"]),
            action=repair_mod.EditAction(e["action"]),
            confidence=e["confidence"],
            justification=e["justification"],
        )
        for e in d["edits"]
    )
    return repair_mod.RepairPlan(
        edits=edits, resulting_graph=from_json(d["resulting_graph"])
    )


def _report_to_dict(r: ReportDocument) -> dict:
    return r.to_dict()


def _report_from_dict(d: dict) -> ReportDocument:
    return ReportDocument(
        sections=tuple(
            Section(heading=s["heading"], body=s["body"],
                    citations=tuple(s["citations"]))
            for s in d["sections"]
        ),
        generated_by=GeneratedBy(d["generated_by"]),
    )


_CHECKPOINT_FIELDS = {
    "schema_version", "session_id", "stage", "bins", "missing_policy",
    "priors", "dataset", "profile", "params", "choice", "diagnostics",
    "graph", "repair_plan", "report", "textgen_notice", "history",
    "progress_log",
}


def save_checkpoint(state: AnalysisState) -> bytes:
    doc = {
        "schema_version": CHECKPOINT_SCHEMA_VERSION,
        "session_id": state.session_id,
        "stage": state.stage.name.lower(),
        "bins": state.bins,
        "missing_policy": (
            None if state.missing_policy is None else state.missing_policy.value
        ),
        "priors": [[list(edge), w] for edge, w in state.priors],
        "dataset": None if state.dataset is None else _dataset_to_dict(state.dataset),
        "profile": None if state.profile is None else profile_to_dict(state.profile),
        "params": None if state.params is None else _params_to_dict(state.params),
        "choice": None if state.choice is None else _choice_to_dict(state.choice),
        "diagnostics": state.diagnostics,
        "graph": None if state.graph is None else graph_to_dict(state.graph),
        "repair_plan": (
            None if state.repair_plan is None else _plan_to_dict(state.repair_plan)
        ),
        "report": None if state.report is None else _report_to_dict(state.report),
        "textgen_notice": state.textgen_notice,
        "history": [list(h) for h in state.history],
        "progress_log": [ev.to_dict() for ev in state.progress_log],
    }
    return json.dumps(doc).encode("utf-8")


def load_checkpoint(data: bytes) -> AnalysisState:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CorruptCheckpoint(f"cannot decode checkpoint: {e}") from None
    if not isinstance(doc, dict):
        raise CorruptCheckpoint("checkpoint is not a JSON object")
    version = doc.get("schema_version")
    if version != CHECKPOINT_SCHEMA_VERSION:
        raise VersionMismatch(
            f"checkpoint schema_version {version!r}; this build reads "
            f"{CHECKPOINT_SCHEMA_VERSION}"
        )
    unknown = set(doc) - _CHECKPOINT_FIELDS
    if unknown:
        raise VersionMismatch(
            f"checkpoint has unknown fields {sorted(unknown)}; likely written "
            f"by a newer build"
        )
    missing = _CHECKPOINT_FIELDS - set(doc)
    if missing:
        raise CorruptCheckpoint(f"checkpoint missing fields {sorted(missing)}")
    try:
        state = AnalysisState(
            session_id=doc["session_id"],
            stage=Stage[doc["stage"].upper()],
            bins=doc["bins"],
            missing_policy=(
                None if doc["missing_policy"] is None
                else MissingPolicy(doc["missing_policy"])
            ),
            priors=tuple((tuple(e), w) for e, w in doc["priors"]),
            dataset=(
                None if doc["dataset"] is None
                else _dataset_from_dict(doc["dataset"])
            ),
            profile=(
                None if doc["profile"] is None
                else _profile_from_dict(doc["profile"])
            ),
            params=(
                None if doc["params"] is None
                else _params_from_dict(doc["params"])
            ),
            choice=(
                None if doc["choice"] is None
                else _choice_from_dict(doc["choice"])
            ),
            diagnostics=doc["diagnostics"],
            graph=None if doc["graph"] is None else from_json(doc["graph"]),
            repair_plan=(
                None if doc["repair_plan"] is None
                else _plan_from_dict(doc["repair_plan"])
            ),
            report=(
                None if doc["report"] is None
                else _report_from_dict(doc["report"])
            ),
            textgen_notice=doc["textgen_notice"],
            history=[tuple(h) for h in doc["history"]],
            progress_log=[
                ProgressEvent(
                    seq=ev["seq"], stage=ev["stage"], status=ev["status"],
                    detail=ev["detail"], ts=ev["ts"],
                )
                for ev in doc["progress_log"]
            ],
        )
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptCheckpoint(f"malformed checkpoint field: {e}") from None
    return state


def report_markdown(state: AnalysisState) -> str:
    if state.report is None:
        raise InvalidTransition("no report available yet")
    return render_markdown(state.report)
