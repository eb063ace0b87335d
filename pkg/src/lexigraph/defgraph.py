"""Definitional digraph: arcs from definienda to the senses of their genus
words, arc resolution to break spurious cycles, strong components,
condensation, and primitive candidates.

Arc direction is definiendum -> defining sense ("derives from"); primitives
live in terminal (sink-side) components of the fully resolved graph.
Graphs are immutable values; resolve() returns a new graph.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .lexicon import (
    Lexicon,
    PartOfSpeech,
    ResolutionRecord,
    Sense,
    SenseKey,
    SenseLabel,
    parse_sense,
)


class ResolutionError(ValueError):
    pass


@dataclass(frozen=True, order=False)
class NodeId:
    """A sense node, or an external node for a word defined nowhere in the
    lexicon. External nodes carry the headword only and have no arcs."""

    headword: str
    pos: Optional[PartOfSpeech] = None
    homograph: Optional[int] = None
    label: Optional[str] = None

    @property
    def is_external(self) -> bool:
        return self.pos is None

    @classmethod
    def from_key(cls, key: SenseKey) -> "NodeId":
        return cls(key.headword, key.pos, key.homograph, key.label)

    @property
    def key(self) -> Optional[SenseKey]:
        if self.is_external:
            return None
        return SenseKey(self.headword, self.pos, self.homograph, self.label)

    def sort_key(self) -> tuple:
        if self.is_external:
            return (self.headword, "~external", 0, ())
        return (self.headword, self.pos.value, self.homograph,
                SenseLabel(self.label).sort_key())

    def render(self) -> str:
        if self.is_external:
            return f"{self.headword} (external)"
        return f"{self.headword}:{self.pos.value}:{self.homograph}:{self.label}"


@dataclass(frozen=True)
class Arc:
    """One genus head of one definition line. Unresolved arcs bundle every
    POS-compatible sense of the genus word; resolution narrows the bundle
    to a single target."""

    source: NodeId
    genus_word: str
    targets: frozenset[NodeId]
    resolved: bool = False
    negated: bool = False
    synonym: bool = False
    line: int = field(default=0, compare=False)

    def target(self) -> NodeId:
        assert self.resolved and len(self.targets) == 1
        return next(iter(self.targets))


@dataclass(frozen=True)
class DefinitionGraph:
    nodes: frozenset[NodeId]
    arcs: tuple[Arc, ...]

    def internal_nodes(self) -> list[NodeId]:
        return sorted((n for n in self.nodes if not n.is_external),
                      key=NodeId.sort_key)

    def external_nodes(self) -> list[NodeId]:
        return sorted((n for n in self.nodes if n.is_external),
                      key=NodeId.sort_key)

    def arcs_from(self, node: NodeId) -> list[Arc]:
        return [a for a in self.arcs if a.source == node]

    def edges(self, mode: str) -> dict[NodeId, list[NodeId]]:
        """Adjacency under a mode: optimistic takes every member of every
        bundle; resolved-only takes resolved arcs exclusively."""
        if mode not in ("optimistic", "resolved-only"):
            raise ValueError(f"unknown mode {mode!r}")
        adj: dict[NodeId, list[NodeId]] = {n: [] for n in self.nodes}
        for arc in self.arcs:
            if mode == "resolved-only" and not arc.resolved:
                continue
            for t in sorted(arc.targets, key=NodeId.sort_key):
                if t not in adj[arc.source]:
                    adj[arc.source].append(t)
        return adj


def _use_pos(sense: Sense, parsed) -> PartOfSpeech:
    """Transitivity of the genus use, read off the parsed definition."""
    if parsed is not None and parsed.transitive_use:
        return PartOfSpeech.VT
    return PartOfSpeech.VI


def build_graph(lexicon: Lexicon) -> DefinitionGraph:
    """One node per sense key, one arc per (definition line, genus head).
    Synonym refs arc identically; genus words with no compatible sense in
    the lexicon get a single external target."""
    nodes: set[NodeId] = set()
    arcs: list[Arc] = []
    by_headword: dict[str, list[Sense]] = {}
    for s in lexicon.entries:
        nodes.add(NodeId.from_key(s.key))
        by_headword.setdefault(s.headword, []).append(s)

    def targets_for(word: str, use: PartOfSpeech) -> frozenset[NodeId]:
        found: dict[NodeId, None] = {}
        for cand in by_headword.get(word, []):
            if use.accepts_target(cand.pos):
                found.setdefault(NodeId.from_key(cand.key), None)
        if not found:
            return frozenset({NodeId(word)})
        return frozenset(found)

    for s in lexicon.entries:
        if not s.pos.is_verb:
            continue
        source = NodeId.from_key(s.key)
        if s.is_synonym_line:
            for ref in s.synonym_refs:
                word = ref.lower()
                tg = targets_for(word, s.pos if s.pos is not PartOfSpeech.VB
                                 else PartOfSpeech.VI)
                arcs.append(Arc(source, word, tg, False, False, True, s.line))
            continue
        parsed = parse_sense(s)
        use = _use_pos(s, parsed)
        for head in parsed.genus:
            # phrasal genus falls back to its bare verb unless listed whole
            word = head if (" " not in head or head in by_headword) else head.split()[0]
            tg = targets_for(word, use)
            arcs.append(Arc(source, word, tg, False, parsed.negated, False, s.line))

    for arc in arcs:
        nodes.update(arc.targets)
    ordered = tuple(sorted(arcs, key=lambda a: (a.line, a.genus_word)))
    graph = DefinitionGraph(frozenset(nodes), ordered)
    return graph


def resolve(graph: DefinitionGraph, record: ResolutionRecord) -> DefinitionGraph:
    """Resolve every arc matching (from sense, genus word) to the single
    target sense. Idempotent for a repeated record."""
    source = NodeId.from_key(record.from_key)
    target = NodeId.from_key(record.target)
    if record.target.headword != record.genus_word:
        raise ResolutionError(
            f"target {record.target.render()} is not a sense of {record.genus_word!r}")
    if target not in graph.nodes:
        raise ResolutionError(f"unknown target sense {record.target.render()}")
    matched = False
    new_arcs = []
    for arc in graph.arcs:
        if arc.source == source and arc.genus_word == record.genus_word:
            matched = True
            new_arcs.append(replace(arc, targets=frozenset({target}), resolved=True))
        else:
            new_arcs.append(arc)
    if not matched:
        raise ResolutionError(
            f"no arc from {record.from_key.render()} via {record.genus_word!r}")
    return DefinitionGraph(graph.nodes, tuple(new_arcs))


def apply_resolutions(graph: DefinitionGraph,
                      records: Iterable[ResolutionRecord]) -> DefinitionGraph:
    for record in records:
        graph = resolve(graph, record)
    return graph


def strongly_connected_components(graph: DefinitionGraph,
                                  mode: str = "optimistic") -> list[list[NodeId]]:
    """Tarjan over the mode's edge set; components in canonical order
    (smallest member key first), members sorted."""
    adj = graph.edges(mode)
    order = sorted(adj, key=NodeId.sort_key)
    index: dict[NodeId, int] = {}
    low: dict[NodeId, int] = {}
    on_stack: set[NodeId] = set()
    stack: list[NodeId] = []
    counter = 0
    components: list[list[NodeId]] = []

    for root in order:
        if root in index:
            continue
        work: list[tuple[NodeId, int]] = [(root, 0)]
        while work:
            node, ei = work.pop()
            if ei == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            neighbours = adj[node]
            advanced = False
            while ei < len(neighbours):
                nxt = neighbours[ei]
                ei += 1
                if nxt not in index:
                    work.append((node, ei))
                    work.append((nxt, 0))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                components.append(sorted(comp, key=NodeId.sort_key))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return sorted(components, key=lambda c: c[0].sort_key())


@dataclass(frozen=True)
class Condensation:
    components: tuple[tuple[NodeId, ...], ...]
    arcs: tuple[tuple[int, int], ...]          # indexes into components

    def outgoing(self, idx: int) -> list[int]:
        return [b for a, b in self.arcs if a == idx]

    def is_acyclic(self) -> bool:
        adj = {i: self.outgoing(i) for i in range(len(self.components))}
        state: dict[int, int] = {}

        def visit(u: int) -> bool:
            stack = [(u, iter(adj[u]))]
            state[u] = 1
            while stack:
                node, it = stack[-1]
                found = False
                for v in it:
                    if state.get(v, 0) == 1:
                        return False
                    if state.get(v, 0) == 0:
                        state[v] = 1
                        stack.append((v, iter(adj[v])))
                        found = True
                        break
                if not found:
                    state[node] = 2
                    stack.pop()
            return True

        for i in adj:
            if state.get(i, 0) == 0:
                if not visit(i):
                    return False
        return True


def condensation(graph: DefinitionGraph, mode: str = "optimistic") -> Condensation:
    """Components collapsed to single nodes; arcs lifted without duplicates
    or self-loops. Acyclic by construction (and testably so)."""
    comps = strongly_connected_components(graph, mode)
    where = {node: i for i, comp in enumerate(comps) for node in comp}
    lifted: dict[tuple[int, int], None] = {}
    adj = graph.edges(mode)
    for src, outs in adj.items():
        for dst in outs:
            a, b = where[src], where[dst]
            if a != b:
                lifted.setdefault((a, b), None)
    return Condensation(tuple(tuple(c) for c in comps), tuple(sorted(lifted)))


@dataclass(frozen=True)
class PrimitiveReport:
    candidates: tuple[tuple[NodeId, ...], ...]
    undefined_leaves: tuple[NodeId, ...]


def primitive_candidates(graph: DefinitionGraph) -> PrimitiveReport:
    """Terminal components of the resolved-only condensation whose members
    are internal verb senses; external nodes reported as undefined leaves."""
    cond = condensation(graph, "resolved-only")
    has_out = {a for a, _ in cond.arcs}
    candidates = []
    for i, comp in enumerate(cond.components):
        if i in has_out:
            continue
        if all((not n.is_external) and n.pos.is_verb for n in comp):
            candidates.append(comp)
    leaves = tuple(sorted((n for n in graph.nodes if n.is_external),
                          key=NodeId.sort_key))
    return PrimitiveReport(tuple(candidates), leaves)


# ---------------------------------------------------------------------------
# exports

def to_dot(graph: DefinitionGraph) -> str:
    """DOT export: unresolved bundles dashed, resolved arcs solid, external
    nodes box-shaped."""
    lines = ["digraph definitions {"]
    for node in sorted(graph.nodes, key=NodeId.sort_key):
        shape = "box" if node.is_external else "ellipse"
        lines.append(f'  "{node.render()}" [shape={shape}];')
    seen: set[tuple] = set()
    for arc in graph.arcs:
        style = "solid" if arc.resolved else "dashed"
        for t in sorted(arc.targets, key=NodeId.sort_key):
            sig = (arc.source.render(), t.render(), style)
            if sig in seen:
                continue
            seen.add(sig)
            label = arc.genus_word + (" (not)" if arc.negated else "")
            lines.append(f'  "{arc.source.render()}" -> "{t.render()}"'
                         f' [style={style}, label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def components_tsv(components: list[list[NodeId]]) -> str:
    """One component per line, members tab-separated."""
    rows = ["\t".join(n.render() for n in comp) for comp in components]
    return "\n".join(rows) + ("\n" if rows else "")
