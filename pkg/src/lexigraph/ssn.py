"""Sense selection networks: an ordered question tree per headword.

Branch order: part of speech, transitivity, specified objects, adjective
complement, usage conditions, then frame-difference questions generated by
first differences over canonical frame tuples, recursively. Usage-style
questions carry necessary-condition semantics: absence prunes, presence
does not confirm.

Compiled networks are immutable and shareable; traversal keeps all state
in the traversal record. An unknown answer retains every branch and
records the question.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

from .frames import Frame, group_first_diff
from .lexicon import (
    PartOfSpeech,
    Sense,
    SenseKey,
    SenseLabel,
    parse_sense,
    usage_particles,
)


class CompileError(ValueError):
    pass


@dataclass(frozen=True)
class Terminal:
    sense: SenseKey
    frame: Frame


@dataclass(frozen=True)
class Nonterminal:
    """Exhausted, indistinguishable group collapsed to its parent sense."""

    sense: SenseKey
    members: tuple[SenseKey, ...]
    frame: Optional[Frame] = None


@dataclass(frozen=True)
class Question:
    kind: str                                   # POS | TRANSITIVITY | OBJ-IS |
                                                # OBJ-SAT | ADJ-COMPLEMENT |
                                                # USAGE | FRAME-DIFF
    payload: tuple                              # kind-specific, renderable
    branches: tuple[tuple[str, "Node"], ...]
    retain_all_on_unknown: bool = True

    @property
    def qid(self) -> str:
        if self.kind == "FRAME-DIFF":
            return f"FRAME-DIFF {'.'.join(self.payload[0])}"
        if self.kind == "USAGE":
            return f"USAGE used with {'|'.join(self.payload)}"
        if self.kind in ("OBJ-IS", "OBJ-SAT", "ADJ-COMPLEMENT"):
            return f"{self.kind} {' '.join(str(p) for p in self.payload)}".strip()
        return self.kind

    def branch_map(self) -> dict[str, "Node"]:
        return dict(self.branches)

    def alternatives(self) -> dict[str, object]:
        """FRAME-DIFF only: branch answer -> canonical value."""
        if self.kind != "FRAME-DIFF":
            return {}
        return dict(self.payload[1])


Node = Union[Terminal, Nonterminal, Question]


@dataclass(frozen=True)
class SSN:
    headword: str
    senses: tuple[SenseKey, ...]
    root: Node

    def questions(self) -> list[Question]:
        out: list[Question] = []

        def walk(node: Node):
            if isinstance(node, Question):
                out.append(node)
                for _, child in node.branches:
                    walk(child)

        walk(self.root)
        return out


@dataclass(frozen=True)
class TraverseResult:
    senses: tuple[SenseKey, ...]
    terminal: bool
    open_questions: tuple[str, ...]
    frames: tuple[Frame, ...] = ()


Oracle = Union[dict, Callable[[Question], str]]


# ---------------------------------------------------------------------------
# compilation

def _render_value(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        if len(value) == 2 and value[1] in ("fixed", "provisional"):
            return value[0] if value[1] == "fixed" else f"{value[0]} (provisional)"
        return "; ".join(str(v) for v in value)
    return str(value)


def _pos_tag(pos: PartOfSpeech) -> str:
    return "v" if pos.is_verb else pos.value


def compile_ssn(headword: str,
                senses_by_key: dict[SenseKey, list[Sense]],
                frames: dict[SenseKey, Frame]) -> SSN:
    """Compile the network for one headword over all its homographs."""
    keys = sorted(senses_by_key, key=SenseKey.sort_key)
    if not keys:
        raise CompileError(f"no senses for {headword!r}")
    if any(k.headword != headword for k in keys):
        raise CompileError("all senses must share the headword")
    for k in keys:
        if k not in frames:
            raise CompileError(f"no frame for {k.render()}")

    stages = _stage_questions(keys, senses_by_key)

    def build(group: list[SenseKey], stage_idx: int) -> Node:
        if len(group) == 1:
            return Terminal(group[0], frames[group[0]])
        while stage_idx < len(stages):
            kind, payload, partition = stages[stage_idx]
            stage_idx += 1
            parts = partition(group)
            parts = {a: sub for a, sub in parts.items() if sub}
            outcomes = {tuple(sub) for sub in parts.values()}
            if len(parts) < 2 or len(outcomes) < 2:
                continue
            branches = tuple((answer, build(sub, stage_idx))
                             for answer, sub in sorted(parts.items()))
            return Question(kind, payload, branches)
        return _frame_diff_tree(group, senses_by_key, frames)

    root = build(keys, 0)
    return SSN(headword, tuple(keys), root)


def _stage_questions(keys, senses_by_key):
    """The syntactic/usage question specs, in pipeline order."""
    stages = []

    def pos_partition(group):
        parts: dict[str, list[SenseKey]] = {}
        for k in group:
            parts.setdefault(_pos_tag(k.pos), []).append(k)
        return parts

    stages.append(("POS", (), pos_partition))

    def trans_partition(group):
        vi = [k for k in group if k.pos in (PartOfSpeech.VI, PartOfSpeech.VB)]
        vt = [k for k in group if k.pos in (PartOfSpeech.VT, PartOfSpeech.VB)]
        return {"vi": vi, "vt": vt}

    stages.append(("TRANSITIVITY", (), trans_partition))

    # specified objects: necessary conditions on the object word
    spec_objects: dict[str, list[SenseKey]] = {}
    for k in keys:
        for rec in senses_by_key[k]:
            if rec.is_synonym_line:
                continue
            parsed = parse_sense(rec)
            if parsed.specified_object:
                spec_objects.setdefault(parsed.specified_object, []).append(k)

    for word in sorted(spec_objects):
        requiring = set(spec_objects[word])
        kind = "OBJ-IS" if len(word.split()) == 1 else "OBJ-SAT"

        def oi_partition(group, requiring=requiring):
            return {"yes": list(group),
                    "no": [k for k in group if k not in requiring]}

        stages.append((kind, (word,), oi_partition))

    # adjective complement: definitions ending with "to be"
    adj_keys = {k for k in keys
                for rec in senses_by_key[k]
                if rec.raw_definition.rstrip(" .").endswith("to be")}
    if adj_keys:
        def adj_partition(group):
            return {"present": list(group),
                    "absent": [k for k in group if k not in adj_keys]}

        stages.append(("ADJ-COMPLEMENT", (), adj_partition))

    # usage conditions from particle notes; absence prunes
    particle_sets: dict[tuple[str, ...], set[SenseKey]] = {}
    for k in keys:
        for rec in senses_by_key[k]:
            particles = usage_particles(rec.usage_note)
            if particles:
                particle_sets.setdefault(tuple(sorted(particles)), set()).add(k)

    for particles in sorted(particle_sets):
        requiring = particle_sets[particles]

        def usage_partition(group, requiring=frozenset(requiring)):
            return {"present": list(group),
                    "absent": [k for k in group if k not in requiring]}

        stages.append(("USAGE", particles, usage_partition))

    return stages


def _frame_diff_tree(group: list[SenseKey], senses_by_key, frames) -> Node:
    if len(group) == 1:
        return Terminal(group[0], frames[group[0]])
    diff = group_first_diff({k: frames[k] for k in group})
    if diff is None:
        return _collapse(group, senses_by_key, frames)
    path, values = diff
    concrete: dict[str, list[SenseKey]] = {}
    empties: list[SenseKey] = []
    for k in group:
        v = values.get(k)
        if v is None or v == "" or v == ():
            empties.append(k)
        else:
            concrete.setdefault(_render_value(v), []).append(k)
    branches: list[tuple[str, Node]] = []
    alts: list[tuple[str, object]] = []
    for answer in sorted(concrete):
        sub = concrete[answer]
        branches.append((answer, _frame_diff_tree(sub, senses_by_key, frames)))
        alts.append((answer, values[sub[0]]))
    if empties:
        branches.append(("other", _frame_diff_tree(empties, senses_by_key, frames)))
        alts.append(("other", ""))
    return Question("FRAME-DIFF", (tuple(path), tuple(alts)), tuple(branches))


def _collapse(group, senses_by_key, frames) -> Node:
    """Identical canonical frames: collapse to a label-parent nonterminal,
    else the distinctness requirement is violated."""
    labels = [SenseLabel(k.label) for k in group]
    chains = [[lab] + lab.ancestors() for lab in labels]
    common = set(c.text for c in chains[0])
    for chain in chains[1:]:
        common &= {c.text for c in chain}
    base = group[0]
    candidates = sorted((SenseLabel(t) for t in common),
                        key=lambda l: l.sort_key(), reverse=True)
    for lab in candidates:
        parent_key = SenseKey(base.headword, base.pos, base.homograph, lab.text)
        if parent_key in senses_by_key:
            return Nonterminal(parent_key, tuple(group), frames.get(parent_key))
    a, b = group[0], group[1]
    raise CompileError(
        f"duplicate canonical frames among sibling senses: "
        f"{a.render()} and {b.render()}")


# ---------------------------------------------------------------------------
# traversal

def frame_diff(a: Frame, b: Frame):
    """Re-exported first-difference of two frames (see frames module)."""
    from .frames import frame_diff as _fd
    return _fd(a, b)


def traverse(ssn: SSN, oracle: Oracle) -> TraverseResult:
    """Deterministic walk. A concrete answer follows its branch; anything
    else retains all branches (union) and records the question."""

    def ask(q: Question) -> str:
        if callable(oracle):
            answer = oracle(q)
        else:
            answer = oracle.get(q.qid, "unknown")
        return answer if isinstance(answer, str) else "unknown"

    open_questions: list[str] = []
    seen_questions: set[str] = set()

    def note_open(q: Question):
        if q.qid not in seen_questions:
            seen_questions.add(q.qid)
            open_questions.append(q.qid)

    def walk(node: Node) -> tuple[list[SenseKey], bool, list[Frame]]:
        if isinstance(node, Terminal):
            return [node.sense], True, [node.frame]
        if isinstance(node, Nonterminal):
            return [node.sense], False, [node.frame] if node.frame else []
        answer = ask(node)
        bmap = node.branch_map()
        if answer in bmap:
            return walk(bmap[answer])
        note_open(node)
        senses: list[SenseKey] = []
        frames_out: list[Frame] = []
        for _, child in node.branches:
            s, _, f = walk(child)
            for k in s:
                if k not in senses:
                    senses.append(k)
            for fr in f:
                if fr not in frames_out:
                    frames_out.append(fr)
        return senses, False, frames_out

    senses, terminal, frames_out = walk(ssn.root)
    senses = sorted(set(senses), key=SenseKey.sort_key)
    terminal = terminal and len(senses) == 1
    return TraverseResult(tuple(senses), terminal, tuple(open_questions),
                          tuple(frames_out))


def oracle_reaching(ssn: SSN, target: SenseKey) -> Optional[dict]:
    """An answer map under which traversal returns exactly the target
    (completeness helper)."""

    def search(node: Node, answers: dict) -> Optional[dict]:
        if isinstance(node, Terminal):
            return answers if node.sense == target else None
        if isinstance(node, Nonterminal):
            return None
        for answer, child in node.branches:
            if node.qid in answers and answers[node.qid] != answer:
                continue
            found = search(child, {**answers, node.qid: answer})
            if found is not None:
                return found
        return None

    return search(ssn.root, {})


# ---------------------------------------------------------------------------
# exports

def to_text(ssn: SSN) -> str:
    lines: list[str] = [f"ssn for {ssn.headword} ({len(ssn.senses)} senses)"]

    def walk(node: Node, depth: int, label: str):
        pad = "  " * depth
        if isinstance(node, Terminal):
            lines.append(f"{pad}{label}-> sense {node.sense.render()}")
            return
        if isinstance(node, Nonterminal):
            lines.append(f"{pad}{label}-> nonterminal sense "
                         f"{node.sense.render()} "
                         f"({len(node.members)} members)")
            return
        lines.append(f"{pad}{label}? {node.qid}")
        for answer, child in node.branches:
            walk(child, depth + 1, f"[{answer}] ")

    walk(ssn.root, 1, "")
    return "\n".join(lines) + "\n"


def to_dot(ssn: SSN) -> str:
    lines = ["digraph ssn {"]
    counter = [0]

    def walk(node: Node) -> str:
        counter[0] += 1
        name = f"n{counter[0]}"
        if isinstance(node, Terminal):
            lines.append(f'  {name} [shape=box, label="{node.sense.render()}"];')
            return name
        if isinstance(node, Nonterminal):
            lines.append(f'  {name} [shape=box, style=dashed, '
                         f'label="{node.sense.render()} (nonterminal)"];')
            return name
        lines.append(f'  {name} [shape=diamond, label="{node.qid}"];')
        for answer, child in node.branches:
            cname = walk(child)
            lines.append(f'  {name} -> {cname} [label="{answer}"];')
        return name

    walk(ssn.root)
    lines.append("}")
    return "\n".join(lines) + "\n"


def build_all_ssns(lexicon, frames: dict[SenseKey, Frame]) -> dict[str, SSN]:
    """One network per headword."""
    grouped: dict[str, dict[SenseKey, list[Sense]]] = {}
    for s in lexicon.entries:
        grouped.setdefault(s.headword, {}).setdefault(s.key, []).append(s)
    return {hw: compile_ssn(hw, by_key, frames)
            for hw, by_key in sorted(grouped.items())}
