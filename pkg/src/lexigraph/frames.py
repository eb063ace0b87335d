"""Case-frame representations: seeded frames, subsense specialization,
derivation along resolved genus arcs, the three-way delta when one verb is
used in defining another, and canonical tuple forms for diffing.

Frames are immutable values; every derivation operation is pure.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Union

from .lexicon import (
    Lexicon,
    ParsedDefinition,
    PartOfSpeech,
    Sense,
    SenseKey,
    SenseLabel,
    parse_sense,
    usage_particles,
)

CASE_LABELS = ("PAT", "AGT")

SLOT_ORDER = (
    "SUBJ", "OBJ", "FROM-STATE", "THROUGH-STATE", "TO-STATE", "TIME1",
    "TIMEX", "TIME2", "RESPECT", "RESULT", "INSTRUMENT", "MANNER",
    "ESSENTIAL-ATTRS", "ACCIDENTAL-ATTRS",
)


def slot_order_key(name: str) -> tuple:
    try:
        return (SLOT_ORDER.index(name), name)
    except ValueError:
        return (len(SLOT_ORDER), name)  # open extension names sort last


class SeedGrammarError(ValueError):
    pass


class SpecializationError(ValueError):
    pass


@dataclass(frozen=True)
class Descriptor:
    """Oblique reference to an unknown concept: a variable that satisfies
    the listed features."""

    var: str
    features: tuple[str, ...] = ()

    def render(self) -> str:
        if self.features:
            return f"?{self.var}({', '.join(self.features)})"
        return f"?{self.var}"


Filler = Union[str, Descriptor]


@dataclass(frozen=True)
class Slot:
    name: str
    case: tuple[str, ...] = ()            # disjunction, e.g. (PAT, AGT)
    bind: Optional[str] = None             # alias to another slot role
    filler: Optional[Filler] = None
    restrictions: tuple[str, ...] = ()
    children: tuple["Slot", ...] = ()

    def render_filler(self) -> str:
        if self.filler is None:
            return ""
        if isinstance(self.filler, Descriptor):
            return self.filler.render()
        return self.filler


Condition = tuple  # ("NE", a, b) | ("USED-WITH", (p1, p2, ...))


def render_condition(cond: Condition) -> str:
    if cond[0] == "NE":
        return f"{cond[1]} NE {cond[2]}"
    if cond[0] == "USED-WITH":
        return "USED-WITH " + "|".join(cond[1])
    return " ".join(str(c) for c in cond)


@dataclass(frozen=True)
class Frame:
    predicate: str
    pos: PartOfSpeech
    conditions: tuple[Condition, ...] = ()
    slots: tuple[Slot, ...] = ()
    provisional: bool = False
    sense: Optional[SenseKey] = None
    provenance: tuple[str, ...] = ()


@dataclass(frozen=True)
class UseDelta:
    """One effect of a use on the genus frame: fill a slot, restrict one,
    or add one."""

    kind: str                  # FILL | RESTRICT | ADD-SLOT
    path: tuple[str, ...]
    value: str

    def render(self) -> str:
        return f"{self.kind} {'.'.join(self.path)} = {self.value}"


@dataclass(frozen=True)
class ApplyOutcome:
    frame: Frame
    deltas: tuple[UseDelta, ...]
    residue: tuple[str, ...]    # differentiae that mapped to nothing


# ---------------------------------------------------------------------------
# mutable builder

class _SlotNode:
    __slots__ = ("name", "case", "bind", "filler", "restrictions", "children")

    def __init__(self, name: str):
        self.name = name
        self.case: tuple[str, ...] = ()
        self.bind: Optional[str] = None
        self.filler: Optional[Filler] = None
        self.restrictions: list[str] = []
        self.children: dict[str, _SlotNode] = {}

    @classmethod
    def from_slot(cls, slot: Slot) -> "_SlotNode":
        node = cls(slot.name)
        node.case = slot.case
        node.bind = slot.bind
        node.filler = slot.filler
        node.restrictions = list(slot.restrictions)
        node.children = {c.name: cls.from_slot(c) for c in slot.children}
        return node

    def freeze(self) -> Slot:
        kids = tuple(self.children[k].freeze()
                     for k in sorted(self.children, key=slot_order_key))
        return Slot(self.name, self.case, self.bind, self.filler,
                    tuple(self.restrictions), kids)


class _FrameBuilder:
    def __init__(self, pos: PartOfSpeech):
        self.predicate = ""
        self.provisional = False
        self.pos = pos
        self.conditions: list[Condition] = []
        self.roots: dict[str, _SlotNode] = {}
        self.provenance: list[str] = []

    @classmethod
    def from_frame(cls, frame: Frame, pos: Optional[PartOfSpeech] = None) -> "_FrameBuilder":
        b = cls(pos or frame.pos)
        b.predicate = frame.predicate
        b.provisional = frame.provisional
        b.conditions = list(frame.conditions)
        b.roots = {s.name: _SlotNode.from_slot(s) for s in frame.slots}
        b.provenance = list(frame.provenance)
        return b

    def ensure_path(self, path: Iterable[str]) -> _SlotNode:
        parts = list(path)
        node = self.roots.setdefault(parts[0], _SlotNode(parts[0]))
        for name in parts[1:]:
            node = node.children.setdefault(name, _SlotNode(name))
        return node

    def find_slot(self, name: str) -> Optional[tuple[tuple[str, ...], _SlotNode]]:
        """First slot with this name (or bound to this role), canonical BFS."""
        bound: Optional[tuple[tuple[str, ...], _SlotNode]] = None
        queue = [((k,), self.roots[k]) for k in sorted(self.roots, key=slot_order_key)]
        idx = 0
        while idx < len(queue):
            path, node = queue[idx]
            idx += 1
            if node.name == name:
                return path, node
            if node.bind == name and bound is None:
                bound = (path, node)
            for k in sorted(node.children, key=slot_order_key):
                queue.append((path + (k,), node.children[k]))
        return bound

    def strip_usage_conditions(self) -> None:
        self.conditions = [c for c in self.conditions if c[0] != "USED-WITH"]

    def add_usage_condition(self, particles: tuple[str, ...]) -> None:
        cond = ("USED-WITH", tuple(sorted(particles)))
        if cond not in self.conditions:
            self.conditions.append(cond)

    def freeze(self, sense: Optional[SenseKey]) -> Frame:
        slots = tuple(self.roots[k].freeze()
                      for k in sorted(self.roots, key=slot_order_key))
        conds = tuple(sorted(self.conditions, key=render_condition))
        return Frame(self.predicate, self.pos, conds, slots,
                     self.provisional, sense, tuple(self.provenance))


# ---------------------------------------------------------------------------
# seed grammar
#
#   PRED <symbol>
#   COND <slot> NE <slot>
#   SLOT <dotted.path>
#   SLOT <dotted.path> CASE <c1|c2>
#   SLOT <dotted.path> VALUE <text>
#   SLOT <dotted.path> RESTRICT <text>
#   SLOT <dotted.path> BIND <slot>

def _apply_seed_line(builder: _FrameBuilder, line: str) -> None:
    parts = line.split(None, 1)
    if not parts:
        raise SeedGrammarError("empty seed line")
    keyword, rest = parts[0], (parts[1] if len(parts) > 1 else "")
    if keyword == "PRED":
        if not rest.strip():
            raise SeedGrammarError(f"PRED needs a symbol: {line!r}")
        builder.predicate = rest.strip()
        builder.provisional = False
        return
    if keyword == "COND":
        toks = rest.split()
        if len(toks) != 3 or toks[1] != "NE":
            raise SeedGrammarError(f"bad COND line: {line!r}")
        cond = ("NE", toks[0], toks[2])
        if cond not in builder.conditions:
            builder.conditions.append(cond)
        return
    if keyword != "SLOT":
        raise SeedGrammarError(f"unknown seed keyword {keyword!r}")
    toks = rest.split(None, 1)
    if not toks:
        raise SeedGrammarError(f"SLOT needs a path: {line!r}")
    path = tuple(toks[0].split("."))
    node = builder.ensure_path(path)
    if len(toks) == 1:
        return  # bare declaration
    action, _, payload = toks[1].partition(" ")
    payload = payload.strip()
    if action == "CASE":
        cases = tuple(c.strip() for c in payload.split("|") if c.strip())
        if not cases or any(c not in CASE_LABELS for c in cases):
            raise SeedGrammarError(f"bad CASE payload: {line!r}")
        node.case = cases
    elif action == "VALUE":
        if not payload:
            raise SeedGrammarError(f"VALUE needs text: {line!r}")
        node.filler = payload
    elif action == "RESTRICT":
        if not payload:
            raise SeedGrammarError(f"RESTRICT needs text: {line!r}")
        if payload not in node.restrictions:
            node.restrictions.append(payload)
    elif action == "BIND":
        if not payload:
            raise SeedGrammarError(f"BIND needs a slot: {line!r}")
        node.bind = payload
    else:
        raise SeedGrammarError(f"unknown slot action {action!r}")


# ---------------------------------------------------------------------------
# rule-table protocol (loaded from data by the corpus module)

class RuleTable:
    """(prep, predicate family) -> (slot name, action)."""

    def __init__(self, rows: Iterable[tuple[str, str, str, str]] = ()):
        self._rows: dict[tuple[str, str], tuple[str, str]] = {}
        for prep, family, slot, action in rows:
            self._rows[(prep, family)] = (slot, action)

    def slot_action(self, prep: str, family: str) -> Optional[tuple[str, str]]:
        return self._rows.get((prep, family))

    def preps_for(self, family: str) -> list[str]:
        return sorted(p for (p, f) in self._rows if f == family)


EMPTY_RULES = RuleTable()


# ---------------------------------------------------------------------------
# operations

def specialize_subsense(parent: Frame, subsense: Sense,
                        seed_lines: Iterable[str] = ()) -> Frame:
    """Derive a subsense frame from its parent: apply the subsense's seed
    lines, subject restriction, and usage conditions; all other structure
    inherits."""
    if parent.sense is not None:
        plabel = SenseLabel(parent.sense.label)
        if plabel not in subsense.label.ancestors():
            raise SpecializationError(
                f"{subsense.label} is not a child of {plabel}")
    builder = _FrameBuilder.from_frame(parent, subsense.pos)
    builder.strip_usage_conditions()
    for line in seed_lines:
        _apply_seed_line(builder, line)
    subject = subsense.subject_restriction
    if subject:
        node = builder.ensure_path(("SUBJ",))
        if subject not in node.restrictions:
            node.restrictions.append(subject)
    particles = usage_particles(subsense.usage_note)
    if particles:
        builder.add_usage_condition(particles)
    builder.provenance = list(parent.provenance) + [
        f"specialized from {parent.sense.render() if parent.sense else parent.predicate}"]
    return builder.freeze(subsense.key)


def load_seed_frames(lexicon: Lexicon) -> dict[SenseKey, Frame]:
    """Frames for every sense that carries seed lines, parents first so
    subsenses inherit."""
    out: dict[SenseKey, Frame] = {}
    seeded = sorted(lexicon.seed_frames, key=SenseKey.sort_key)
    for key in seeded:
        records = lexicon.records_for(key)
        if not records:
            continue
        primary = records[0]
        parent = _nearest_ancestor_frame(key, out)
        if parent is not None:
            frame = specialize_subsense(parent, primary, lexicon.seed_frames[key])
        else:
            builder = _FrameBuilder(key.pos)
            builder.provenance = ["seeded"]
            for line in lexicon.seed_frames[key]:
                _apply_seed_line(builder, line)
            subject = primary.subject_restriction
            if subject:
                node = builder.ensure_path(("SUBJ",))
                if subject not in node.restrictions:
                    node.restrictions.append(subject)
            particles = usage_particles(primary.usage_note)
            if particles:
                builder.add_usage_condition(particles)
            frame = builder.freeze(key)
        # coordinate records may add their own usage notes / subjects
        frame = _merge_record_annotations(frame, records[1:])
        out[key] = frame
    return out


def _merge_record_annotations(frame: Frame, records: Iterable[Sense]) -> Frame:
    builder = _FrameBuilder.from_frame(frame)
    changed = False
    for rec in records:
        particles = usage_particles(rec.usage_note)
        if particles:
            builder.add_usage_condition(particles)
            changed = True
        subject = rec.subject_restriction
        if subject:
            node = builder.ensure_path(("SUBJ",))
            if subject not in node.restrictions:
                node.restrictions.append(subject)
                changed = True
    if not changed:
        return frame
    return builder.freeze(frame.sense)


def _nearest_ancestor_frame(key: SenseKey,
                            frames: dict[SenseKey, Frame]) -> Optional[Frame]:
    for anc in SenseLabel(key.label).ancestors():
        pk = SenseKey(key.headword, key.pos, key.homograph, anc.text)
        if pk in frames:
            return frames[pk]
    return None


def apply_use(base: Frame, use: ParsedDefinition,
              rules: RuleTable) -> ApplyOutcome:
    """The three-way delta of using a verb in defining another: each
    differentia may fill a slot, add a restriction, or add a slot.
    Unmapped differentiae land in the residue, never dropped."""
    builder = _FrameBuilder.from_frame(base)
    deltas: list[UseDelta] = []
    residue: list[str] = []
    descriptor_count = 0
    family = base.predicate

    for phrase in use.differentiae:
        if phrase.kind == "adverb":
            node = builder.ensure_path(("MANNER",))
            if phrase.text not in node.restrictions:
                node.restrictions.append(phrase.text)
            deltas.append(UseDelta("ADD-SLOT", ("MANNER",), phrase.text))
            continue
        if phrase.kind != "prep-phrase":
            residue.append(f"{phrase.kind}: {phrase.text}")
            continue
        if phrase.hedged:
            residue.append(f"hedged {phrase.prep}-phrase: {phrase.text}")
            continue
        action = rules.slot_action(phrase.prep, family)
        if action is None:
            residue.append(f"{phrase.prep}-phrase: {phrase.text}")
            continue
        slot_name, kind = action
        if kind == "FILL":
            found = builder.find_slot(slot_name)
            if found is None:
                path, node = (slot_name,), builder.ensure_path((slot_name,))
            else:
                path, node = found
            if node.filler is not None:
                residue.append(f"{phrase.prep}-phrase (slot already filled): "
                               f"{phrase.text}")
                continue
            if phrase.text:
                node.filler = phrase.text
                value = phrase.text
            else:
                descriptor_count += 1
                d = Descriptor(f"obj{descriptor_count}", ("contextual object",))
                node.filler = d
                value = d.render()
            if slot_name == "AGENT":
                subj = builder.find_slot("SUBJ")
                if subj is not None and "AGT" in subj[1].case:
                    subj[1].case = ("PAT",)
            deltas.append(UseDelta("FILL", path, value))
        elif kind == "RESTRICT":
            found = builder.find_slot(slot_name)
            if found is None:
                path, node = (slot_name,), builder.ensure_path((slot_name,))
            else:
                path, node = found
            if phrase.text and phrase.text not in node.restrictions:
                node.restrictions.append(phrase.text)
            deltas.append(UseDelta("RESTRICT", path, phrase.text))
        else:
            residue.append(f"{phrase.prep}-phrase (unknown action {kind}): "
                           f"{phrase.text}")

    builder.provenance = list(base.provenance) + ["applied use"]
    return ApplyOutcome(builder.freeze(base.sense), tuple(deltas), tuple(residue))


def build_frames(lexicon: Lexicon, rules: RuleTable) -> dict[SenseKey, Frame]:
    """A frame for every sense: seeded senses from their seed lines (with
    label-parent inheritance), other senses derived along their resolved
    genus arc, and provisional frames where no resolution exists."""
    frames: dict[SenseKey, Frame] = dict(load_seed_frames(lexicon))
    resolution_map = {(r.from_key, r.genus_word): r.target
                      for r in lexicon.resolutions}
    all_keys = lexicon.sense_keys()
    in_progress: set[SenseKey] = set()

    def genus_words(rec: Sense) -> list[str]:
        if rec.is_synonym_line:
            return [ref.lower() for ref in rec.synonym_refs]
        parsed = parse_sense(rec)
        out = []
        for head in parsed.genus:
            out.append(head if " " not in head else head.split()[0])
        return out

    def frame_for(key: SenseKey) -> Frame:
        if key in frames:
            return frames[key]
        if key in in_progress:
            return _provisional_frame(key, lexicon)
        in_progress.add(key)
        try:
            frame = _derive(key)
        finally:
            in_progress.discard(key)
        frames[key] = frame
        return frame

    def _derive(key: SenseKey) -> Frame:
        records = lexicon.records_for(key)
        parent = _nearest_ancestor_frame_in(key, frames, all_keys, frame_for)
        if parent is not None:
            frame = specialize_subsense(parent, records[0])
            return _merge_record_annotations(frame, records[1:])
        for rec in records:
            for word in genus_words(rec):
                target = resolution_map.get((key, word))
                if target is None:
                    continue
                base = frame_for(target)
                return _derive_from(base, rec, records)
        return _finish_records(_provisional_frame(key, lexicon), records)

    def _derive_from(base: Frame, rec: Sense, records: list[Sense]) -> Frame:
        builder = _FrameBuilder.from_frame(base, rec.pos)
        builder.strip_usage_conditions()
        stripped = builder.freeze(rec.key)
        if rec.is_synonym_line:
            frame = replace(stripped,
                            provenance=base.provenance + ("synonym copy",))
        else:
            parsed = parse_sense(rec)
            frame = apply_use(stripped, parsed, rules).frame
        return _finish_records(frame, records)

    def _finish_records(frame: Frame, records: list[Sense]) -> Frame:
        builder = _FrameBuilder.from_frame(frame)
        for rec in records:
            particles = usage_particles(rec.usage_note)
            if particles:
                builder.add_usage_condition(particles)
            subject = rec.subject_restriction
            if subject:
                node = builder.ensure_path(("SUBJ",))
                if subject not in node.restrictions:
                    node.restrictions.append(subject)
                if node.filler is None:
                    node.filler = subject
        return builder.freeze(frame.sense or records[0].key)

    for key in sorted(all_keys, key=SenseKey.sort_key):
        frame_for(key)
    return frames


def _nearest_ancestor_frame_in(key: SenseKey, frames: dict, all_keys,
                               frame_for: Callable) -> Optional[Frame]:
    existing = set(all_keys)
    for anc in SenseLabel(key.label).ancestors():
        pk = SenseKey(key.headword, key.pos, key.homograph, anc.text)
        if pk in existing:
            return frame_for(pk)
    return None


def _provisional_frame(key: SenseKey, lexicon: Lexicon) -> Frame:
    """Fallback frame: uppercased genus word as a provisional predicate."""
    records = lexicon.records_for(key)
    predicate = key.headword.upper()
    for rec in records:
        if rec.is_synonym_line:
            predicate = rec.synonym_refs[0].upper()
            break
        parsed = parse_sense(rec)
        if parsed.genus:
            predicate = parsed.genus[0].split()[0].upper()
            break
        if parsed.genus_complement:
            predicate = parsed.genus_complement.split()[-1].upper()
            break
    builder = _FrameBuilder(key.pos)
    builder.predicate = predicate
    builder.provisional = True
    if key.pos.is_verb:
        subj = builder.ensure_path(("SUBJ",))
        subj.case = ("PAT", "AGT")
    builder.provenance = ["provisional predicate"]
    return builder.freeze(key)


# ---------------------------------------------------------------------------
# canonical form and diffing

_TRANSITIVITY = {PartOfSpeech.VI: "intransitive", PartOfSpeech.VT: "transitive",
                 PartOfSpeech.VB: "both"}


def _slot_canonical(slot: Slot) -> tuple:
    return ("slot", slot.name,
            ("case", " v ".join(slot.case)),
            ("bind", slot.bind or ""),
            ("filler", slot.render_filler()),
            ("restrictions", tuple(sorted(slot.restrictions))),
            ("children", tuple(_slot_canonical(c) for c in
                               sorted(slot.children, key=lambda s: slot_order_key(s.name)))))


def frame_canonicalize(frame: Frame) -> tuple:
    """Deterministic ordered tuple: syntax first, contextual conditions,
    then slots in canonical order, recursively."""
    return ("frame",
            ("pos", frame.pos.value),
            ("transitivity", _TRANSITIVITY.get(frame.pos, "")),
            ("predicate", frame.predicate,
             "provisional" if frame.provisional else "fixed"),
            ("conditions", tuple(sorted(render_condition(c)
                                        for c in frame.conditions))),
            ("slots", tuple(_slot_canonical(s) for s in
                            sorted(frame.slots, key=lambda s: slot_order_key(s.name)))))


_FIELD_ORDER = {"case": 0, "bind": 1, "filler": 2, "restrictions": 3}


def canonical_paths(frame: Frame) -> dict[tuple, tuple[tuple[str, ...], object]]:
    """Flatten to {sortable position: (display path, value)}; alignment-proof
    across frames with different slot inventories."""
    out: dict[tuple, tuple[tuple[str, ...], object]] = {
        ((0, "pos"),): (("pos",), frame.pos.value),
        ((1, "transitivity"),): (("transitivity",),
                                 _TRANSITIVITY.get(frame.pos, "")),
        ((2, "predicate"),): (("predicate",),
                              (frame.predicate,
                               "provisional" if frame.provisional else "fixed")),
        ((3, "conditions"),): (("conditions",),
                               tuple(sorted(render_condition(c)
                                            for c in frame.conditions))),
    }

    def walk(slot: Slot, sort_prefix: tuple, display_prefix: tuple[str, ...]):
        base_sort = sort_prefix + (slot_order_key(slot.name),)
        base_disp = display_prefix + (slot.name,)
        out[base_sort + ((0, "case"),)] = (base_disp + ("case",),
                                           " v ".join(slot.case))
        out[base_sort + ((1, "bind"),)] = (base_disp + ("bind",), slot.bind or "")
        out[base_sort + ((2, "filler"),)] = (base_disp + ("filler",),
                                             slot.render_filler())
        out[base_sort + ((3, "restrictions"),)] = (
            base_disp + ("restrictions",), tuple(sorted(slot.restrictions)))
        for child in slot.children:
            walk(child, base_sort + ((4, "children"),), base_disp)

    for slot in frame.slots:
        walk(slot, ((4, "slots"),), ("slots",))
    return out


@dataclass(frozen=True)
class DiffPoint:
    path: tuple[str, ...]
    a_value: object
    b_value: object

    def render(self) -> str:
        return f"{'.'.join(self.path)}: {self.a_value!r} vs {self.b_value!r}"


def frame_diff(a: Frame, b: Frame) -> Optional[DiffPoint]:
    """Lexicographically first differing position of the canonical tuples,
    or None when equal."""
    pa = canonical_paths(a)
    pb = canonical_paths(b)
    for pos in sorted(set(pa) | set(pb)):
        va = pa.get(pos, (None, None))
        vb = pb.get(pos, (None, None))
        if va[1] != vb[1]:
            display = va[0] if va[0] is not None else vb[0]
            return DiffPoint(display, va[1], vb[1])
    return None


def group_first_diff(frames: dict[SenseKey, Frame]):
    """First canonical position at which any two frames of the group differ:
    (display path, {sense key: value-at-position}) or None."""
    flats = {k: canonical_paths(f) for k, f in frames.items()}
    all_positions = sorted(set().union(*flats.values()) if flats else set())
    for pos in all_positions:
        values = {}
        display = None
        for key, flat in flats.items():
            entry = flat.get(pos)
            if entry is not None:
                display = entry[0]
            values[key] = entry[1] if entry is not None else None
        distinct = {repr(v) for v in values.values()}
        if len(distinct) > 1:
            return display, values
    return None


# ---------------------------------------------------------------------------
# dump format

def frame_to_text(frame: Frame) -> str:
    """Indented text tree, stable ordering."""
    lines = [f"predicate: {frame.predicate}"
             + (" (provisional)" if frame.provisional else "")]
    if frame.sense:
        lines.append(f"sense: {frame.sense.render()}")
    for cond in sorted(frame.conditions, key=render_condition):
        lines.append(f"condition: {render_condition(cond)}")

    def emit(slot: Slot, depth: int):
        bits = [slot.name]
        if slot.case:
            bits.append(f"case={' v '.join(slot.case)}")
        if slot.bind:
            bits.append(f"bind={slot.bind}")
        if slot.filler is not None:
            bits.append(f"= {slot.render_filler()}")
        for r in slot.restrictions:
            bits.append(f"[{r}]")
        lines.append("  " * depth + " ".join(bits))
        for child in sorted(slot.children, key=lambda s: slot_order_key(s.name)):
            emit(child, depth + 1)

    for slot in sorted(frame.slots, key=lambda s: slot_order_key(s.name)):
        emit(slot, 1)
    return "\n".join(lines) + "\n"
