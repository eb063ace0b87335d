"""Definition-driven disambiguation of running text: minimal chunking,
network traversal with context-probing answers, frame instantiation with
descriptors for unfilled slots, open-question reporting, and cross-sentence
slot carryover.

No inference model and no world-knowledge store: unresolved ambiguity is
surfaced, never guessed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .frames import (
    Descriptor,
    Frame,
    RuleTable,
    Slot,
    UseDelta,
    apply_use,
    frame_to_text,
)
from .lexicon import (
    CHUNKING_PREPS,
    DETERMINERS,
    Lexicon,
    ParsedDefinition,
    PartOfSpeech,
    Phrase,
    ResolutionRecord,
    Sense,
    SenseKey,
    SenseLabel,
    head_noun,
    parse_sense,
    senses_of,
    split_alternatives,
    usage_particles,
)
from .ssn import SSN, Question, traverse

PRONOUNS = {"it", "they", "he", "she", "we", "you", "i", "them"}
_PARTICLE_WORDS = {"up", "out", "off", "down", "away", "round"}


class ChunkError(ValueError):
    pass


class NoNetworkError(KeyError):
    pass


@dataclass(frozen=True)
class Chunk:
    kind: str                     # verb | noun-phrase | prep-phrase | adverb | particle
    text: str
    prep: Optional[str] = None
    lemma: Optional[str] = None   # verb chunks: lexicon headword

    @property
    def head(self) -> str:
        return head_noun(self.text)


def _strip_token(token: str) -> str:
    return token.strip(".,!?;:\"'").lower()


def _inflection_candidates(word: str) -> list[str]:
    out = [word]
    if word.endswith("ing") and len(word) > 4:
        out += [word[:-3], word[:-3] + "e"]
    if word.endswith("ied") and len(word) > 4:
        out.append(word[:-3] + "y")
    if word.endswith("ed") and len(word) > 3:
        out += [word[:-2], word[:-1]]
        if len(word) > 4 and word[-3] == word[-4]:
            out.append(word[:-3])
    elif word.endswith("d") and len(word) > 2:
        out.append(word[:-1])
    if word.endswith("es") and len(word) > 3:
        out += [word[:-2], word[:-1]]
    elif word.endswith("s") and len(word) > 2:
        out.append(word[:-1])
    return out


def chunk_sentence(tokens: Union[str, Sequence[str]],
                   lexicon: Lexicon) -> list[Chunk]:
    """Deterministic chunking: POS by lexicon lookup with verb preference
    for the single main-verb position, greedy prep-phrase grouping."""
    if isinstance(tokens, str):
        tokens = tokens.split()
    if not tokens:
        raise ChunkError("empty input")
    words = [_strip_token(t) for t in tokens if _strip_token(t)]
    if not words:
        raise ChunkError("empty input")

    verb_words = {s.headword for s in lexicon.entries if s.pos.is_verb}
    prep_words = ({s.headword for s in lexicon.entries
                   if s.pos is PartOfSpeech.PREP} | CHUNKING_PREPS)

    def verb_lemma(word: str) -> Optional[str]:
        for cand in _inflection_candidates(word):
            if cand in verb_words:
                return cand
        return None

    verb_idx = None
    for i, w in enumerate(words):
        if w in DETERMINERS or w in PRONOUNS or w in prep_words:
            continue
        lemma = verb_lemma(w)
        if lemma is not None:
            verb_idx = i
            break

    chunks: list[Chunk] = []

    def flush_np(buf: list[str]):
        if buf:
            chunks.append(Chunk("noun-phrase", " ".join(buf)))
            buf.clear()

    buf: list[str] = []
    i = 0
    n = len(words)
    while i < n:
        w = words[i]
        if verb_idx is not None and i == verb_idx:
            flush_np(buf)
            chunks.append(Chunk("verb", w, None, verb_lemma(w)))
            i += 1
            continue
        if w in prep_words and (verb_idx is None or i > verb_idx):
            flush_np(buf)
            obj: list[str] = []
            j = i + 1
            while j < n and words[j] not in prep_words:
                obj.append(words[j])
                j += 1
            if obj:
                chunks.append(Chunk("prep-phrase", " ".join(obj), w))
            else:
                chunks.append(Chunk("particle", w, w))
            i = j
            continue
        if w in _PARTICLE_WORDS and verb_idx is not None and i > verb_idx:
            flush_np(buf)
            chunks.append(Chunk("particle", w, w))
            i += 1
            continue
        if w.endswith("ly") and len(w) > 3:
            flush_np(buf)
            chunks.append(Chunk("adverb", w))
            i += 1
            continue
        buf.append(w)
        i += 1
    flush_np(buf)
    return chunks


# ---------------------------------------------------------------------------
# sentence context and the probing oracle

@dataclass
class SentenceContext:
    chunks: list[Chunk]

    @property
    def verb(self) -> Optional[Chunk]:
        for c in self.chunks:
            if c.kind == "verb":
                return c
        return None

    @property
    def subject(self) -> Optional[Chunk]:
        for c in self.chunks:
            if c.kind == "verb":
                return None
            if c.kind == "noun-phrase":
                return c
        return None

    @property
    def object_np(self) -> Optional[Chunk]:
        seen_verb = False
        for c in self.chunks:
            if c.kind == "verb":
                seen_verb = True
            elif seen_verb and c.kind == "noun-phrase":
                return c
        return None

    @property
    def prep_phrases(self) -> list[Chunk]:
        return [c for c in self.chunks if c.kind == "prep-phrase"]

    @property
    def adverbs(self) -> list[Chunk]:
        return [c for c in self.chunks if c.kind == "adverb"]

    def particles_present(self) -> set[str]:
        out = set()
        for c in self.chunks:
            if c.kind == "prep-phrase" or c.kind == "particle":
                out.add(c.prep)
        return out

    def pp_object(self, preps: Iterable[str]) -> Optional[Chunk]:
        wanted = set(preps)
        for c in self.prep_phrases:
            if c.prep in wanted:
                return c
        return None

    def to_parsed_definition(self) -> ParsedDefinition:
        """The sentence's phrase matter as differentiae, for slot filling."""
        phrases = []
        for c in self.chunks:
            if c.kind == "prep-phrase":
                phrases.append(Phrase("prep-phrase", c.text, c.prep))
            elif c.kind == "adverb":
                phrases.append(Phrase("adverb", c.text))
        verb = self.verb
        return ParsedDefinition(
            genus=(verb.lemma,) if verb and verb.lemma else (),
            object_np=self.object_np.text if self.object_np else None,
            differentiae=tuple(phrases))


def essential_change(subject_text: Optional[str], object_text: str,
                     lexicon: Optional[Lexicon] = None) -> bool:
    """Crude but deterministic: the change is accidental when the object
    head is listed among the subject's stated kinds, else essential."""
    obj_head = head_noun(object_text).lower()
    if not obj_head:
        return True
    kinds: set[str] = set()
    if subject_text:
        for alt in split_alternatives(subject_text):
            kinds.add(alt.lower())
            kinds.update(w.lower() for w in alt.split())
    return obj_head not in kinds


class ContextOracle:
    """Answers network questions by probing the sentence context."""

    def __init__(self, ctx: SentenceContext, rules: RuleTable,
                 lexicon: Lexicon, subject_override: Optional[str] = None):
        self.ctx = ctx
        self.rules = rules
        self.lexicon = lexicon
        self.subject_text = subject_override or (
            ctx.subject.text if ctx.subject else None)

    def __call__(self, q: Question) -> str:
        if q.kind == "POS":
            return "v" if self.ctx.verb is not None else "unknown"
        if q.kind == "TRANSITIVITY":
            return "vt" if self.ctx.object_np is not None else "vi"
        if q.kind in ("OBJ-IS", "OBJ-SAT"):
            obj = self.ctx.object_np
            if obj is None:
                return "no"
            wanted = q.payload[0]
            if q.kind == "OBJ-IS":
                return "yes" if obj.head == wanted else "no"
            return ("yes" if set(split_alternatives(obj.text))
                    & set(split_alternatives(wanted)) else "no")
        if q.kind == "ADJ-COMPLEMENT":
            return "absent"
        if q.kind == "USAGE":
            present = self.ctx.particles_present()
            return "present" if set(q.payload) & present else "absent"
        if q.kind == "FRAME-DIFF":
            return self._frame_diff_answer(q)
        return "unknown"

    # -- frame-difference probes ------------------------------------------

    def _frame_diff_answer(self, q: Question) -> str:
        path = q.payload[0]
        alts = q.alternatives()
        branch_keys = [a for a, _ in q.branches]
        if path == ("predicate",):
            for answer in sorted(alts):
                value = alts[answer]
                family = value[0] if isinstance(value, tuple) and value else (
                    re.sub(r" \(provisional\)$", "", str(value)))
                for pp in self.ctx.prep_phrases:
                    if self.rules.slot_action(pp.prep, family):
                        return answer
            return "unknown"
        if path == ("conditions",):
            return self._conditions_answer(alts)
        last = path[-1]
        if last == "bind" and "SUBJ" in path:
            return self._bind_answer(branch_keys)
        if last == "filler" and len(path) > 1 and path[1] == "SUBJ":
            if self.subject_text is None:
                return "unknown"
            subj_head = head_noun(self.subject_text)
            for answer, value in alts.items():
                if answer == "other":
                    continue
                if str(value).lower() in (subj_head.lower(),
                                          self.subject_text.lower()):
                    return answer
            return "other" if "other" in branch_keys else "unknown"
        if last == "restrictions" and len(path) > 1 and path[-2] == "RESPECT":
            pp = self.ctx.pp_object(["in"])
            if pp is None:
                return "unknown"
            given = {a.lower() for a in split_alternatives(pp.text)}
            for answer, value in alts.items():
                if answer == "other":
                    continue
                stated = set()
                for phrase in (value if isinstance(value, tuple) else (value,)):
                    stated.update(a.lower() for a in split_alternatives(str(phrase)))
                if given & stated:
                    return answer
            return "other" if "other" in branch_keys else "unknown"
        if last == "filler":
            for answer, value in alts.items():
                if answer == "other":
                    continue
                for pp in self.ctx.prep_phrases:
                    if str(value).lower() == pp.text.lower():
                        return answer
            return "unknown"
        return "unknown"

    def _bind_answer(self, branch_keys: list[str]) -> str:
        pp = self.ctx.pp_object(["into", "to"])
        preps = self.ctx.particles_present()
        if pp is not None and pp.text:
            if essential_change(self.subject_text, pp.text, self.lexicon):
                return ("FROM-STATE" if "FROM-STATE" in branch_keys
                        else "unknown")
            return "other" if "other" in branch_keys else "unknown"
        if "from" in preps and "to" in preps:
            return "other" if "other" in branch_keys else "unknown"
        return "unknown"

    def _conditions_answer(self, alts: dict[str, object]) -> str:
        present = self.ctx.particles_present()
        scored: list[tuple[int, str]] = []
        base: Optional[tuple[int, str]] = None
        any_relevant = False
        for answer, value in alts.items():
            conds = value if isinstance(value, tuple) else (value,)
            used_with = [c for c in conds if str(c).startswith("USED-WITH")]
            if not used_with:
                if base is None or len(conds) < base[0]:
                    base = (len(conds), answer)
                continue
            ok = True
            for cond in used_with:
                particles = str(cond).split(None, 1)[1].split("|")
                hit = [p for p in particles if p in present]
                if not hit:
                    ok = False
                    break
                if set(hit) & {"into", "to"}:
                    any_relevant = True
                    pp = self.ctx.pp_object(hit)
                    if pp is not None and pp.text and not essential_change(
                            self.subject_text, pp.text, self.lexicon):
                        ok = False
                        break
            if ok:
                scored.append((len(used_with), answer))
        if scored:
            scored.sort(reverse=True)
            return scored[0][1]
        if any_relevant and base is not None:
            return base[1]
        return "unknown"


# ---------------------------------------------------------------------------
# disambiguation

@dataclass(frozen=True)
class DisambiguationResult:
    word: str
    lemma: str
    candidates: tuple[SenseKey, ...]
    frame: Frame
    open_questions: tuple[str, ...]
    deltas: tuple[UseDelta, ...] = ()

    def to_text(self) -> str:
        lines = [f"word: {self.word} (lemma {self.lemma})",
                 "candidates: " + ", ".join(k.render() for k in self.candidates)]
        lines.append("frame:")
        lines.extend("  " + ln for ln in frame_to_text(self.frame).splitlines())
        if self.open_questions:
            lines.append("open questions:")
            lines.extend(f"  - {qid}" for qid in self.open_questions)
        return "\n".join(lines) + "\n"


class VarAllocator:
    """Fresh descriptor variables across a discourse."""

    def __init__(self):
        self.count = 0

    def fresh(self) -> str:
        self.count += 1
        return f"v{self.count}"


MANDATORY_SLOTS = {"SUBJ", "FROM-STATE", "TO-STATE"}


def _instantiate(frame: Frame, ctx: SentenceContext, rules: RuleTable,
                 allocator: VarAllocator,
                 subject_override: Optional[str] = None
                 ) -> tuple[Frame, tuple[UseDelta, ...]]:
    outcome = apply_use(frame, ctx.to_parsed_definition(), rules)
    from .frames import _FrameBuilder  # builder reuse for instantiation
    builder = _FrameBuilder.from_frame(outcome.frame)
    deltas = list(outcome.deltas)
    subject = subject_override or (ctx.subject.text if ctx.subject else None)
    if subject:
        found = builder.find_slot("SUBJ")
        if found and found[1].filler is None:
            found[1].filler = subject
            deltas.append(UseDelta("FILL", found[0], subject))

    def fill_descriptors(node, path):
        mandatory = (node.name in MANDATORY_SLOTS or node.bind is not None
                     or node.case)
        if mandatory and node.filler is None:
            node.filler = Descriptor(allocator.fresh(),
                                     tuple(node.restrictions))
        for k in sorted(node.children):
            fill_descriptors(node.children[k], path + (k,))

    for k in sorted(builder.roots):
        fill_descriptors(builder.roots[k], (k,))
    return builder.freeze(frame.sense), tuple(deltas)


def _match_score(frame: Frame, ctx: SentenceContext,
                 subject_text: Optional[str]) -> int:
    """Informative-match refinement: count context-confirmed constraints."""
    score = 0
    subj_head = head_noun(subject_text).lower() if subject_text else ""

    def walk(slot: Slot):
        nonlocal score
        if slot.name == "SUBJ" and isinstance(slot.filler, str) and subj_head:
            if slot.filler.lower() in (subj_head, (subject_text or "").lower()):
                score += 1
        if slot.name == "RESPECT" and slot.restrictions:
            pp = ctx.pp_object(["in"])
            if pp is not None:
                given = {a.lower() for a in split_alternatives(pp.text)}
                stated = set()
                for r in slot.restrictions:
                    stated.update(a.lower() for a in split_alternatives(r))
                if given & stated:
                    score += 1
        for child in slot.children:
            walk(child)

    for slot in frame.slots:
        walk(slot)
    present = ctx.particles_present()
    for cond in frame.conditions:
        if cond[0] == "USED-WITH" and set(cond[1]) & present:
            score += 1
    return score


def disambiguate(word: str, chunks: list[Chunk], ssn: SSN,
                 frames: dict[SenseKey, Frame], rules: RuleTable,
                 lexicon: Lexicon,
                 allocator: Optional[VarAllocator] = None,
                 subject_override: Optional[str] = None) -> DisambiguationResult:
    """Traverse the word's network with context-probing answers, refine by
    informative match, and instantiate the representative frame."""
    allocator = allocator or VarAllocator()
    ctx = SentenceContext(chunks)
    oracle = ContextOracle(ctx, rules, lexicon, subject_override)
    result = traverse(ssn, oracle)
    candidates = list(result.senses)
    subject_text = subject_override or (ctx.subject.text if ctx.subject else None)
    if len(candidates) > 1:
        scores = {k: _match_score(frames[k], ctx, subject_text)
                  for k in candidates}
        best = max(scores.values())
        candidates = [k for k in candidates if scores[k] == best]
    rep = frames[candidates[0]]
    frame, deltas = _instantiate(rep, ctx, rules, allocator, subject_override)
    lemma = ssn.headword
    return DisambiguationResult(word, lemma, tuple(candidates), frame,
                                result.open_questions, deltas)


# ---------------------------------------------------------------------------
# resolving genus uses inside definitions

@dataclass(frozen=True)
class AutoResolution:
    using: SenseKey
    genus_word: str
    unique: Optional[SenseKey]
    candidates: tuple[SenseKey, ...]
    rationale: str

    @property
    def record(self) -> Optional[ResolutionRecord]:
        if self.unique is None:
            return None
        return ResolutionRecord(self.using, self.genus_word, self.unique)


def _genus_families(genus_keys: list[SenseKey],
                    frames: dict[SenseKey, Frame]):
    """Split the genus verb's senses by frame structure: the family whose
    subject is bound as the from-state vs the family carrying a respect
    group."""
    bind_family: list[SenseKey] = []
    respect_family: list[SenseKey] = []
    for k in genus_keys:
        frame = frames.get(k)
        if frame is None:
            continue

        def has(name, slots) -> bool:
            return any(s.name == name or has(name, s.children) for s in slots)

        subj_bound = any(s.name == "SUBJ" and s.bind == "FROM-STATE"
                         for s in frame.slots)
        if subj_bound:
            bind_family.append(k)
        elif has("RESPECT", frame.slots):
            respect_family.append(k)
    return respect_family, bind_family


def _family_head(keys: list[SenseKey]) -> Optional[SenseKey]:
    if not keys:
        return None
    return min(keys, key=lambda k: (len(SenseLabel(k.label).ancestors()),
                                    SenseKey.sort_key(k)))


def disambiguate_in_definition(records: list[Sense], lexicon: Lexicon,
                               frames: dict[SenseKey, Frame],
                               rules: RuleTable) -> AutoResolution:
    """Propose the sense of the genus verb used by a definition: an
    adjacent from...to pair forces the respect family; an into/to object
    presumes the subject-transforming family subject to the essential-change
    check; an in-phrase is compared against the subsense respect sets."""
    using = records[0].key
    genus_word = None
    for rec in records:
        if rec.is_synonym_line:
            genus_word = rec.synonym_refs[0].lower()
        else:
            parsed = parse_sense(rec)
            if parsed.genus:
                head = parsed.genus[0]
                genus_word = head if " " not in head else head.split()[0]
        if genus_word:
            break
    if genus_word is None:
        raise ValueError(f"{using.render()} has no genus")

    genus_keys = [s.key for s in senses_of(lexicon, genus_word)
                  if s.pos.is_verb]
    genus_keys = sorted(set(genus_keys), key=SenseKey.sort_key)
    fam1, fam2 = _genus_families(genus_keys, frames)
    all_keys = tuple(genus_keys)

    def result(unique, candidates, why):
        return AutoResolution(using, genus_word, unique,
                              tuple(sorted(set(candidates), key=SenseKey.sort_key)),
                              why)

    phrases: list[Phrase] = []
    subject = None
    negated = False
    synonym_note_particles: tuple[str, ...] = ()
    for rec in records:
        if rec.is_synonym_line:
            synonym_note_particles = usage_particles(rec.usage_note)
            continue
        parsed = parse_sense(rec)
        if not phrases:
            phrases = list(parsed.differentiae)
            negated = parsed.negated
            subject = rec.subject_restriction

    pps = [p for p in phrases if p.kind == "prep-phrase" and not p.hedged]
    for i in range(len(pps) - 1):
        if pps[i].prep == "from" and pps[i + 1].prep == "to":
            return result(None, fam1,
                          "from...to pair: the respect family is intended; "
                          "the particular respect needs further context")

    state_pp = next((p for p in pps if p.prep in ("into", "to")), None)
    if state_pp is not None:
        if not state_pp.text:
            particles = {p.prep for p in pps}
            keep = []
            for k in fam2:
                required = _required_particles(lexicon, k)
                if required and not (required & particles):
                    continue
                keep.append(k)
            return result(None, keep or fam2,
                          "state preposition without an object: "
                          "subject-transforming family presumed, object "
                          "awaited from context")
        if len(split_alternatives(state_pp.text)) > 1:
            return result(None, fam1 + fam2,
                          "disjunctive state object: both families apply")
        if essential_change(subject, state_pp.text, lexicon):
            head = _family_head(fam2)
            if head is not None:
                return result(head, [head],
                              "essential change into a new kind: "
                              "subject-transforming family head")
        return result(None, fam1,
                      "state object within the subject's stated kinds: "
                      "accidental change, respect family")

    in_pp = next((p for p in pps if p.prep == "in" and p.text), None)
    if in_pp is not None:
        given = {a.lower() for a in split_alternatives(in_pp.text)}
        matches = []
        for k in fam1:
            frame = frames.get(k)
            if frame is None:
                continue
            stated: set[str] = set()

            def collect(slots):
                for s in slots:
                    if s.name == "RESPECT":
                        for r in s.restrictions:
                            stated.update(a.lower() for a in split_alternatives(r))
                    collect(s.children)

            collect(frame.slots)
            if given & stated:
                matches.append(k)
        if len(matches) == 1:
            return result(matches[0], matches,
                          "respect matches exactly one subsense restriction set")
        if matches:
            return result(None, matches,
                          "respect matches several subsense restriction sets")
        return result(None, fam1,
                      "respect stated but matches no subsense set: "
                      "respect family, subsense open")

    if synonym_note_particles and set(synonym_note_particles) & {"into", "to"}:
        return result(None, fam2,
                      "bare cross-reference noted with a state preposition: "
                      "subject-transforming family presumed")

    why = ("negated use: any sense may be the negated base"
           if negated else "no discriminating context: all senses apply")
    return result(None, all_keys, why)


def _required_particles(lexicon: Lexicon, key: SenseKey) -> set[str]:
    out: set[str] = set()
    for rec in lexicon.records_for(key):
        out.update(usage_particles(rec.usage_note))
    return out


def autoresolve_all(lexicon: Lexicon, frames: dict[SenseKey, Frame],
                    rules: RuleTable,
                    genus_word: str = "change") -> list[AutoResolution]:
    """Proposals for every sense whose main verb is the given word."""
    out = []
    for key in lexicon.sense_keys():
        if not key.pos.is_verb or key.headword == genus_word:
            continue
        records = lexicon.records_for(key)
        words = set()
        for rec in records:
            if rec.is_synonym_line:
                words.update(r.lower() for r in rec.synonym_refs)
            else:
                parsed = parse_sense(rec)
                words.update(h.split()[0] for h in parsed.genus)
        if genus_word in words:
            out.append(disambiguate_in_definition(records, lexicon, frames, rules))
    return sorted(out, key=lambda r: SenseKey.sort_key(r.using))


# ---------------------------------------------------------------------------
# multisentence parsing

@dataclass
class Entity:
    var: str
    head: str
    text: str
    sentence: int
    chunks: list[Chunk] = field(default_factory=list)
    result_index: Optional[int] = None


@dataclass
class DiscourseState:
    entities: list[Entity] = field(default_factory=list)
    pending: list[tuple[int, dict[tuple[str, ...], str]]] = field(default_factory=list)
    bindings: list[tuple[str, str]] = field(default_factory=list)

    def find_entity(self, subject: Optional[Chunk]) -> Optional[Entity]:
        if subject is None:
            return None
        head = subject.head
        if head in PRONOUNS or subject.text in PRONOUNS:
            return self.entities[-1] if self.entities else None
        for entity in reversed(self.entities):
            if entity.head == head:
                return entity
        return None


def _descriptor_paths(frame: Frame) -> dict[str, str]:
    """Unfilled-slot descriptor vars by role; the role is the slot's bound
    alias when it has one, so bindings survive a change of frame shape."""
    out: dict[str, str] = {}

    def walk(slot: Slot):
        if isinstance(slot.filler, Descriptor):
            out.setdefault(slot.bind or slot.name, slot.filler.var)
        for child in slot.children:
            walk(child)

    for slot in frame.slots:
        walk(slot)
    return out


def _literal_fills(frame: Frame) -> dict[str, str]:
    out: dict[str, str] = {}

    def walk(slot: Slot):
        if isinstance(slot.filler, str):
            out.setdefault(slot.bind or slot.name, slot.filler)
        for child in slot.children:
            walk(child)

    for slot in frame.slots:
        walk(slot)
    return out


def parse_discourse(sentences: Sequence[str], lexicon: Lexicon,
                    ssns: dict[str, SSN], frames: dict[SenseKey, Frame],
                    rules: RuleTable
                    ) -> tuple[list[DisambiguationResult], DiscourseState]:
    """Sentence boundaries do not finalize frames: when a later sentence's
    subject corefers (exact head match, or it/they to the most recent
    entity), its phrase evidence merges into the pending result, binding
    descriptors and retiring open questions."""
    if not sentences:
        raise ChunkError("no sentences")
    state = DiscourseState()
    allocator = VarAllocator()
    results: list[DisambiguationResult] = []

    for idx, sentence in enumerate(sentences):
        chunks = chunk_sentence(sentence, lexicon)
        ctx = SentenceContext(chunks)
        verb = ctx.verb
        if verb is None or verb.lemma not in ssns:
            raise NoNetworkError(f"no network for sentence {idx + 1}")
        subject = ctx.subject
        entity = state.find_entity(subject)
        subject_override = None
        if entity is not None:
            subject_override = entity.text
            merged = entity.chunks + [c for c in chunks
                                      if c.kind != "noun-phrase"]
            entity.chunks = merged
            # re-run the pending result with the merged evidence
            if entity.result_index is not None:
                old = results[entity.result_index]
                old_desc = _descriptor_paths(old.frame)
                prior_ssn = ssns[old.lemma]
                renewed = disambiguate(old.word, merged, prior_ssn, frames,
                                       rules, lexicon, allocator,
                                       subject_override=entity.text)
                results[entity.result_index] = renewed
                new_fills = _literal_fills(renewed.frame)
                for path, var in old_desc.items():
                    if path in new_fills:
                        state.bindings.append((var, new_fills[path]))
                state.pending = [(i, d) for i, d in state.pending
                                 if i != entity.result_index]
                state.pending.append((entity.result_index,
                                      _descriptor_paths(renewed.frame)))
        else:
            if subject is not None:
                entity = Entity(allocator.fresh(), subject.head, subject.text,
                                idx, list(chunks))
                state.entities.append(entity)

        result = disambiguate(verb.text, chunks, ssns[verb.lemma], frames,
                              rules, lexicon, allocator,
                              subject_override=subject_override)
        results.append(result)
        if entity is not None and entity.result_index is None:
            entity.result_index = len(results) - 1
        state.pending.append((len(results) - 1,
                              _descriptor_paths(result.frame)))

    return results, state


def results_to_tsv(results: Iterable[DisambiguationResult]) -> str:
    rows = ["word\tsenses\tfills"]
    for r in results:
        fills = "; ".join(d.render() for d in r.deltas)
        senses = ",".join(k.render() for k in r.candidates)
        rows.append(f"{r.word}\t{senses}\t{fills}")
    return "\n".join(rows) + "\n"
