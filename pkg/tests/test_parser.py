from __future__ import annotations

import pytest

from lexigraph.frames import Descriptor
from lexigraph.lexicon import PartOfSpeech, SenseKey
from lexigraph.parser import (
    ChunkError,
    SentenceContext,
    VarAllocator,
    autoresolve_all,
    chunk_sentence,
    disambiguate,
    essential_change,
    parse_discourse,
    results_to_tsv,
)


def change_key(label: str) -> SenseKey:
    return SenseKey("change", PartOfSpeech.VI, 1, label)


FAMILY1 = tuple(change_key(l) for l in
                ("1", "1a", "1b(1)", "1b(2)", "1c", "1d", "1e", "1f",
                 "1g", "1h", "1i"))
FAMILY2 = tuple(change_key(l) for l in ("2", "2a", "2b", "2c"))


def run(text, lexicon, ssns, frames, rules):
    chunks = chunk_sentence(text, lexicon)
    ctx = SentenceContext(chunks)
    verb = ctx.verb
    return disambiguate(verb.text, chunks, ssns[verb.lemma], frames, rules,
                        lexicon, VarAllocator())


# ---------------------------------------------------------------------------
# chunking

def test_chunk_basic(lexicon):
    chunks = chunk_sentence("The milk changed into curd", lexicon)
    assert [(c.kind, c.prep, c.text) for c in chunks] == [
        ("noun-phrase", None, "the milk"),
        ("verb", None, "changed"),
        ("prep-phrase", "into", "curd")]
    assert chunks[1].lemma == "change"


def test_chunk_pronoun_subject(lexicon):
    chunks = chunk_sentence("It turned into vapor", lexicon)
    assert [(c.kind, c.prep, c.text) for c in chunks] == [
        ("noun-phrase", None, "it"),
        ("verb", None, "turned"),
        ("prep-phrase", "into", "vapor")]


def test_chunk_empty_errors(lexicon):
    with pytest.raises(ChunkError):
        chunk_sentence("", lexicon)
    with pytest.raises(ChunkError):
        chunk_sentence([], lexicon)


def test_chunk_without_known_verb(lexicon):
    chunks = chunk_sentence("The cat sat on the mat", lexicon)
    assert all(c.kind != "verb" for c in chunks)


def test_chunks_partition_tokens(lexicon):
    text = "The milk changed into curd"
    chunks = chunk_sentence(text, lexicon)
    rebuilt = " ".join(
        (c.prep + " " + c.text if c.kind == "prep-phrase" else c.text)
        for c in chunks)
    assert rebuilt == text.lower()


# ---------------------------------------------------------------------------
# disambiguation

def test_milk_into_curd(lexicon, ssns, frames, rules):
    r = run("The milk changed into curd", lexicon, ssns, frames, rules)
    assert r.candidates == (change_key("2a"),)
    subj = _slot(r.frame, "SUBJ")
    assert subj.bind == "FROM-STATE" and subj.filler == "the milk"
    result = _slot(r.frame, "RESULT")
    assert result.bind == "TO-STATE" and result.filler == "curd"
    assert not r.open_questions


def test_wind_sentence_is_ambiguous(lexicon, ssns, frames, rules):
    r = run("The wind changed", lexicon, ssns, frames, rules)
    assert len(r.candidates) > 1
    assert any("RESPECT" in q for q in r.open_questions)


def test_moon_selects_subject_restricted_sense(lexicon, ssns, frames, rules):
    r = run("The moon changed", lexicon, ssns, frames, rules)
    assert r.candidates == (change_key("1e"),)


def test_added_phrase_narrows_candidates(lexicon, ssns, frames, rules):
    base = run("The wind changed", lexicon, ssns, frames, rules)
    more = run("The wind changed in direction", lexicon, ssns, frames, rules)
    assert set(more.candidates) <= set(base.candidates)
    assert len(more.candidates) < len(base.candidates)


def test_descriptors_fill_unfilled_mandatory_slots(lexicon, ssns, frames, rules):
    r = run("The milk changed", lexicon, ssns, frames, rules)
    descriptors = _collect_descriptors(r.frame)
    assert descriptors  # unfilled states carry fresh variables
    assert len({d.var for d in descriptors}) == len(descriptors)


def test_open_questions_come_from_the_network(lexicon, ssns, frames, rules):
    r = run("The wind changed", lexicon, ssns, frames, rules)
    valid = {q.qid for q in ssns["change"].questions()}
    assert set(r.open_questions) <= valid


def _slot(frame, name):
    def walk(slots):
        for s in slots:
            if s.name == name:
                return s
            hit = walk(s.children)
            if hit:
                return hit
    return walk(frame.slots)


def _collect_descriptors(frame):
    out = []

    def walk(slots):
        for s in slots:
            if isinstance(s.filler, Descriptor):
                out.append(s.filler)
            walk(s.children)
    walk(frame.slots)
    return out


def test_essential_change_check():
    assert essential_change("the milk", "curd")
    assert not essential_change("a liquid", "a liquid")
    assert essential_change(None, "coal")
    assert not essential_change("a simple vowel", "vowel")


# ---------------------------------------------------------------------------
# resolving uses inside definitions

@pytest.fixture(scope="module")
def proposals(lexicon, frames, rules):
    return {p.using.headword + ":" + p.using.label: p
            for p in autoresolve_all(lexicon, frames, rules)}


def test_coalify_resolves_to_sense_two(proposals):
    p = proposals["coalify:1"]
    assert p.unique == change_key("2")
    assert p.record is not None
    assert p.record.target == change_key("2")


def test_from_to_rows_propose_family_one(proposals):
    for row in ("come over:1a", "devitrify:1", "differ:1b", "melt:1a",
                "quarter:4", "transfer:2", "transship:1", "weaken:2"):
        p = proposals[row]
        assert p.unique is None, row
        assert p.candidates == FAMILY1, row


def test_ambiguous_rows_stay_non_unique(proposals):
    for row, expected in [
        ("caramelize:1", FAMILY1 + FAMILY2),
        ("chop and change:2", None),
        ("graduate:2", None),
        ("hold:1b(1)", None),
        ("specialize:3", None),
    ]:
        p = proposals[row]
        assert p.unique is None, row
        assert len(p.candidates) > 1
        if expected is not None:
            assert p.candidates == tuple(sorted(expected, key=SenseKey.sort_key))
        else:
            assert len(p.candidates) == 19


def test_respect_comparison_narrows_push(proposals):
    p = proposals["push:5b"]
    assert p.unique == change_key("1c")


def test_autoresolve_tallies_match_manifest(proposals, manifest):
    unique = sum(1 for p in proposals.values() if p.unique is not None)
    fam1 = sum(1 for p in proposals.values()
               if p.unique is None and p.candidates == FAMILY1)
    fam2 = sum(1 for p in proposals.values()
               if p.unique is None and p.candidates
               and set(p.candidates) <= set(FAMILY2))
    both = sum(1 for p in proposals.values()
               if p.candidates == FAMILY1 + FAMILY2)
    alln = sum(1 for p in proposals.values() if len(p.candidates) == 19)
    assert unique == manifest.expected("autoresolve_unique")
    assert fam1 == manifest.expected("autoresolve_family1")
    assert fam2 == manifest.expected("autoresolve_family2")
    assert both == manifest.expected("autoresolve_both_families")
    assert alln == manifest.expected("autoresolve_all_senses")
    assert unique + fam1 + fam2 + both + alln == 47


def test_proposals_cover_all_using_senses(proposals):
    assert len(proposals) == 47


# ---------------------------------------------------------------------------
# discourse

def test_carryover_binds_to_state(lexicon, ssns, frames, rules):
    sentences = ["The milk changed.", "It turned into curd."]
    solo_opens = 0
    for s in sentences:
        chunks = chunk_sentence(s, lexicon)
        verb = SentenceContext(chunks).verb
        r = disambiguate(verb.text, chunks, ssns[verb.lemma], frames, rules,
                         lexicon, VarAllocator())
        solo_opens += len(r.open_questions)
    results, state = parse_discourse(sentences, lexicon, ssns, frames, rules)
    bound_values = {v for _, v in state.bindings}
    assert "curd" in bound_values
    disc_opens = sum(len(r.open_questions) for r in results)
    assert disc_opens < solo_opens
    assert results[0].candidates == (change_key("2a"),)


def test_single_sentence_matches_disambiguate(lexicon, ssns, frames, rules):
    text = "The milk changed into curd"
    solo = run(text, lexicon, ssns, frames, rules)
    results, state = parse_discourse([text], lexicon, ssns, frames, rules)
    assert results[0].candidates == solo.candidates
    assert results[0].open_questions == solo.open_questions
    assert not state.bindings


def test_unrelated_subjects_do_not_bind(lexicon, ssns, frames, rules):
    results, state = parse_discourse(
        ["The milk changed.", "The voice changed."],
        lexicon, ssns, frames, rules)
    assert not state.bindings
    assert len(state.pending) == 2


def test_plural_pronoun_corefers_with_latest_entity(lexicon, ssns, frames, rules):
    results, state = parse_discourse(
        ["The milk changed.", "They turned into curd."],
        lexicon, ssns, frames, rules)
    assert "curd" in {v for _, v in state.bindings}


def test_descriptor_vars_unique_across_discourse(lexicon, ssns, frames, rules):
    results, _ = parse_discourse(
        ["The milk changed.", "The voice changed."],
        lexicon, ssns, frames, rules)
    seen = []
    for r in results:
        seen.extend(d.var for d in _collect_descriptors(r.frame))
    assert len(seen) == len(set(seen))


def test_results_tsv(lexicon, ssns, frames, rules):
    r = run("The milk changed into curd", lexicon, ssns, frames, rules)
    tsv = results_to_tsv([r])
    assert tsv.startswith("word\t")
    assert "change:vi:1:2a" in tsv
