from __future__ import annotations

import pytest

from lexigraph.lexicon import (
    DefinitionParseError,
    LexfError,
    PartOfSpeech,
    SenseLabel,
    parse_definition,
    parse_lexf,
    parse_sense,
    senses_of,
    serialize_lexf,
    split_alternatives,
    usage_particles,
    usage_subject,
)
from lexigraph.corpus import corpus_text


def test_minimal_entry():
    lx = parse_lexf("E|change|vi|1\n"
                    "S|1||become different in one or more respects without "
                    "becoming something else|\n")
    assert len(lx.entries) == 1
    sense = lx.entries[0]
    assert sense.label.text == "1"
    assert sense.pos is PartOfSpeech.VI
    assert sense.homograph == 1


def test_empty_input_gives_empty_lexicon():
    lx = parse_lexf("")
    assert lx.entries == ()
    assert lx.resolutions == ()


def test_bundled_corpus_counts(lexicon):
    change = senses_of(lexicon, "change", PartOfSpeech.VI)
    assert len({s.label.text for s in change}) == 19
    using = {s.key for s in lexicon.entries
             if s.pos.is_verb and s.headword != "change"}
    assert len(using) == 47


@pytest.mark.parametrize("bad, message", [
    ("X|what|now", "unknown record kind"),
    ("E|change|vi", "E record needs"),
    ("E|change|zz|1", "bad part of speech"),
    ("S|1||orphan definition|", "outside an entry"),
    ("E|change|vi|1\nS|bogus||text|", "bad sense label"),
    ("E|change|vi|1\nE|change|vi|1", "duplicate entry"),
    ("E|change|vi|1\nS|1||a def|\nS|1||a def|", "duplicate sense record"),
    ("E|change|vi|1\nF|2|PRED X", "unknown sense"),
    ("R|a:vi:1|x", "R record needs"),
])
def test_ingestion_errors_carry_line_numbers(bad, message):
    with pytest.raises(LexfError) as err:
        parse_lexf(bad)
    assert message in str(err.value)
    assert "line" in str(err.value)


def test_round_trip(lexicon):
    text = serialize_lexf(lexicon)
    again = parse_lexf(text)
    assert again == lexicon


def test_round_trip_is_stable(lexicon):
    once = serialize_lexf(lexicon)
    twice = serialize_lexf(parse_lexf(once))
    assert once == twice


def test_sense_label_parent_chain():
    assert SenseLabel("1b(2)").parent() == SenseLabel("1b")
    assert SenseLabel("1b").parent() == SenseLabel("1")
    assert SenseLabel("1").parent() is None
    assert [a.text for a in SenseLabel("1b(2)").ancestors()] == ["1b", "1"]


def test_parse_definition_coalify_row():
    p = parse_definition("change into coal by the process of coalification",
                         PartOfSpeech.VB)
    assert p.genus == ("change",)
    assert [(d.prep, d.text) for d in p.differentiae] == [
        ("into", "coal"), ("by", "the process of coalification")]


def test_parse_definition_specified_object():
    p = parse_definition(
        "to clear (water) from a boat by dipping and throwing over the side",
        PartOfSpeech.VT)
    assert p.genus == ("clear",)
    assert p.specified_object == "water"


def test_parse_definition_negation():
    p = parse_definition("not change", PartOfSpeech.VI)
    assert p.genus == ("change",)
    assert p.negated is True
    assert p.differentiae == ()


def test_parse_definition_coordination():
    p = parse_definition("pale or blush", PartOfSpeech.VI)
    assert p.genus == ("pale", "blush")
    p = parse_definition("turn into or become something materially different "
                         "from before", PartOfSpeech.VI)
    assert p.genus == ("turn", "become")
    assert p.genus_complement == "something materially different"


def test_parse_definition_complement_and_subject_use():
    p = parse_definition("become different in one or more respects without "
                         "becoming something else", PartOfSpeech.VI)
    assert p.genus == ("become",)
    assert p.genus_complement == "different"
    assert [(d.prep, d.text) for d in p.differentiae] == [
        ("in", "one or more respects"), ("without", "becoming something else")]
    assert not p.transitive_use


def test_parse_definition_hedged_phrases():
    p = parse_definition("change from a solid to a liquid state usu. by the "
                         "action of heat", PartOfSpeech.VI)
    by = [d for d in p.differentiae if d.prep == "by"]
    assert by and by[0].hedged
    p = parse_definition("change with or as if with the wind", PartOfSpeech.VI)
    assert [(d.prep, d.text, d.hedged) for d in p.differentiae] == [
        ("with", "the wind", True)]


def test_parse_definition_requires_verb_head():
    with pytest.raises(DefinitionParseError):
        parse_definition("of the", PartOfSpeech.VI)
    with pytest.raises(DefinitionParseError):
        parse_definition("   ", PartOfSpeech.VI)


def test_parse_definition_total_over_corpus(lexicon):
    for sense in lexicon.entries:
        if not sense.pos.is_verb or sense.is_synonym_line:
            continue
        parsed = parse_sense(sense)
        assert parsed.genus, sense.raw_definition


def test_coordination_split_counts(lexicon):
    # heads = 1 + number of top-level coordinators among the verb heads
    cases = {
        "lose or acquire some characteristic, property, or tendency": 2,
        "increase or decrease": 2,
        "disrobe and rearray oneself more suitably": 2,
        "pass from one form, appearance, position, state, or stage to another": 1,
    }
    for text, heads in cases.items():
        assert len(parse_definition(text, PartOfSpeech.VI).genus) == heads


def test_senses_of_queries(lexicon):
    assert len(senses_of(lexicon, "zzz", PartOfSpeech.VI)) == 0
    vi = senses_of(lexicon, "change", PartOfSpeech.VI)
    all_pos = senses_of(lexicon, "change")
    assert {s.key for s in vi} <= {s.key for s in all_pos}
    # file order preserved
    lines = [s.line for s in vi]
    assert lines == sorted(lines)


def test_homographs_are_distinct():
    lx = parse_lexf("E|bore|vt|1\nS|1||pierce with a drill|\n"
                    "E|bore|vt|2\nS|1||weary with dullness|\n")
    assert len(senses_of(lx, "bore")) == 2
    keys = {s.key for s in lx.entries}
    assert len(keys) == 2


def test_usage_note_parsing():
    assert usage_particles("used with into") == ("into",)
    assert usage_particles("used with into or to") == ("into", "to")
    assert usage_particles("usu. used with against") == ("against",)
    assert usage_particles("used of the moon") == ()
    assert usage_subject("used of the moon") == "moon"


def test_split_alternatives():
    assert split_alternatives("form, appearance, position, state, or stage") == (
        "form", "appearance", "position", "state", "stage")
    assert split_alternatives("caramel or a caramellike substance or color") == (
        "caramel", "caramellike substance", "color")


def test_phrasal_headword_entries(lexicon):
    assert senses_of(lexicon, "chop and change")
    assert senses_of(lexicon, "come over")


def test_corpus_definition_strings_verbatim():
    text = corpus_text()
    for needle in [
        "become different in one or more respects without becoming something else",
        "lose or acquire some characteristic, property, or tendency",
        "pass from one form, appearance, position, state, or stage to another",
        "turn into or become something materially different from before",
        "undergo transformation or conversion",
        "change into coal by the process of coalification",
        "change from a solid to a liquid state usu. by the action of heat",
        "change gradually in loudness or visibility",
        "not change",
    ]:
        assert needle in text
