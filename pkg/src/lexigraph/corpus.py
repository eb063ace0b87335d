"""Bundled fixtures: the change lexicon, the word-government supplement,
prep rule and cue tables, hand resolutions, and the manifest of expected
counts with their derivations."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .frames import RuleTable
from .lexicon import Lexicon, PartOfSpeech, merge_lexicons, parse_lexf, senses_of
from .prep_rules import CueTable, load_cue_table, load_rule_table

_DATA = "lexigraph.data"


def _read(name: str) -> str:
    return resources.files(_DATA).joinpath(name).read_text(encoding="utf-8")


def corpus_text(name: str = "change_corpus.lexf") -> str:
    return _read(name)


def load_corpus(include_word_government: bool = False,
                include_resolutions: bool = True) -> Lexicon:
    parts = [parse_lexf(_read("change_corpus.lexf"))]
    if include_resolutions:
        parts.append(parse_lexf(_read("resolutions.lexf")))
    if include_word_government:
        parts.append(parse_lexf(_read("wordgov_corpus.lexf")))
    return merge_lexicons(*parts)


def load_rules() -> RuleTable:
    return load_rule_table(_read("prep_rules.tsv"))


def load_cues() -> CueTable:
    return load_cue_table(_read("prep_cues.tsv"))


@dataclass(frozen=True)
class FixtureManifest:
    values: dict
    derivations: dict

    def expected(self, key: str) -> int:
        return self.values[key]


def load_manifest() -> FixtureManifest:
    values: dict = {}
    derivations: dict = {}
    for lineno, raw in enumerate(_read("manifest.tsv").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"manifest line {lineno}: need 3 columns")
        key, value, derivation = parts
        values[key] = int(value)
        derivations[key] = derivation
    return FixtureManifest(values, derivations)


@dataclass(frozen=True)
class VerifyRow:
    key: str
    expected: int
    actual: Optional[int]
    ok: bool


@dataclass(frozen=True)
class VerifyReport:
    rows: tuple[VerifyRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_text(self) -> str:
        lines = []
        for r in self.rows:
            mark = "ok" if r.ok else "MISMATCH"
            actual = "-" if r.actual is None else str(r.actual)
            lines.append(f"{mark}\t{r.key}\texpected {r.expected}\tactual {actual}")
        return "\n".join(lines) + "\n"


def lexicon_counts(lexicon: Lexicon) -> dict:
    """The manifest keys derivable from the lexicon alone."""
    change = senses_of(lexicon, "change", PartOfSpeech.VI)
    labels = {s.label.text for s in change}
    using = [s for s in lexicon.entries
             if s.pos.is_verb and s.headword != "change"
             and _uses_change(s)]
    using_keys = {s.key for s in using}
    preps = [s for s in lexicon.entries if s.pos is PartOfSpeech.PREP]
    respect = 0
    for key, lines in lexicon.seed_frames.items():
        if key.headword != "change":
            continue
        if key.label == "1" or not key.label.startswith("1"):
            continue
        for line in lines:
            if ".RESPECT RESTRICT " in line:
                respect += 1
    return {
        "change_vi_labels": len(labels),
        "change_vi_lines": len(change),
        "change_vi_definition_lines": sum(1 for s in change
                                          if not s.is_synonym_line),
        "change_vi_synonym_lines": sum(1 for s in change if s.is_synonym_line),
        "using_rows": len(using_keys),
        "using_lines": len(using),
        "using_synonym_lines": sum(1 for s in using if s.is_synonym_line),
        "respect_payloads": respect,
        "prep_senses": len(preps),
        "resolution_rows": len(lexicon.resolutions),
    }


def _uses_change(sense) -> bool:
    from .lexicon import parse_sense
    if sense.is_synonym_line:
        return "change" in (r.lower() for r in sense.synonym_refs)
    parsed = parse_sense(sense)
    return any(h.split()[0] == "change" for h in parsed.genus)


def verify_fixture(lexicon: Lexicon,
                   manifest: Optional[FixtureManifest] = None) -> VerifyReport:
    """Report-only check of the lexicon-derivable manifest counts."""
    manifest = manifest or load_manifest()
    actuals = lexicon_counts(lexicon)
    rows = []
    for key in sorted(manifest.values):
        expected = manifest.values[key]
        actual = actuals.get(key)
        ok = actual is None or actual == expected
        rows.append(VerifyRow(key, expected, actual, ok))
    return VerifyReport(tuple(rows))
