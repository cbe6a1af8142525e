import json

import pytest

from sensindex.index import (
    IndexFormatError, IndexVersionError, InfoStructure, StaleIndexError, Trait, load, save,
)


def test_lookup_expanded_dependency(structure):
    hits = structure.lookup_dependency("NMOD[INDIR]", "successeur", "chef")
    assert len(hits) == 1
    (hit,) = hits
    assert hit.provenance == {"Derived", "Synonym"}
    assert (hit.record.doc_id, hit.record.sentence_index) == ("domitien.txt", 0)


def test_lookup_original_dependency_by_surface(structure):
    (hit,) = structure.lookup_dependency("SUBJ", "reconstruisit", "Il")
    assert hit.provenance == {"Original"}
    assert hit.posting.layer == "base"


def test_lookup_unknown_lemma(structure):
    assert structure.lookup_dependency("SUBJ", "xyzzy", "Il") == []
    assert structure.lookup_dependency("NOPE", None, None) == []


def test_lookup_with_traits_and_wildcards(structure):
    hits = structure.lookup_dependency("SUBJ", "combattre", Trait("humain"))
    assert [h.record.node(h.binding["dependent"]).lemma for h in hits] == ["Trajan"]
    assert structure.lookup_dependency("SUBJ", "combattre", Trait("MIL")) == []
    everything = structure.lookup_dependency("SUBJ")
    assert len(everything) >= 5


def test_lookup_mediator(structure):
    assert structure.lookup_dependency("VARG[INDIR]", "succéder", "empereur", mediator="à")
    assert not structure.lookup_dependency("VARG[INDIR]", "succéder", "empereur", mediator="de")


def test_identical_sentences_are_separate_records(pipeline):
    s = pipeline.new_structure()
    for e in pipeline.process_text("Trajan combattit les Parthes. Trajan combattit les Parthes."):
        s.add_sentence(e)
    hits = s.lookup_dependency("SUBJ", "combattre", "Trajan")
    assert sorted(h.posting.record for h in hits) == [0, 1]


def test_sentence_without_dependencies_still_indexed(pipeline):
    s = pipeline.new_structure()
    for e in pipeline.process_text("Zut !"):
        s.add_sentence(e)
    assert len(s.records) == 1 and s.lemma_postings


@pytest.mark.parametrize("stored", [False, True])
def test_round_trip(tmp_path, structure, stored):
    p = tmp_path / "i.jsonl"
    save(structure, p, store_postings=stored)
    again = load(p)
    assert again.records == structure.records
    assert again.dep_postings == structure.dep_postings
    assert again.lemma_postings == structure.lemma_postings
    p2 = tmp_path / "j.jsonl"
    save(again, p2, store_postings=stored)
    assert p.read_bytes() == p2.read_bytes()


def test_rebuilt_equals_incremental(structure):
    assert structure.rebuilt().dep_postings == structure.dep_postings


def test_version_mismatch(tmp_path, structure):
    p = tmp_path / "i.jsonl"
    save(structure, p)
    lines = p.read_text(encoding="utf-8").splitlines()
    header = json.loads(lines[0])
    header["version"] += 1
    p.write_text("\n".join([json.dumps(header)] + lines[1:]) + "\n", encoding="utf-8")
    with pytest.raises(IndexVersionError):
        load(p)


def test_truncated_file(tmp_path, structure):
    p = tmp_path / "i.jsonl"
    save(structure, p)
    lines = p.read_text(encoding="utf-8").splitlines()
    p.write_text("\n".join(lines[:-2]) + "\n", encoding="utf-8")
    with pytest.raises(IndexFormatError, match="truncated"):
        load(p)


@pytest.mark.parametrize("content", ["", "not json\n", '{"format": "other"}\n'])
def test_garbage(tmp_path, content):
    p = tmp_path / "i.jsonl"
    p.write_text(content, encoding="utf-8")
    with pytest.raises(IndexFormatError):
        load(p)


def test_stale_fixtures(tmp_path, structure, pipeline):
    p = tmp_path / "i.jsonl"
    save(structure, p)
    load(p, expected_fixtures=pipeline.hashes)
    changed = dict(pipeline.hashes, lexicon="0" * 64)
    with pytest.raises(StaleIndexError):
        load(p, expected_fixtures=changed)


def test_no_timestamp_in_metadata(structure):
    assert set(structure.metadata) == {"fixtures", "format", "counts"}


def test_empty_structure_round_trip(tmp_path):
    p = tmp_path / "e.jsonl"
    save(InfoStructure(), p)
    assert load(p).records == []
