import pytest

from sensindex.expansion import (
    DERIVED, ENDINGS, MAX_LINK, MAX_TRIM, MIN_STEM, SUFFIXES, SYNONYM,
    ExternalSynLexicon, PatternError, SynonymFileError,
    expand_graph, generate_derivation_candidates, load_patterns, load_synonyms,
    redistribute_synonyms, validate_derivations,
)
from sensindex.lexicon import POS
from sensindex.wsd import sense_of


def brute_force_candidates(lemma, lexicon):
    """Every attested lemma spelled stem + up to three letters + suffix."""
    out = set()
    for cand, poses in lexicon.lemma_index().items():
        if cand == lemma:
            continue
        ok = False
        for ending in ENDINGS:
            if not lemma.endswith(ending):
                continue
            base = lemma[: len(lemma) - len(ending)] if ending else lemma
            for trim in range(MAX_TRIM + 1):
                stem = base[: len(base) - trim]
                if len(stem) < MIN_STEM or not cand.startswith(stem):
                    continue
                rest = cand[len(stem):]
                for link in range(MAX_LINK + 1):
                    if rest[link:] in SUFFIXES:
                        ok = True
        if ok:
            out.update((cand, pos) for pos in poses)
    return out


@pytest.mark.parametrize("lemma", ["succéder", "combattre", "remplacer", "hériter", "gagner",
                                   "charmer", "enlever", "boire", "ruiner", "reconstruire"])
def test_candidates_match_brute_force(pipeline, lemma):
    got = generate_derivation_candidates(lemma, pipeline.lexicon)
    assert set(got) == brute_force_candidates(lemma, pipeline.lexicon)
    assert len(got) == len(set(got))


def test_successeur_is_a_candidate_and_validated(pipeline):
    cands = generate_derivation_candidates("succéder", pipeline.lexicon)
    assert ("successeur", POS.Noun) in cands
    records = validate_derivations(cands, pipeline.dictionary, "succéder", POS.Verb)
    assert [(r.source, r.derived_lemma) for r in records] == [(("succéder", POS.Verb, 1), "successeur")]


def test_validation_drops_candidates_without_code(pipeline):
    cands = [("successeur", POS.Noun), ("succession", POS.Noun)]
    assert validate_derivations(cands, pipeline.dictionary, "remporter", POS.Verb) == []
    records = validate_derivations(cands, pipeline.dictionary, "succéder", POS.Verb)
    assert {r.derived_lemma for r in records} == {"successeur"}


def test_redistribution_keeps_only_shared_tags(pipeline):
    d = pipeline.dictionary
    merged = redistribute_synonyms(d, [ExternalSynLexicon("x", {"remporter": {"gagner", "zzzz"}})])
    assert "gagner" in merged.get("remporter", POS.Verb, 3)
    assert "gagner" not in merged.get("remporter", POS.Verb, 1)
    assert ("x", "remporter", "zzzz") in merged.skipped


def test_dictionary_synonyms_kept(pipeline):
    merged = redistribute_synonyms(pipeline.dictionary, [])
    assert "remplacer" in merged.get("succéder", POS.Verb, 1)


def test_load_synonyms_errors(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("chef\tchef,meneur\n", encoding="utf-8")
    with pytest.raises(SynonymFileError, match="itself"):
        load_synonyms(p)
    p.write_text("# c\nchef meneur\n", encoding="utf-8")
    with pytest.raises(SynonymFileError, match=":2:"):
        load_synonyms(p)


@pytest.mark.parametrize(
    "line,message",
    [
        ("Verb>Noun : VARG[DIR]($self, $co) => NMOD[INDIR]($derived, de, $zz)", "unknown variable"),
        ("Verb>Noun : VARG[DIR]($self, $co) => NMOD($subj, chef)", "not a variable"),
        ("Verb>Noun : VARG[DIR]($self, $co) => NMOD[INDIR]($derived, $co, $co)", "mediator"),
        ("Verb>Noun : VARG[DIR]($self, $subj) => NMOD($derived, $subj)", "only bind"),
        ("Verb>Noun : VARG[DIR]($co, chef) => NMOD($derived, $co)", "\\$self"),
        ("Verb>Noun : VARG[DIR]($self, chef) => NMOD($derived, $co)", "not bound"),
        ("Verb>Noun : VARG[DIR]($self, $co) => NMOD($subj, $co)", "\\$derived"),
        ("Verb>Noun : VARG[DIR]($self, $co) =>", "no templates"),
        ("Verb-Noun : VARG[DIR]($self, $co) => NMOD($derived, $co)", "header"),
        ("Verb>Noun : VARG[INDIR]($self, $co) => NMOD($derived, $co)", "mediator"),
    ],
)
def test_pattern_errors(tmp_path, line, message):
    p = tmp_path / "d.txt"
    p.write_text("# header\n" + line + "\n", encoding="utf-8")
    with pytest.raises(PatternError, match=message) as err:
        load_patterns(p)
    assert err.value.line == 2


def expand(pipeline, text):
    (g,) = pipeline.disambiguated(text)
    return expand_graph(g, pipeline.synonyms, pipeline.derivations, pipeline.patterns,
                        pipeline.dictionary, pipeline.lexicon)


def test_derivation_rewrite(pipeline):
    e = expand(pipeline, "Domitien succéda à l'empereur Titus.")
    derived = [x for x in e.extra_dependencies if DERIVED in x.provenance]
    assert {e.render(x.dependency, alternatives=False) for x in derived} == {
        "NMOD[INDIR](successeur, de, empereur)",
        "NMOD(Domitien, successeur)",
    }


def test_only_sense_resolved_nodes_expand(pipeline):
    e = expand(pipeline, "Domitien succéda à l'empereur Titus.")
    for node_id in e.alternatives:
        assert sense_of(e.base.nodes[node_id]) is not None
    assert all(p == SYNONYM for alts in e.alternatives.values() for _, p in alts)


def test_base_graph_untouched(pipeline):
    (g,) = pipeline.disambiguated("Domitien succéda à l'empereur Titus.")
    before = (list(g.dependencies), [set(n.traits) for n in g.nodes], len(g.nodes))
    expand_graph(g, pipeline.synonyms, pipeline.derivations, pipeline.patterns,
                 pipeline.dictionary, pipeline.lexicon)
    assert (list(g.dependencies), [set(n.traits) for n in g.nodes], len(g.nodes)) == before


def test_valency_change_for_transitive_synonym(pipeline):
    e = expand(pipeline, "Domitien succéda à l'empereur Titus.")
    valency = [x for x in e.extra_dependencies if x.origin[0] == "valency"]
    assert {e.render(x.dependency, alternatives=False) for x in valency} == {"VARG[DIR](remplacer, empereur)"}
    assert any(syn == "remplacer" for _, _, syn in e.blocked)


def test_no_expansion_without_rules(pipeline):
    (g,) = pipeline.disambiguated("Domitien succéda à l'empereur Titus.")
    from sensindex.expansion import MergedSynonyms
    e = expand_graph(g, MergedSynonyms(), [], [])
    assert e.alternatives == {} and e.extra_dependencies == [] and e.virtual_nodes == []


def test_ruine_is_a_candidate_of_ruiner(pipeline):
    assert ("ruine", POS.Noun) in generate_derivation_candidates("ruiner", pipeline.lexicon)


def test_no_attested_variants(pipeline):
    assert generate_derivation_candidates("zzqx", pipeline.lexicon) == []


def test_pos_mismatch_rejected(pipeline):
    assert validate_derivations([("successeur", POS.Adj)], pipeline.dictionary, "succéder", POS.Verb) == []
