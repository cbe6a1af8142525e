import pytest

from sensindex.lexicon import POS, LexiconError, Token, analyze, load_lexicon, normalize, tokenize


def surfaces(sentences):
    return [[t.surface for t in s] for s in sentences]


def test_normalize_apostrophes_and_spaces():
    assert normalize("  l’empereur \n  Titus ") == "l'empereur Titus"


def test_normalize_composes_accents():
    assert normalize("succéda") == "succéda"


def test_tokenize_splits_elision_and_punctuation():
    (sent,) = tokenize("Domitien succéda à l'empereur Titus.")
    assert [t.surface for t in sent] == ["Domitien", "succéda", "à", "l'", "empereur", "Titus", "."]
    assert sent[3].char_offset == 19


def test_tokenize_inversion_clitic():
    (sent,) = tokenize("De quel chef Domitien est-il le successeur ?")
    assert [t.surface for t in sent][4:6] == ["est", "-il"]
    (sent,) = tokenize("A-t-il gagné ?")
    assert [t.surface for t in sent][:2] == ["A", "-t-il"]


def test_tokenize_keeps_hyphenated_words():
    (sent,) = tokenize("Qui est le beau-père de Galère ?")
    assert "beau-père" in [t.surface for t in sent]


def test_tokenize_sentence_boundaries():
    text = "Il reconstruisit Rome. Trajan combattit les Parthes. fin."
    assert surfaces(tokenize(text)) == [
        ["Il", "reconstruisit", "Rome", "."],
        ["Trajan", "combattit", "les", "Parthes", ".", "fin", "."],
    ]


def test_tokenize_merges_multiword(pipeline):
    (sent,) = tokenize("Il poursuivit la remise en ordre de l'État.", pipeline.lexicon)
    assert "remise en ordre" in [t.surface for t in sent]


def test_tokenize_multiword_needs_single_spaces(pipeline):
    (sent,) = tokenize("la remise  en ordre", pipeline.lexicon)
    (sent2,) = tokenize(normalize("la remise  en ordre"), pipeline.lexicon)
    assert [t.surface for t in sent2] == ["la", "remise en ordre"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_analyze_son_has_two_readings(pipeline):
    at = analyze(Token("son", 0, 0), pipeline.lexicon)
    assert [a.pos for a in at.analyses] == [POS.Pron, POS.Noun]


def test_unknown_capitalized_word_is_proper(pipeline):
    at = analyze(Token("Vespasien", 0, 0), pipeline.lexicon, sentence_initial=True)
    (a,) = at.analyses
    assert a.pos == POS.Proper and a.semantic_traits == {"proper"}


def test_known_capitalized_word_mid_sentence_gains_proper(pipeline):
    at = analyze(Token("État", 10, 0), pipeline.lexicon)
    assert [a.pos for a in at.analyses] == [POS.Noun, POS.Proper]
    at = analyze(Token("Le", 0, 0), pipeline.lexicon, sentence_initial=True)
    assert all(a.pos != POS.Proper for a in at.analyses)


def test_unknown_lowercase_word_falls_back_to_noun(pipeline):
    (a,) = analyze(Token("xylophones", 0, 0), pipeline.lexicon).analyses
    assert (a.lemma, a.pos) == ("xylophones", POS.Noun)


def test_punctuation_token(pipeline):
    (a,) = analyze(Token("?", 0, 0), pipeline.lexicon).analyses
    assert a.pos == POS.Punct


def write(tmp_path, text):
    p = tmp_path / "lex.tsv"
    p.write_text(text, encoding="utf-8")
    return p


def test_load_rejects_undeclared_trait(tmp_path):
    p = write(tmp_path, "#traits: MIL\nvictoire\tvictoire\tNoun\tFem+SG\tMIL\nchef\tchef\tNoun\tMasc\tXYZ\n")
    with pytest.raises(LexiconError) as err:
        load_lexicon(p)
    assert err.value.line == 3
    assert "XYZ" in str(err.value)


def test_load_rejects_bad_pos(tmp_path):
    p = write(tmp_path, "chef\tchef\tNom\tMasc\t\n")
    with pytest.raises(LexiconError, match="part of speech"):
        load_lexicon(p)


def test_load_skips_duplicates_and_reads_multiwords(tmp_path):
    p = write(tmp_path, "#traits: SOC\nchef\tchef\tNoun\tMasc\tSOC\nchef\tchef\tNoun\tMasc\tSOC\n"
                        "remise_en_ordre\tremise en ordre\tNoun\tFem\n")
    lex = load_lexicon(p)
    assert len(lex.lookup("chef")) == 1
    assert lex.lookup("Remise en ordre")[0].lemma == "remise en ordre"
    assert "proper" in lex.trait_inventory
