"""Smoke tests of the Python bindings."""

import math

import pytest

import oiekit


def test_triple_codec_round_trip():
    s = oiekit.ExtractionSet("ak", [oiekit.make_tuple("Akerson", "will relinquish", "his chairman role")])
    text = oiekit.encode_triples(s)
    assert text == "(Akerson ; will relinquish ; his chairman role)"
    decoded, warnings = oiekit.decode_triples(text, "ak")
    assert decoded == s
    assert warnings == []
    _, warnings = oiekit.decode_triples("(a ; b ; c) (dog ; ran")
    assert len(warnings) == 1


def test_tanl():
    inputs = oiekit.make_verb_inputs("c", ["The", "cat", "sat", "on", "the", "mat."], [2])
    assert inputs == ["info_extract: The cat [sat] on the mat."]
    s = oiekit.ExtractionSet("c", [oiekit.make_tuple("The cat", "sat", "on the mat")])
    out = oiekit.encode_tanl(s)
    assert out == "[[The cat | subject 1] [sat | predicate 1] [on the mat | object 1] | tuple 1]"
    decoded, _ = oiekit.decode_tanl(out, "c")
    assert decoded == s
    assert oiekit.strip_prefix(inputs[0]) == "The cat [sat] on the mat."


def test_bio_and_filter():
    t = oiekit.bio_row_to_tuple(["cat", "sat", "mat"], ["A0-B", "P-B", "A1-B"])
    assert t.predicate == ["sat"]
    with pytest.raises(oiekit.MissingPredicate):
        oiekit.bio_row_to_tuple(["cat", "sat"], ["A0-B", "O"])
    with pytest.raises(oiekit.Error):
        oiekit.bio_row_to_tuple(["cat"], ["Q-B"])
    short = oiekit.make_tuple("A", "was", "x in 2009")
    long = oiekit.make_tuple("A", "was", "x in 2009 during y")
    assert oiekit.is_subsumed(short, long)
    kept = oiekit.filter_extractions(oiekit.ExtractionSet("s", [short, long]))
    assert len(kept) == 1


def test_scorer():
    p, r = oiekit.pair_match(oiekit.make_tuple("cat", "sat", "mat"), oiekit.make_tuple("cat", "sat", "the mat"))
    assert (p, r) == (1.0, 0.75)
    pairing, total = oiekit.max_assignment([[0.9, 0.2], [0.8, 0.7]])
    assert pairing == [0, 1]
    assert math.isclose(total, 1.6)
    gold = [oiekit.ExtractionSet("a", [oiekit.make_tuple("x", "y", "z")])]
    report = oiekit.score_corpus(gold, gold)
    assert report["f1"] == 1.0
    assert round(100 * oiekit.f1(0.505, 0.261), 1) == 34.4


def test_embedding_kernels():
    pos = oiekit.TagEmbeddingTable("pos", 2)
    pos.set("NN", [0.0, 1.0])
    out = oiekit.wa_forward([[1.0, 0.0]], ["NN"], [], pos, None, oiekit.WaConfig(0.6, 0.4, 0.0))
    assert out[0] == pytest.approx([0.6, 0.4])
    with pytest.raises(oiekit.InvalidConfig):
        oiekit.WaConfig(0.5, 0.4, 0.0)
    with pytest.raises(oiekit.UnknownTag):
        oiekit.wa_forward([[1.0, 0.0]], ["JJ"], [], pos, None, oiekit.WaConfig(0.5, 0.5, 0.0))

    one = oiekit.TagEmbeddingTable("pos", 1)
    one.set("NN", [3.0])
    cfg = oiekit.LcConfig.baseline(2, 1, 0)
    cfg.projection = [[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]
    assert oiekit.lc_forward([[1.0, 2.0]], ["NN"], [], one, None, cfg) == [[4.0, 2.0]]

    table = oiekit.TagEmbeddingTable.random("pos", ["NN"], 4, 9)
    assert len(table) == 4
    assert "<pad>" in table
    assert oiekit.TagEmbeddingTable.from_json(table.to_json()).lookup("NN") == table.lookup("NN")


def test_gradcheck():
    report = oiekit.run_gradcheck(seed=7, cases=9)
    assert report["passed"]
    assert report["max_rel_error"] <= 1e-4


def test_tags():
    subwords, tags = oiekit.align_tags(["The", "study"], ["DT", "NN"], 4)
    assert tags[:3] == ["<pad>"] * 3
    assert tags[-1] == "</s>"
    assert len(subwords) == len(tags)
    assert oiekit.select_semdp_tag([(1, "BV"), (4, "ARG2")]) == "BV"
    assert oiekit.select_semdp_tag([]) == "_"
