from __future__ import annotations

from hypothesis import given, settings, strategies as st

from assumption_forge.corpus import (
    LabelHistogram,
    Sentence,
    corpus_stats,
    dedup,
    extract_sentences,
    split_sentences,
    word_count,
)
from assumption_forge.harvest import RawRecord, RecordKind


def record(text: str, rid: str = "r1") -> RawRecord:
    return RawRecord(id=rid, repo="a/b", kind=RecordKind.COMMIT_MESSAGE, text=text, created_at=1.0)


def test_empty_text_no_sentences():
    assert extract_sentences(record("")) == []


def test_terminator_split():
    out = extract_sentences(record("Fix bug. Add test."))
    assert [s.raw_text for s in out] == ["Fix bug.", "Add test."]


def test_bullets_plus_paragraph():
    body = "- first point here\n- second point here\n- third point here\n\nTrailing paragraph of text"
    out = split_sentences(body)
    assert len(out) == 4
    assert out[-1] == "Trailing paragraph of text"


def test_backtick_span_never_split():
    out = split_sentences("Call `foo.bar(x). baz()` then stop. Done now.")
    assert out[0].startswith("Call `foo.bar(x). baz()` then stop.")
    assert len(out) == 2


def test_version_string_protected():
    out = split_sentences("Upgrade to 1.3 before testing. Thanks.")
    assert len(out) == 2
    assert "1.3" in out[0]


def test_url_protected():
    out = split_sentences("See https://example.com/a.b.c for details. Bye.")
    assert len(out) == 2


def test_abbreviation_protected():
    out = split_sentences("Check shapes, e.g. input shape. Second sentence.")
    assert len(out) == 2


def test_question_and_bang_runs():
    out = split_sentences("Really?! Yes. Wait...")
    assert out[0] == "Really?!"


def test_sentence_indices_and_ids_unique():
    out = extract_sentences(record("One. Two. Three."))
    assert [s.index_in_record for s in out] == [0, 1, 2]
    assert len({s.id for s in out}) == 3


def test_no_empty_sentences_property():
    for text in ["...", "  \n\n ", "a.\n\n\n- b\n- c", "x! ! !"]:
        for s in split_sentences(text):
            assert s.strip() != ""


@settings(max_examples=150, deadline=None)
@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=300))
def test_coverage_of_non_whitespace(text):
    joined = "".join(split_sentences(text))
    assert "".join(joined.split()) == "".join(text.split())


def test_word_count_examples():
    assert word_count("?!?") == 0
    assert word_count("How are you?") == 3
    assert word_count("I am assuming there's not a memory problem") == 8


def test_word_count_lowercase_invariant():
    for text in ["Mixed CASE words", "a B c 1.2 --", "Don't stop"]:
        assert word_count(text.lower()) == word_count(text)


def test_dedup_keeps_first_and_order():
    s = [
        Sentence(id="1", record_id="r", index_in_record=0, raw_text="same text"),
        Sentence(id="2", record_id="r", index_in_record=1, raw_text="same text"),
        Sentence(id="3", record_id="r", index_in_record=2, raw_text="other"),
    ]
    out = dedup(s)
    assert [x.id for x in out] == ["1", "3"]


def test_dedup_exact_match_only():
    variants = [
        "# 32 floats -> compression factor 24.5, assuming the input is 784 floats",
        "# 32 floats -> compression of factor 24.5, assuming the input is 784 floats",
    ]
    s = [
        Sentence(id=str(i), record_id="r", index_in_record=i, raw_text=t)
        for i, t in enumerate(variants)
    ]
    assert len(dedup(s)) == 2


def test_dedup_case_sensitive():
    s = [
        Sentence(id="1", record_id="r", index_in_record=0, raw_text="A b"),
        Sentence(id="2", record_id="r", index_in_record=1, raw_text="a b"),
    ]
    assert len(dedup(s)) == 2


def test_dedup_trailing_newline_trimmed():
    s = [
        Sentence(id="1", record_id="r", index_in_record=0, raw_text="same\n"),
        Sentence(id="2", record_id="r", index_in_record=1, raw_text="same"),
    ]
    assert len(dedup(s)) == 1


def test_dedup_idempotent():
    s = [
        Sentence(id=str(i), record_id="r", index_in_record=i, raw_text=t)
        for i, t in enumerate(["a", "b", "a", "c", "b"])
    ]
    once = dedup(s)
    assert [x.raw_text for x in dedup(once)] == [x.raw_text for x in once]


class _Ex:
    def __init__(self, name, wc):
        self.label = type("L", (), {"name": name})()
        self.word_count = wc


def test_corpus_stats_buckets():
    hists = corpus_stats([_Ex("SCA", 5), _Ex("SCA", 15), _Ex("SCA", 15)])
    sca = hists["SCA"]
    assert sca.buckets[0] == 1 and sca.buckets[1] == 2
    assert sca.minimum == 5 and sca.maximum == 15
    assert sum(sca.buckets) == sca.count == 3


def test_corpus_stats_empty():
    assert corpus_stats([]) == {}


def test_corpus_stats_overflow_bucket():
    hists = corpus_stats([_Ex("NA", 101), _Ex("NA", 276)])
    assert hists["NA"].buckets[10] == 2
    assert hists["NA"].to_dict()["intervals"][">100"] == 2


def test_histogram_counts_sum_to_total():
    import random

    rng = random.Random(3)
    hist = LabelHistogram()
    for _ in range(500):
        hist.add(rng.randint(0, 300))
    assert sum(hist.buckets) == hist.count == 500
