from __future__ import annotations

import json
from pathlib import Path

import pytest

from assumption_forge.criteria import (
    DEFAULT_PA_CUES,
    CriteriaEngine,
    classify_candidate,
    detect_keywords,
    detect_question_form,
    find_pa_cues,
    load_lexicon,
)

EXAMPLES = json.loads((Path(__file__).parent / "data" / "guideline_examples.json").read_text("utf-8"))
ENGINE = CriteriaEngine()


# --- keyword spans ---------------------------------------------------------

def test_no_keywords_in_plain_sentence():
    assert detect_keywords("Cast image preprocessing inputs to compute dtype.") == []


def test_identifier_span_in_declaration_list():
    spans = detect_keywords("ga_uint old, assumed, sum, new")
    assert len(spans) == 1
    assert spans[0].in_identifier is True
    assert spans[0].surface == "assumed"


def test_caps_keyword_is_plain_word():
    spans = detect_keywords("ASSUME nothing")
    assert len(spans) == 1
    assert spans[0].in_identifier is False


def test_snake_case_and_camel_case_are_identifiers():
    for text in ("set assumed_shape here", "call getAssumedValue now", "tf.assume is used"):
        spans = detect_keywords(text)
        assert len(spans) == 1, text
        assert spans[0].in_identifier is True, text


def test_offsets_point_at_surface():
    text = "We assume nothing."
    span = detect_keywords(text)[0]
    assert text[span.start : span.end] == span.surface == "assume"


@pytest.mark.parametrize("row", EXAMPLES, ids=lambda r: f"{r['rule']}-E{r['n']}")
def test_guideline_keyword_detection(row):
    spans = detect_keywords(row["text"])
    assert len(spans) == row["keywords"]
    assert sum(1 for s in spans if s.in_identifier) == row["identifier_keywords"]


# --- question form ---------------------------------------------------------

def test_question_form_examples():
    assert detect_question_form("Perhaps @farizrahman4u's implementation could be used instead?") == "nonstandard"
    assert detect_question_form("Do you assume that the entire dataset to be shuffled fits in memory?") == "standard"
    assert detect_question_form("Hello.") == "none"


def test_question_form_vocative_prefix():
    assert detect_question_form("@someone, could this break the cache?") == "standard"


def test_question_form_trailing_clause():
    text = "I tried the patch, is that correct?"
    assert detect_question_form(text) == "standard"


# --- cues -------------------------------------------------------------------

def test_cue_idiom_discounted():
    assert find_pa_cues("keep batches as small as possible") == []
    assert find_pa_cues("this is possible now") != []


def test_cue_prefix_wildcards():
    assert find_pa_cues("she expects results")
    assert not find_pa_cues("unexpected keys are found")


def test_lexicon_file_round_trip(tmp_path):
    path = tmp_path / "cues.txt"
    path.write_text("# comment line\nshould\nmaybe  # trailing\n\nexpect*\n", encoding="utf-8")
    assert load_lexicon(path) == ("should", "maybe", "expect*")


def test_engine_with_custom_lexicon(tmp_path):
    path = tmp_path / "cues.txt"
    path.write_text("foreseeably\n", encoding="utf-8")
    engine = CriteriaEngine(cues=load_lexicon(path))
    assert engine.classify("this foreseeably breaks builds").suggested_label == "PA"
    assert engine.classify("i think this breaks builds").suggested_label == "NA"


# --- full verdicts ----------------------------------------------------------

def test_classify_spec_examples():
    sca = ENGINE.classify(
        "[tf/xla] fixup numbering of xla parameters used for aliasing previously, "
        "the xla argument parameter was incorrectly assumed to correspond to the index "
        "in the vector of `xlacompiler::argument'"
    )
    assert sca.suggested_label == "SCA"

    ec4 = ENGINE.classify("Are there any assumptions made by this method regarding the data?")
    assert ec4.suggested_label == "NA"
    assert "SCA_EC4" in ec4.matched_rules

    ic3 = ENGINE.classify(
        "@yaroslavvb I'm assuming that if I run the probe op in a session together with "
        "computation of a model this would return me the peek memory usage, is that correct?"
    )
    assert ic3.suggested_label == "SCA"
    assert "SCA_IC3" in ic3.matched_rules

    pa = ENGINE.classify("Theano tile() expects Python int, so casting from numpy.int32 to Python int. (#4330)")
    assert pa.suggested_label == "PA"
    assert "PA_IC1" in pa.matched_rules

    ic4 = ENGINE.classify("Do not assume Node.in_edges() is sorted by dst_input.")
    assert ic4.suggested_label == "SCA"
    assert "SCA_IC4" in ic4.matched_rules


def test_keyword_soundness():
    # SCA verdicts require a non-identifier keyword span
    for row in EXAMPLES:
        verdict = ENGINE.classify(row["text"])
        if verdict.suggested_label == "SCA":
            assert any(not s.in_identifier for s in verdict.keyword_spans)


def test_determinism():
    for row in EXAMPLES:
        a = ENGINE.classify(row["text"])
        b = ENGINE.classify(row["text"])
        assert a == b


def test_confidence_definite_cases():
    v = ENGINE.classify("Cast image preprocessing inputs to compute dtype.")
    assert v.confidence == "definite" and v.suggested_label == "NA"
    v = ENGINE.classify("ga_uint old, assumed, sum, new")
    assert v.confidence == "definite" and v.suggested_label == "NA"
    v = ENGINE.classify("The main assumption behind the Glorot initialization is that the variance of the gradients should be the same in each layer.")
    assert v.confidence == "heuristic"


def test_guideline_agreement_at_least_75_percent():
    hits = sum(1 for row in EXAMPLES if ENGINE.classify(row["text"]).suggested_label == row["label"])
    agreement = hits / len(EXAMPLES)
    assert agreement >= 0.75, f"verdict agreement {agreement:.1%}"


CHAT_ERRORS = json.loads(
    (Path(__file__).parent / "data" / "chat_error_examples.json").read_text("utf-8")
)


def test_chat_error_corpus_agreement():
    # the sentences chat models famously misread, with their ground truths
    hits = sum(1 for row in CHAT_ERRORS if ENGINE.classify(row["text"]).suggested_label == row["label"])
    assert hits / len(CHAT_ERRORS) >= 0.9, f"{hits}/{len(CHAT_ERRORS)}"


def test_classify_candidate_accepts_sentence_objects():
    from assumption_forge.corpus import Sentence

    s = Sentence(id="x", record_id="r", index_in_record=0, raw_text="We assume the cache is warm.")
    assert classify_candidate(s).suggested_label == "SCA"


def test_every_verdict_lists_rules():
    for row in EXAMPLES:
        verdict = ENGINE.classify(row["text"])
        assert verdict.matched_rules, row["rule"]
        assert verdict.question_form in ("standard", "nonstandard", "none")
