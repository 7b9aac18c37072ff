from __future__ import annotations

import pytest

from assumption_forge.corpus import Sentence
from assumption_forge.dataset import balanced_select
from assumption_forge.errors import UnknownLabel, UnknownSentence
from assumption_forge.workspace import Workspace


def seed(ws: Workspace, n=4):
    sentences = [
        Sentence(id=f"s{i}", record_id="r", index_in_record=i, raw_text=f"sentence number {i}")
        for i in range(n)
    ]
    ws.add_sentences(sentences)
    return sentences


def test_sentences_persist_across_reopen(tmp_path):
    ws = Workspace(tmp_path)
    seed(ws)
    again = Workspace(tmp_path)
    assert len(again.store.sentences()) == 4
    assert again.store.sentences()[0].verdict is not None


def test_annotations_replay_in_order(tmp_path):
    ws = Workspace(tmp_path)
    seed(ws)
    ws.annotate("s0", "SCA", annotator="a")
    ws.annotate("s0", "PA", annotator="b")
    ws.annotate("s1", "NA")
    again = Workspace(tmp_path)
    assert again.store.annotation("s0").label.name == "PA"
    assert len(again.store.audit_trail("s0")) == 2
    assert again.store.annotation("s1").label.name == "NA"


def test_annotate_validates(tmp_path):
    ws = Workspace(tmp_path)
    seed(ws)
    with pytest.raises(UnknownSentence):
        ws.annotate("missing", "NA")
    with pytest.raises(UnknownLabel):
        ws.annotate("s0", "BOGUS")


def test_custom_labels_persist(tmp_path):
    ws = Workspace(tmp_path)
    ws.create_label("UNSURE", 9)
    again = Workspace(tmp_path)
    assert again.store.registry.get(9).name == "UNSURE"


def test_dataset_round_trip_with_kinds(tmp_path):
    ws = Workspace(tmp_path)
    sentences = [
        Sentence(id=f"k{i}", record_id="r", index_in_record=i,
                 raw_text=f"text {i}", kind="pr_body")
        for i in range(6)
    ]
    ws.add_sentences(sentences)
    for i, name in enumerate(["SCA", "PA", "NA", "SCA", "PA", "NA"]):
        ws.annotate(f"k{i}", name)
    dataset = balanced_select(ws.store, seed=0)
    dataset_id = ws.save_dataset(dataset, seed=0)
    loaded = ws.load_dataset(dataset_id)
    assert loaded.texts == dataset.texts
    assert loaded.labels == dataset.labels
    assert loaded.kinds == dataset.kinds  # provenance preserved through meta
    assert ws.list_datasets()[0]["rows"] == 6


def test_custom_lexicon_wired_into_engine(tmp_path):
    lexicon = tmp_path / "cues.txt"
    lexicon.write_text("conceivably\n", encoding="utf-8")
    ws = Workspace(tmp_path / "ws", lexicon_path=lexicon)
    s = Sentence(id="x", record_id="r", index_in_record=0,
                 raw_text="this conceivably breaks the cache")
    ws.add_sentences([s])
    verdict = ws.store.sentences()[0].verdict
    assert verdict["suggested_label"] == "PA"
