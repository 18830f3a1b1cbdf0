import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from topex.corpus import (
    AspectLexicon,
    load_aspect_lexicons,
    load_corpus,
    match_aspect_sentences,
    save_corpus,
    tokenize,
)
from topex.errors import DuplicateReviewError, ParseError


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def test_load_counts_and_dense_ids(tmp_path):
    path = tmp_path / "c.jsonl"
    write_jsonl(
        path,
        [
            {"entity_id": "e1", "review_id": "r1", "sentences": ["a b", "c d"]},
            {"entity_id": "e1", "review_id": "r2", "sentences": ["e f", "g h"]},
        ],
    )
    corpus = load_corpus(path)
    assert len(corpus.entities) == 1
    sentences = corpus.entity("e1").sentences()
    assert len(sentences) == 4
    assert [s.sent_id for s in sentences] == [0, 1, 2, 3]


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert load_corpus(path).entities == []


def test_space_shaped_corpus(tmp_path):
    path = tmp_path / "space.jsonl"
    records = [
        {"entity_id": f"hotel{e}", "review_id": f"r{r}", "sentences": ["one sentence"]}
        for e in range(50)
        for r in range(100)
    ]
    write_jsonl(path, records)
    corpus = load_corpus(path)
    assert len(corpus.entities) == 50
    assert all(len(entity.reviews) == 100 for entity in corpus.entities)


def test_malformed_line_reports_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"entity_id": "e", "review_id": "r", "sentences": ["x"]}\nnot json\n')
    with pytest.raises(ParseError) as err:
        load_corpus(path)
    assert err.value.line == 2


def test_duplicate_review_rejected(tmp_path):
    path = tmp_path / "dup.jsonl"
    write_jsonl(
        path,
        [
            {"entity_id": "e", "review_id": "r", "sentences": ["x"]},
            {"entity_id": "e", "review_id": "r", "sentences": ["y"]},
        ],
    )
    with pytest.raises(DuplicateReviewError):
        load_corpus(path)


def test_empty_sentence_rejected(tmp_path):
    path = tmp_path / "blank.jsonl"
    write_jsonl(path, [{"entity_id": "e", "review_id": "r", "sentences": ["  "]}])
    with pytest.raises(ParseError):
        load_corpus(path)


def test_save_load_idempotent(tmp_path):
    path = tmp_path / "c.jsonl"
    write_jsonl(
        path,
        [
            {"entity_id": "e2", "review_id": "r1", "sentences": ["b"]},
            {"entity_id": "e1", "review_id": "r1", "sentences": ["a", "c"]},
            {"entity_id": "e2", "review_id": "r2", "sentences": ["d"]},
        ],
    )
    corpus = load_corpus(path)
    canonical = tmp_path / "canon.jsonl"
    save_corpus(corpus, canonical)
    reloaded = load_corpus(canonical)
    canonical2 = tmp_path / "canon2.jsonl"
    save_corpus(reloaded, canonical2)
    assert canonical.read_bytes() == canonical2.read_bytes()


def test_tokenize_plural_fold_rule():
    text = "comfortable beds with lots of pillows"
    assert tokenize(text, fold_plurals=False) == [
        "comfortable", "beds", "with", "lots", "of", "pillows",
    ]
    assert tokenize(text) == ["comfortable", "bed", "with", "lot", "of", "pillow"]
    # 'ss' endings and short tokens are left alone
    assert tokenize("glass is as good") == ["glass", "is", "as", "good"]


def test_tokenize_strips_edge_punctuation():
    assert tokenize('"Great!" (really).', fold_plurals=False) == ["great", "really"]


def test_match_plural_fold_on_and_off(tmp_path):
    path = tmp_path / "c.jsonl"
    write_jsonl(
        path,
        [
            {
                "entity_id": "e",
                "review_id": "r",
                "sentences": ["comfortable beds with lots of pillows"],
            }
        ],
    )
    corpus = load_corpus(path)
    lexicon = AspectLexicon("rooms", ("bed", "pillow"))
    assert match_aspect_sentences(corpus, "e", lexicon, fold_plurals=False) == set()
    assert match_aspect_sentences(corpus, "e", lexicon) == {0}


def test_match_multiword_keyword(tmp_path):
    path = tmp_path / "c.jsonl"
    write_jsonl(
        path,
        [
            {
                "entity_id": "e",
                "review_id": "r",
                "sentences": ["The hotel has a rooftop bar.", "No bar here at roof level."],
            }
        ],
    )
    corpus = load_corpus(path)
    lexicon = AspectLexicon("drinks", ("rooftop bar",))
    assert match_aspect_sentences(corpus, "e", lexicon) == {0}


def test_match_empty_intersection(tmp_path):
    path = tmp_path / "c.jsonl"
    write_jsonl(path, [{"entity_id": "e", "review_id": "r", "sentences": ["quiet room"]}])
    corpus = load_corpus(path)
    assert match_aspect_sentences(corpus, "e", AspectLexicon("food", ("breakfast",))) == set()


def test_match_unknown_entity(tmp_path):
    path = tmp_path / "c.jsonl"
    write_jsonl(path, [{"entity_id": "e", "review_id": "r", "sentences": ["x"]}])
    corpus = load_corpus(path)
    with pytest.raises(KeyError):
        match_aspect_sentences(corpus, "nope", AspectLexicon("a", ("x",)))


def test_lexicon_validation():
    with pytest.raises(ValueError):
        AspectLexicon("a", ())
    with pytest.raises(ValueError):
        AspectLexicon("a", ("x", "x"))


def test_load_lexicons_single_and_list(tmp_path):
    single = tmp_path / "one.json"
    single.write_text(json.dumps({"aspect": "rooms", "keywords": ["Bed", "pillow"]}))
    lexicons = load_aspect_lexicons(single)
    assert lexicons["rooms"].keywords == ("bed", "pillow")

    many = tmp_path / "many.json"
    many.write_text(
        json.dumps(
            [
                {"aspect": "rooms", "keywords": ["bed"]},
                {"aspect": "food", "keywords": ["breakfast"]},
            ]
        )
    )
    assert sorted(load_aspect_lexicons(many)) == ["food", "rooms"]


@given(
    keywords=st.lists(
        st.text(alphabet="abcdefg", min_size=1, max_size=6), min_size=1, max_size=5, unique=True
    ),
    permutation_seed=st.integers(0, 1000),
)
def test_match_invariant_under_keyword_order(tmp_path_factory, keywords, permutation_seed):
    import random

    from topex.corpus import Corpus, Entity, Review, Sentence

    sentences = [Sentence(i, f"word{i} {kw} tail") for i, kw in enumerate(keywords)]
    corpus = Corpus([Entity("e", [Review("r", sentences)])])
    lexicon_a = AspectLexicon("a", tuple(keywords))
    shuffled = list(keywords)
    random.Random(permutation_seed).shuffle(shuffled)
    lexicon_b = AspectLexicon("a", tuple(shuffled))
    result_a = match_aspect_sentences(corpus, "e", lexicon_a)
    assert result_a == match_aspect_sentences(corpus, "e", lexicon_b)
    assert result_a <= {s.sent_id for s in sentences}
