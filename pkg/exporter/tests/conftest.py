import json

import pytest


CORPUS_RECORDS = [
    {"entity_id": "h1", "review_id": "r1",
     "sentences": ["the hotel was great", "great staff and great rooms"]},
    {"entity_id": "h1", "review_id": "r2",
     "sentences": ["the hotel was great", "pool was cold"]},
    {"entity_id": "h2", "review_id": "r1",
     "sentences": ["rooms were clean", "the staff was friendly",
                   "breakfast was great", "would stay again",
                   "great view from the room", "parking was easy"]},
]

VOCAB_WORDS = [
    "the", "hotel", "was", "great", "staff", "and", "rooms", "pool", "cold",
    "were", "clean", "friendly", "breakfast", "would", "stay", "again",
    "view", "from", "room", "parking", "easy",
]


@pytest.fixture
def corpus_path(tmp_path):
    path = tmp_path / "corpus.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for record in CORPUS_RECORDS:
            fh.write(json.dumps(record) + "\n")
    return path


@pytest.fixture(scope="session")
def tiny_encoder_dir(tmp_path_factory):
    """A small real transformer encoder saved locally: word-level tokenizer
    with [CLS]/[SEP] wrapping plus a randomly initialized 2-layer model.
    The sandbox has no model hub access, so weights are random; the
    extraction path (tokenize, forward, drop specials, truncate) is real."""
    import torch
    from tokenizers import Tokenizer, models, pre_tokenizers, processors
    from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

    directory = tmp_path_factory.mktemp("tiny-encoder")
    vocab = {"[PAD]": 0, "[UNK]": 1, "[CLS]": 2, "[SEP]": 3}
    for word in VOCAB_WORDS:
        vocab[word] = len(vocab)
    tokenizer = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    tokenizer.pre_tokenizer = pre_tokenizers.Whitespace()
    tokenizer.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair=None,
        special_tokens=[("[CLS]", 2), ("[SEP]", 3)],
    )
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
    )
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=16,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=64,
    )
    model = BertModel(config)
    fast.save_pretrained(directory)
    model.save_pretrained(directory)
    return directory
