import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizer

WORDS = (
    "he she it they go goes went to school every day days the a an i has "
    "have apple in bag was were happy glad about result like likes play "
    "playing piano evening we is are going beach tomorrow morning . , cat "
    "sat sits on mat mats yesterday with not and may suffer pain life"
).split()


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A small randomly initialized BERT saved to disk, built offline."""
    model_dir = tmp_path_factory.mktemp("tiny-bert")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + sorted(set(WORDS))
    (model_dir / "vocab.txt").write_text("\n".join(vocab) + "\n",
                                         encoding="utf-8")
    tokenizer = BertTokenizer(str(model_dir / "vocab.txt"))
    tokenizer.save_pretrained(str(model_dir))
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=16,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=64,
    )
    BertModel(config).save_pretrained(str(model_dir))
    return str(model_dir)
