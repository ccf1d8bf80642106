import json

import numpy as np
import pytest

from embed_exporter.export import Encoder, ExportJob, export


@pytest.fixture(scope="module")
def encoder(tiny_model_dir):
    return Encoder(tiny_model_dir, pooling="mean")


def read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        lines = [json.loads(line) for line in fh]
    return lines[0], lines[1:]


class TestEncoder:
    def test_shape_and_order(self, encoder):
        vecs = encoder.encode(["he goes to school", "the cat sat"])
        assert vecs.shape == (2, encoder.dim)
        again = encoder.encode(["the cat sat", "he goes to school"])
        np.testing.assert_allclose(vecs[0], again[1], atol=1e-5)
        np.testing.assert_allclose(vecs[1], again[0], atol=1e-5)

    def test_empty_batch(self, encoder):
        assert encoder.encode([]).shape == (0, encoder.dim)

    def test_mean_vs_cls_differ(self, tiny_model_dir):
        mean = Encoder(tiny_model_dir, pooling="mean")
        cls = Encoder(tiny_model_dir, pooling="cls")
        text = ["he goes to school every day"]
        assert not np.allclose(mean.encode(text), cls.encode(text))

    def test_mean_ignores_padding(self, encoder):
        # Padding introduced by batching a short text with a long one must
        # not change the short text's pooled vector.
        alone = encoder.encode(["the cat sat"])[0]
        padded = encoder.encode(
            ["the cat sat", "he goes to school every day in the morning"])[0]
        np.testing.assert_allclose(alone, padded, atol=1e-5)

    def test_bad_pooling_rejected(self, tiny_model_dir):
        with pytest.raises(ValueError):
            Encoder(tiny_model_dir, pooling="max")


class TestExport:
    def test_counting_contract(self, encoder, tiny_model_dir, tmp_path):
        inp = tmp_path / "in.txt"
        inp.write_text("he goes to school\nthe cat sat\nit was happy\n",
                       encoding="utf-8")
        out = tmp_path / "out.jsonl"
        n = export(ExportJob(str(inp), tiny_model_dir, str(out)), encoder)
        assert n == 3
        header, records = read_jsonl(str(out))
        assert header == {"format": "editvec-emb/v1", "dim": encoder.dim,
                          "encoder": tiny_model_dir, "pooling": "mean"}
        assert len(records) == 3
        assert all(len(r["v"]) == encoder.dim for r in records)

    def test_dedup(self, encoder, tiny_model_dir, tmp_path):
        inp = tmp_path / "in.txt"
        inp.write_text("the cat sat\nthe cat sat\nit was happy\n",
                       encoding="utf-8")
        out = tmp_path / "out.jsonl"
        assert export(ExportJob(str(inp), tiny_model_dir, str(out)),
                      encoder) == 2
        _, records = read_jsonl(str(out))
        assert [r["text"] for r in records] == ["the cat sat", "it was happy"]

    def test_deterministic(self, encoder, tiny_model_dir, tmp_path):
        inp = tmp_path / "in.txt"
        inp.write_text("he goes to school\nthe cat sat\n", encoding="utf-8")
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        export(ExportJob(str(inp), tiny_model_dir, str(a)), encoder)
        export(ExportJob(str(inp), tiny_model_dir, str(b)), encoder)
        assert a.read_bytes() == b.read_bytes()

    def test_batching_invariance(self, encoder, tiny_model_dir, tmp_path):
        inp = tmp_path / "in.txt"
        inp.write_text("he goes to school\nthe cat sat\nit was happy\n",
                       encoding="utf-8")
        big = tmp_path / "big.jsonl"
        small = tmp_path / "small.jsonl"
        export(ExportJob(str(inp), tiny_model_dir, str(big),
                         batch_size=32), encoder)
        export(ExportJob(str(inp), tiny_model_dir, str(small),
                         batch_size=1), encoder)
        _, rb = read_jsonl(str(big))
        _, rs = read_jsonl(str(small))
        for x, y in zip(rb, rs):
            assert x["text"] == y["text"]
            np.testing.assert_allclose(x["v"], y["v"], atol=1e-5)

    def test_partial_file_removed_on_failure(self, encoder, tiny_model_dir,
                                             tmp_path, monkeypatch):
        inp = tmp_path / "in.txt"
        inp.write_text("the cat sat\n", encoding="utf-8")
        out = tmp_path / "out.jsonl"
        monkeypatch.setattr(encoder, "encode",
                            lambda texts: (_ for _ in ()).throw(
                                RuntimeError("boom")))
        with pytest.raises(RuntimeError):
            export(ExportJob(str(inp), tiny_model_dir, str(out)), encoder)
        assert not out.exists()
