"""Batch embedding export to the editvec interchange format.

The output is JSON Lines: a header
``{"format": "editvec-emb/v1", "dim": D, "encoder": name, "pooling": mode}``
followed by one ``{"text": ..., "v": [...]}`` record per unique input line.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

INTERCHANGE_FORMAT = "editvec-emb/v1"
POOLINGS = ("mean", "cls")


@dataclass
class ExportJob:
    input_path: str
    model_name: str
    output_path: str
    pooling: str = "mean"
    batch_size: int = 32
    device: str = "cpu"

    def __post_init__(self):
        if self.pooling not in POOLINGS:
            raise ValueError(f"pooling must be one of {POOLINGS}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


class Encoder:
    """A transformer model plus tokenizer with mean or cls pooling."""

    def __init__(self, model_name: str, pooling: str = "mean",
                 device: str = "cpu"):
        if pooling not in POOLINGS:
            raise ValueError(f"pooling must be one of {POOLINGS}")
        self.pooling = pooling
        self.device = torch.device(device)
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModel.from_pretrained(model_name)
        self.model.to(self.device)
        self.model.eval()
        self.dim = int(self.model.config.hidden_size)
        self.name = model_name

    @torch.no_grad()
    def encode(self, texts: list[str]) -> np.ndarray:
        """Embed a batch; rows follow input order. Shape (len(texts), dim)."""
        if not texts:
            return np.zeros((0, self.dim))
        enc = self.tokenizer(texts, padding=True, truncation=True,
                             return_tensors="pt").to(self.device)
        hidden = self.model(**enc).last_hidden_state
        if self.pooling == "cls":
            pooled = hidden[:, 0, :]
        else:
            mask = enc["attention_mask"].unsqueeze(-1).to(hidden.dtype)
            denom = mask.sum(dim=1).clamp(min=1.0)
            pooled = (hidden * mask).sum(dim=1) / denom
        return pooled.cpu().to(torch.float64).numpy()


def _read_unique_lines(path: str) -> list[str]:
    seen: dict[str, None] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            seen.setdefault(line.rstrip("\n"))
    return list(seen)


def export(job: ExportJob, encoder: Encoder | None = None) -> int:
    """Write the interchange file; returns the number of records.

    The output file is removed if anything fails midway, so a partial
    export never masquerades as a complete one.
    """
    if encoder is None:
        encoder = Encoder(job.model_name, job.pooling, job.device)
    texts = _read_unique_lines(job.input_path)
    try:
        with open(job.output_path, "w", encoding="utf-8", newline="\n") as fh:
            header = {
                "format": INTERCHANGE_FORMAT,
                "dim": encoder.dim,
                "encoder": encoder.name,
                "pooling": encoder.pooling,
            }
            fh.write(json.dumps(header, ensure_ascii=False) + "\n")
            for start in range(0, len(texts), job.batch_size):
                batch = texts[start:start + job.batch_size]
                vectors = encoder.encode(batch)
                for text, vec in zip(batch, vectors):
                    record = {"text": text, "v": [float(x) for x in vec]}
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    except BaseException:
        try:
            os.unlink(job.output_path)
        except OSError:
            pass
        raise
    return len(texts)
