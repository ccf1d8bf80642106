"""Edit vectors, their masses, and the transport cost matrix.

An edit vector measures how much one edit moves the sentence embedding:
in `remove` mode it is Enc(fully edited) - Enc(all edits but this one);
in `add` mode it is Enc(just this edit) - Enc(source).
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import DimMismatchError, UotErrantError
from .textspan import (
    EditSet,
    TokenSeq,
    apply_edits,
    apply_edits_excluding,
    detokenize,
)

MASS_FLOOR = 1e-12  # keeps zero-impact edits representable in KL terms


class Vectorization(enum.Enum):
    REMOVE = "remove"
    ADD = "add"


class MassMode(enum.Enum):
    L2_NORM = "l2"
    UNIFORM = "uniform"


class CostMode(enum.Enum):
    EUCLIDEAN = "euclidean"
    COSINE = "cosine"


def intermediate_sentences(
    src: TokenSeq, edits: EditSet, mode: Vectorization
) -> list[str]:
    """Every sentence string edit_vectors() will ask the provider to embed."""
    out = [detokenize(apply_edits(src, edits))]
    if mode is Vectorization.REMOVE:
        for e in edits:
            out.append(detokenize(apply_edits_excluding(src, edits, e)))
    else:
        out.append(detokenize(src))
        for e in edits:
            out.append(detokenize(apply_edits(src, EditSet.of(e))))
    return out


def edit_vectors(
    src: TokenSeq, edits: EditSet, provider, mode: Vectorization
) -> list[np.ndarray]:
    """One difference vector per edit, in edit-set order."""
    if len(edits) == 0:
        return []
    vectors = []
    if mode is Vectorization.REMOVE:
        full = detokenize(apply_edits(src, edits))
        base = _embed(provider, full)
        for e in edits:
            variant = detokenize(apply_edits_excluding(src, edits, e))
            vectors.append(base - _embed(provider, variant))
    else:
        base = _embed(provider, detokenize(src))
        for e in edits:
            variant = detokenize(apply_edits(src, EditSet.of(e)))
            vectors.append(_embed(provider, variant) - base)
    return vectors


def _embed(provider, text: str) -> np.ndarray:
    try:
        return provider.embed(text)
    except UotErrantError:
        raise
    except Exception as exc:
        raise UotErrantError(f"embedding failed for {text!r}: {exc}") from exc


def masses(vectors: list[np.ndarray], mode: MassMode) -> np.ndarray:
    """Per-edit transport mass: L2 norm (floored) or uniform 1."""
    if mode is MassMode.UNIFORM:
        return np.ones(len(vectors))
    return np.array(
        [max(float(np.linalg.norm(v)), MASS_FLOOR) for v in vectors])


def cost_matrix(
    hyp_vecs: list[np.ndarray], ref_vecs: list[np.ndarray], mode: CostMode
) -> np.ndarray:
    """Pairwise transport costs, hypothesis rows by reference columns."""
    n, m = len(hyp_vecs), len(ref_vecs)
    dims = {v.shape for v in hyp_vecs} | {v.shape for v in ref_vecs}
    if len(dims) > 1:
        raise DimMismatchError(f"mixed vector dimensions: {sorted(dims)}")
    C = np.zeros((n, m))
    for i, v in enumerate(hyp_vecs):
        for j, u in enumerate(ref_vecs):
            if mode is CostMode.EUCLIDEAN:
                C[i, j] = float(np.linalg.norm(v - u))
            else:
                nv = float(np.linalg.norm(v))
                nu = float(np.linalg.norm(u))
                if nv < 1e-12 or nu < 1e-12:
                    cos = 0.0
                else:
                    cos = float(np.dot(v, u)) / (nv * nu)
                C[i, j] = 1.0 - cos
    return np.maximum(C, 0.0)
