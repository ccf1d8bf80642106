import itertools
import math

import numpy as np
import pytest

from uot_errant.editvec import (
    MASS_FLOOR,
    CostMode,
    MassMode,
    Vectorization,
    cost_matrix,
    edit_vectors,
    intermediate_sentences,
    masses,
)
from uot_errant.embedder import HashEmbedder
from uot_errant.errors import DimMismatchError
from uot_errant.textspan import Edit, EditSet, tokenize


@pytest.fixture
def emb():
    return HashEmbedder()


class TestEditVectors:
    def test_empty_set(self, emb):
        src = tokenize("a b c")
        assert edit_vectors(src, EditSet(()), emb, Vectorization.REMOVE) == []

    def test_singleton_remove_equals_add(self, emb):
        src = tokenize("a b c d e f")
        es = EditSet.of(Edit(2, 3, ("x",)))
        rem = edit_vectors(src, es, emb, Vectorization.REMOVE)
        add = edit_vectors(src, es, emb, Vectorization.ADD)
        assert np.array_equal(rem[0], add[0])

    def test_modes_differ_with_context(self, emb):
        # with a second edit present, remove-mode vectors see it, add-mode don't
        src = tokenize("the dog takes a walk in a park every day .")
        es = EditSet.of(Edit(2, 3, ("took",)), Edit(6, 7, ("the",)))
        rem = edit_vectors(src, es, emb, Vectorization.REMOVE)
        add = edit_vectors(src, es, emb, Vectorization.ADD)
        assert not np.array_equal(rem[0], add[0])

    def test_difference_definition(self, emb):
        src = tokenize("a b c d")
        e1, e2 = Edit(0, 1, ("x",)), Edit(2, 3, ("y",))
        es = EditSet.of(e1, e2)
        rem = edit_vectors(src, es, emb, Vectorization.REMOVE)
        full = emb.embed("x b y d")
        assert np.allclose(rem[0], full - emb.embed("a b y d"))
        assert np.allclose(rem[1], full - emb.embed("x b c d"))

    def test_permutation_invariance(self, emb):
        src = tokenize("a b c d e f")
        e1, e2, e3 = Edit(0, 1, ("x",)), Edit(2, 3, ("y",)), Edit(4, 5, ("z",))
        base = edit_vectors(src, EditSet.of(e1, e2, e3), emb,
                            Vectorization.REMOVE)
        for perm in itertools.permutations([e1, e2, e3]):
            again = edit_vectors(src, EditSet.of(*perm), emb,
                                 Vectorization.REMOVE)
            # EditSet sorts by span, so order is canonical regardless of input
            for u, v in zip(base, again):
                assert np.array_equal(u, v)

    def test_intermediates_cover_embed_calls(self, emb):
        src = tokenize("a b c d")
        es = EditSet.of(Edit(0, 1, ("x",)), Edit(2, 3, ("y",)))
        for mode in Vectorization:
            wanted = set(intermediate_sentences(src, es, mode))
            seen = set()
            original = emb.embed

            def spy(text):
                seen.add(text)
                return original(text)

            emb.embed = spy
            try:
                edit_vectors(src, es, emb, mode)
            finally:
                emb.embed = original
            assert seen <= wanted


class TestMasses:
    def test_zero_vector_floored(self):
        assert masses([np.zeros(4)], MassMode.L2_NORM)[0] == MASS_FLOOR

    def test_uniform(self):
        assert list(masses([np.zeros(2)] * 3, MassMode.UNIFORM)) == [1, 1, 1]

    def test_unit_vector(self):
        vec = np.array([0.0, 1.0, 0.0])
        assert masses([vec], MassMode.L2_NORM)[0] == 1.0


class TestCostMatrix:
    def test_identical_vectors_zero(self):
        v = np.array([0.3, -0.4])
        for mode in CostMode:
            assert cost_matrix([v], [v], mode)[0, 0] == pytest.approx(0.0)

    def test_orthogonal_unit_vectors(self):
        v = np.array([1.0, 0.0])
        u = np.array([0.0, 1.0])
        assert cost_matrix([v], [u], CostMode.EUCLIDEAN)[0, 0] == \
            pytest.approx(math.sqrt(2))
        assert cost_matrix([v], [u], CostMode.COSINE)[0, 0] == pytest.approx(1.0)

    def test_scaled_vector_keeps_length_info(self):
        v = np.array([0.6, 0.8])
        assert cost_matrix([v], [2 * v], CostMode.EUCLIDEAN)[0, 0] == \
            pytest.approx(1.0)  # == ||v||
        assert cost_matrix([v], [2 * v], CostMode.COSINE)[0, 0] == \
            pytest.approx(0.0)

    def test_zero_norm_cosine_convention(self):
        z = np.zeros(2)
        v = np.array([1.0, 0.0])
        assert cost_matrix([z], [v], CostMode.COSINE)[0, 0] == 1.0

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatchError):
            cost_matrix([np.zeros(2)], [np.zeros(3)], CostMode.EUCLIDEAN)

    def test_triangle_inequality_euclidean(self):
        rng = np.random.default_rng(7)
        vecs = [rng.normal(size=8) for _ in range(6)]
        C = cost_matrix(vecs, vecs, CostMode.EUCLIDEAN)
        n = len(vecs)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    assert C[i, j] <= C[i, k] + C[k, j] + 1e-12
