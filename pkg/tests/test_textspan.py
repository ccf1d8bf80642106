import pytest

from uot_errant.errors import NotFoundError, OutOfRangeError, OverlapError
from uot_errant.textspan import (
    Edit,
    EditSet,
    apply_edits,
    apply_edits_excluding,
    detokenize,
    tokenize,
)

from case_study import HYP, HYP_EDITS, SRC


def edits_of(triples):
    return EditSet(tuple(Edit(s, e, r) for s, e, r in triples))


class TestTokenize:
    def test_whitespace_split(self):
        assert tokenize("may suffer their entire life .") == (
            "may", "suffer", "their", "entire", "life", ".")

    def test_empty(self):
        assert tokenize("") == ()

    def test_runs_collapse(self):
        assert tokenize("a  b") == ("a", "b")

    def test_roundtrip(self):
        text = "a b c ."
        assert detokenize(tokenize(text)) == text


class TestApplyEdits:
    def test_case_study_hypothesis(self):
        out = apply_edits(tokenize(SRC), edits_of(HYP_EDITS))
        assert out == tokenize(HYP)

    def test_identity(self):
        src = tokenize("a b c")
        assert apply_edits(src, EditSet(())) == src

    def test_pure_insertion(self):
        assert apply_edits(("a", "b", "c"), edits_of([(1, 1, ("x",))])) == (
            "a", "x", "b", "c")

    def test_length_accounting(self):
        src = tokenize(SRC)
        edits = edits_of(HYP_EDITS)
        out = apply_edits(src, edits)
        delta = sum(len(e.replacement) - (e.end - e.start) for e in edits)
        assert len(out) == len(src) + delta

    def test_out_of_range(self):
        with pytest.raises(OutOfRangeError):
            apply_edits(("a",), edits_of([(0, 2, ("x",))]))


class TestApplyEditsExcluding:
    def test_singleton_removal(self):
        src = tokenize("a b c")
        e = Edit(0, 1, ("x",))
        assert apply_edits_excluding(src, EditSet.of(e), e) == src

    def test_case_study_omission(self):
        # dropping the verb fix leaves "are" and applies the other three
        edits = edits_of(HYP_EDITS)
        out = apply_edits_excluding(tokenize(SRC), edits, Edit(16, 17, ("is",)))
        expected = tokenize(SRC.replace(
            "suffer the pain in the entire life",
            "suffer pain throughout their life"))
        assert out == expected
        assert out[16] == "are"

    def test_each_omission_distinct(self):
        src = tokenize(SRC)
        edits = edits_of(HYP_EDITS)
        variants = {apply_edits_excluding(src, edits, e) for e in edits}
        assert len(variants) == len(edits)

    def test_not_found(self):
        edits = edits_of([(0, 1, ("x",))])
        with pytest.raises(NotFoundError):
            apply_edits_excluding(("a", "b"), edits, Edit(1, 2, ("y",)))


class TestInvariants:
    def test_overlap_rejected(self):
        with pytest.raises(OverlapError):
            edits_of([(0, 2, ("x",)), (1, 3, ("y",))])

    def test_double_insertion_rejected(self):
        with pytest.raises(OverlapError):
            edits_of([(1, 1, ("x",)), (1, 1, ("y",))])

    def test_noop_rejected(self):
        with pytest.raises(OverlapError):
            Edit(2, 2, ())

    def test_touching_spans_ok(self):
        es = edits_of([(0, 1, ("x",)), (1, 2, ("y",))])
        assert apply_edits(("a", "b", "c"), es) == ("x", "y", "c")

    def test_disjoint_union_composition(self):
        src = tokenize("a b c d e f g h")
        part_a = edits_of([(0, 1, ("x",))])
        part_b = edits_of([(4, 6, ("y",))])
        both = edits_of([(0, 1, ("x",)), (4, 6, ("y",))])
        assert apply_edits(src, both) == ("x", "b", "c", "d", "y", "g", "h")
        # same result as two passes (second span unshifted: first edit is 1:1)
        assert apply_edits(apply_edits(src, part_a), part_b) == \
            apply_edits(src, both)
