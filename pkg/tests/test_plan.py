import pytest
from hypothesis import given
from hypothesis import strategies as st

from gett.layout import TensorView
from gett.plan import (
    ContractionError,
    ContractionSpec,
    ErrorCode,
    build_plan,
    derive_output_extents,
    free_dims,
    output_rank,
    validate,
)


def cview(extents):
    return TensorView.contiguous(extents)


def codes(errors):
    return {e.code for e in errors}


# a random-but-valid configuration: ranks, conts, extents, dims, perm
@st.composite
def valid_setup(draw):
    rank_a = draw(st.integers(0, 5))
    rank_b = draw(st.integers(0, 5))
    conts = draw(st.integers(0, min(rank_a, rank_b)))
    cont_a = draw(st.permutations(range(rank_a)))[:conts]
    cont_b = draw(st.permutations(range(rank_b)))[:conts]
    ext_a = [draw(st.integers(1, 5)) for _ in range(rank_a)]
    ext_b = [draw(st.integers(1, 5)) for _ in range(rank_b)]
    for da, db in zip(cont_a, cont_b):
        ext_b[db] = ext_a[da]
    rank_c = rank_a + rank_b - 2 * conts
    perm = tuple(draw(st.permutations(range(rank_c))))
    return ext_a, ext_b, ContractionSpec(conts, cont_a, cont_b, perm)


class TestBuildPlan:
    def test_matmul_shape(self):
        a, b = cview((2, 3)), cview((3, 4))
        spec = ContractionSpec(1, (1,), (0,), (0, 1))
        plan = build_plan(a, b, spec, (1, 2))
        assert plan.rank_c == 2
        assert plan.ext_c == (2, 4)
        assert plan.cont_table[0].extent == 3
        assert [f.owner for f in plan.free_table] == ["A", "B"]

    def test_dot_product_shape(self):
        a, b = cview((3,)), cview((3,))
        spec = ContractionSpec(1, (0,), (0,), ())
        plan = build_plan(a, b, spec, ())
        assert plan.rank_c == 0
        assert plan.size_free == 1
        assert plan.size_cont == 3

    def test_perm_swaps_output_dims(self):
        a, b = cview((2, 3)), cview((3, 4))
        spec = ContractionSpec(1, (1,), (0,), (1, 0))
        plan = build_plan(a, b, spec, (1, 4))
        assert plan.ext_c == (4, 2)
        assert [f.owner for f in plan.free_table] == ["B", "A"]

    def test_free_table_increments_come_from_sources(self):
        a = TensorView(2, (2, 3), (7, 2), 0, 100)
        b = TensorView(2, (3, 4), (5, -3), 50, 100)
        spec = ContractionSpec(1, (1,), (0,), (0, 1))
        plan = build_plan(a, b, spec, (1, 2))
        assert plan.free_table[0].src_increment == 7    # A dim 0
        assert plan.free_table[1].src_increment == -3   # B dim 1
        assert plan.free_table[0].out_increment == 1
        assert plan.cont_table[0].inc_a == 2
        assert plan.cont_table[0].inc_b == 5

    def test_invalid_raises_with_error_list(self):
        a, b = cview((2, 3)), cview((4, 4))
        spec = ContractionSpec(1, (1,), (0,), (0, 1))
        with pytest.raises(ContractionError) as exc:
            build_plan(a, b, spec, (1, 2))
        assert ErrorCode.ExtentMismatch in codes(exc.value.errors)

    @given(valid_setup())
    def test_rank_relation(self, setup):
        ext_a, ext_b, spec = setup
        a, b = cview(ext_a), cview(ext_b)
        plan = build_plan(a, b, spec, (1,) * output_rank(a.rank, b.rank, spec.conts))
        assert plan.rank_c + 2 * spec.conts == a.rank + b.rank
        assert len([f for f in plan.free_table if f.owner == "A"]) == a.rank - spec.conts
        assert len([f for f in plan.free_table if f.owner == "B"]) == b.rank - spec.conts

    @given(valid_setup())
    def test_round_trip_recovers_extents(self, setup):
        ext_a, ext_b, spec = setup
        a, b = cview(ext_a), cview(ext_b)
        plan = build_plan(a, b, spec, (1,) * output_rank(a.rank, b.rank, spec.conts))
        got_a = {}
        got_b = {}
        for k, pair in enumerate(plan.cont_table):
            got_a[spec.cont_a[k]] = pair.extent
            got_b[spec.cont_b[k]] = pair.extent
        fa = free_dims(a.rank, spec.cont_a)
        fb = free_dims(b.rank, spec.cont_b)
        for i, d in enumerate(fa):
            got_a[d] = plan.free_table[spec.perm[i]].extent
        for i, d in enumerate(fb):
            got_b[d] = plan.free_table[spec.perm[len(fa) + i]].extent
        assert [got_a[d] for d in range(a.rank)] == list(ext_a)
        assert [got_b[d] for d in range(b.rank)] == list(ext_b)

    @given(valid_setup(), st.data())
    def test_relabeled_perm_relabels_extents(self, setup, data):
        ext_a, ext_b, spec = setup
        a, b = cview(ext_a), cview(ext_b)
        rank_c = output_rank(a.rank, b.rank, spec.conts)
        sigma = tuple(data.draw(st.permutations(range(rank_c))))
        spec2 = ContractionSpec(
            spec.conts, spec.cont_a, spec.cont_b, tuple(sigma[p] for p in spec.perm)
        )
        ext1 = derive_output_extents(a, b, spec)
        ext2 = derive_output_extents(a, b, spec2)
        for p in range(rank_c):
            assert ext2[sigma[p]] == ext1[p]


class TestValidate:
    def ok_args(self):
        a, b = cview((2, 3)), cview((3, 4))
        spec = ContractionSpec(1, (1,), (0,), (0, 1))
        return a, b, spec, (1, 2)

    def test_valid_case_is_clean(self):
        a, b, spec, inc_c = self.ok_args()
        assert validate(a, b, spec, inc_c) == []
        c = cview((2, 4))
        assert validate(a, b, spec, inc_c, c) == []

    def test_extent_mismatch(self):
        a, b = cview((2, 3)), cview((4, 4))
        spec = ContractionSpec(1, (1,), (0,), (0, 1))
        errs = validate(a, b, spec, (1, 2))
        assert codes(errs) == {ErrorCode.ExtentMismatch}
        assert "pair 0" in str(errs[0])

    def test_perm_not_bijection(self):
        a, b, spec, inc_c = self.ok_args()
        bad = ContractionSpec(1, (1,), (0,), (0, 0))
        errs = validate(a, b, bad, inc_c)
        assert ErrorCode.PermNotBijection in codes(errs)

    def test_perm_length(self):
        a, b, _, inc_c = self.ok_args()
        errs = validate(a, b, ContractionSpec(1, (1,), (0,), (0,)), inc_c)
        assert ErrorCode.PermLengthWrong in codes(errs)

    def test_cont_index_out_of_range(self):
        a, b, _, inc_c = self.ok_args()
        errs = validate(a, b, ContractionSpec(1, (2,), (0,), (0, 1)), inc_c)
        assert ErrorCode.ContIndexOutOfRange in codes(errs)

    def test_cont_index_duplicate(self):
        a, b = cview((2, 3)), cview((3, 3))
        spec = ContractionSpec(2, (1, 1), (0, 1), ())
        errs = validate(a, b, spec, ())
        assert ErrorCode.ContIndexDuplicate in codes(errs)

    def test_inc_c_length(self):
        a, b, spec, _ = self.ok_args()
        errs = validate(a, b, spec, (1,))
        assert ErrorCode.IncCLengthWrong in codes(errs)

    def test_output_write_aliasing(self):
        a, b, spec, _ = self.ok_args()
        errs = validate(a, b, spec, (1, 0))
        assert ErrorCode.OutputWriteAliasing in codes(errs)

    def test_zero_inc_allowed_on_unit_output_dim(self):
        a, b = cview((1, 3)), cview((3, 4))
        spec = ContractionSpec(1, (1,), (0,), (0, 1))
        assert validate(a, b, spec, (0, 1)) == []

    def test_zero_inc_allowed_on_inputs(self):
        # broadcast-style read view
        a = TensorView(2, (2, 3), (0, 1), 0, 3)
        b = cview((3, 4))
        spec = ContractionSpec(1, (1,), (0,), (0, 1))
        assert validate(a, b, spec, (1, 2)) == []

    def test_negative_extent(self):
        a = TensorView(1, (-2,), (1,), 0, 4)
        errs = validate(a, cview((3,)), ContractionSpec(0, (), (), (0, 0)), (1, 1))
        assert ErrorCode.NegativeExtent in codes(errs)

    def test_footprint_out_of_bounds(self):
        a = TensorView(1, (5,), (1,), 0, 4)  # needs 5 elements, buffer has 4
        errs = validate(a, cview((5,)), ContractionSpec(1, (0,), (0,), ()), ())
        assert ErrorCode.FootprintOutOfBounds in codes(errs)
        assert "A" in str([e for e in errs if e.code == ErrorCode.FootprintOutOfBounds][0])

    def test_negative_increment_footprint(self):
        ok = TensorView(1, (3,), (-1,), 2, 3)
        assert validate(ok, cview((3,)), ContractionSpec(1, (0,), (0,), ()), ()) == []
        bad = TensorView(1, (3,), (-1,), 1, 3)  # would address offset -1
        errs = validate(bad, cview((3,)), ContractionSpec(1, (0,), (0,), ()), ())
        assert ErrorCode.FootprintOutOfBounds in codes(errs)

    def test_empty_view_skips_footprint(self):
        a = TensorView(1, (0,), (1,), 0, 1)
        b = cview((3,))
        spec = ContractionSpec(0, (), (), (0, 1))
        assert validate(a, b, spec, (1, 1)) == []

    def test_c_view_footprint(self):
        a, b, spec, inc_c = self.ok_args()
        small_c = TensorView(2, (2, 4), (1, 2), 0, 7)  # needs 8
        errs = validate(a, b, spec, inc_c, small_c)
        assert ErrorCode.FootprintOutOfBounds in codes(errs)

    def test_collects_multiple_errors(self):
        a, b = cview((2, 3)), cview((4, 4))
        spec = ContractionSpec(1, (1,), (0,), (0, 0))
        errs = validate(a, b, spec, (1,))
        assert {ErrorCode.ExtentMismatch, ErrorCode.PermNotBijection,
                ErrorCode.IncCLengthWrong} <= codes(errs)


class TestContractionSpec:
    def test_structural_check(self):
        with pytest.raises(ValueError):
            ContractionSpec(2, (0,), (0, 1), ())
        with pytest.raises(ValueError):
            ContractionSpec(-1, (), (), ())
