import pytest
from hypothesis import given, settings, strategies as st

from conftest import PAIR, SYMMETRIC, positive_matrices
from sadic_builder.bratteli import (
    BratteliDiagram,
    check_simple,
    default_order_images,
    diagram_from_matrices,
    divisibility_witness,
    grow_window,
    is_left_right_ordered,
    order_unit,
    path_counts,
    split_level,
    telescope,
    telescope_to_positive,
    verify_adapted,
    window_product,
)
from sadic_builder.errors import DiagramError, DimensionError
from sadic_builder.exact_linear import ExactMatrix, RationalMatrix, is_ers, mat_mul, mat_product
from sadic_builder.morphisms import Morphism


def test_root_must_be_single_vertex():
    with pytest.raises(DiagramError):
        BratteliDiagram((2, 2), (ExactMatrix([[1, 0], [0, 1]]),))


def test_zero_row_rejected():
    with pytest.raises(DiagramError, match="incoming"):
        diagram_from_matrices([PAIR, [[1, 1], [0, 0]]])


def test_zero_column_rejected():
    with pytest.raises(DiagramError, match="outgoing"):
        diagram_from_matrices([PAIR, [[1, 0], [1, 0]]])


def test_shape_mismatch_rejected():
    with pytest.raises(DiagramError):
        BratteliDiagram((1, 3), (ExactMatrix(PAIR),))


def test_repeat_cycle_must_close():
    with pytest.raises(DiagramError):
        diagram_from_matrices([PAIR], repeat=[[[1, 1]]])


def test_expand_repeats_cyclically(main1_diagram):
    expanded = main1_diagram.expand(4)
    assert expanded.depth == 4
    assert expanded.level_sizes == (1, 2, 2, 2, 2)
    assert expanded.incidences[3] == ExactMatrix(SYMMETRIC)
    assert main1_diagram.incidence(10) == ExactMatrix(SYMMETRIC)


def test_incidence_beyond_depth_without_repeat():
    with pytest.raises(DiagramError):
        diagram_from_matrices([PAIR]).incidence(1)


def test_order_must_match_incidences():
    d = diagram_from_matrices([PAIR, [[2, 1], [1, 1]]])
    good = [Morphism([[1], [1]], 1), Morphism(default_order_images(d.incidences[1]), 2)]
    assert d.with_order(good).is_ordered
    with pytest.raises(DiagramError):
        d.with_order([good[0], Morphism([[1, 2], [1, 2]], 2)])


def test_telescope_two_levels():
    d = diagram_from_matrices([PAIR, [[1, 1], [1, 2]]])
    t = telescope(d, [0, 2])
    assert t.incidences == (ExactMatrix([[2], [3]]),)


def test_telescope_all_cuts_is_identity():
    d = diagram_from_matrices([PAIR, [[1, 1], [1, 2]], [[2, 1], [1, 1]]])
    assert telescope(d, [0, 1, 2, 3]).incidences == d.incidences


def test_telescope_partial():
    a1 = [[1, 1], [1, 2]]
    a2 = [[2, 1], [1, 1], [1, 3]]
    d = diagram_from_matrices([PAIR, a1, a2])
    t = telescope(d, [0, 1, 3])
    assert t.incidences == (ExactMatrix(PAIR), mat_mul(ExactMatrix(a2), ExactMatrix(a1)))
    assert t.level_sizes == (1, 2, 3)


@pytest.mark.parametrize("cuts", [[1, 2], [0, 0, 1], [0, 2, 1], [0, 5]])
def test_telescope_bad_cuts(cuts):
    d = diagram_from_matrices([PAIR, [[1, 1], [1, 2]]])
    with pytest.raises(DiagramError):
        telescope(d, cuts)


def test_telescope_drops_order():
    d = diagram_from_matrices([PAIR, [[2, 1], [1, 1]]])
    ordered = d.with_order([Morphism([[1], [1]], 1), Morphism(default_order_images(d.incidences[1]), 2)])
    assert not telescope(ordered, [0, 2]).is_ordered


@st.composite
def diagrams(draw, max_depth=8):
    sizes = [1] + draw(st.lists(st.integers(1, 3), min_size=1, max_size=max_depth))
    matrices = []
    for rows, cols in zip(sizes[1:], sizes):
        table = draw(
            st.lists(st.lists(st.integers(1, 5), min_size=cols, max_size=cols), min_size=rows, max_size=rows)
        )
        matrices.append(table)
    return diagram_from_matrices(matrices)


@settings(max_examples=50)
@given(st.data())
def test_telescoping_preserves_products(data):
    d = data.draw(diagrams())
    inner = data.draw(st.sets(st.integers(1, d.depth - 1))) if d.depth > 1 else set()
    cuts = [0] + sorted(inner) + [d.depth]
    t = telescope(d, cuts)
    original = mat_product(list(reversed(d.incidences)))
    assert mat_product(list(reversed(t.incidences))) == original


def test_grow_window_stops_at_first_acceptable_product(main1_diagram):
    end, product = grow_window(main1_diagram, 1, lambda m: m.min_entry() > 5, 20)
    assert end == 3
    assert product == ExactMatrix([[10, 6], [6, 10]])


def test_grow_window_gives_up():
    d = diagram_from_matrices([PAIR, [[1, 0], [0, 1]]])
    with pytest.raises(DiagramError):
        grow_window(d, 1, lambda m: m.is_positive(), 10)


def test_telescope_to_positive():
    d = diagram_from_matrices([PAIR], repeat=[[[1, 1], [1, 0]]])
    t, cuts = telescope_to_positive(d, 3, 10)
    assert cuts == [0, 1, 3, 5]
    assert all(a.is_positive() for a in t.incidences)


def test_split_two_by_two():
    a = ExactMatrix([[7, 8], [9, 10]])
    split = split_level(a, 2)
    assert split.b == ExactMatrix([[6, 1, 8, 0], [8, 1, 10, 0]])
    assert split.c == ExactMatrix([[1, 0], [1, 0], [0, 1], [0, 1]])
    assert mat_mul(split.b, split.c) == a


def test_split_single_entry():
    split = split_level(ExactMatrix([[5]]), 2)
    assert split.q == ExactMatrix([[2]])
    assert split.r == ExactMatrix([[1]])
    assert split.b == ExactMatrix([[4, 1]])
    assert split.c == ExactMatrix([[1], [1]])


def test_split_by_one_has_zero_remainders():
    a = ExactMatrix([[3, 4], [5, 6]])
    split = split_level(a, 1)
    assert all(x == 0 for x in split.r.entries())
    assert all(split.b[k, 1] == 0 and split.b[k, 3] == 0 for k in range(2))
    assert mat_mul(split.b, split.c) == a


def test_split_rejects_bad_input():
    with pytest.raises(DiagramError):
        split_level(ExactMatrix([[0, 1]]), 2)
    with pytest.raises(DiagramError):
        split_level(ExactMatrix([[3]]), 0)


@settings(max_examples=200)
@given(st.data())
def test_split_identity(data):
    a = data.draw(positive_matrices(max_size=6, max_entry=10**6))
    d = data.draw(st.integers(1, min(a.min_entry(), 10**6)))
    split = split_level(a, d)
    assert mat_mul(split.b, split.c) == a
    assert all(0 <= x < d for x in split.r.entries())


def test_path_counts():
    d = diagram_from_matrices([PAIR, [[1, 1], [1, 2]]])
    assert path_counts(d, 0) == (1,)
    assert path_counts(d, 1) == (1, 1)
    assert path_counts(d, 2) == (2, 3)
    with pytest.raises(DiagramError):
        path_counts(d, 3)


def test_path_counts_constant_for_equal_row_sums():
    matrices = [PAIR, [[2, 3], [4, 1]], [[1, 4], [3, 2]]]
    d = diagram_from_matrices(matrices)
    assert all(is_ers(a).flag for a in d.incidences)
    assert path_counts(d, 3) == (25, 25)


def test_simple_when_all_positive():
    d = diagram_from_matrices([PAIR, [[1, 1], [1, 1]], [[2, 1], [1, 1]]])
    report = check_simple(d)
    assert report.flag
    assert report.window_length == 1


def test_not_simple_for_permutation_levels():
    d = diagram_from_matrices([PAIR], repeat=[[[1, 0], [0, 1]]])
    assert not check_simple(d, 6).flag


def test_simple_after_two_levels():
    d = diagram_from_matrices([PAIR], repeat=[[[1, 1], [1, 0]]])
    report = check_simple(d, 4)
    assert report.flag
    assert report.window == (1, 3)


@settings(max_examples=30)
@given(st.integers(1, 5), st.integers(0, 3))
def test_simplicity_monotone_in_depth(depth, extra):
    d = diagram_from_matrices([PAIR], repeat=[[[1, 1], [0, 1]], [[1, 0], [1, 1]]])
    if check_simple(d, depth).flag:
        assert check_simple(d, depth + extra).flag


def test_root_column_is_no_witness():
    d = diagram_from_matrices([PAIR, [[1, 0], [0, 1]]])
    assert not check_simple(d, 1).flag
    assert not check_simple(d, 2).flag
    assert check_simple(diagram_from_matrices([PAIR], repeat=[SYMMETRIC]), 2).window == (1, 2)


def test_adapted_with_identity_matrices():
    a = ExactMatrix([[2, 1], [1, 2]])
    report = verify_adapted([a] * 3, [RationalMatrix.identity(2)] * 4)
    assert report.adapted
    assert [level.smallest_m for level in report.levels] == [0, 1, 2]
    assert all(level.b == a for level in report.levels)


def test_adapted_with_scalar_matrices():
    a = ExactMatrix([[1, 1], [1, 1]])
    j = RationalMatrix.diagonal([2, 2])
    report = verify_adapted([a] * 3, [j] * 4)
    assert all(level.b_integral and level.b_positive for level in report.levels)
    assert all(level.b == a for level in report.levels)
    # A J^-1 has entries 1/2; A^2 J^-1 is integral.
    assert [level.smallest_m for level in report.levels] == [1, 2, None]
    assert not report.adapted
    assert "condition (1)" in report.first_failure()


def test_adapted_horizon_checks_lengths():
    a = ExactMatrix([[1, 1], [1, 1]])
    with pytest.raises(DimensionError):
        verify_adapted([a] * 3, [RationalMatrix.identity(2)] * 3)


def test_adapted_on_pipeline_output(main1_result):
    report = verify_adapted(main1_result.a_seq, main1_result.j_seq)
    assert report.adapted
    for level in report.levels:
        assert level.b.to_exact() == main1_result.diagram.incidences[level.level]
        assert level.smallest_m == level.level


def test_order_unit():
    a_seq = [ExactMatrix(PAIR), ExactMatrix([[1, 1], [1, 2]])]
    j_seq = [RationalMatrix.identity(1), RationalMatrix.identity(2), RationalMatrix.identity(2)]
    assert order_unit(a_seq, j_seq, 0) == (1, (1, 1))
    assert order_unit(a_seq, j_seq, 1) == (2, (2, 3))


def test_divisibility_witness():
    a_seq = [
        ExactMatrix(PAIR),
        ExactMatrix([[2, 2], [2, 4]]),
        ExactMatrix([[3, 3], [3, 6]]),
    ]
    assert divisibility_witness(a_seq, [1], 0, 2) == (2, (2, 3))
    assert divisibility_witness(a_seq, [1, 0], 1, 2) == (2, (1, 1))
    assert divisibility_witness(a_seq, [1, 0], 1, 3) == (3, (4, 6))
    assert divisibility_witness(a_seq, [5, 7], 1, 1) == (1, (5, 7))


def test_divisibility_witness_errors():
    a_seq = [ExactMatrix(PAIR), ExactMatrix([[1, 1], [1, 2]])]
    with pytest.raises(DiagramError):
        divisibility_witness(a_seq, [1], 0, 2)
    with pytest.raises(DiagramError):
        divisibility_witness(a_seq, [1, 0], 1, 3)


def test_default_order_is_left_right():
    images = default_order_images(ExactMatrix([[2, 1], [1, 1]]))
    assert images == [[1, 1, 2], [1, 2]]
    assert is_left_right_ordered(images)
    assert not is_left_right_ordered([[2, 1]])


def test_window_product_order():
    d = diagram_from_matrices([PAIR, [[1, 1], [1, 2]], [[2, 1], [1, 1]]])
    expected = mat_mul(d.incidences[2], d.incidences[1])
    assert window_product(d, 1, 3) == expected
