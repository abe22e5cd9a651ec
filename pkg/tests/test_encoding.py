from fractions import Fraction

import numpy as np
import pytest

from codedmm import (
    SchemeParams,
    ValidationError,
    encode_all,
    encode_share,
    exponent_plan,
    partition,
    plan_to_csv,
    points_integer,
    recovery_threshold,
)

from oracles import eval_bins, matmul_triple_loop, product_bins


def test_recovery_threshold_values():
    assert recovery_threshold(2, 2, 1) == 4
    assert recovery_threshold(2, 2, 2) == 9
    for m in range(1, 4):
        for n in range(1, 4):
            for p in range(1, 5):
                assert recovery_threshold(m, n, p) == p * m * n + p - 1
    with pytest.raises(ValidationError):
        recovery_threshold(0, 1, 1)


def test_scheme_params_validation():
    with pytest.raises(ValidationError, match="divide"):
        SchemeParams(2, 2, 4, 3, s=100, L=50)
    with pytest.raises(ValidationError, match="2L"):
        SchemeParams(2, 2, 2, 1, s=10, L=6)
    with pytest.warns(UserWarning):
        SchemeParams(2, 2, 2, 1, s=10, L=6, unsafe_s=True)
    params = SchemeParams(2, 2, 4, 2, s=8, L=4)
    assert params.tau == 9
    assert params.s_span == 2


def test_plan_split_example():
    # m=n=2, p=4, p'=2: A-block rows are folded two at a time, giving
    # z-degrees 0,0,1,1 for column 0 and 2,2,3,3 for column 1; B mirrors
    # with reversed group order (degrees 1,1,0,0 then 5,5,4,4).
    plan = exponent_plan(SchemeParams(2, 2, 4, 2, s=8, L=4))
    assert plan.a_exponents[(2, 0)] == (1, 0)
    assert plan.a_exponents[(3, 0)] == (1, 1)
    assert plan.a_exponents[(0, 1)] == (2, 0)
    assert plan.a_exponents[(1, 1)] == (2, 1)
    assert [plan.a_exponents[(a, 0)][0] for a in range(4)] == [0, 0, 1, 1]
    assert [plan.b_exponents[(b, 0)][0] for b in range(4)] == [1, 1, 0, 0]
    assert [plan.b_exponents[(b, 1)][0] for b in range(4)] == [5, 5, 4, 4]
    assert plan.useful_index == {(0, 0): 1, (1, 0): 3, (0, 1): 5, (1, 1): 7}
    # threshold 9 means nine stacked coefficients, z^0 .. z^8
    assert plan.total_z_degree == 8


def test_plan_no_split_useful_degrees():
    plan = exponent_plan(SchemeParams(2, 2, 2, 1, s=8, L=4))
    assert sorted(plan.useful_index.values()) == [0, 1, 2, 3]
    assert plan.useful_index == {(0, 0): 0, (1, 0): 1, (0, 1): 2, (1, 1): 3}


def test_plan_degenerate():
    params = SchemeParams(1, 1, 1, 1, s=2, L=1)
    plan = exponent_plan(params)
    assert plan.a_exponents == {(0, 0): (0, 0)}
    assert plan.useful_index == {(0, 0): 0}
    assert params.tau == 1


def test_plan_separation_exhaustive():
    # For every desk-scale (m, n, p, p') the pairs meeting at s-degree 0
    # on a useful z-degree are exactly the same-block-row pairs of that
    # output block.
    for m in range(1, 4):
        for n in range(1, 4):
            for p in range(1, 7):
                for pp in range(1, p + 1):
                    if p % pp:
                        continue
                    plan = exponent_plan(SchemeParams(m, n, p, pp, s=2, L=1))
                    degree_of = {deg: iu for iu, deg in plan.useful_index.items()}
                    for (a, i), (za, sa) in plan.a_exponents.items():
                        for (b, u), (zb, sb) in plan.b_exponents.items():
                            if sa + sb != 0:
                                continue
                            hit = degree_of.get(za + zb)
                            assert (hit == (i, u)) == (a == b)
                            if a != b:
                                assert hit is None


def test_encode_share_scalar_example():
    plan = exponent_plan(SchemeParams(2, 2, 2, 1, s=8, L=4))
    A = np.array([[1, 2], [3, 4]])
    share = encode_share(partition(A, 2, 2), plan, "A", s=8, z=2.0, scalar="float")
    assert share.shape == (1, 1)
    assert share[0, 0] == (1 + 3 * 8) + (2 + 4 * 8) * 2


def test_encode_share_zero_matrix():
    plan = exponent_plan(SchemeParams(2, 2, 2, 1, s=8, L=4))
    Z = partition(np.zeros((4, 4), dtype=np.int64), 2, 2)
    assert not np.any(encode_share(Z, plan, "A", 8, 3))
    assert not np.any(encode_share(Z, plan, "B", 8, 0.5, scalar="float"))


def test_encode_share_z_zero_keeps_degree_zero_terms():
    # At z=0 with p'=1 only z^0 survives: the share is sum_k A_k0 s^k.
    params = SchemeParams(3, 1, 3, 1, s=16, L=8)
    plan = exponent_plan(params)
    rng = np.random.default_rng(0)
    A = rng.integers(-5, 6, size=(6, 3))
    share = encode_share(partition(A, 3, 3), plan, "A", s=16, z=0, scalar="exact")
    part = partition(A, 3, 3)
    want = sum(part.block(k, 0).astype(object) * 16**k for k in range(3))
    assert np.array_equal(share, want)


def test_encode_share_bilinear():
    params = SchemeParams(2, 2, 4, 2, s=64, L=32)
    plan = exponent_plan(params)
    rng = np.random.default_rng(1)
    for z, scalar in ((0.75, "float"), (3, "exact"), (Fraction(2, 3), "exact")):
        A1 = rng.integers(-9, 10, size=(8, 4))
        A2 = rng.integers(-9, 10, size=(8, 4))
        one = encode_share(partition(A1, 4, 2), plan, "A", 64, z, scalar)
        two = encode_share(partition(A2, 4, 2), plan, "A", 64, z, scalar)
        both = encode_share(partition(A1 + A2, 4, 2), plan, "A", 64, z, scalar)
        if scalar == "exact":
            assert np.array_equal(both, one + two)
        else:
            assert np.allclose(both.astype(float), (one + two).astype(float))


def test_encode_share_grid_mismatch():
    plan = exponent_plan(SchemeParams(2, 2, 2, 1, s=8, L=4))
    part = partition(np.zeros((6, 6)), 3, 2)
    with pytest.raises(ValidationError):
        encode_share(part, plan, "A", 8, 1.0)


@pytest.mark.parametrize("m,n,p,pp", [(2, 2, 2, 1), (2, 2, 4, 2), (2, 2, 4, 4),
                                      (3, 2, 2, 1), (1, 1, 2, 1)])
def test_product_matches_sextuple_sum(m, n, p, pp):
    # Expanding share_A^T share_B by the defining sextuple sum, binned on
    # (z_exp, s_exp), must agree with the evaluated encoding polynomials
    # at arbitrary exact points.
    rng = np.random.default_rng(m * 100 + n * 10 + p + pp)
    params = SchemeParams(m, n, p, pp, s=97, L=48)
    plan = exponent_plan(params)
    for _ in range(3):
        A = rng.integers(-4, 5, size=(2 * p, m))
        B = rng.integers(-4, 5, size=(2 * p, n))
        bins = product_bins(A, B, m, n, p, pp)
        assert max(z for z, _ in bins) == plan.total_z_degree
        for z in (2, Fraction(3, 5), -7):
            sa = encode_share(partition(A, p, m), plan, "A", 97, z, "exact")
            sb = encode_share(partition(B, p, n), plan, "B", 97, z, "exact")
            direct = sa.T @ sb
            via_bins = eval_bins(bins, 97, z)
            assert np.array_equal(direct, via_bins)


def test_no_split_useful_coefficient_is_block_product():
    # With p'=1 the s^0 digit of the z^(m*u+i) bin is exactly C_iu.
    rng = np.random.default_rng(7)
    m, n, p = 2, 3, 2
    A = rng.integers(-6, 7, size=(4, m * 2))
    B = rng.integers(-6, 7, size=(4, n * 2))
    C = matmul_triple_loop(A, B)
    bins = product_bins(A, B, m, n, p, 1)
    for i in range(m):
        for u in range(n):
            blk = bins[(m * u + i, 0)]
            want = C[i * 2:(i + 1) * 2, u * 2:(u + 1) * 2]
            assert np.array_equal(blk, want)


def test_encode_all_counts_and_errors():
    rng = np.random.default_rng(3)
    A = rng.integers(0, 6, size=(4, 4))
    B = rng.integers(0, 6, size=(4, 4))
    params = SchemeParams(2, 2, 2, 1, s=256, L=121)
    pairs = encode_all(A, B, params, points_integer(10))
    assert len(pairs) == 10
    assert params.tau == 4
    assert all(sa.shape == (2, 2) and sb.shape == (2, 2) for sa, sb in pairs)
    with pytest.raises(ValidationError, match="tau=4"):
        encode_all(A, B, params, points_integer(3))
    with pytest.raises(ValidationError, match="duplicate"):
        encode_all(A, B, params, [1, 2, 3, 2, 5])


def test_encode_all_exact_shares_are_integral():
    rng = np.random.default_rng(4)
    A = rng.integers(-5, 6, size=(8, 4))
    B = rng.integers(-5, 6, size=(8, 4))
    params = SchemeParams(2, 2, 4, 2, s=2048, L=1000)
    for sa, sb in encode_all(A, B, params, points_integer(9), scalar="exact"):
        assert all(isinstance(e, int) for e in sa.flat)
        assert all(isinstance(e, int) for e in sb.flat)


def test_plan_csv_layout():
    plan = exponent_plan(SchemeParams(2, 2, 4, 2, s=8, L=4))
    lines = plan_to_csv(plan).splitlines()
    assert lines[0] == "side,block_row,block_col,z_exp,s_exp"
    assert "A,2,0,1,0" in lines
    assert "B,1,0,1,-1" in lines
    assert "C,1,1,7,0" in lines
    # 8 A-blocks + 8 B-blocks + 4 output blocks
    assert len(lines) == 1 + 8 + 8 + 4
