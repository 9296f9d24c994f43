import pytest
from hypothesis import given
from hypothesis import strategies as st

from slicecalc.mackey import GroupContext
from slicecalc.reps import (
    RealRep,
    RepParseError,
    jo_reduce,
    parse_rep,
    rep_identities_check,
    rho,
    rho_bar,
    special_coeffs_bounds_ok,
    special_coeffs_rep,
    special_form,
    v_coeffs_special,
    v_floor,
    v_recursive,
    vp,
)

GROUPS = [(p, n) for p in (3, 5) for n in (1, 2, 3)]

# V_j for C_27 as (triv, mult of lambda_0, lambda_1, lambda_2), j = 1..27
TABLE_C27 = {
    1: (0, 1, 0, 0), 2: (0, 1, 1, 0), 3: (0, 2, 1, 0),
    4: (0, 3, 1, 0), 5: (0, 3, 1, 1), 6: (0, 4, 1, 1),
    7: (0, 5, 1, 1), 8: (0, 5, 2, 1), 9: (0, 6, 2, 1),
    10: (0, 7, 2, 1), 11: (0, 7, 3, 1), 12: (0, 8, 3, 1),
    13: (0, 9, 3, 1), 14: (2, 9, 3, 1), 15: (2, 10, 3, 1),
    16: (2, 11, 3, 1), 17: (2, 11, 4, 1), 18: (2, 12, 4, 1),
    19: (2, 13, 4, 1), 20: (2, 13, 5, 1), 21: (2, 14, 5, 1),
    22: (2, 15, 5, 1), 23: (2, 15, 5, 2), 24: (2, 16, 5, 2),
    25: (2, 17, 5, 2), 26: (2, 17, 6, 2), 27: (2, 18, 6, 2),
}  # fmt: skip
TAGS_C27 = {13: "ρ-1", 14: "ρ+1", 15: "ρ+λ+1", 25: "2ρ-λ-λ1", 26: "2ρ-λ", 27: "2ρ"}


@pytest.fixture
def c27():
    return GroupContext(3, 3)


def as_tuple(V):
    return (V.triv, *V.mult)


# -- the V_j table -------------------------------------------------------------


@pytest.mark.parametrize("j", sorted(TABLE_C27))
def test_table_c27_rows(c27, j):
    assert as_tuple(v_recursive(j, c27)) == TABLE_C27[j]
    assert as_tuple(v_floor(j, c27)) == TABLE_C27[j]


def test_table_c27_tags(c27):
    for j in range(1, 28):
        assert special_form(j, c27) == TAGS_C27.get(j)


def test_pretty_form(c27):
    assert v_recursive(5, c27).pretty() == "3λ+λ1+λ2"
    assert v_recursive(14, c27).pretty() == "9λ+3λ1+λ2+2"
    assert RealRep.zero(c27).pretty() == "0"


@pytest.mark.parametrize("p,n", GROUPS)
def test_recursive_equals_floor(p, n):
    ctx = GroupContext(p, n)
    for j in range(3 * p**n + 1):
        V = v_recursive(j, ctx)
        assert V == v_floor(j, ctx)
        assert V.dim == 2 * j


def test_v_zero(c27):
    assert v_floor(0, c27) == RealRep.zero(c27)


def test_floor_formula_lambda0_coefficient_p3():
    ctx = GroupContext(3, 1)
    for j in range(40):
        assert v_floor(j, ctx).mult[0] == (j + 2) // 3 + j // 3


# -- JO reduction and rho --------------------------------------------------------


def test_jo_reduce(c27):
    assert jo_reduce(6, c27) == RealRep.lam(1, c27)
    assert jo_reduce(27, c27) == RealRep.trivial(2, c27)
    assert jo_reduce(0, c27) == RealRep.trivial(2, c27)
    assert jo_reduce(1, c27) == RealRep.lam(0, c27)
    assert jo_reduce(-9, c27) == RealRep.lam(2, c27)


def test_rho_small_and_c27(c27):
    c3 = GroupContext(3, 1)
    assert rho(c3) == RealRep(c3, 1, (1,))
    assert as_tuple(2 * rho(c27)) == (2, 18, 6, 2)


@pytest.mark.parametrize("p,n", GROUPS)
def test_rho_dimensions(p, n):
    ctx = GroupContext(p, n)
    assert rho(ctx).dim == p**n
    assert rho_bar(ctx).dim == p**n - 1


@pytest.mark.parametrize("p,n", GROUPS)
def test_identities(p, n):
    assert rep_identities_check(GroupContext(p, n)) == []


def test_named_identities_c27(c27):
    assert v_recursive(13, c27) == rho(c27) - RealRep.trivial(1, c27)
    assert v_recursive(14, c27) == rho(c27) + RealRep.trivial(1, c27)
    assert v_recursive(26, c27) == 2 * rho(c27) - RealRep.lam(0, c27)


# -- special coefficients ------------------------------------------------------


@pytest.mark.parametrize("p,n", GROUPS)
def test_special_coefficients(p, n):
    ctx = GroupContext(p, n)
    c1 = (p - 1) // 2
    for a in range(1, 2 * p**n + 1, 2):
        coeffs = v_coeffs_special(a, ctx)
        assert coeffs[0] == c1 * a
        assert special_coeffs_rep(a, ctx) == v_floor((a * p - 1) // 2, ctx)
        assert special_coeffs_bounds_ok(a, ctx)


def test_special_coefficients_small_cases(c27):
    assert special_coeffs_rep(1, c27) == v_recursive(1, c27)
    assert special_coeffs_rep(9, c27) == v_floor(13, c27)
    with pytest.raises(ValueError):
        v_coeffs_special(4, c27)


# -- the RealRep value type --------------------------------------------------------


def test_parse_rep_grammar(c27):
    V = parse_rep("2t+3l0+1l1", c27)
    assert as_tuple(V) == (2, 3, 1, 0)
    assert V.grammar() == "2t+3l0+1l1"
    assert parse_rep("0", c27) == RealRep.zero(c27)
    assert parse_rep(" l2 + t ", c27) == RealRep(c27, 1, (0, 0, 1))


@pytest.mark.parametrize("text,pos", [("2t+x", 3), ("3l9", 2), ("", 0), ("2t++l0", 3)])
def test_parse_errors_carry_position(c27, text, pos):
    with pytest.raises(RepParseError) as e:
        parse_rep(text, c27)
    assert e.value.pos == pos


def test_subtraction_is_partial(c27):
    with pytest.raises(ValueError):
        RealRep.lam(0, c27) - RealRep.lam(1, c27)


reps_c27 = st.builds(
    lambda t, a, b, c: RealRep(GroupContext(3, 3), t, (a, b, c)),
    st.integers(0, 4), st.integers(0, 6), st.integers(0, 6), st.integers(0, 6),
)  # fmt: skip


@given(reps_c27)
def test_grammar_and_json_round_trip(V):
    assert parse_rep(V.grammar(), V.ctx) == V
    assert RealRep.from_json(V.to_json()) == V


@given(reps_c27)
def test_fixed_dimension_is_monotone(V):
    dims = [V.fixed_dim(m) for m in range(V.ctx.n + 1)]
    assert dims[0] == V.dim
    assert all(a >= b for a, b in zip(dims, dims[1:]))
    assert dims[-1] == V.triv


@given(st.sampled_from(GROUPS), st.integers(0, 80), st.data())
def test_restriction_of_V_j_is_V_j(group, j, data):
    p, n = group
    ctx = GroupContext(p, n)
    h = data.draw(st.integers(1, n))
    sub = GroupContext(p, h)
    assert v_recursive(j, ctx).restrict(h) == v_recursive(j, sub)


@given(st.integers(1, 10**6), st.sampled_from([3, 5, 7]))
def test_vp(r, p):
    v = vp(p, r)
    assert r % p**v == 0 and r % p ** (v + 1) != 0
