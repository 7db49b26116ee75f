import random
from math import comb, factorial

import pytest

from mnseries import (
    DysonInstance,
    Series,
    UsageError,
    dixon_sum,
    dyson_ct,
    dyson_product,
    dyson_rhs,
    h_complete,
    j_r_closed_form,
    j_r_determinant,
    jacobian_number,
    log_jacobian,
    multiply,
    u_r_build,
    vandermonde,
    wilson_v,
    zspec,
)
from mnseries.identities import u_r_initial_matrix, vandermonde_determinant


def test_vandermonde_small():
    assert vandermonde(1).terms == {(0,): 1}     # empty product
    v2 = vandermonde(2)
    assert v2.terms == {(1, 0): 1, (0, 1): -1}
    v3 = vandermonde(3)
    assert len(v3.terms) == 6
    # (z1-z2)(z1-z3)(z2-z3) expanded by hand
    assert v3.terms == {
        (2, 1, 0): 1, (2, 0, 1): -1, (1, 2, 0): -1,
        (0, 2, 1): 1, (1, 0, 2): 1, (0, 1, 2): -1,
    }


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_vandermonde_equals_determinant_form(n):
    assert vandermonde(n).equals_on(vandermonde_determinant(n))


def test_h_complete():
    spec = zspec(2)
    assert h_complete(2, 0, spec).terms == {(0, 0): 1}
    assert h_complete(2, 2, spec).terms == {(2, 0): 1, (1, 1): 1, (0, 2): 1}
    assert h_complete(2, -1, spec).is_zero()


# ----------------------------------------------------------------------
# Dyson / Dixon

def test_dyson_small_examples():
    assert dyson_ct(DysonInstance(3, (1, 1, 1))) == 6
    assert dyson_ct(DysonInstance(3, (0, 0, 0))) == 1
    assert dyson_ct(DysonInstance(2, (0, 0))) == 1


def test_dyson_n2_product_by_hand():
    inst = DysonInstance(2, (1, 1))
    product = dyson_product(inst)
    assert product.terms == {(0, 0): 2, (1, -1): -1, (-1, 1): -1}
    assert dyson_ct(inst) == 2


def test_dyson_rhs():
    assert dyson_rhs(DysonInstance(3, (1, 1, 1))) == 6
    assert dyson_rhs(DysonInstance(3, (2, 1, 1))) == 12
    assert dyson_rhs(DysonInstance(4, (3, 2, 1, 0))) == factorial(6) // (6 * 2)


def test_dyson_validation():
    with pytest.raises(UsageError):
        DysonInstance(3, (1, 1))
    with pytest.raises(UsageError):
        DysonInstance(2, (-1, 1))


def test_dixon_examples():
    assert dixon_sum(1, 1, 1) == 6
    assert dixon_sum(0, 0, 0) == 1
    assert dixon_sum(2, 1, 1) == 12


def test_dixon_equals_dyson_sample():
    for a, b, c in ((0, 1, 2), (2, 2, 2), (3, 1, 0)):
        assert dixon_sum(a, b, c) == dyson_ct(DysonInstance(3, (a, b, c)))


def test_generalized_dyson_small():
    for a in ((0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 1, 1)):
        inst = DysonInstance(3, a, generalized=True)
        assert dyson_ct(inst) == dyson_rhs(inst)


# ----------------------------------------------------------------------
# the u^(r) family

def test_u_r_sums():
    spec = zspec(3)
    assert u_r_build(3, 1).sum().is_zero()
    assert u_r_build(3, 0).sum().is_zero()
    assert u_r_build(3, 2).sum().equals_on(vandermonde(3, spec))
    z_sum = Series(spec, {(1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1})
    assert u_r_build(3, 3).sum().equals_on(
        multiply(z_sum, vandermonde(3, spec))
    )


def test_u_r_initial_exponents_match_matrix():
    for n, r in ((3, 2), (3, 3), (4, 3)):
        family = u_r_build(n, r)
        matrix = u_r_initial_matrix(n, r)
        for j, series in enumerate(family.u):
            leading, xpart, _ = series.x_initial_term(list(series.spec.variables))
            assert xpart == matrix[j]


def test_u_r_jacobian_number_equals_closed_form():
    for n, r in ((3, 2), (3, 3), (3, 4), (4, 3)):
        family = u_r_build(n, r)
        names = list(family.u[0].spec.variables)
        assert jacobian_number(list(family.u), names) == j_r_closed_form(n, r)


def test_j_r_closed_form_values():
    assert j_r_closed_form(3, 2) == 6            # (n-1) n!/2 at n=3
    assert j_r_closed_form(3, 1) == 0
    assert j_r_closed_form(4, 3) == 36           # not the erratum value 30
    assert j_r_closed_form(4, 3) != 30
    for n in (3, 4, 5):
        assert j_r_closed_form(n, n - 1) == (n - 1) * factorial(n) // 2


def test_j_r_matches_determinant():
    for n in (3, 4, 5):
        for r in range(-6, 7):
            assert j_r_closed_form(n, r) == j_r_determinant(n, r), (n, r)


def test_j_r_zero_set():
    for n in (3, 4, 5):
        zeros = {r for r in range(-12, 12) if j_r_closed_form(n, r) == 0}
        assert zeros == set(range(0, n - 1)) | {-comb(n - 1, 2)}


# ----------------------------------------------------------------------
# Wilson's v_j

def test_wilson_sum_is_one_n2():
    spec = zspec(2)
    total = wilson_v(2, 1, spec) + wilson_v(2, 2, spec)
    assert total.equals_on(1)


def test_wilson_initial_term():
    v1 = wilson_v(3, 1)
    exponent, value = v1.initial_term()
    assert exponent == (-2, 1, 1)   # z1^-(n-1+... ) z2 z3 for j=1, n=3


def test_wilson_lj_identity_n3():
    from mnseries import cube

    spec = zspec(3)
    vs = [wilson_v(3, j, spec) for j in (1, 2, 3)]
    lj = log_jacobian(vs[:2], ["z1", "z2"])
    # opposing geometric tails meet at the box corners, so compare on an
    # interior region well away from the truncation boundary
    assert lj.equals_on(vs[2].scale(2), box=cube(3, 10))


def test_general_substitution_theorem_small_scale():
    # substituting the u^(r) family into a Laurent polynomial preserves the
    # constant term (r avoiding the zeros of j(r)); since a Laurent
    # polynomial's expansion is field independent, the right side is just its
    # own constant coefficient
    from mnseries import cube

    rng = random.Random(29)
    spec = zspec(3)
    box = cube(3, 24)
    for r in (3, 4):
        family = u_r_build(3, r)
        u = [Series(s.spec, s.terms, box=box) for s in family.u]
        for _ in range(4):
            phi_terms = {}
            for _ in range(3):
                e = tuple(rng.randint(-1, 2) for _ in range(3))
                phi_terms.setdefault(e, rng.randint(-3, 3))
            substituted = Series.zero(spec, box=box)
            for e, c in phi_terms.items():
                if c == 0:
                    continue
                term = Series.constant(spec, c, box=box)
                for j in range(3):
                    term = multiply(term, u[j] ** e[j])
                substituted = substituted + term
            want = phi_terms.get((0, 0, 0), 0)
            assert substituted.coefficient((0, 0, 0)) == want, (r, phi_terms)


def test_wilson_dyson_form():
    # CT_z prod v_j^(-a_j) equals the multinomial; v_j^-1 is the exact
    # Laurent polynomial prod_{i != j} (1 - z_j/z_i)
    spec = zspec(3)
    for a in ((1, 1, 1), (2, 1, 0), (1, 0, 2)):
        product = Series.constant(spec, 1)
        for j in (1, 2, 3):
            inv_vj = Series.constant(spec, 1)
            for i in (1, 2, 3):
                if i == j:
                    continue
                ratio = tuple(
                    (1 if c == j - 1 else 0) - (1 if c == i - 1 else 0)
                    for c in range(3)
                )
                inv_vj = multiply(inv_vj, Series(spec, {(0, 0, 0): 1, ratio: -1}))
            product = multiply(product, inv_vj ** a[j - 1])
        want = factorial(sum(a)) // (factorial(a[0]) * factorial(a[1]) * factorial(a[2]))
        assert product.ct_scalar() == want
