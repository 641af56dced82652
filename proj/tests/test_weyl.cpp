#include "starprod/linalg.hpp"
#include "starprod/ordering.hpp"
#include "starprod/symplectic.hpp"
#include "starprod/weyl.hpp"
#include "support/random_gen.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace starprod;
using sptest::Rng;

namespace {

GaussRational half_minus_i() { return GaussRational(BigRational(0), BigRational(-1, 2)); }

WeylElem<ChartPoly> xi_var(int dim, int axis, unsigned budget) {
    WeylElem<ChartPoly> e(dim, budget);
    e.add_term(WeylKey{MultiIndex::unit(axis), 0}, ChartPoly(dim, GaussRational(1)));
    return e;
}

}  // namespace

TEST_CASE("exact matrix inverse") {
    Mat m = {{GaussRational(2), GaussRational(1)}, {GaussRational(1), GaussRational(1)}};
    Mat inv = mat_inverse(m);
    CHECK(mat_mul(m, inv) == identity_mat(2));
    CHECK(mat_mul(inv, m) == identity_mat(2));
    Mat sing = {{GaussRational(1), GaussRational(2)}, {GaussRational(2), GaussRational(4)}};
    CHECK_THROWS_AS(mat_inverse(sing), std::domain_error);
}

TEST_CASE("darboux chart fixes the sign conventions") {
    auto chart = SymplecticChart::darboux(2);
    ChartPoly q = ChartPoly::variable(2, 0);
    ChartPoly p = ChartPoly::variable(2, 1);

    CHECK(chart.poisson_bracket(q, p) == ChartPoly(2, GaussRational(1)));
    CHECK(chart.poisson_bracket(p, q) == ChartPoly(2, GaussRational(-1)));
    CHECK(chart.poisson_bracket(q, q).is_zero());

    // X_H for H = p^2/2 pushes q forward with velocity p
    ChartPoly H = GaussRational(1, 2) * (p * p);
    auto X = chart.hamiltonian_field(H);
    CHECK(X[0] == p);
    CHECK(X[1].is_zero());

    // the form evaluated on two hamiltonian fields reproduces the bracket
    Rng rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        ChartPoly f = rng.poly(2, 3, 3, false);
        ChartPoly g = rng.poly(2, 3, 3, false);
        CHECK(chart.pair_form(chart.form_as_2form(), chart.hamiltonian_field(f),
                              chart.hamiltonian_field(g)) == chart.poisson_bracket(f, g));
    }
}

TEST_CASE("poisson bracket is a biderivation satisfying jacobi") {
    Rng rng(43);
    for (int dim : {2, 4}) {
        auto chart = SymplecticChart::darboux(dim);
        for (int rep = 0; rep < 10; ++rep) {
            ChartPoly f = rng.poly(dim, 3, 3, false);
            ChartPoly g = rng.poly(dim, 3, 3, false);
            ChartPoly h = rng.poly(dim, 3, 3, false);
            CHECK(chart.poisson_bracket(f, g * h) ==
                  chart.poisson_bracket(f, g) * h + g * chart.poisson_bracket(f, h));
            ChartPoly jac = chart.poisson_bracket(f, chart.poisson_bracket(g, h)) +
                            chart.poisson_bracket(g, chart.poisson_bracket(h, f)) +
                            chart.poisson_bracket(h, chart.poisson_bracket(f, g));
            CHECK(jac.is_zero());
        }
    }
}

TEST_CASE("explicit form input inverts to the poisson tensor") {
    auto darboux = SymplecticChart::darboux(4);
    auto chart = SymplecticChart::from_form(darboux.form);
    CHECK(chart.poisson == darboux.poisson);

    // a scaled form still satisfies the contraction identity
    Mat scaled = darboux.form;
    for (auto& row : scaled)
        for (auto& v : row) v *= GaussRational(3);
    auto chart2 = SymplecticChart::from_form(scaled);
    CHECK(mat_mul(mat_transpose(chart2.poisson), chart2.form) == identity_mat(4));

    Mat bad = identity_mat(4);
    CHECK_THROWS_AS(SymplecticChart::from_form(bad), std::invalid_argument);
}

TEST_CASE("ordering tensors") {
    auto chart = SymplecticChart::darboux(2);
    auto wy = OrderingSpec::weyl(chart);
    CHECK(wy.mu == chart.poisson);
    wy.validate(chart);

    auto L = LagrangianSplit::standard_half(2);
    auto st = OrderingSpec::standard(chart, L);
    CHECK(st.mu[1][0] == GaussRational(-2));
    CHECK(st.mu[0][1].is_zero());
    CHECK(st.mu[0][0].is_zero());
    CHECK(st.mu[1][1].is_zero());
    st.validate(chart);
    CHECK(st.matches_standard_shape(chart, L));
    CHECK(!wy.matches_standard_shape(chart, L));

    OrderingSpec broken = st;
    broken.mu[0][1] = GaussRational(1);
    CHECK_THROWS_AS(broken.validate(chart), std::invalid_argument);

    auto L4 = LagrangianSplit::standard_half(4);
    auto chart4 = SymplecticChart::darboux(4);
    L4.validate(chart4);
    LagrangianSplit badL;
    badL.p_axes = {0, 2};  // {x1, x3} pair nontrivially: not isotropic
    CHECK_THROWS_AS(badL.validate(chart4), std::invalid_argument);
}

TEST_CASE("fiber product: frozen first examples") {
    unsigned B = 10;
    auto chart = SymplecticChart::darboux(2);
    Mat mu = OrderingSpec::weyl(chart).mu;

    auto x1 = xi_var(2, 0, B);
    auto x2 = xi_var(2, 1, B);

    auto prod = fiber_mul(x1, x2, mu);
    WeylElem<ChartPoly> expect(2, B);
    expect.add_term(WeylKey{MultiIndex::unit(0).plus(MultiIndex::unit(1)), 0},
                    ChartPoly(2, GaussRational(1)));
    expect.add_term(WeylKey{MultiIndex{}, 1}, ChartPoly(2, half_minus_i()));
    CHECK(prod == expect);

    // reversed order flips the constant
    auto prod2 = fiber_mul(x2, x1, mu);
    WeylElem<ChartPoly> expect2(2, B);
    expect2.add_term(WeylKey{MultiIndex::unit(0).plus(MultiIndex::unit(1)), 0},
                     ChartPoly(2, GaussRational(1)));
    expect2.add_term(WeylKey{MultiIndex{}, 1}, ChartPoly(2, -half_minus_i()));
    CHECK(prod2 == expect2);

    // commutator [xi1, xi2] = -i lambda
    auto comm = prod - prod2;
    WeylElem<ChartPoly> expc(2, B);
    expc.add_term(WeylKey{MultiIndex{}, 1},
                  ChartPoly(2, GaussRational(BigRational(0), BigRational(-1))));
    CHECK(comm == expc);

    // unit
    CHECK(fiber_mul(weyl_unit(2, B), x1, mu) == x1);
    CHECK(fiber_mul(x1, weyl_unit(2, B), mu) == x1);
}

TEST_CASE("standard ordering contracts momentum against position only") {
    unsigned B = 10;
    auto chart = SymplecticChart::darboux(2);
    Mat mu = OrderingSpec::standard(chart, LagrangianSplit::standard_half(2)).mu;

    auto x1 = xi_var(2, 0, B);
    auto x2 = xi_var(2, 1, B);

    // no contraction in this order
    auto a = fiber_mul(x1, x2, mu);
    WeylElem<ChartPoly> expa(2, B);
    expa.add_term(WeylKey{MultiIndex::unit(0).plus(MultiIndex::unit(1)), 0},
                  ChartPoly(2, GaussRational(1)));
    CHECK(a == expa);

    // full contraction in the other: mu^{21} = -2 gives +i lambda
    auto b = fiber_mul(x2, x1, mu);
    WeylElem<ChartPoly> expb = expa;
    expb.add_term(WeylKey{MultiIndex{}, 1},
                  ChartPoly(2, GaussRational(BigRational(0), BigRational(1))));
    CHECK(b == expb);

    // the commutator of linear elements is ordering independent
    Mat muw = OrderingSpec::weyl(chart).mu;
    CHECK(a - b == fiber_mul(x1, x2, muw) - fiber_mul(x2, x1, muw));
}

TEST_CASE("fiber product is associative and graded at any budget") {
    Rng rng(47);
    for (int dim : {2, 4}) {
        auto chart = SymplecticChart::darboux(dim);
        std::vector<Mat> mus = {OrderingSpec::weyl(chart).mu,
                                OrderingSpec::standard(chart, LagrangianSplit::standard_half(dim)).mu};
        for (const Mat& mu : mus)
            for (int rep = 0; rep < 6; ++rep) {
                unsigned B = static_cast<unsigned>(rng.uniform(6, 10));
                auto a = rng.weyl_elem(dim, B, 3, 3, 1);
                auto b = rng.weyl_elem(dim, B, 3, 3, 1);
                auto c = rng.weyl_elem(dim, B, 3, 3, 1);
                CHECK(fiber_mul(fiber_mul(a, b, mu), c, mu) ==
                      fiber_mul(a, fiber_mul(b, c, mu), mu));
                CHECK(fiber_mul(a + b, c, mu) == fiber_mul(a, c, mu) + fiber_mul(b, c, mu));
                // total degree is additive
                auto ab = fiber_mul(a, b, mu);
                CHECK(ab.max_total() <= a.max_total() + b.max_total());
            }
    }
}

TEST_CASE("form-valued product follows wedge signs") {
    unsigned B = 8;
    auto chart = SymplecticChart::darboux(2);
    Mat mu = OrderingSpec::weyl(chart).mu;

    WeylForm<ChartPoly> adx1(2, 1, B);
    adx1.add_term(FormIdx{1, {0, -1, -1}}, WeylKey{}, ChartPoly::variable(2, 0));
    WeylForm<ChartPoly> bdx2(2, 1, B);
    bdx2.add_term(FormIdx{1, {1, -1, -1}}, WeylKey{}, ChartPoly::variable(2, 1));

    auto ab = fiber_mul(adx1, bdx2, mu);
    auto ba = fiber_mul(bdx2, adx1, mu);
    CHECK((ab + ba).is_zero());  // fiber-central coefficients anticommute as 1-forms
    CHECK(ab.degree() == 2);

    // graded commutator of two 1-forms uses the plus sign
    auto sc = super_commutator(adx1, bdx2, mu);
    CHECK(sc == ab + ba);
}

TEST_CASE("delta examples and nilpotence") {
    unsigned B = 8;
    WeylForm<ChartPoly> a(2, 0, B);
    MultiIndex x12 = MultiIndex::unit(0).plus(MultiIndex::unit(1));
    a.add_term(FormIdx{}, WeylKey{x12, 0}, ChartPoly(2, GaussRational(1)));

    auto da = delta_op(a);
    WeylForm<ChartPoly> expect(2, 1, B);
    expect.add_term(FormIdx{1, {0, -1, -1}}, WeylKey{MultiIndex::unit(1), 0},
                    ChartPoly(2, GaussRational(1)));
    expect.add_term(FormIdx{1, {1, -1, -1}}, WeylKey{MultiIndex::unit(0), 0},
                    ChartPoly(2, GaussRational(1)));
    CHECK(da == expect);
    CHECK(delta_op(da).is_zero());

    Rng rng(53);
    for (int rep = 0; rep < 8; ++rep) {
        auto f = rng.weyl_form(4, rng.uniform(0, 1), 8, 4, 2, 3, 1);
        CHECK(delta_op(delta_op(f)).is_zero());
        if (f.degree() >= 1) CHECK(delta_inv_op(delta_inv_op(f)).is_zero());
    }
}

TEST_CASE("delta inverse frozen example") {
    unsigned B = 8;
    WeylForm<ChartPoly> dx1(2, 1, B);
    dx1.add_term(FormIdx{1, {0, -1, -1}}, WeylKey{}, ChartPoly(2, GaussRational(1)));
    auto r = delta_inv_op(dx1);
    CHECK(r.degree() == 0);
    CHECK(r.as_element() == xi_var(2, 0, B));
}

TEST_CASE("normalized homotopy identity") {
    Rng rng(59);
    for (int rep = 0; rep < 10; ++rep) {
        int dim = 2 * rng.uniform(1, 2);

        // 0-forms: delta_inv(delta(a)) recovers everything except the
        // fiber-constant part
        auto a = rng.weyl_elem(dim, 8, 5, 3, 1);
        auto af = WeylForm<ChartPoly>::scalar(a);
        auto recovered = delta_inv_op(delta_op(af)).as_element();
        WeylElem<ChartPoly> sigma(dim, 8);
        for (const auto& [lam, c] : central_part(a)) sigma.add_term(WeylKey{MultiIndex{}, lam}, c);
        CHECK(recovered + sigma == a);

        // positive degree: delta delta_inv + delta_inv delta is the identity
        for (int deg : {1, 2}) {
            auto f = rng.weyl_form(dim, deg, 8, 4, 2, 3, 1);
            CHECK(delta_op(delta_inv_op(f)) + delta_inv_op(delta_op(f)) == f);
        }
    }
}

TEST_CASE("lambda shifts") {
    Rng rng(61);
    auto a = rng.weyl_elem(2, 8, 4, 2, 2);
    auto up = a.lambda_shifted(2);
    CHECK(up.min_lambda() >= 2);
    // shifting down after up returns the terms that survived the budget
    CHECK(up.lambda_shifted(-2) == a.truncated_total(8 - 4).truncated_total(8));

    WeylElem<ChartPoly> c(2, 8);
    c.add_term(WeylKey{}, ChartPoly(2, GaussRational(1)));
    CHECK_THROWS_AS(c.lambda_shifted(-1), std::domain_error);
}

TEST_CASE("taylor lift reproduces jets") {
    ChartPoly q = ChartPoly::variable(2, 0);
    ChartPoly p = ChartPoly::variable(2, 1);
    ChartPoly f = q * q * p;
    auto lift = xi_taylor_lift(f, 8);

    CHECK(central_lambda(lift, 4) == LambdaPoly(f, 4));
    MultiIndex xi1 = MultiIndex::unit(0);
    MultiIndex xi2 = MultiIndex::unit(1);
    CHECK(lift.coeff(WeylKey{xi1, 0}) == GaussRational(2) * (q * p));
    CHECK(lift.coeff(WeylKey{xi2, 0}) == q * q);
    CHECK(lift.coeff(WeylKey{xi1.plus(xi1), 0}) == p);
    CHECK(lift.coeff(WeylKey{xi1.plus(xi2), 0}) == GaussRational(2) * q);
    CHECK(lift.coeff(WeylKey{xi1.plus(xi1).plus(xi2), 0}) == ChartPoly(2, GaussRational(1)));
    CHECK(lift.terms().size() == 6);
}
