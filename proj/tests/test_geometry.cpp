#include "starprod/connection.hpp"

#include "support/fixtures.hpp"
#include "support/random_gen.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace starprod;
using sptest::Rng;
using sptest::curved_dim2;
using sptest::random_symplectic_connection;

TEST_CASE("christoffel storage and validation") {
    SymplecticChart chart = SymplecticChart::darboux(2);

    Connection flat = Connection::flat(2);
    CHECK(flat.is_flat());
    CHECK_NOTHROW(flat.validate(chart));

    Connection c = curved_dim2();
    CHECK(c.christoffel(1, 0, 0) == ChartPoly::variable(2, 1));
    CHECK(c.christoffel(0, 0, 0).is_zero());
    CHECK(c.lowered(chart, 0, 0, 0) == ChartPoly::variable(2, 1));
    CHECK_NOTHROW(c.validate(chart));

    // mirror writes
    Connection m(2);
    m.set_symmetric(0, 0, 1, ChartPoly::variable(2, 0));
    CHECK(m.christoffel(0, 1, 0) == ChartPoly::variable(2, 0));

    // a raised symbol whose lowered version is lopsided is rejected
    Connection bad(2);
    bad.set_symmetric(0, 0, 0, ChartPoly::variable(2, 0));
    CHECK_THROWS_AS(bad.validate(chart), std::invalid_argument);

    for (int dim : {2, 4}) {
        Rng rng(921 + dim);
        SymplecticChart ch = SymplecticChart::darboux(dim);
        for (int rep = 0; rep < 4; ++rep)
            CHECK_NOTHROW(random_symplectic_connection(rng, ch, 2, 2).validate(ch));
    }
}

TEST_CASE("curvature tensors") {
    SymplecticChart chart2 = SymplecticChart::darboux(2);

    // flat connection, flat curvature
    CHECK(curvature_weyl_form(Connection::flat(2), chart2, 6).is_zero());

    // frozen: the curved example has R^1_{010} = 1 and curvature form
    // -(1/2) xi_1^2 dx1 ^ dx2
    Connection c = curved_dim2();
    CHECK(curvature_raised(c, 1, 0, 1, 0) == ChartPoly(2, GaussRational(1)));
    CHECK(curvature_raised(c, 1, 0, 0, 1) == ChartPoly(2, GaussRational(-1)));
    WeylForm<ChartPoly> expect(2, 2, 6);
    MultiIndex xi00;
    xi00.bump(0, 2);
    expect.add_signed({0, 1}, WeylKey{xi00, 0}, ChartPoly(2, GaussRational(-1, 2)));
    CHECK(curvature_weyl_form(c, chart2, 6) == expect);

    // random symplectic connections: antisymmetry in the last pair, symmetry
    // of the lowered tensor in the first pair
    for (int dim : {2, 4}) {
        Rng rng(922 + dim);
        SymplecticChart ch = SymplecticChart::darboux(dim);
        for (int rep = 0; rep < 3; ++rep) {
            Connection r = random_symplectic_connection(rng, ch, 2, 2);
            for (int n = 0; n < dim; ++n)
                for (int j = 0; j < dim; ++j)
                    for (int l = 0; l < dim; ++l)
                        for (int k = 0; k < dim; ++k) {
                            CHECK(curvature_raised(r, n, j, l, k) ==
                                  ChartPoly(dim) - curvature_raised(r, n, j, k, l));
                            CHECK(curvature_lowered(r, ch, n, j, l, k) ==
                                  curvature_lowered(r, ch, j, n, l, k));
                        }
        }
    }
}

TEST_CASE("flat derivative is the chart differential") {
    const int dim = 2;
    const unsigned budget = 6;
    SymplecticChart chart = SymplecticChart::darboux(dim);
    Connection flat = Connection::flat(dim);
    OrderingSpec ord = OrderingSpec::weyl(chart);
    Rng rng(923);

    for (int rep = 0; rep < 5; ++rep) {
        ChartPoly f = rng.poly(dim, 3, 3, true);
        WeylForm<ChartPoly> d = covariant_D(embed_poly(f, budget), flat, ord);
        WeylForm<ChartPoly> expect(dim, 1, budget);
        for (int k = 0; k < dim; ++k)
            expect.add_signed({k}, WeylKey{}, f.derivative(k));
        CHECK(d == expect);

        // the fiberwise Taylor lift is parallel up to the symbol mover: on a
        // complete lift D and delta agree
        WeylElem<ChartPoly> lift = xi_taylor_lift(f, budget);
        CHECK(covariant_D(lift, flat, ord) == delta_op(WeylForm<ChartPoly>::scalar(lift)));
    }
}

TEST_CASE("covariant derivative is a product derivation") {
    const unsigned budget = 8;
    for (int dim : {2, 4}) {
        SymplecticChart chart = SymplecticChart::darboux(dim);
        LagrangianSplit L = LagrangianSplit::standard_half(dim);
        Rng rng(924 + dim);
        std::vector<OrderingSpec> ords = {OrderingSpec::weyl(chart),
                                          OrderingSpec::standard(chart, L)};
        for (const auto& ord : ords)
            for (int rep = 0; rep < 3; ++rep) {
                Connection conn = random_symplectic_connection(rng, chart, 2, 2);
                WeylElem<ChartPoly> a = rng.weyl_elem(dim, budget, 3, 2, 1);
                WeylElem<ChartPoly> b = rng.weyl_elem(dim, budget, 3, 2, 1);

                WeylForm<ChartPoly> lhs =
                    covariant_D(fiber_mul(a, b, ord.mu), conn, ord);
                WeylForm<ChartPoly> rhs =
                    fiber_mul(covariant_D(a, conn, ord), WeylForm<ChartPoly>::scalar(b), ord.mu);
                rhs += fiber_mul(WeylForm<ChartPoly>::scalar(a), covariant_D(b, conn, ord),
                                 ord.mu);
                CHECK(lhs == rhs);

                // graded version on a one form times a zero form
                WeylForm<ChartPoly> alpha = rng.weyl_form(dim, 1, budget, 2, 2, 2, 1);
                WeylForm<ChartPoly> beta = WeylForm<ChartPoly>::scalar(b);
                WeylForm<ChartPoly> glhs = covariant_D(fiber_mul(alpha, beta, ord.mu), conn, ord);
                WeylForm<ChartPoly> grhs = fiber_mul(covariant_D(alpha, conn, ord), beta, ord.mu);
                grhs -= fiber_mul(alpha, covariant_D(beta, conn, ord), ord.mu);
                CHECK(glhs == grhs);
            }
    }
}

TEST_CASE("derivative squares to the curvature bracket") {
    const unsigned budget = 8;
    for (int dim : {2, 4}) {
        SymplecticChart chart = SymplecticChart::darboux(dim);
        LagrangianSplit L = LagrangianSplit::standard_half(dim);
        Rng rng(925 + dim);
        std::vector<OrderingSpec> ords = {OrderingSpec::weyl(chart),
                                          OrderingSpec::standard(chart, L)};
        for (const auto& ord : ords)
            for (int rep = 0; rep < (dim == 2 ? 3 : 2); ++rep) {
                Connection conn = random_symplectic_connection(rng, chart, 2, 2);
                WeylForm<ChartPoly> R = curvature_weyl_form(conn, chart, budget);
                WeylElem<ChartPoly> a = rng.weyl_elem(dim, budget, 3, 2, 1);

                WeylForm<ChartPoly> dd = covariant_D(covariant_D(a, conn, ord), conn, ord);
                WeylForm<ChartPoly> br =
                    super_commutator(R, WeylForm<ChartPoly>::scalar(a), ord.mu);
                WeylForm<ChartPoly> rhs = br.lambda_shifted(-1);
                rhs *= GaussRational(BigRational(0), BigRational(-1));
                CHECK(dd == rhs);
            }
    }
}

TEST_CASE("derivative anticommutes with the symbol mover") {
    const int dim = 2;
    const unsigned budget = 8;
    SymplecticChart chart = SymplecticChart::darboux(dim);
    LagrangianSplit L = LagrangianSplit::standard_half(dim);
    Rng rng(926);
    std::vector<OrderingSpec> ords = {OrderingSpec::weyl(chart),
                                      OrderingSpec::standard(chart, L)};
    for (const auto& ord : ords)
        for (int rep = 0; rep < 3; ++rep) {
            Connection conn = random_symplectic_connection(rng, chart, 2, 2);
            WeylForm<ChartPoly> a0 = WeylForm<ChartPoly>::scalar(rng.weyl_elem(dim, budget, 3, 2, 1));
            WeylForm<ChartPoly> s0 = delta_op(covariant_D(a0, conn, ord));
            s0 += covariant_D(delta_op(a0), conn, ord);
            CHECK(s0.is_zero());

            WeylForm<ChartPoly> a1 = rng.weyl_form(dim, 1, budget, 2, 2, 2, 1);
            WeylForm<ChartPoly> s1 = delta_op(covariant_D(a1, conn, ord));
            s1 += covariant_D(delta_op(a1), conn, ord);
            CHECK(s1.is_zero());
        }
}

TEST_CASE("derivative preserves total degree") {
    const int dim = 2;
    const unsigned budget = 8;
    SymplecticChart chart = SymplecticChart::darboux(dim);
    OrderingSpec ord = OrderingSpec::weyl(chart);
    Rng rng(927);
    for (int rep = 0; rep < 4; ++rep) {
        Connection conn = random_symplectic_connection(rng, chart, 2, 2);
        WeylElem<ChartPoly> a = rng.weyl_elem(dim, budget, 4, 3, 1);
        WeylForm<ChartPoly> d = covariant_D(a, conn, ord);
        for (unsigned deg = 0; deg <= budget; ++deg)
            CHECK(covariant_D(a.graded_part(deg), conn, ord) == d.graded_part(deg));
    }
}
