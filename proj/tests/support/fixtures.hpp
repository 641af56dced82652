#pragma once

// Shared geometric test data: random symplectic connections built from
// totally symmetric lowered symbols, and the standing curved examples.

#include "starprod/connection.hpp"
#include "starprod/fedosov.hpp"

#include "random_gen.hpp"

#include <array>
#include <map>

namespace sptest {

inline starprod::Connection random_symplectic_connection(Rng& rng,
                                                         const starprod::SymplecticChart& chart,
                                                         int deg, int terms) {
    using starprod::ChartPoly;
    std::map<std::array<int, 3>, ChartPoly> low;
    int n = chart.dim;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) {
                ChartPoly p = rng.poly(n, deg, terms, false);
                low[{i, j, k}] = p;
                low[{i, k, j}] = p;
                low[{j, i, k}] = p;
                low[{j, k, i}] = p;
                low[{k, i, j}] = p;
                low[{k, j, i}] = p;
            }
    return starprod::Connection::from_lowered(chart, low);
}

// Curved two dimensional chart: lowered symbol x2 in the all-position slot.
inline starprod::Connection curved_dim2() {
    starprod::SymplecticChart chart = starprod::SymplecticChart::darboux(2);
    std::map<std::array<int, 3>, starprod::ChartPoly> low;
    low[{0, 0, 0}] = starprod::ChartPoly::variable(2, 1);
    return starprod::Connection::from_lowered(chart, low);
}

inline starprod::FedosovProblem flat_problem(int dim, starprod::OrderingMode mode,
                                             unsigned order) {
    starprod::FedosovProblem p;
    p.chart = starprod::SymplecticChart::darboux(dim);
    p.ordering = mode == starprod::OrderingMode::weyl
                     ? starprod::OrderingSpec::weyl(p.chart)
                     : starprod::OrderingSpec::standard(
                           p.chart, starprod::LagrangianSplit::standard_half(dim));
    p.connection = starprod::Connection::flat(dim);
    p.lambda_order = order;
    return p;
}

inline starprod::FedosovProblem curved2_problem(starprod::OrderingMode mode, unsigned order) {
    starprod::FedosovProblem p = flat_problem(2, mode, order);
    p.connection = curved_dim2();
    return p;
}

}  // namespace sptest
