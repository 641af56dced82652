#pragma once

/*
 * The invariant battery a built product is expected to pass, packaged so the
 * command-line surface and the release checks can share it: unit law,
 * associativity, flatness residual, stability under a larger degree cap,
 * level-bounded derivative orders, table-versus-lift agreement, adaptedness
 * and ideal preservation when a subspace is marked, and the product shift
 * contributed by each declared normalizing form.
 */

#include "starprod/adapted.hpp"
#include "starprod/config.hpp"
#include "starprod/diff_op.hpp"
#include "starprod/fedosov.hpp"

#include <random>
#include <string>
#include <vector>

namespace starprod {

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;
};

// Deterministic inputs for the randomized checks. std::mt19937 has a fixed
// sequence by the standard; raw modulo keeps the draw order portable.
class VerifyRng {
public:
    explicit VerifyRng(unsigned seed) : gen_(seed) {}

    unsigned pick(unsigned n) { return n ? gen_() % n : 0; }

    ChartPoly poly(int dim, int terms, unsigned maxdeg) {
        ChartPoly out(dim);
        for (int t = 0; t < terms; ++t) {
            MultiIndex m;
            unsigned d = pick(maxdeg + 1);
            for (unsigned u = 0; u < d; ++u) m.bump(static_cast<int>(pick(dim)), 1);
            long num = 1 + static_cast<long>(pick(4));
            if (pick(2)) num = -num;
            long den = 1 + static_cast<long>(pick(3));
            GaussRational c{BigRational(num, den)};
            if (pick(3) == 0)
                c += GaussRational(BigRational(0), BigRational(1 + static_cast<long>(pick(2))));
            out.add_term(m, c);
        }
        if (out.is_zero()) out = ChartPoly(dim, GaussRational(1));
        return out;
    }

private:
    std::mt19937 gen_;
};

struct VerifyOptions {
    int triples = 12;
    unsigned seed = 2026;
    int scan_degree = 4;
};

inline std::vector<CheckResult> run_verify_suite(const RunConfig& cfg, const StarProduct& sp,
                                                 const VerifyOptions& opt = {}) {
    std::vector<CheckResult> out;
    const int dim = sp.problem().chart.dim;
    const unsigned N = sp.order();
    VerifyRng rng(opt.seed);

    {
        CheckResult c{"residual_zero", sp.solution().residual_clean, ""};
        if (!c.pass) c.detail = "flatness residual has surviving terms";
        out.push_back(c);
    }

    {
        CheckResult c{"unit_law", true, "5 draws"};
        ChartPoly one(dim, GaussRational(1));
        for (int rep = 0; rep < 5 && c.pass; ++rep) {
            ChartPoly f = rng.poly(dim, 4, 3);
            LambdaPoly fs(f, N);
            if (sp.star(one, f) != fs || sp.star(f, one) != fs) {
                c.pass = false;
                c.detail = "unit fails on draw " + std::to_string(rep);
            }
        }
        out.push_back(c);
    }

    {
        CheckResult c{"associativity", true, std::to_string(opt.triples) + " triples"};
        for (int rep = 0; rep < opt.triples && c.pass; ++rep) {
            LambdaPoly f(rng.poly(dim, 3, 2), N);
            LambdaPoly g(rng.poly(dim, 3, 2), N);
            LambdaPoly h(rng.poly(dim, 3, 2), N);
            if (sp.star(sp.star(f, g), h) != sp.star(f, sp.star(g, h))) {
                c.pass = false;
                c.detail = "triple " + std::to_string(rep) + " breaks associativity";
            }
        }
        for (unsigned n = 1; n <= 3 && c.pass; ++n)
            if (!associativity_residual(sp.tables(), n).is_zero()) {
                c.pass = false;
                c.detail = "operator residual survives at arity level " + std::to_string(n);
            }
        out.push_back(c);
    }

    {
        CheckResult c{"table_consistency", true, "4 pairs"};
        for (int rep = 0; rep < 4 && c.pass; ++rep) {
            ChartPoly f = rng.poly(dim, 3, 2);
            ChartPoly g = rng.poly(dim, 3, 2);
            if (sp.star(f, g) != sp.star_direct(f, g)) {
                c.pass = false;
                c.detail = "tables disagree with the direct lift product";
            }
        }
        out.push_back(c);
    }

    {
        FedosovProblem bigger = sp.problem();
        bigger.degree_cap = sp.problem().effective_cap() + 2;
        CheckResult c{"truncation_stability", true,
                      "degree cap " + std::to_string(sp.problem().effective_cap()) + " vs " +
                          std::to_string(bigger.degree_cap)};
        c.pass = StarProduct::build(bigger).tables() == sp.tables();
        if (!c.pass) c.detail = "retained coefficients moved under the larger cap";
        out.push_back(c);
    }

    {
        CheckResult c{"naturalness", true, "levels 0.." + std::to_string(N)};
        for (unsigned k = 0; k <= N && c.pass; ++k)
            for (int slot = 0; slot < 2; ++slot)
                if (sp.tables().level(k).max_order(slot) > k) {
                    c.pass = false;
                    c.detail = "level " + std::to_string(k) + " exceeds its derivative bound";
                }
        out.push_back(c);
    }

    if (cfg.has_lagrangian) {
        AdaptednessReport rep = check_adapted_data(sp.problem(), cfg.split);
        CheckResult c{"adaptedness", rep.all_pass(), ""};
        auto add = [&](const char* tag, const ConditionVerdict& v) {
            if (!v.pass) {
                if (!c.detail.empty()) c.detail += "; ";
                c.detail += std::string(tag) + ": " + v.witness;
            }
        };
        add("geodesic_subspace", rep.geodesic_subspace);
        add("normalizing_forms", rep.normalizing_forms);
        add("section_in_ideal", rep.section_in_ideal);
        add("standard_pairing", rep.standard_pairing);
        out.push_back(c);

        IdealScanResult scan =
            scan_tables_ideal(sp.tables(), cfg.split, opt.scan_degree, sp.order());
        CheckResult ideal{"ideal_preservation", scan.pass,
                          "scan degree " + std::to_string(opt.scan_degree)};
        if (!scan.pass) ideal.detail = scan.witness;
        out.push_back(ideal);
    }

    for (const auto& [k, F] : sp.problem().omega) {
        if (k + 1 > N) continue;
        FedosovProblem dropped = sp.problem();
        dropped.omega.erase(k);
        StarProduct base = StarProduct::build(dropped);
        CheckResult c{"class_shift_" + std::to_string(k), true, "4 pairs"};
        for (int rep = 0; rep < 4 && c.pass; ++rep) {
            ChartPoly f = rng.poly(dim, 3, 2);
            ChartPoly g = rng.poly(dim, 3, 2);
            LambdaPoly diff = sp.star(f, g) - base.star(f, g);
            for (unsigned j = 0; j <= k && c.pass; ++j)
                if (!diff.coeff(j).is_zero()) {
                    c.pass = false;
                    c.detail = "products differ below the declared power";
                }
            ChartPoly expect =
                sp.problem().chart.pair_form(F, sp.problem().chart.hamiltonian_field(f),
                                             sp.problem().chart.hamiltonian_field(g));
            if (c.pass && diff.coeff(k + 1) != expect) {
                c.pass = false;
                c.detail = "shift at the declared power is not the paired form";
            }
        }
        out.push_back(c);
    }

    return out;
}

inline bool all_pass(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

}  // namespace starprod
