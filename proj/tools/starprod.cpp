// Command-line surface: build a product from a config, run the invariant
// battery, compare two configs up to equivalence, solve spectral conditions,
// and evaluate winding indices. Exit codes: 0 all requested verdicts pass,
// 1 a verdict failed, 2 config parse error, 3 validation error.

#include "starprod/bohr_sommerfeld.hpp"
#include "starprod/config.hpp"
#include "starprod/equivalence.hpp"
#include "starprod/report.hpp"
#include "starprod/verify.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace starprod;

struct CmdOpts {
    std::string config;
    std::string config_b;
    int order = -1;
    int budget = -1;
    std::string out;
    std::string format = "json";
    bool timings = false;
    int level = 0;
    bool relative = false;
};

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    long long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void attach_timing(Json& rep, const CmdOpts& o, const Timer& t) {
    if (o.timings) rep["timing"] = Json{{"total_ms", t.ms()}};
}

int emit(const Json& rep, const CmdOpts& o) {
    std::string text = render_report(rep, o.format);
    if (o.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw ValidationError("cannot write output file '" + o.out + "'");
        f << text;
    }
    return 0;
}

RunConfig load_for_product(const std::string& path, const CmdOpts& o) {
    RunConfig cfg = load_config(path);
    if (!cfg.has_chart) throw ValidationError("config has no [chart] section");
    if (o.order >= 0) cfg.problem.lambda_order = static_cast<unsigned>(o.order);
    if (o.budget >= 0) cfg.problem.degree_cap = static_cast<unsigned>(o.budget);
    if (o.order >= 0 || o.budget >= 0) {
        WeylElem<ChartPoly> s(cfg.problem.chart.dim, cfg.problem.effective_cap() + 2);
        for (const auto& [k, c] : cfg.problem.s.terms()) s.add_term(k, c);
        cfg.problem.s = std::move(s);
    }
    return cfg;
}

Json spectrum_json(const BSConfig& bs) {
    Json b = Json::object();
    b["action"] = "pi*(" + rat_str(bs.problem.action_base) + " + " +
                  rat_str(bs.problem.action_slope) + "*E)";
    b["maslov"] = bs.problem.maslov;
    b["kappa"] = bs.problem.kappa.str();
    b["lambda"] = rat_str(bs.problem.lambda);
    b["c_mu"] = rat_str(bs.problem.maslov_weight);
    b["window"] = Json::array({rat_str(bs.window_lo), rat_str(bs.window_hi)});
    std::vector<BigRational> levels = bs_spectrum(bs.problem, bs.window_lo, bs.window_hi);
    Json arr = Json::array();
    bool integral = true;
    for (const auto& E : levels) {
        arr.push_back(rat_str(E));
        GaussRational v = bs.problem.condition_value(E);
        if (!v.im().is_zero() || boost::multiprecision::denominator(v.re()) != 1)
            integral = false;
    }
    b["count"] = static_cast<int>(levels.size());
    b["levels"] = std::move(arr);
    b["integral_check"] = integral;
    return b;
}

int run_build(const CmdOpts& o) {
    Timer t;
    RunConfig cfg = load_for_product(o.config, o);
    StarProduct sp = StarProduct::build(cfg.problem);
    Json rep = Json::object();
    rep["command"] = "build";
    rep["config"] = o.config;
    rep["setup"] = setup_json(cfg);
    rep["conventions"] = conventions_json(cfg);
    rep["solution"] = solution_json(sp.solution());
    rep["star"] = tables_json(sp.tables());
    bool pass = sp.solution().residual_clean;
    rep["pass"] = pass;
    attach_timing(rep, o, t);
    emit(rep, o);
    return pass ? 0 : 1;
}

int run_verify(const CmdOpts& o) {
    Timer t;
    RunConfig cfg = load_for_product(o.config, o);
    StarProduct sp = StarProduct::build(cfg.problem);
    std::vector<CheckResult> checks = run_verify_suite(cfg, sp);
    Json rep = Json::object();
    rep["command"] = "verify";
    rep["config"] = o.config;
    rep["setup"] = setup_json(cfg);
    rep["conventions"] = conventions_json(cfg);
    rep["solution"] = solution_json(sp.solution());
    rep["checks"] = checks_json(checks);
    if (cfg.bs.present && cfg.bs.has_window) rep["bs"] = spectrum_json(cfg.bs);
    bool pass = all_pass(checks) && sp.solution().residual_clean;
    rep["pass"] = pass;
    attach_timing(rep, o, t);
    emit(rep, o);
    return pass ? 0 : 1;
}

int run_equiv(const CmdOpts& o) {
    Timer t;
    RunConfig ca = load_for_product(o.config, o);
    RunConfig cb = load_for_product(o.config_b, o);
    StarProduct pa = StarProduct::build(ca.problem);
    StarProduct pb = StarProduct::build(cb.problem);
    if (pa.problem().chart.dim != pb.problem().chart.dim)
        throw ValidationError("configs live on charts of different dimension");
    if (pa.order() != pb.order())
        throw ValidationError("configs are truncated at different orders");

    unsigned level = o.level > 0 ? static_cast<unsigned>(o.level) : 0;
    if (level == 0) {
        level = 1;
        for (unsigned k = 1; k <= pa.order(); ++k)
            if (pa.tables().level(k) != pb.tables().level(k)) {
                level = k;
                break;
            }
    }
    if (o.relative && !ca.has_lagrangian)
        throw ValidationError("relative comparison needs a lagrangian section in the first config");

    EquivalenceOutcome out =
        equivalence_step(pa, pb, level, o.relative ? &ca.split : nullptr);

    Json rep = Json::object();
    rep["command"] = "equiv";
    rep["config_a"] = o.config;
    rep["config_b"] = o.config_b;
    rep["h1_trivial"] = ca.h1_trivial;
    rep["equivalence"] = equivalence_json(out, pa.problem().chart.dim);
    bool pass = out.equivalent && out.intertwine_certified &&
                (!o.relative || out.transported_ideal_pass);
    rep["pass"] = pass;
    attach_timing(rep, o, t);
    emit(rep, o);
    return pass ? 0 : 1;
}

int run_spectrum(const CmdOpts& o) {
    Timer t;
    RunConfig cfg = load_config(o.config);
    if (!cfg.bs.present) throw ValidationError("config has no [bs] section");
    if (!cfg.bs.has_window) throw ValidationError("bs section needs a window");
    Json rep = Json::object();
    rep["command"] = "spectrum";
    rep["config"] = o.config;
    rep["bs"] = spectrum_json(cfg.bs);
    bool pass = rep["bs"]["integral_check"].get<bool>();
    rep["pass"] = pass;
    attach_timing(rep, o, t);
    emit(rep, o);
    return pass ? 0 : 1;
}

int run_maslov(const CmdOpts& o) {
    Timer t;
    RunConfig cfg = load_config(o.config);
    if (!cfg.maslov.present) throw ValidationError("config has no [maslov] section");
    Json rep = Json::object();
    rep["command"] = "maslov";
    rep["config"] = o.config;
    rep["frame"] = cfg.maslov.frame;

    FramePath frame;
    GaugePath gauge;
    if (cfg.maslov.frame == "circle") {
        rep["turns"] = cfg.maslov.turns;
        frame = circle_frame(static_cast<int>(cfg.maslov.turns));
        gauge = frame;
    } else {
        rep["size"] = cfg.maslov.size;
        frame = constant_frame(cfg.maslov.size);
        gauge = frame;
    }
    int winding = maslov_winding(frame);
    double trace = gauge_trace_integral(gauge);
    int gauge_index = maslov_from_gauge(gauge);
    rep["winding_index"] = winding;
    rep["gauge_trace_integral"] = trace;
    rep["gauge_index"] = gauge_index;
    bool pass = winding == gauge_index;
    rep["agree"] = pass;
    rep["pass"] = pass;
    attach_timing(rep, o, t);
    emit(rep, o);
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated star products on symplectic charts"};
    app.require_subcommand(1);

    CmdOpts o;
    auto add_common = [&](CLI::App* cmd, bool product_flags) {
        cmd->add_option("--out", o.out, "write the report to this path");
        cmd->add_option("--format", o.format, "report format")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->add_flag("--timings", o.timings, "attach wall-clock timing to the report");
        if (product_flags) {
            cmd->add_option("--order", o.order, "override the lambda truncation order");
            cmd->add_option("--budget", o.budget, "override the fiber degree cap");
        }
    };

    CLI::App* build = app.add_subcommand("build", "solve the recursion and emit the tables");
    build->add_option("config", o.config, "config file")->required();
    add_common(build, true);

    CLI::App* verify = app.add_subcommand("verify", "run the full invariant battery");
    verify->add_option("config", o.config, "config file")->required();
    add_common(verify, true);

    CLI::App* equiv = app.add_subcommand("equiv", "compare two configs up to equivalence");
    equiv->add_option("config_a", o.config, "first config file")->required();
    equiv->add_option("config_b", o.config_b, "second config file")->required();
    equiv->add_option("--level", o.level, "lambda level of the comparison (default: detect)");
    equiv->add_flag("--relative", o.relative, "restrict to the marked-subspace scope");
    add_common(equiv, true);

    CLI::App* spectrum = app.add_subcommand("spectrum", "solve the integrality condition");
    spectrum->add_option("config", o.config, "config file")->required();
    add_common(spectrum, false);

    CLI::App* maslov = app.add_subcommand("maslov", "winding and gauge-trace indices");
    maslov->add_option("config", o.config, "config file")->required();
    add_common(maslov, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) return run_build(o);
        if (verify->parsed()) return run_verify(o);
        if (equiv->parsed()) return run_equiv(o);
        if (spectrum->parsed()) return run_spectrum(o);
        if (maslov->parsed()) return run_maslov(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::logic_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
