#pragma once

/*
 * Machine-readable run reports. All exact values serialize as strings
 * ("3/2", "1/2+1/3i", "2*pi"); the only floating-point fields are the
 * winding residual diagnostics. Key order is fixed by construction, so a
 * rerun on the same input produces byte-identical output. Timing is attached
 * only on request, for the same reason.
 */

#include "starprod/adapted.hpp"
#include "starprod/config.hpp"
#include "starprod/equivalence.hpp"
#include "starprod/fedosov.hpp"
#include "starprod/loops.hpp"
#include "starprod/verify.hpp"

#include "json.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace starprod {

using Json = nlohmann::ordered_json;

inline std::string rat_str(const BigRational& r) { return r.str(); }

// Derivative exponent tuple as a compact string, "1,0" for d/dx1 in dim 2.
inline std::string exponents_str(const MultiIndex& m, int dim) {
    std::string out;
    for (int a = 0; a < dim; ++a) {
        if (a) out += ",";
        out += std::to_string(static_cast<int>(m[a]));
    }
    return out;
}

inline Json matrix_json(const Mat& m) {
    Json rows = Json::array();
    for (const auto& row : m) {
        Json r = Json::array();
        for (const auto& c : row) r.push_back(c.str());
        rows.push_back(std::move(r));
    }
    return rows;
}

inline Json form_json(const ScalarForm& F) {
    Json arr = Json::array();
    for (const auto& [idx, c] : F.components()) {
        Json entry = Json::object();
        Json axes = Json::array();
        for (int a = 0; a < static_cast<int>(idx.count); ++a) axes.push_back(idx.axes[a] + 1);
        entry["axes"] = std::move(axes);
        entry["coeff"] = c.str();
        arr.push_back(std::move(entry));
    }
    return arr;
}

inline Json tables_json(const StarTables& t) {
    Json levels = Json::object();
    for (unsigned k = 0; k <= t.order(); ++k) {
        Json ops = Json::array();
        for (const auto& [key, c] : t.level(k).ops()) {
            Json entry = Json::object();
            entry["left"] = exponents_str(key[0], t.dim());
            entry["right"] = exponents_str(key[1], t.dim());
            entry["coeff"] = c.str();
            ops.push_back(std::move(entry));
        }
        levels[std::to_string(k)] = std::move(ops);
    }
    return levels;
}

inline Json setup_json(const RunConfig& cfg) {
    const FedosovProblem& p = cfg.problem;
    Json s = Json::object();
    s["dim"] = p.chart.dim;
    s["lambda_order"] = static_cast<int>(p.lambda_order);
    s["degree_cap"] = static_cast<int>(p.effective_cap());
    s["omega"] = cfg.omega_explicit ? matrix_json(p.chart.form) : Json("darboux");
    s["ordering"] = p.ordering.mode == OrderingMode::weyl ? "weyl" : "standard";
    Json gamma = Json::object();
    for (const auto& [idx, g] : p.connection.entries()) {
        std::string key = std::to_string(idx[0] + 1) + "," + std::to_string(idx[1] + 1) + "," +
                          std::to_string(idx[2] + 1);
        gamma[key] = g.str();
    }
    s["christoffel"] = std::move(gamma);
    Json forms = Json::object();
    for (const auto& [k, F] : p.omega) forms[std::to_string(k)] = form_json(F);
    s["normalizing_forms"] = std::move(forms);
    Json section = Json::array();
    for (const auto& line : cfg.section_lines) section.push_back(line);
    s["section"] = std::move(section);
    if (cfg.has_lagrangian) {
        Json L = Json::object();
        Json axes = Json::array();
        for (int a : cfg.split.p_axes) axes.push_back(a + 1);
        L["p_axes"] = std::move(axes);
        L["h1_trivial"] = cfg.h1_trivial;
        s["lagrangian"] = std::move(L);
    } else {
        s["lagrangian"] = nullptr;
    }
    return s;
}

inline Json conventions_json(const RunConfig& cfg) {
    Json c = Json::object();
    c["poisson_bracket"] = "{x_q, x_p} = +1 for a marked pair (q, p)";
    c["symplectic_form"] = "omega = sum_i dq^i wedge dp_i in darboux charts";
    c["weyl_pairing"] = "mu^{jk} = omega^{jk}";
    c["standard_pairing"] = "mu^{jk} = 2*omega^{jk} for j marked, k unmarked; else 0";
    c["fiber_commutator"] = "xi_q xi_p - xi_p xi_q = -i*lambda";
    c["generator_action"] = "p . phi = i*lambda * dphi/dq";
    c["generator_action_alt"] = "p . phi = -2*nu * dphi/dq with nu = lambda/(2i)";
    c["section_degrees"] =
        "section monomials of total degree >= 3 accepted; degree-3 use is flagged";
    c["maslov_weight"] = cfg.bs.present ? rat_str(cfg.bs.problem.maslov_weight) : "1/4";
    return c;
}

inline Json solution_json(const FedosovSolution& sol) {
    Json s = Json::object();
    s["degree_cap"] = static_cast<int>(sol.degree_cap);
    s["budget"] = static_cast<int>(sol.budget);
    s["certified_degree"] = static_cast<int>(sol.certified_degree);
    s["residual_zero"] = sol.residual_clean;
    s["section_degree_three"] = sol.degree3_normalization;
    return s;
}

inline Json checks_json(const std::vector<CheckResult>& checks) {
    Json arr = Json::array();
    for (const auto& c : checks) {
        Json entry = Json::object();
        entry["name"] = c.name;
        entry["pass"] = c.pass;
        entry["detail"] = c.detail;
        arr.push_back(std::move(entry));
    }
    return arr;
}

inline Json equivalence_json(const EquivalenceOutcome& out, int dim) {
    Json e = Json::object();
    e["level"] = static_cast<int>(out.level);
    e["relative"] = out.relative_scope;
    e["equivalent"] = out.equivalent;
    e["two_form"] = form_json(out.split.two_form);
    e["closed"] = out.split.closed;
    e["coboundary_certified"] = out.split.coboundary_certified;
    Json alpha = Json::array();
    for (int a = 0; a < dim; ++a) alpha.push_back(out.split.alpha.coeff_at({a}).str());
    e["alpha"] = std::move(alpha);
    e["obstruction"] = form_json(out.obstruction);
    e["generator_jump"] = static_cast<int>(out.map.jump());
    e["identity_map"] = out.map.is_identity();
    e["intertwine_certified"] = out.intertwine_certified;
    e["transported_ideal_pass"] =
        out.relative_scope ? Json(out.transported_ideal_pass) : Json(nullptr);
    return e;
}

// "key: value" rendering of the same tree for terminal use.
inline void text_dump(const Json& j, std::ostream& os, int indent = 0) {
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (v.is_object() || (v.is_array() && !v.empty() && !v[0].is_primitive())) {
                os << pad << k << ":\n";
                text_dump(v, os, indent + 1);
            } else if (v.is_array()) {
                os << pad << k << ": " << v.dump() << "\n";
            } else if (v.is_string()) {
                os << pad << k << ": " << v.get<std::string>() << "\n";
            } else {
                os << pad << k << ": " << v.dump() << "\n";
            }
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (v.is_primitive()) {
                os << pad << "- " << v.dump() << "\n";
            } else {
                os << pad << "-\n";
                text_dump(v, os, indent + 1);
            }
        }
    } else {
        os << pad << j.dump() << "\n";
    }
}

inline std::string render_report(const Json& j, const std::string& format) {
    if (format == "json") return j.dump(2) + "\n";
    std::ostringstream os;
    text_dump(j, os);
    return os.str();
}

// Minimal structural validator for the shipped report schema: supports type,
// required, properties, additionalProperties (bool or schema), items, enum,
// oneOf, and $ref into #/$defs, which is all the schema uses.
inline void schema_check_at(const Json& root, const Json& schema, const Json& doc,
                            const std::string& path, std::vector<std::string>& errors);

inline void schema_check_at(const Json& root, const Json& schema_in, const Json& doc,
                            const std::string& path, std::vector<std::string>& errors) {
    const Json* resolved = &schema_in;
    if (schema_in.contains("$ref")) {
        const std::string ref = schema_in["$ref"].get<std::string>();
        const std::string prefix = "#/$defs/";
        if (ref.rfind(prefix, 0) != 0 || !root.contains("$defs") ||
            !root["$defs"].contains(ref.substr(prefix.size()))) {
            errors.push_back(path + ": unresolvable $ref " + ref);
            return;
        }
        resolved = &root["$defs"][ref.substr(prefix.size())];
    }
    const Json& schema = *resolved;
    if (schema.contains("oneOf")) {
        size_t hits = 0;
        for (const auto& alt : schema["oneOf"]) {
            std::vector<std::string> sub;
            schema_check_at(root, alt, doc, path, sub);
            if (sub.empty()) ++hits;
        }
        if (hits != 1)
            errors.push_back(path + ": matched " + std::to_string(hits) +
                             " oneOf branches, expected exactly 1");
        return;
    }
    if (schema.contains("type")) {
        const std::string t = schema["type"].get<std::string>();
        bool ok = (t == "object" && doc.is_object()) || (t == "array" && doc.is_array()) ||
                  (t == "string" && doc.is_string()) || (t == "boolean" && doc.is_boolean()) ||
                  (t == "integer" && doc.is_number_integer()) ||
                  (t == "number" && doc.is_number()) || (t == "null" && doc.is_null());
        if (!ok) {
            errors.push_back(path + ": expected type " + t);
            return;
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& v : schema["enum"]) ok = ok || v == doc;
        if (!ok) errors.push_back(path + ": value not in enum");
    }
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const auto& k : schema["required"])
                if (!doc.contains(k.get<std::string>()))
                    errors.push_back(path + ": missing required key " + k.get<std::string>());
        const Json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
        for (const auto& [k, v] : doc.items()) {
            if (props && props->contains(k)) {
                schema_check_at(root, (*props)[k], v, path + "." + k, errors);
            } else if (schema.contains("additionalProperties")) {
                const Json& ap = schema["additionalProperties"];
                if (ap.is_boolean()) {
                    if (!ap.get<bool>())
                        errors.push_back(path + ": unexpected key " + k);
                } else {
                    schema_check_at(root, ap, v, path + "." + k, errors);
                }
            }
        }
    }
    if (doc.is_array() && schema.contains("items"))
        for (size_t i = 0; i < doc.size(); ++i)
            schema_check_at(root, schema["items"], doc[i], path + "[" + std::to_string(i) + "]",
                            errors);
}

inline std::vector<std::string> schema_check(const Json& schema, const Json& doc) {
    std::vector<std::string> errors;
    schema_check_at(schema, schema, doc, "$", errors);
    return errors;
}

}  // namespace starprod
