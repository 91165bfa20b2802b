#include "causabs/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "causabs/errors.hpp"
#include "causabs/expr.hpp"

namespace causabs {

namespace {

bool integer_spelling(const std::string& s) {
    if (s.empty() || s.size() > 15) return false;
    std::size_t i = s[0] == '-' ? 1 : 0;
    if (i == s.size()) return false;
    if (s[i] == '0' && s.size() > i + 1) return false;
    for (; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    return s != "-0";
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::vector<std::string> names_from_json(const json& j) {
    std::vector<std::string> out;
    if (!j.is_array()) throw ValidationError("expected a list of names");
    for (const auto& x : j) out.push_back(x.get<std::string>());
    return out;
}

std::string split_key(const std::vector<std::string>& parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ",";
        s += parts[i];
    }
    return s;
}

} // namespace

std::string value_from_json(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    if (j.is_boolean()) return j.get<bool>() ? "1" : "0";
    throw ValidationError("values must be strings or integers, got " + j.dump());
}

json value_to_json(const std::string& v) {
    if (integer_spelling(v)) return json(std::stoll(v));
    return json(v);
}

Domain domain_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("domain must be a non-empty list");
    Domain d;
    for (const auto& x : j) d.values.push_back(value_from_json(x));
    return d;
}

json domain_to_json(const Domain& d) {
    json a = json::array();
    for (const auto& v : d.values) a.push_back(value_to_json(v));
    return a;
}

Scm scm_from_json(const json& j) {
    std::vector<Variable> vars;
    for (const auto& v : field(j, "variables"))
        vars.push_back(Variable{field(v, "name").get<std::string>(), domain_from_json(field(v, "domain"))});
    std::vector<ExogenousBlock> exo;
    if (j.contains("exogenous"))
        for (const auto& e : j.at("exogenous")) {
            ExogenousBlock b{field(e, "name").get<std::string>(), domain_from_json(field(e, "domain")), {}};
            for (const auto& p : field(e, "pmf")) b.pmf.push_back(p.get<double>());
            exo.push_back(std::move(b));
        }
    auto var_of = [&](const std::string& n) -> const Variable& {
        for (const auto& v : vars)
            if (v.name == n) return v;
        throw ValidationError("unknown variable " + n);
    };
    auto exo_of = [&](const std::string& n) -> const ExogenousBlock& {
        for (const auto& e : exo)
            if (e.name == n) return e;
        throw ValidationError("unknown exogenous " + n);
    };
    std::vector<Mechanism> mechs;
    for (const auto& m : field(j, "mechanisms")) {
        Mechanism mech;
        mech.output = field(m, "output").get<std::string>();
        if (m.contains("endo_parents")) mech.endo_parents = names_from_json(m.at("endo_parents"));
        if (m.contains("exo_parents")) mech.exo_parents = names_from_json(m.at("exo_parents"));
        const Domain& out = var_of(mech.output).domain;
        std::vector<Variable> inputs;
        for (const auto& p : mech.endo_parents) inputs.push_back(var_of(p));
        for (const auto& p : mech.exo_parents) inputs.push_back(Variable{p, exo_of(p).domain});
        if (m.contains("expr")) {
            mech.expr = m.at("expr").get<std::string>();
            mech.table = compile_expression(mech.expr, inputs, out);
        } else if (m.contains("table")) {
            const json& t = m.at("table");
            std::vector<int> radix;
            for (const auto& in : inputs) radix.push_back(in.domain.size());
            std::size_t n = product_size(radix);
            if (t.is_array()) {
                if (t.size() != n) throw ValidationError("table of " + mech.output + " has the wrong size");
                for (const auto& x : t) mech.table.push_back(out.index(value_from_json(x)));
            } else {
                mech.table.assign(n, -1);
                for (auto it = t.begin(); it != t.end(); ++it) {
                    std::vector<int> d;
                    std::stringstream ss(it.key());
                    std::string part;
                    std::size_t k = 0;
                    while (!it.key().empty() && std::getline(ss, part, ',')) {
                        if (k >= inputs.size()) throw ValidationError("table key '" + it.key() + "' too long");
                        d.push_back(inputs[k++].domain.index(part));
                    }
                    if (d.size() != inputs.size()) throw ValidationError("table key '" + it.key() + "' too short");
                    mech.table[encode(d, radix)] = out.index(value_from_json(it.value()));
                }
                for (int x : mech.table)
                    if (x < 0) throw ValidationError("mechanism table of " + mech.output + " is not total");
            }
        } else {
            throw ValidationError("mechanism of " + mech.output + " needs 'table' or 'expr'");
        }
        mechs.push_back(std::move(mech));
    }
    return Scm(std::move(vars), std::move(exo), std::move(mechs));
}

json scm_to_json(const Scm& scm) {
    json j;
    j["variables"] = json::array();
    for (const auto& v : scm.variables())
        j["variables"].push_back({{"name", v.name}, {"domain", domain_to_json(v.domain)}});
    j["exogenous"] = json::array();
    for (const auto& e : scm.exogenous())
        j["exogenous"].push_back({{"name", e.name}, {"domain", domain_to_json(e.domain)}, {"pmf", e.pmf}});
    j["mechanisms"] = json::array();
    for (int v = 0; v < scm.n_vars(); ++v) {
        const auto& m = scm.mechanism(v);
        json jm = {{"output", m.output}, {"endo_parents", m.endo_parents}, {"exo_parents", m.exo_parents}};
        if (!m.expr.empty()) {
            jm["expr"] = m.expr;
        } else {
            std::vector<int> radix;
            std::vector<const Domain*> doms;
            for (int p : scm.parents(v)) doms.push_back(&scm.var(p).domain);
            for (int e : scm.exo_parents(v)) doms.push_back(&scm.exogenous()[e].domain);
            for (auto* d : doms) radix.push_back(d->size());
            json t = json::object();
            std::vector<int> d(radix.size(), 0);
            std::size_t row = 0;
            do {
                std::vector<std::string> parts;
                for (std::size_t k = 0; k < d.size(); ++k) parts.push_back(doms[k]->values[d[k]]);
                t[split_key(parts)] = value_to_json(scm.var(v).domain.values[m.table[row++]]);
            } while (next_digits(d, radix));
            jm["table"] = t;
        }
        j["mechanisms"].push_back(jm);
    }
    return j;
}

Pmf pmf_from_json(const json& j) {
    Pmf p;
    for (const auto& v : field(j, "variables"))
        p.vars.push_back(Variable{field(v, "name").get<std::string>(), domain_from_json(field(v, "domain"))});
    for (const auto& x : field(j, "prob")) p.prob.push_back(x.get<double>());
    p.validate(1e-6);
    return p;
}

json pmf_to_json(const Pmf& p) {
    json j;
    j["variables"] = json::array();
    for (const auto& v : p.vars) j["variables"].push_back({{"name", v.name}, {"domain", domain_to_json(v.domain)}});
    j["prob"] = p.prob;
    return j;
}

CausalDiagram diagram_from_json(const json& j) {
    CausalDiagram g(names_from_json(field(j, "nodes")));
    if (j.contains("directed"))
        for (const auto& e : j.at("directed")) g.add_directed(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    if (j.contains("bidirected"))
        for (const auto& e : j.at("bidirected"))
            g.add_bidirected(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    if (!g.is_acyclic()) throw ValidationError("diagram has a directed cycle");
    return g;
}

NonCausalGraph noncausal_from_json(const json& j) {
    NonCausalGraph g(names_from_json(field(j, "nodes")));
    if (j.contains("noncausal"))
        for (const auto& e : j.at("noncausal")) g.add_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    return g;
}

json graph_to_json(const CausalDiagram& g, const NonCausalGraph* gbar) {
    json j;
    j["nodes"] = g.nodes();
    j["directed"] = json::array();
    for (const auto& [a, b] : g.directed()) j["directed"].push_back({a, b});
    j["bidirected"] = json::array();
    for (const auto& [a, b] : g.bidirected()) j["bidirected"].push_back({a, b});
    if (gbar) {
        j["noncausal"] = json::array();
        for (const auto& [a, b] : gbar->edges()) j["noncausal"].push_back({a, b});
    }
    return j;
}

ValueMap value_map_from_json(const json& j) {
    ValueMap m;
    if (j.is_null()) return m;
    if (!j.is_object()) throw ValidationError("expected an object of variable settings");
    for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = value_from_json(it.value());
    return m;
}

json value_map_to_json(const ValueMap& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = value_to_json(v);
    return j;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace causabs
