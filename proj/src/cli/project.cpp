#include "causabs/project.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "causabs/abstraction_io.hpp"
#include "causabs/errors.hpp"
#include "causabs/inference.hpp"
#include "causabs/ncm_io.hpp"

namespace causabs {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}

Term structural_term(const json& j, const char* key, bool outcome) {
    Term t;
    if (!j.contains(key)) return t;
    for (const auto& v : j.at(key)) (outcome ? t.outcome : t.intervention).push_back({v.get<std::string>(), "*"});
    return t;
}

CtfQuery query_from_json(const json& q) {
    if (q.is_string()) return parse_query(q.get<std::string>());
    if (!q.is_object() || !q.contains("outcome")) throw ValidationError("query must be a string or {\"outcome\", \"do\"}");
    Term t = structural_term(q, "outcome", true);
    t.intervention = structural_term(q, "do", false).intervention;
    return CtfQuery{{t}, {}};
}

std::vector<Variable> members_of(const Project& p, const Cluster& c) {
    const Scm& scm = need_scm(p);
    std::vector<Variable> out;
    for (const auto& m : c.members) out.push_back(scm.var(scm.var_index(m)));
    return out;
}

ClusterBlocks blocks_from_generators(const Project& p, const std::string& cluster, const json& gens) {
    const auto& inter = need_clusters(p);
    int c = inter.find(cluster);
    if (c < 0) throw ValidationError("generators name an unknown cluster " + cluster);
    auto members = members_of(p, inter.clusters[c]);
    auto pos = [&](const std::string& name) {
        for (std::size_t i = 0; i < members.size(); ++i)
            if (members[i].name == name) return static_cast<int>(i);
        throw ValidationError(name + " is not a member of cluster " + cluster);
    };
    std::vector<Permutation> perms;
    for (const auto& g : gens) {
        auto kind = g.at(0).get<std::string>();
        if (kind == "swap") {
            if (g.size() != 3) throw ValidationError("swap generator takes two members");
            perms.push_back(swap_generator(members, pos(g.at(1).get<std::string>()), pos(g.at(2).get<std::string>())));
        } else if (kind == "cycle") {
            perms.push_back(cyclic_generator(members));
        } else if (kind == "permutation") {
            Permutation perm;
            for (const auto& x : g.at(1)) perm.push_back(x.get<std::size_t>());
            perms.push_back(perm);
        } else {
            throw ValidationError("unknown generator kind " + kind);
        }
    }
    return orbit_intra_clustering(cluster, members, perms);
}

InterventionalPmf dataset_from_json(const Project& p, const json& d) {
    InterventionalPmf out;
    if (d.contains("do")) out.intervention = value_map_from_json(d.at("do"));
    if (d.contains("pmf")) {
        out.pmf = pmf_from_json(d.at("pmf"));
    } else if (d.contains("samples")) {
        std::filesystem::path f = d.at("samples").get<std::string>();
        if (f.is_relative()) f = std::filesystem::path(p.dir) / f;
        std::vector<Variable> vars;
        if (p.scm) vars = p.scm->variables();
        out.pmf = read_sample_file(f.string(), p.scm ? &vars : nullptr);
    } else if (p.scm) {
        out.pmf = layer_pmf(*p.scm, out.intervention);
    } else {
        throw ValidationError("dataset needs \"pmf\", \"samples\" or an \"scm\" section");
    }
    return out;
}

} // namespace

Pmf read_sample_file(const std::string& path, const std::vector<Variable>* vars) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open sample file " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("sample file " + path + " is empty");
    auto header = split_csv(line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto r = split_csv(line);
        if (r.size() != header.size()) throw ValidationError("sample row width differs from the header in " + path);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ValidationError("sample file " + path + " has no rows");
    std::vector<Variable> pv;
    for (std::size_t k = 0; k < header.size(); ++k) {
        const Variable* known = nullptr;
        if (vars)
            for (const auto& v : *vars)
                if (v.name == header[k]) known = &v;
        if (known) {
            pv.push_back(*known);
            continue;
        }
        std::set<std::string> seen;
        for (const auto& r : rows) seen.insert(r[k]);
        std::vector<std::string> vals(seen.begin(), seen.end());
        // numeric spellings sort numerically
        bool numeric = std::all_of(vals.begin(), vals.end(), [](const std::string& s) {
            return !s.empty() && s.find_first_not_of("-0123456789") == std::string::npos;
        });
        if (numeric) std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return std::stol(a) < std::stol(b); });
        pv.push_back(Variable{header[k], Domain{vals}});
    }
    Pmf p = Pmf::zeros(pv);
    auto radix = p.radix();
    std::vector<int> d(pv.size());
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < pv.size(); ++k) d[k] = pv[k].domain.index(r[k]);
        p.prob[encode(d, radix)] += 1.0;
    }
    for (auto& x : p.prob) x /= static_cast<double>(rows.size());
    return p;
}

Project project_from_json(const json& j, const std::string& dir) {
    if (!j.is_object()) throw ValidationError("project must be a JSON object");
    Project p;
    p.dir = dir;
    if (j.contains("variables") && j.contains("mechanisms")) {
        p.scm = scm_from_json(j);
        p.diagram = induced_diagram(*p.scm);
        p.datasets.push_back({{}, layer_pmf(*p.scm, {})});
        return p;
    }
    static const std::set<std::string> known = {"scm", "diagram", "cdag", "noncausal", "clusters",
                                                "queries", "datasets", "train", "tau"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ValidationError("unknown project section " + k);
    if (j.contains("scm")) p.scm = scm_from_json(j.at("scm"));
    if (j.contains("diagram")) {
        p.diagram = diagram_from_json(j.at("diagram"));
        if (j.at("diagram").contains("noncausal")) p.noncausal = noncausal_from_json(j.at("diagram"));
    } else if (p.scm) {
        p.diagram = induced_diagram(*p.scm);
    }
    if (j.contains("noncausal")) p.noncausal = noncausal_from_json(j.at("noncausal"));
    if (j.contains("cdag")) p.cdag = diagram_from_json(j.at("cdag"));
    if (j.contains("clusters")) {
        const auto& c = j.at("clusters");
        p.inter = inter_from_json(c.at("inter"));
        if (c.contains("intra")) p.intra = intra_from_json(c.at("intra"));
        if (c.contains("generators"))
            for (const auto& [name, gens] : c.at("generators").items()) {
                if (p.intra.find(name)) throw ValidationError("cluster " + name + " has both blocks and generators");
                p.intra.clusters.push_back(blocks_from_generators(p, name, gens));
            }
    }
    if (j.contains("queries"))
        for (const auto& q : j.at("queries")) p.queries.push_back(query_from_json(q));
    if (j.contains("train")) p.train = train_config_from_json(j.at("train"));
    if (j.contains("datasets")) {
        for (const auto& d : j.at("datasets")) p.datasets.push_back(dataset_from_json(p, d));
    } else if (p.scm) {
        p.datasets.push_back({{}, layer_pmf(*p.scm, {})});
    }
    return p;
}

Project load_project(const std::string& path) {
    auto dir = std::filesystem::path(path).parent_path().string();
    return project_from_json(read_json_file(path), dir.empty() ? "." : dir);
}

const Scm& need_scm(const Project& p) {
    if (!p.scm) throw ValidationError("project has no \"scm\" section");
    return *p.scm;
}

const InterClustering& need_clusters(const Project& p) {
    if (!p.inter) throw ValidationError("project has no \"clusters\" section");
    return *p.inter;
}

const CausalDiagram& need_diagram(const Project& p) {
    if (!p.diagram) throw ValidationError("project has no \"diagram\" or \"scm\" section");
    return *p.diagram;
}

Cdag need_cdag(const Project& p) {
    if (p.cdag) return *p.cdag;
    return induce_cdag(need_diagram(p), need_clusters(p));
}

std::vector<Variable> low_variables(const Project& p) {
    if (p.scm) return p.scm->variables();
    if (!p.datasets.empty()) return p.datasets.front().pmf.vars;
    throw ValidationError("project has neither an \"scm\" nor datasets to read variables from");
}

} // namespace causabs
