#include <cmath>
#include <limits>

#include "causabs/errors.hpp"
#include "causabs/ncm_io.hpp"

namespace causabs {

namespace {

json logit(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
double logit_from(const json& j) { return j.is_null() ? -std::numeric_limits<double>::infinity() : j.get<double>(); }

json num_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

} // namespace

json train_config_to_json(const TrainConfig& c) {
    return {{"lr", c.lr},
            {"iterations", c.iterations},
            {"optimizer", c.optimizer == Optimizer::Adam ? "adam" : "gd"},
            {"lambda_start", c.lambda_start},
            {"lambda_end", c.lambda_end},
            {"seed", c.seed},
            {"n_c", c.n_c},
            {"init_scale", c.init_scale},
            {"record_every", c.record_every}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
    if (!j.is_object()) throw ValidationError("train config must be an object");
    for (const auto& [k, v] : j.items()) {
        if (k == "lr") c.lr = v.get<double>();
        else if (k == "iterations") c.iterations = v.get<int>();
        else if (k == "optimizer") {
            auto s = v.get<std::string>();
            if (s == "adam") c.optimizer = Optimizer::Adam;
            else if (s == "gd") c.optimizer = Optimizer::Gd;
            else throw ValidationError("unknown optimizer " + s);
        } else if (k == "lambda_start") c.lambda_start = v.get<double>();
        else if (k == "lambda_end") c.lambda_end = v.get<double>();
        else if (k == "seed") c.seed = v.get<std::uint64_t>();
        else if (k == "n_c") c.n_c = v.get<int>();
        else if (k == "init_scale") c.init_scale = v.get<double>();
        else if (k == "record_every") c.record_every = v.get<int>();
        else throw ValidationError("unknown train config key " + k);
    }
    if (c.lambda_start < 0 || c.lambda_end < 0) throw ValidationError("lambda must be non-negative");
    if (c.n_c < 0) throw ValidationError("n_c must be at least 1 (or 0 for the default)");
    if (c.lr <= 0) throw ValidationError("lr must be positive");
    return c;
}

json ncm_to_json(const Ncm& m, const TrainConfig& cfg) {
    json j;
    j["graph"] = graph_to_json(m.graph());
    json doms = json::object();
    for (int v = 0; v < m.n_nodes(); ++v) doms[m.names()[v]] = domain_to_json(m.domain(v));
    j["domains"] = doms;
    json cl = json::array(), cll = json::array();
    for (std::size_t c = 0; c < m.cliques().size(); ++c) {
        json names = json::array();
        for (int v : m.cliques()[c]) names.push_back(m.names()[v]);
        cl.push_back(names);
        json l = json::array();
        const auto& x = m.clique_logits(static_cast<int>(c));
        for (int i = 0; i < x.size(); ++i) l.push_back(logit(x[i]));
        cll.push_back(l);
    }
    j["cliques"] = cl;
    j["clique_logits"] = cll;
    json resp = json::object();
    for (int v = 0; v < m.n_nodes(); ++v) {
        const auto& x = m.response_logits(v);
        json rows = json::array();
        for (int r = 0; r < x.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < x.cols(); ++c) row.push_back(logit(x(r, c)));
            rows.push_back(row);
        }
        resp[m.names()[v]] = rows;
    }
    j["response_logits"] = resp;
    j["config"] = train_config_to_json(cfg);
    return j;
}

Ncm ncm_from_json(const json& j, TrainConfig* cfg_out) {
    TrainConfig cfg = j.contains("config") ? train_config_from_json(j.at("config")) : TrainConfig{};
    Cdag g = diagram_from_json(j.at("graph"));
    std::vector<Domain> doms;
    for (const auto& n : g.nodes()) doms.push_back(domain_from_json(j.at("domains").at(n)));
    Ncm m(g, doms, cfg);
    const auto& cll = j.at("clique_logits");
    if (cll.size() != m.cliques().size()) throw ValidationError("checkpoint clique count does not match the graph");
    for (std::size_t c = 0; c < cll.size(); ++c) {
        int ci = static_cast<int>(c);
        if (static_cast<int>(cll[c].size()) != m.clique_size(ci)) m.resize_clique(ci, static_cast<int>(cll[c].size()));
        for (std::size_t i = 0; i < cll[c].size(); ++i) m.clique_logits(ci)[i] = logit_from(cll[c][i]);
    }
    for (int v = 0; v < m.n_nodes(); ++v) {
        const auto& rows = j.at("response_logits").at(m.names()[v]);
        auto& x = m.response_logits(v);
        if (static_cast<long>(rows.size()) != x.rows()) throw ValidationError("response table size mismatch for " + m.names()[v]);
        for (int r = 0; r < x.rows(); ++r) {
            if (static_cast<long>(rows[r].size()) != x.cols()) throw ValidationError("response row size mismatch for " + m.names()[v]);
            for (int c = 0; c < x.cols(); ++c) x(r, c) = logit_from(rows[r][c]);
        }
    }
    if (cfg_out) *cfg_out = cfg;
    return m;
}

json fit_result_to_json(const FitResult& r) {
    json s = json::array();
    for (const auto& p : r.series)
        s.push_back({{"iteration", p.iteration}, {"data_loss", p.data_loss}, {"query_value", num_or_null(p.query_value)}, {"lambda", p.lambda}});
    json j = {{"initial_data_loss", r.initial_data_loss}, {"data_loss", r.data_loss}, {"data_entropy", r.data_entropy}, {"series", s}};
    j["query_value"] = r.query_value ? json(*r.query_value) : json(nullptr);
    return j;
}

} // namespace causabs
