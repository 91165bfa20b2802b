#include "causabs/abstraction_io.hpp"

namespace causabs {

InterClustering inter_from_json(const json& j) {
    InterClustering out;
    for (const auto& c : j) {
        Cluster cl;
        for (const auto& m : c.at("members")) cl.members.push_back(m.get<std::string>());
        cl.name = c.contains("name") ? c.at("name").get<std::string>() : default_cluster_name(cl.members);
        out.clusters.push_back(std::move(cl));
    }
    out.validate();
    return out;
}

IntraClustering intra_from_json(const json& j) {
    IntraClustering out;
    for (const auto& c : j) {
        ClusterBlocks cb;
        cb.cluster = c.at("cluster").get<std::string>();
        for (const auto& b : c.at("blocks")) {
            Block blk;
            blk.label = value_from_json(b.at("label"));
            for (const auto& t : b.at("values")) {
                std::vector<std::string> tuple;
                if (t.is_array())
                    for (const auto& v : t) tuple.push_back(value_from_json(v));
                else
                    tuple.push_back(value_from_json(t));
                blk.values.push_back(std::move(tuple));
            }
            cb.blocks.push_back(std::move(blk));
        }
        out.clusters.push_back(std::move(cb));
    }
    return out;
}

json clusters_to_json(const InterClustering& inter, const IntraClustering& intra) {
    json ji = json::array();
    for (const auto& c : inter.clusters) ji.push_back({{"name", c.name}, {"members", c.members}});
    json jd = json::array();
    for (const auto& cb : intra.clusters) {
        json blocks = json::array();
        for (const auto& b : cb.blocks) {
            json vals = json::array();
            for (const auto& t : b.values) {
                json tj = json::array();
                for (const auto& v : t) tj.push_back(value_to_json(v));
                vals.push_back(std::move(tj));
            }
            blocks.push_back({{"label", value_to_json(b.label)}, {"values", std::move(vals)}});
        }
        jd.push_back({{"cluster", cb.cluster}, {"blocks", std::move(blocks)}});
    }
    return {{"inter", std::move(ji)}, {"intra", std::move(jd)}};
}

json aic_report_to_json(const AicReport& r, const ConstructiveTau& tau) {
    json j = {{"holds", r.holds}};
    if (r.witness) {
        const auto& w = *r.witness;
        j["witness"] = {{"cluster", w.cluster >= 0 ? tau.inter().clusters[w.cluster].name : ""},
                        {"v1", value_map_to_json(w.v1)},
                        {"v2", value_map_to_json(w.v2)},
                        {"u", value_map_to_json(w.u)},
                        {"out1", value_to_json(w.out1)},
                        {"out2", value_to_json(w.out2)}};
    }
    return j;
}

json consistency_to_json(const ConsistencyReport& r) {
    return {{"consistent", r.consistent}, {"low", r.low}, {"high", r.high}, {"detail", r.detail}};
}

} // namespace causabs
