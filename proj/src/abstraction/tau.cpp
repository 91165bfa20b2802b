#include <algorithm>
#include <map>
#include <set>

#include "causabs/abstraction.hpp"
#include "causabs/inference.hpp"

namespace causabs {

const ClusterBlocks* IntraClustering::find(const std::string& cluster) const {
    for (const auto& c : clusters)
        if (c.cluster == cluster) return &c;
    return nullptr;
}

ClusterBlocks singleton_blocks(const std::string& cluster, const std::vector<Variable>& members) {
    ClusterBlocks cb{cluster, {}};
    std::vector<int> radix, d(members.size(), 0);
    for (const auto& m : members) radix.push_back(m.domain.size());
    do {
        Block b;
        std::vector<std::string> tuple;
        for (std::size_t i = 0; i < members.size(); ++i) {
            tuple.push_back(members[i].domain.values[d[i]]);
            if (i) b.label += "_";
            b.label += tuple.back();
        }
        b.values.push_back(std::move(tuple));
        cb.blocks.push_back(std::move(b));
    } while (next_digits(d, radix));
    return cb;
}

ConstructiveTau::ConstructiveTau(std::vector<Variable> low_vars, InterClustering inter, const IntraClustering& intra)
    : low_(std::move(low_vars)), inter_(std::move(inter)) {
    inter_.validate();
    for (const auto& cb : intra.clusters)
        if (inter_.find(cb.cluster) < 0) throw ValidationError("intra clustering names unknown cluster " + cb.cluster);
    for (int c = 0; c < inter_.size(); ++c) {
        const auto& cl = inter_.clusters[c];
        std::vector<int> mix, radix;
        std::vector<Variable> mvars;
        for (const auto& m : cl.members) {
            int i = low_index(m);
            mix.push_back(i);
            mvars.push_back(low_[i]);
            radix.push_back(low_[i].domain.size());
        }
        const ClusterBlocks* given = intra.find(cl.name);
        ClusterBlocks cb = given ? *given : singleton_blocks(cl.name, mvars);
        std::vector<int> img(product_size(radix), -1);
        Variable hv{cl.name, {}};
        std::vector<std::vector<std::size_t>> pre;
        std::set<std::string> labels;
        for (std::size_t h = 0; h < cb.blocks.size(); ++h) {
            const auto& b = cb.blocks[h];
            if (!labels.insert(b.label).second)
                throw ValidationError("duplicate label " + b.label + " in cluster " + cl.name);
            if (b.values.empty()) throw ValidationError("empty block " + b.label + " in cluster " + cl.name);
            hv.domain.values.push_back(b.label);
            std::vector<std::size_t> p;
            for (const auto& tuple : b.values) {
                if (tuple.size() != mix.size())
                    throw ValidationError("block " + b.label + " has a tuple of the wrong width");
                std::vector<int> d;
                for (std::size_t i = 0; i < tuple.size(); ++i) d.push_back(mvars[i].domain.index(tuple[i]));
                auto j = encode(d, radix);
                if (img[j] >= 0) throw ValidationError("cluster " + cl.name + " has overlapping blocks");
                img[j] = static_cast<int>(h);
                p.push_back(j);
            }
            std::sort(p.begin(), p.end());
            pre.push_back(std::move(p));
        }
        if (std::find(img.begin(), img.end(), -1) != img.end())
            throw ValidationError("blocks of cluster " + cl.name + " do not cover its domain");
        member_ix_.push_back(std::move(mix));
        radix_.push_back(std::move(radix));
        image_.push_back(std::move(img));
        pre_.push_back(std::move(pre));
        high_.push_back(std::move(hv));
        intra_.clusters.push_back(std::move(cb));
    }
}

int ConstructiveTau::low_index(const std::string& name) const {
    for (std::size_t i = 0; i < low_.size(); ++i)
        if (low_[i].name == name) return static_cast<int>(i);
    throw ValidationError("unknown low-level variable " + name);
}

int ConstructiveTau::image_of(int c, const std::vector<int>& low_values) const {
    const auto& m = member_ix_[c];
    std::size_t j = 0;
    for (std::size_t i = 0; i < m.size(); ++i) j = j * radix_[c][i] + low_values[m[i]];
    return image_[c][j];
}

std::vector<int> ConstructiveTau::decode_joint(int c, std::size_t joint) const {
    std::vector<int> d;
    decode(joint, radix_[c], d);
    return d;
}

namespace {

// Clusters covered exactly by the named variables, in cluster order.
std::vector<int> covered_clusters(const ConstructiveTau& tau, const std::set<std::string>& names) {
    std::set<int> cs;
    for (const auto& n : names) {
        int c = tau.inter().cluster_of(n);
        if (c < 0) throw ValidationError("variable " + n + " is not in any cluster");
        cs.insert(c);
    }
    for (int c : cs)
        for (const auto& m : tau.inter().clusters[c].members)
            if (!names.count(m))
                throw ValidationError("assignment covers part of cluster " + tau.inter().clusters[c].name);
    return {cs.begin(), cs.end()};
}

// High value index of each covered cluster under a low assignment.
std::vector<std::pair<int, int>> images(const ConstructiveTau& tau, const std::vector<Setting>& low) {
    std::map<std::string, std::string> m;
    std::set<std::string> names;
    for (const auto& [k, v] : low) {
        if (!m.emplace(k, v).second) throw ValidationError("variable " + k + " assigned twice");
        names.insert(k);
    }
    std::vector<std::pair<int, int>> out;
    for (int c : covered_clusters(tau, names)) {
        std::vector<int> d;
        for (int i : tau.members(c)) d.push_back(tau.low_vars()[i].domain.index(m[tau.low_vars()[i].name]));
        out.emplace_back(c, tau.image(c, encode(d, tau.radix(c))));
    }
    return out;
}

std::vector<Setting> high_settings(const ConstructiveTau& tau, const std::vector<std::pair<int, int>>& img) {
    std::vector<Setting> out;
    for (const auto& [c, h] : img) out.emplace_back(tau.high_vars()[c].name, tau.high_vars()[c].domain.values[h]);
    return out;
}

std::vector<std::pair<int, int>> high_images(const ConstructiveTau& tau, const std::vector<Setting>& high) {
    std::vector<std::pair<int, int>> out;
    for (const auto& [k, v] : high) {
        int c = tau.inter().find(k);
        if (c < 0) throw ValidationError("unknown high-level variable " + k);
        out.emplace_back(c, tau.high_vars()[c].domain.index(v));
    }
    return out;
}

std::vector<Setting> representative(const ConstructiveTau& tau, const std::vector<std::pair<int, int>>& img) {
    std::vector<Setting> out;
    for (const auto& [c, h] : img) {
        auto d = tau.decode_joint(c, tau.preimage(c, h).front());
        const auto& m = tau.members(c);
        for (std::size_t i = 0; i < m.size(); ++i)
            out.emplace_back(tau.low_vars()[m[i]].name, tau.low_vars()[m[i]].domain.values[d[i]]);
    }
    return out;
}

std::vector<Term> lift_terms(const ConstructiveTau& tau, const std::vector<Term>& terms) {
    std::vector<Term> out;
    for (const auto& t : terms)
        out.push_back(Term{high_settings(tau, images(tau, t.outcome)), high_settings(tau, images(tau, t.intervention))});
    return out;
}

std::vector<LowTerm> lower_terms(const ConstructiveTau& tau, const std::vector<Term>& terms) {
    std::vector<LowTerm> out;
    for (const auto& t : terms)
        out.push_back(LowTerm{representative(tau, high_images(tau, t.intervention)), high_images(tau, t.outcome)});
    return out;
}

std::vector<LowTerm> preimage_terms(const ConstructiveTau& tau, const std::vector<Term>& terms) {
    std::vector<LowTerm> out;
    for (const auto& t : terms) {
        images(tau, t.intervention);  // alignment check
        out.push_back(LowTerm{t.intervention, images(tau, t.outcome)});
    }
    return out;
}

std::vector<Term> lift_low_terms(const ConstructiveTau& tau, const std::vector<LowTerm>& terms) {
    std::vector<Term> out;
    for (const auto& t : terms)
        out.push_back(Term{high_settings(tau, t.outcome), high_settings(tau, images(tau, t.intervention))});
    return out;
}

struct LowWorld {
    std::vector<int> intervention;
    std::vector<std::pair<int, int>> outcome;
};

std::vector<LowWorld> resolve_low(const ConstructiveTau& tau, const std::vector<LowTerm>& terms) {
    std::vector<LowWorld> out;
    for (const auto& t : terms) {
        LowWorld w;
        w.intervention.assign(tau.low_vars().size(), -1);
        for (const auto& [k, v] : t.intervention) {
            int i = tau.low_index(k);
            w.intervention[i] = tau.low_vars()[i].domain.index(v);
        }
        w.outcome = t.outcome;
        out.push_back(std::move(w));
    }
    return out;
}

} // namespace

ConstructiveTau build_tau(const std::vector<Variable>& low_vars, const InterClustering& inter,
                          const IntraClustering& intra) {
    return ConstructiveTau(low_vars, inter, intra);
}

ValueMap ConstructiveTau::apply(const ValueMap& low) const {
    ValueMap out;
    for (const auto& [k, v] : high_settings(*this, images(*this, std::vector<Setting>(low.begin(), low.end()))))
        out[k] = v;
    return out;
}

ValueMap apply_tau(const ConstructiveTau& tau, const ValueMap& low) { return tau.apply(low); }

CtfQuery lift_query(const ConstructiveTau& tau, const CtfQuery& q_low) {
    return CtfQuery{lift_terms(tau, q_low.terms), lift_terms(tau, q_low.given)};
}

LoweredQuery lower_query(const ConstructiveTau& tau, const CtfQuery& q_high) {
    return LoweredQuery{lower_terms(tau, q_high.terms), lower_terms(tau, q_high.given)};
}

LoweredQuery preimage_event(const ConstructiveTau& tau, const CtfQuery& q_low) {
    return LoweredQuery{preimage_terms(tau, q_low.terms), preimage_terms(tau, q_low.given)};
}

CtfQuery lift_lowered(const ConstructiveTau& tau, const LoweredQuery& lq) {
    return CtfQuery{lift_low_terms(tau, lq.terms), lift_low_terms(tau, lq.given)};
}

double lowered_prob(const Scm& m_low, const ConstructiveTau& tau, const LoweredQuery& lq, const EvalOptions& opt) {
    if (m_low.variables() != tau.low_vars()) throw ValidationError("abstraction was built for different variables");
    auto terms = resolve_low(tau, lq.terms), given = resolve_low(tau, lq.given);
    double cost = m_low.unit_count() * static_cast<double>(std::max<std::size_t>(1, terms.size() + given.size()));
    if (cost > opt.budget) throw BudgetError("preimage query exceeds the enumeration budget");
    auto holds = [&](const LowWorld& w, const std::vector<int>& u) {
        auto val = evaluate_unit(m_low, u, w.intervention);
        for (const auto& [c, h] : w.outcome)
            if (tau.image_of(c, val) != h) return false;
        return true;
    };
    double num = 0, den = 0;
    for_each_unit(m_low, [&](const std::vector<int>& u, double p) {
        for (const auto& w : given)
            if (!holds(w, u)) return;
        den += p;
        for (const auto& w : terms)
            if (!holds(w, u)) return;
        num += p;
    });
    if (given.empty()) return num;
    if (den <= 0) throw UndefinedConditional("conditioning event has probability zero");
    return num / den;
}

} // namespace causabs
