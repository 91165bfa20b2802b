#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "causabs/abstraction.hpp"
#include "causabs/inference.hpp"
#include "detail.hpp"

namespace causabs {

namespace detail {

void require_same_vars(const Scm& scm, const ConstructiveTau& tau) {
    if (scm.variables() != tau.low_vars()) throw ValidationError("abstraction was built for different variables");
}

ClusterInputs cluster_inputs(const Scm& scm, const ConstructiveTau& tau, int c) {
    std::set<int> pc, exo, seen;
    std::vector<int> stack(tau.members(c).begin(), tau.members(c).end());
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (!seen.insert(v).second) continue;
        int cv = tau.inter().cluster_of(scm.var(v).name);
        if (cv >= 0 && cv != c) {
            pc.insert(cv);
            continue;
        }
        exo.insert(scm.exo_parents(v).begin(), scm.exo_parents(v).end());
        for (int p : scm.parents(v)) stack.push_back(p);
    }
    return ClusterInputs{{pc.begin(), pc.end()}, {exo.begin(), exo.end()}};
}

std::vector<int> parent_intervention(const Scm& scm, const ConstructiveTau& tau, const std::vector<int>& parents,
                                     const std::vector<std::size_t>& joints) {
    std::vector<int> x(scm.n_vars(), -1);
    for (std::size_t k = 0; k < parents.size(); ++k) {
        auto d = tau.decode_joint(parents[k], joints[k]);
        const auto& m = tau.members(parents[k]);
        for (std::size_t i = 0; i < m.size(); ++i) x[m[i]] = d[i];
    }
    return x;
}

} // namespace detail

namespace {

ValueMap parent_values(const ConstructiveTau& tau, const std::vector<int>& x) {
    ValueMap out;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= 0) out[tau.low_vars()[i].name] = tau.low_vars()[i].domain.values[x[i]];
    return out;
}

} // namespace

AicReport check_aic(const Scm& scm, const ConstructiveTau& tau, const EvalOptions& opt) {
    detail::require_same_vars(scm, tau);
    AicReport rep;
    auto radix_u = scm.exo_radix();
    for (int c = 0; c < tau.n_clusters(); ++c) {
        auto in = detail::cluster_inputs(scm, tau, c);
        std::vector<int> pradix;
        for (int p : in.parents) pradix.push_back(static_cast<int>(product_size(tau.radix(p))));
        std::vector<int> uradix;
        for (int e : in.exo) uradix.push_back(radix_u[e]);
        double cost = static_cast<double>(product_size(pradix)) * static_cast<double>(product_size(uradix));
        if (cost > opt.budget) throw BudgetError("AIC check for cluster " + tau.inter().clusters[c].name +
                                                 " exceeds the enumeration budget");
        // Groups of parent joints by their high image, in first-seen order.
        std::map<std::vector<int>, std::vector<std::vector<std::size_t>>> groups;
        std::vector<std::vector<int>> group_order;
        std::vector<int> pj(in.parents.size(), 0);
        do {
            std::vector<int> key;
            std::vector<std::size_t> joints;
            for (std::size_t k = 0; k < in.parents.size(); ++k) {
                joints.push_back(static_cast<std::size_t>(pj[k]));
                key.push_back(tau.image(in.parents[k], joints.back()));
            }
            if (!groups.count(key)) group_order.push_back(key);
            groups[key].push_back(std::move(joints));
        } while (next_digits(pj, pradix));

        std::vector<int> u(scm.n_exo(), 0), ud(in.exo.size(), 0);
        for (const auto& key : group_order) {
            const auto& g = groups[key];
            if (g.size() < 2) continue;
            auto x0 = detail::parent_intervention(scm, tau, in.parents, g.front());
            for (std::size_t k = 1; k < g.size(); ++k) {
                auto xk = detail::parent_intervention(scm, tau, in.parents, g[k]);
                std::fill(ud.begin(), ud.end(), 0);
                do {
                    for (std::size_t e = 0; e < in.exo.size(); ++e) u[in.exo[e]] = ud[e];
                    int h0 = tau.image_of(c, evaluate_unit(scm, u, x0));
                    int hk = tau.image_of(c, evaluate_unit(scm, u, xk));
                    if (h0 == hk) continue;
                    AicWitness w;
                    w.cluster = c;
                    w.v1 = parent_values(tau, x0);
                    w.v2 = parent_values(tau, xk);
                    for (int e : in.exo) w.u[scm.exogenous()[e].name] = scm.exogenous()[e].domain.values[u[e]];
                    w.out1 = tau.high_vars()[c].domain.values[h0];
                    w.out2 = tau.high_vars()[c].domain.values[hk];
                    rep.holds = false;
                    rep.witness = std::move(w);
                    return rep;
                } while (next_digits(ud, uradix));
            }
        }
    }
    return rep;
}

namespace {

// Pushforward of a low pmf onto the high variables.
std::vector<double> push(const Pmf& p, const ConstructiveTau& tau, std::vector<int>& hradix) {
    std::vector<int> col(tau.low_vars().size(), -1);
    for (std::size_t i = 0; i < tau.low_vars().size(); ++i) {
        int k = p.var_index(tau.low_vars()[i].name);
        if (k < 0 && tau.inter().cluster_of(tau.low_vars()[i].name) >= 0)
            throw ValidationError("dataset misses clustered variable " + tau.low_vars()[i].name);
        col[i] = k;
    }
    hradix.clear();
    for (const auto& h : tau.high_vars()) hradix.push_back(h.domain.size());
    std::vector<double> out(product_size(hradix), 0.0);
    auto radix = p.radix();
    std::vector<int> d, full(tau.low_vars().size(), 0), hd(hradix.size());
    for (std::size_t j = 0; j < p.prob.size(); ++j) {
        if (p.prob[j] == 0) continue;
        decode(j, radix, d);
        for (std::size_t i = 0; i < full.size(); ++i) {
            if (col[i] < 0) continue;
            int v = tau.low_vars()[i].domain.index(p.vars[col[i]].domain.values[d[col[i]]]);
            full[i] = v;
        }
        for (int c = 0; c < tau.n_clusters(); ++c) hd[c] = tau.image_of(c, full);
        out[encode(hd, hradix)] += p.prob[j];
    }
    return out;
}

} // namespace

Pmf push_pmf(const ConstructiveTau& tau, const Pmf& low) {
    std::vector<int> hradix;
    Pmf out{tau.high_vars(), push(low, tau, hradix)};
    return out;
}

InterventionalPmf push_dataset(const ConstructiveTau& tau, const InterventionalPmf& low) {
    return {apply_tau(tau, low.intervention), push_pmf(tau, low.pmf)};
}

namespace {

// P(. | x) for a low assignment x; false when x has zero mass.
bool condition(const Pmf& p, const ValueMap& x, Pmf& out) {
    std::vector<int> cols, vals;
    for (const auto& [k, v] : x) {
        int i = p.var_index(k);
        if (i < 0) throw ValidationError("dataset misses variable " + k);
        cols.push_back(i);
        vals.push_back(p.vars[i].domain.index(v));
    }
    out = p;
    auto radix = p.radix();
    std::vector<int> d;
    double mass = 0;
    for (std::size_t j = 0; j < out.prob.size(); ++j) {
        decode(j, radix, d);
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (d[cols[k]] != vals[k]) out.prob[j] = 0;
        mass += out.prob[j];
    }
    if (mass <= 0) return false;
    for (auto& v : out.prob) v /= mass;
    return true;
}

std::string setting_text(const ConstructiveTau& tau, const std::vector<int>& xs, const std::vector<int>& joints) {
    std::string s;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        auto d = tau.decode_joint(xs[k], joints[k]);
        const auto& m = tau.members(xs[k]);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!s.empty()) s += ",";
            s += tau.low_vars()[m[i]].name + "=" + tau.low_vars()[m[i]].domain.values[d[i]];
        }
    }
    return s;
}

ValueMap joint_values(const ConstructiveTau& tau, const std::vector<int>& xs, const std::vector<int>& joints) {
    ValueMap out;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        auto d = tau.decode_joint(xs[k], joints[k]);
        const auto& m = tau.members(xs[k]);
        for (std::size_t i = 0; i < m.size(); ++i) out[tau.low_vars()[m[i]].name] = tau.low_vars()[m[i]].domain.values[d[i]];
    }
    return out;
}

} // namespace

AicReport check_data_aic(const std::vector<InterventionalPmf>& dists, const ConstructiveTau& tau, DataAicMode mode,
                         double tol) {
    AicReport rep;
    int n = tau.n_clusters();
    std::vector<int> hradix;
    const Pmf* obs = nullptr;
    for (const auto& d : dists)
        if (d.intervention.empty()) obs = &d.pmf;
    if (mode == DataAicMode::Conditional && !obs) throw ValidationError("conditional AIC needs the observational pmf");

    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> xs, jr;
        for (int c = 0; c < n; ++c)
            if (mask & (1u << c)) {
                xs.push_back(c);
                jr.push_back(static_cast<int>(product_size(tau.radix(c))));
            }
        // Groups of joint low values by high image.
        std::map<std::vector<int>, std::vector<std::vector<int>>> groups;
        std::vector<std::vector<int>> order;
        std::vector<int> j(xs.size(), 0);
        do {
            std::vector<int> key;
            for (std::size_t k = 0; k < xs.size(); ++k) key.push_back(tau.image(xs[k], j[k]));
            if (!groups.count(key)) order.push_back(key);
            groups[key].push_back(j);
        } while (next_digits(j, jr));

        const InterventionalPmf* scope = nullptr;  // any dataset intervening on exactly these clusters
        if (mode == DataAicMode::Interventional) {
            Names want;
            for (int c : xs) want.insert(tau.inter().clusters[c].members.begin(), tau.inter().clusters[c].members.end());
            for (const auto& d : dists) {
                Names have;
                for (const auto& [k, _] : d.intervention) have.insert(k);
                if (have == want) scope = &d;
            }
            if (!scope) continue;  // this subset is not in scope
        }
        auto distribution = [&](const std::vector<int>& joints, std::vector<double>& out) -> bool {
            auto want = joint_values(tau, xs, joints);
            if (mode == DataAicMode::Conditional) {
                Pmf cond;
                if (!condition(*obs, want, cond)) return false;
                out = push(cond, tau, hradix);
                return true;
            }
            for (const auto& d : dists)
                if (d.intervention == want) {
                    out = push(d.pmf, tau, hradix);
                    return true;
                }
            throw ValidationError("missing interventional distribution for do(" + setting_text(tau, xs, joints) + ")");
        };
        for (const auto& key : order) {
            const auto& g = groups[key];
            if (g.size() < 2) continue;
            std::vector<double> p0;
            std::size_t first = 0;
            while (first < g.size() && !distribution(g[first], p0)) ++first;
            for (std::size_t k = first + 1; k < g.size(); ++k) {
                std::vector<double> pk;
                if (!distribution(g[k], pk)) continue;
                for (std::size_t t = 0; t < p0.size(); ++t) {
                    if (std::abs(p0[t] - pk[t]) <= tol) continue;
                    AicWitness w;
                    w.cluster = xs.front();
                    w.v1 = joint_values(tau, xs, g[first]);
                    w.v2 = joint_values(tau, xs, g[k]);
                    std::vector<int> hd;
                    decode(t, hradix, hd);
                    for (int c = 0; c < n; ++c) w.u[tau.high_vars()[c].name] = tau.high_vars()[c].domain.values[hd[c]];
                    w.out1 = std::to_string(p0[t]);
                    w.out2 = std::to_string(pk[t]);
                    rep.holds = false;
                    rep.witness = std::move(w);
                    return rep;
                }
            }
        }
    }
    return rep;
}

} // namespace causabs
