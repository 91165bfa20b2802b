#include <cmath>
#include <sstream>

#include "causabs/abstraction.hpp"
#include "causabs/inference.hpp"
#include "detail.hpp"

namespace causabs {

ConsistencyReport check_q_tau_consistency(const Scm& m_low, const Scm& m_high, const ConstructiveTau& tau,
                                          const CtfQuery& q_low, double tol, const EvalOptions& opt) {
    ConsistencyReport r;
    r.low = lowered_prob(m_low, tau, preimage_event(tau, q_low), opt);
    auto lifted = lift_query(tau, q_low);
    r.high = ctf_prob(m_high, lifted, opt);
    r.consistent = std::abs(r.low - r.high) <= tol;
    r.detail = print_query(q_low) + " vs " + print_query(lifted);
    return r;
}

namespace {

struct Intervention {
    std::vector<int> low, high;  // per variable of each model, -1 = free
    std::string text;
};

struct HighMap {
    std::vector<int> var;                // cluster -> m_high variable
    std::vector<std::vector<int>> value; // cluster, label index -> m_high value index
};

HighMap map_high(const Scm& m_high, const ConstructiveTau& tau) {
    HighMap h;
    for (int c = 0; c < tau.n_clusters(); ++c) {
        const auto& hv = tau.high_vars()[c];
        int v = m_high.var_index(hv.name);
        h.var.push_back(v);
        std::vector<int> vals;
        for (const auto& label : hv.domain.values) vals.push_back(m_high.var(v).domain.index(label));
        h.value.push_back(std::move(vals));
    }
    return h;
}

std::vector<Intervention> all_interventions(const Scm& m_low, const Scm& m_high, const ConstructiveTau& tau,
                                            const HighMap& hm) {
    std::vector<Intervention> out;
    int n = tau.n_clusters();
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> xs, jr;
        for (int c = 0; c < n; ++c)
            if (mask & (1u << c)) {
                xs.push_back(c);
                jr.push_back(static_cast<int>(product_size(tau.radix(c))));
            }
        std::vector<int> j(xs.size(), 0);
        do {
            Intervention iv;
            iv.low.assign(m_low.n_vars(), -1);
            iv.high.assign(m_high.n_vars(), -1);
            for (std::size_t k = 0; k < xs.size(); ++k) {
                int c = xs[k];
                auto d = tau.decode_joint(c, j[k]);
                const auto& m = tau.members(c);
                for (std::size_t i = 0; i < m.size(); ++i) {
                    iv.low[m[i]] = d[i];
                    if (!iv.text.empty()) iv.text += ",";
                    iv.text += m_low.var(m[i]).name + "=" + m_low.var(m[i]).domain.values[d[i]];
                }
                iv.high[hm.var[c]] = hm.value[c][tau.image(c, j[k])];
            }
            out.push_back(std::move(iv));
        } while (next_digits(j, jr));
    }
    return out;
}

// Joint pmf of every cluster in every world, low side pushed through τ.
std::vector<double> joint_low(const Scm& m, const ConstructiveTau& tau, const std::vector<const Intervention*>& ws,
                              const std::vector<int>& radix) {
    std::vector<double> out(product_size(radix), 0.0);
    std::vector<int> d(radix.size());
    int n = tau.n_clusters();
    for_each_unit(m, [&](const std::vector<int>& u, double p) {
        for (std::size_t w = 0; w < ws.size(); ++w) {
            auto val = evaluate_unit(m, u, ws[w]->low);
            for (int c = 0; c < n; ++c) d[w * n + c] = tau.image_of(c, val);
        }
        out[encode(d, radix)] += p;
    });
    return out;
}

std::vector<double> joint_high(const Scm& m, const ConstructiveTau& tau, const HighMap& hm,
                               const std::vector<const Intervention*>& ws, const std::vector<int>& radix) {
    std::vector<double> out(product_size(radix), 0.0);
    std::vector<int> d(radix.size());
    int n = tau.n_clusters();
    // m_high value index -> label index
    std::vector<std::vector<int>> back(n);
    for (int c = 0; c < n; ++c) {
        back[c].assign(m.var(hm.var[c]).domain.size(), -1);
        for (std::size_t h = 0; h < hm.value[c].size(); ++h) back[c][hm.value[c][h]] = static_cast<int>(h);
    }
    bool outside = false;
    for_each_unit(m, [&](const std::vector<int>& u, double p) {
        for (std::size_t w = 0; w < ws.size(); ++w) {
            auto val = evaluate_unit(m, u, ws[w]->high);
            for (int c = 0; c < n; ++c) {
                int h = back[c][val[hm.var[c]]];
                if (h < 0) outside = true;
                d[w * n + c] = h < 0 ? 0 : h;
            }
        }
        out[encode(d, radix)] += p;
    });
    if (outside) throw ValidationError("high model produces values outside the abstraction's labels");
    return out;
}

std::string event_text(const ConstructiveTau& tau, std::size_t j, const std::vector<int>& radix) {
    std::vector<int> d;
    decode(j, radix, d);
    int n = tau.n_clusters();
    std::ostringstream s;
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (k) s << (k % n ? "," : " ; ");
        const auto& hv = tau.high_vars()[k % n];
        s << hv.name << "=" << hv.domain.values[d[k]];
    }
    return s.str();
}

} // namespace

ConsistencyReport check_layer_tau_consistency(const Scm& m_low, const Scm& m_high, const ConstructiveTau& tau,
                                              int layer, const LayerOptions& opt) {
    if (layer < 1 || layer > 3) throw ValidationError("layer must be 1, 2 or 3");
    detail::require_same_vars(m_low, tau);
    auto hm = map_high(m_high, tau);
    std::vector<Intervention> ivs;
    if (layer == 1) {
        Intervention none;
        none.low.assign(m_low.n_vars(), -1);
        none.high.assign(m_high.n_vars(), -1);
        ivs.push_back(std::move(none));
    } else {
        ivs = all_interventions(m_low, m_high, tau, hm);
    }
    std::size_t k = layer == 3 ? static_cast<std::size_t>(std::max(1, opt.worlds)) : 1;
    k = std::min(k, ivs.size());

    // every k-subset of interventions, as index combinations
    std::vector<std::vector<std::size_t>> combos;
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
        combos.push_back(pick);
        int i = static_cast<int>(k) - 1;
        while (i >= 0 && pick[i] == ivs.size() - k + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (std::size_t t = i + 1; t < k; ++t) pick[t] = pick[t - 1] + 1;
    }
    double cost = static_cast<double>(combos.size()) * static_cast<double>(k) *
                  (m_low.unit_count() + m_high.unit_count());
    if (cost > opt.eval.budget) throw BudgetError("layer consistency check exceeds the enumeration budget");

    std::vector<int> radix;
    for (std::size_t w = 0; w < k; ++w)
        for (const auto& hv : tau.high_vars()) radix.push_back(hv.domain.size());
    ConsistencyReport r;
    for (const auto& combo : combos) {
        std::vector<const Intervention*> ws;
        for (auto i : combo) ws.push_back(&ivs[i]);
        auto lo = joint_low(m_low, tau, ws, radix);
        auto hi = joint_high(m_high, tau, hm, ws, radix);
        for (std::size_t j = 0; j < lo.size(); ++j) {
            if (std::abs(lo[j] - hi[j]) <= opt.tol) continue;
            r.consistent = false;
            r.low = lo[j];
            r.high = hi[j];
            std::string worlds;
            for (const auto* w : ws) worlds += "do(" + w->text + ") ";
            r.detail = worlds + "event " + event_text(tau, j, radix);
            return r;
        }
    }
    return r;
}

} // namespace causabs
