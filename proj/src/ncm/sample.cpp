#include <random>

#include "causabs/errors.hpp"
#include "causabs/ncm.hpp"
#include "engine.hpp"

namespace causabs {

namespace {

int draw(const Eigen::VectorXd& p, double r) {
    double s = 0;
    for (int i = 0; i < p.size(); ++i)
        if (r < (s += p[i])) return i;
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (p[i] > 0) return i;
    return 0;
}

// Values of every node in one world for fixed units and uniforms.
std::vector<int> solve(const Ncm& m, const detail::Probs& p, const std::vector<int>& u, const std::vector<double>& r,
                       const std::vector<int>& intervention) {
    std::vector<int> vals(m.n_nodes(), -1), pa;
    for (int v : m.order()) {
        if (intervention[v] >= 0) {
            vals[v] = intervention[v];
            continue;
        }
        pa.clear();
        for (int q : m.parents(v)) pa.push_back(vals[q]);
        vals[v] = draw(p.resp[v].row(m.row(v, pa, u)).transpose(), r[v]);
    }
    return vals;
}

} // namespace

std::vector<ValueMap> sample(const Ncm& m, const std::vector<Term>& given, const ValueMap& intervention, int n,
                             std::uint64_t seed, const SampleOptions& opt) {
    if (n < 0) throw ValidationError("sample count must be non-negative");
    auto p = detail::probs(m);
    auto conds = detail::query_worlds(m, given);
    for (const auto& w : conds)
        if (w.impossible) throw UndefinedConditional("conditioning terms contradict their interventions");
    auto target = detail::resolve_intervention(m, intervention);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<ValueMap> out;
    long limit = static_cast<long>(opt.max_attempts_factor) * std::max(n, 1);
    std::vector<int> u(m.cliques().size());
    std::vector<double> r(m.n_nodes());
    for (long attempt = 0; static_cast<int>(out.size()) < n; ++attempt) {
        if (attempt >= limit) throw UndefinedConditional("rejection sampling found too few units matching the evidence");
        for (std::size_t c = 0; c < u.size(); ++c) u[c] = draw(p.clique[c], unif(rng));
        for (auto& x : r) x = unif(rng);
        bool ok = true;
        for (const auto& w : conds) {
            auto vals = solve(m, p, u, r, w.intervention);
            for (int v = 0; v < m.n_nodes() && ok; ++v) ok = w.require[v] < 0 || w.require[v] == vals[v];
            if (!ok) break;
        }
        if (!ok) continue;
        auto vals = solve(m, p, u, r, target);
        ValueMap row;
        for (int v = 0; v < m.n_nodes(); ++v) row[m.names()[v]] = m.domain(v).values[vals[v]];
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace causabs
