#include "causabs/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "causabs/errors.hpp"

namespace causabs {

Pmf Pmf::zeros(std::vector<Variable> vars) {
    Pmf p;
    p.vars = std::move(vars);
    p.prob.assign(product_size(p.radix()), 0.0);
    return p;
}

std::vector<int> Pmf::radix() const {
    std::vector<int> r;
    for (const auto& v : vars) r.push_back(v.domain.size());
    return r;
}

int Pmf::var_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> Pmf::names() const {
    std::vector<std::string> out;
    for (const auto& v : vars) out.push_back(v.name);
    return out;
}

double Pmf::total() const {
    double s = 0;
    for (double p : prob) s += p;
    return s;
}

double Pmf::at(const ValueMap& m) const {
    std::vector<int> d(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        auto it = m.find(vars[i].name);
        if (it == m.end()) throw ValidationError("pmf lookup misses " + vars[i].name);
        d[i] = vars[i].domain.index(it->second);
    }
    return prob[encode(d, radix())];
}

Pmf Pmf::marginal(const std::vector<std::string>& keep) const {
    std::vector<int> ix;
    std::vector<Variable> kv;
    for (const auto& k : keep) {
        int i = var_index(k);
        if (i < 0) throw ValidationError("marginal over unknown variable " + k);
        ix.push_back(i);
        kv.push_back(vars[i]);
    }
    Pmf out = Pmf::zeros(kv);
    auto r = radix();
    auto kr = out.radix();
    std::vector<int> d, kd(ix.size());
    for (std::size_t j = 0; j < prob.size(); ++j) {
        if (prob[j] == 0) continue;
        decode(j, r, d);
        for (std::size_t t = 0; t < ix.size(); ++t) kd[t] = d[ix[t]];
        out.prob[encode(kd, kr)] += prob[j];
    }
    return out;
}

double Pmf::mass(const std::vector<int>& var_ix, const std::vector<int>& val_ix) const {
    auto r = radix();
    std::vector<int> d;
    double s = 0;
    for (std::size_t j = 0; j < prob.size(); ++j) {
        if (prob[j] == 0) continue;
        decode(j, r, d);
        bool ok = true;
        for (std::size_t t = 0; t < var_ix.size() && ok; ++t) ok = d[var_ix[t]] == val_ix[t];
        if (ok) s += prob[j];
    }
    return s;
}

void Pmf::validate(double tol) const {
    if (prob.size() != product_size(radix())) throw ValidationError("pmf size does not match its variables");
    for (double p : prob)
        if (!(p >= 0)) throw ValidationError("pmf has a negative entry");
    if (std::abs(total() - 1.0) > tol) throw ValidationError("pmf does not sum to 1");
}

double entropy(const Pmf& p) {
    double h = 0;
    for (double x : p.prob)
        if (x > 0) h -= x * std::log(x);
    return h;
}

double max_abs_diff(const Pmf& a, const Pmf& b) {
    if (a.prob.size() != b.prob.size()) throw ValidationError("pmf shapes differ");
    double m = 0;
    for (std::size_t i = 0; i < a.prob.size(); ++i) m = std::max(m, std::abs(a.prob[i] - b.prob[i]));
    return m;
}

} // namespace causabs

namespace causabs {

Pmf sample_empirical(const Pmf& p, int n, std::uint64_t seed) {
    if (n <= 0) throw ValidationError("sample size must be positive");
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> draw(p.prob.begin(), p.prob.end());
    Pmf out = Pmf::zeros(p.vars);
    for (int i = 0; i < n; ++i) out.prob[draw(rng)] += 1.0;
    for (auto& x : out.prob) x /= n;
    return out;
}

} // namespace causabs
