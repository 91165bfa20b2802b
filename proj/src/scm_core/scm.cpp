#include "causabs/scm.hpp"

#include <cmath>
#include <numeric>

#include "causabs/errors.hpp"

namespace causabs {

int Domain::find(const std::string& v) const {
    for (int i = 0; i < size(); ++i)
        if (values[i] == v) return i;
    return -1;
}

int Domain::index(const std::string& v) const {
    int i = find(v);
    if (i < 0) throw ValidationError("value '" + v + "' not in domain");
    return i;
}

Domain binary_domain() { return Domain{{"0", "1"}}; }

std::size_t product_size(const std::vector<int>& radix) {
    std::size_t n = 1;
    for (int r : radix) n *= static_cast<std::size_t>(r);
    return n;
}

std::size_t encode(const std::vector<int>& digits, const std::vector<int>& radix) {
    std::size_t ix = 0;
    for (std::size_t i = 0; i < radix.size(); ++i) ix = ix * radix[i] + digits[i];
    return ix;
}

void decode(std::size_t index, const std::vector<int>& radix, std::vector<int>& out) {
    out.resize(radix.size());
    for (std::size_t i = radix.size(); i-- > 0;) {
        out[i] = static_cast<int>(index % radix[i]);
        index /= radix[i];
    }
}

bool next_digits(std::vector<int>& digits, const std::vector<int>& radix) {
    for (std::size_t i = radix.size(); i-- > 0;) {
        if (++digits[i] < radix[i]) return true;
        digits[i] = 0;
    }
    return false;
}

Scm::Scm(std::vector<Variable> variables, std::vector<ExogenousBlock> exogenous,
         std::vector<Mechanism> mechanisms)
    : vars_(std::move(variables)), exo_(std::move(exogenous)) {
    for (int i = 0; i < n_vars(); ++i) {
        const auto& v = vars_[i];
        if (v.name.empty()) throw ValidationError("empty variable name");
        if (v.domain.size() < 1) throw ValidationError("empty domain for " + v.name);
        for (int a = 0; a < v.domain.size(); ++a)
            for (int b = a + 1; b < v.domain.size(); ++b)
                if (v.domain.values[a] == v.domain.values[b])
                    throw ValidationError("duplicate value in domain of " + v.name);
        if (!var_ix_.emplace(v.name, i).second)
            throw ValidationError("duplicate variable " + v.name);
    }
    for (int i = 0; i < n_exo(); ++i) {
        const auto& e = exo_[i];
        if (e.name.empty()) throw ValidationError("empty exogenous name");
        if (var_ix_.count(e.name)) throw ValidationError("name used twice: " + e.name);
        if (!exo_ix_.emplace(e.name, i).second)
            throw ValidationError("duplicate exogenous " + e.name);
        if (static_cast<int>(e.pmf.size()) != e.domain.size() || e.domain.size() < 1)
            throw ValidationError("pmf size mismatch for " + e.name);
        double s = 0;
        for (double p : e.pmf) {
            if (!(p >= 0)) throw ValidationError("negative probability in " + e.name);
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-12) throw ValidationError("pmf of " + e.name + " does not sum to 1");
    }

    mech_.resize(vars_.size());
    std::vector<bool> seen(vars_.size(), false);
    for (auto& m : mechanisms) {
        int v = var_index(m.output);
        if (seen[v]) throw ValidationError("two mechanisms for " + m.output);
        seen[v] = true;
        mech_[v] = std::move(m);
    }
    pa_.resize(vars_.size());
    upa_.resize(vars_.size());
    radix_.resize(vars_.size());
    for (int v = 0; v < n_vars(); ++v) {
        if (!seen[v]) throw ValidationError("no mechanism for " + vars_[v].name);
        const auto& m = mech_[v];
        for (const auto& p : m.endo_parents) {
            int pi = var_index(p);
            if (pi == v) throw ValidationError(m.output + " lists itself as a parent");
            pa_[v].push_back(pi);
            radix_[v].push_back(vars_[pi].domain.size());
        }
        for (const auto& p : m.exo_parents) {
            int ui = exo_index(p);
            upa_[v].push_back(ui);
            radix_[v].push_back(exo_[ui].domain.size());
        }
        if (m.table.size() != product_size(radix_[v]))
            throw ValidationError("mechanism table of " + m.output + " is not total");
        for (int out : m.table)
            if (out < 0 || out >= vars_[v].domain.size())
                throw ValidationError("mechanism of " + m.output + " leaves its domain");
    }

    // Kahn over endogenous parents, ties by declaration order.
    std::vector<int> indeg(vars_.size(), 0);
    for (int v = 0; v < n_vars(); ++v) indeg[v] = static_cast<int>(pa_[v].size());
    std::vector<bool> done(vars_.size(), false);
    while (static_cast<int>(order_.size()) < n_vars()) {
        int pick = -1;
        for (int v = 0; v < n_vars() && pick < 0; ++v)
            if (!done[v] && indeg[v] == 0) pick = v;
        if (pick < 0) throw ValidationError("mechanisms are cyclic");
        done[pick] = true;
        order_.push_back(pick);
        for (int c = 0; c < n_vars(); ++c)
            for (int p : pa_[c])
                if (p == pick) --indeg[c];
    }
}

int Scm::find_var(const std::string& name) const {
    auto it = var_ix_.find(name);
    return it == var_ix_.end() ? -1 : it->second;
}

int Scm::var_index(const std::string& name) const {
    int i = find_var(name);
    if (i < 0) throw ValidationError("unknown variable " + name);
    return i;
}

int Scm::exo_index(const std::string& name) const {
    auto it = exo_ix_.find(name);
    if (it == exo_ix_.end()) throw ValidationError("unknown exogenous " + name);
    return it->second;
}

std::vector<std::string> Scm::var_names() const {
    std::vector<std::string> out;
    for (const auto& v : vars_) out.push_back(v.name);
    return out;
}

std::vector<int> Scm::exo_radix() const {
    std::vector<int> r;
    for (const auto& e : exo_) r.push_back(e.domain.size());
    return r;
}

double Scm::unit_count() const {
    double n = 1;
    for (const auto& e : exo_) n *= e.domain.size();
    return n;
}

int Scm::apply(int v, const std::vector<int>& values, const std::vector<int>& u) const {
    std::size_t ix = 0;
    const auto& r = radix_[v];
    std::size_t k = 0;
    for (int p : pa_[v]) ix = ix * r[k++] + values[p];
    for (int e : upa_[v]) ix = ix * r[k++] + u[e];
    return mech_[v].table[ix];
}

int Scm::apply_parents(int v, const std::vector<int>& pa_values, const std::vector<int>& u) const {
    std::size_t ix = 0;
    const auto& r = radix_[v];
    std::size_t k = 0;
    for (std::size_t i = 0; i < pa_[v].size(); ++i) ix = ix * r[k++] + pa_values[i];
    for (int e : upa_[v]) ix = ix * r[k++] + u[e];
    return mech_[v].table[ix];
}

void for_each_unit(const Scm& scm, const std::function<void(const std::vector<int>&, double)>& fn) {
    auto radix = scm.exo_radix();
    std::vector<int> u(radix.size(), 0);
    const auto& exo = scm.exogenous();
    do {
        double p = 1.0;
        for (std::size_t i = 0; i < u.size() && p > 0; ++i) p *= exo[i].pmf[u[i]];
        if (p > 0) fn(u, p);
    } while (next_digits(u, radix));
}

std::vector<int> evaluate_unit(const Scm& scm, const std::vector<int>& u,
                               const std::vector<int>& intervention) {
    if (static_cast<int>(u.size()) != scm.n_exo()) throw ValidationError("exogenous assignment incomplete");
    std::vector<int> val(scm.n_vars(), -1);
    for (int v : scm.order()) {
        int x = intervention.empty() ? -1 : intervention[v];
        val[v] = x >= 0 ? x : scm.apply(v, val, u);
    }
    return val;
}

std::vector<int> resolve_assignment(const Scm& scm, const ValueMap& m) {
    std::vector<int> out(scm.n_vars(), -1);
    for (const auto& [k, v] : m) {
        int i = scm.var_index(k);
        out[i] = scm.var(i).domain.index(v);
    }
    return out;
}

ValueMap evaluate_unit(const Scm& scm, const ValueMap& u, const ValueMap& intervention) {
    std::vector<int> uu(scm.n_exo(), -1);
    for (const auto& [k, v] : u) {
        int i = scm.exo_index(k);
        uu[i] = scm.exogenous()[i].domain.index(v);
    }
    for (int i = 0; i < scm.n_exo(); ++i)
        if (uu[i] < 0) throw ValidationError("missing exogenous value for " + scm.exogenous()[i].name);
    auto val = evaluate_unit(scm, uu, resolve_assignment(scm, intervention));
    ValueMap out;
    for (int v = 0; v < scm.n_vars(); ++v) out[scm.var(v).name] = scm.var(v).domain.values[val[v]];
    return out;
}

} // namespace causabs
