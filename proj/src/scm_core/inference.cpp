#include "causabs/inference.hpp"

#include <algorithm>

#include "causabs/errors.hpp"

namespace causabs {

namespace {

int find_in(const std::vector<Variable>& vars, const std::string& n) {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name == n) return static_cast<int>(i);
    throw ValidationError("unknown variable " + n);
}

std::vector<World> resolve_terms(const std::vector<Variable>& vars, const std::vector<Term>& terms) {
    std::vector<World> out;
    for (const auto& t : terms) {
        World w;
        w.intervention.assign(vars.size(), -1);
        for (const auto& [x, v] : t.intervention) {
            int i = find_in(vars, x);
            if (w.intervention[i] >= 0) throw ValidationError("variable " + x + " intervened twice");
            w.intervention[i] = vars[i].domain.index(v);
        }
        for (const auto& [y, v] : t.outcome) {
            int i = find_in(vars, y);
            if (w.intervention[i] >= 0) throw ValidationError("outcome " + y + " is also intervened");
            w.checks.emplace_back(i, vars[i].domain.index(v));
        }
        out.push_back(std::move(w));
    }
    return out;
}

bool holds(const World& w, const std::vector<int>& val) {
    for (const auto& [v, x] : w.checks)
        if (val[v] != x) return false;
    return true;
}

void check_budget(const Scm& scm, std::size_t worlds, const EvalOptions& opt) {
    double cost = scm.unit_count() * static_cast<double>(std::max<std::size_t>(worlds, 1));
    if (cost > opt.budget)
        throw BudgetError("enumeration needs " + std::to_string(cost) + " evaluations, budget is " +
                          std::to_string(opt.budget));
}

} // namespace

ResolvedQuery resolve_query(const std::vector<Variable>& vars, const CtfQuery& q) {
    return ResolvedQuery{resolve_terms(vars, q.terms), resolve_terms(vars, q.given)};
}

ResolvedQuery resolve_query(const Scm& scm, const CtfQuery& q) { return resolve_query(scm.variables(), q); }

double ctf_prob(const Scm& scm, const CtfQuery& q, const EvalOptions& opt) {
    auto rq = resolve_query(scm, q);
    check_budget(scm, rq.terms.size() + rq.given.size(), opt);
    double num = 0, den = 0;
    for_each_unit(scm, [&](const std::vector<int>& u, double p) {
        for (const auto& w : rq.given)
            if (!holds(w, evaluate_unit(scm, u, w.intervention))) return;
        den += p;
        for (const auto& w : rq.terms)
            if (!holds(w, evaluate_unit(scm, u, w.intervention))) return;
        num += p;
    });
    if (rq.given.empty()) return num;
    if (den <= 0) throw UndefinedConditional("conditioning event " + print_query(CtfQuery{q.given, {}}) +
                                             " has probability zero");
    return num / den;
}

Pmf layer_pmf(const Scm& scm, const ValueMap& intervention, const std::vector<std::string>& over,
              const EvalOptions& opt) {
    check_budget(scm, 1, opt);
    auto x = resolve_assignment(scm, intervention);
    std::vector<int> ix;
    std::vector<Variable> vars;
    if (over.empty()) {
        for (int v = 0; v < scm.n_vars(); ++v) ix.push_back(v);
    } else {
        for (const auto& n : over) ix.push_back(scm.var_index(n));
    }
    for (int v : ix) vars.push_back(scm.var(v));
    Pmf out = Pmf::zeros(vars);
    auto radix = out.radix();
    std::vector<int> d(ix.size());
    for_each_unit(scm, [&](const std::vector<int>& u, double p) {
        auto val = evaluate_unit(scm, u, x);
        for (std::size_t t = 0; t < ix.size(); ++t) d[t] = val[ix[t]];
        out.prob[encode(d, radix)] += p;
    });
    return out;
}

CausalDiagram induced_diagram(const Scm& scm) {
    CausalDiagram g(scm.var_names());
    for (int v = 0; v < scm.n_vars(); ++v)
        for (int p : scm.parents(v)) g.add_directed(scm.var(p).name, scm.var(v).name);
    for (int a = 0; a < scm.n_vars(); ++a)
        for (int b = a + 1; b < scm.n_vars(); ++b) {
            bool shared = false;
            for (int ua : scm.exo_parents(a))
                for (int ub : scm.exo_parents(b)) shared = shared || ua == ub;
            if (shared) g.add_bidirected(scm.var(a).name, scm.var(b).name);
        }
    return g;
}

std::string functional_var_name(const Scm& scm, int v, const std::vector<int>& pa_values) {
    std::string s = scm.var(v).name + "[";
    const auto& pa = scm.parents(v);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (i) s += ",";
        s += scm.var(pa[i]).name + "=" + scm.var(pa[i]).domain.values[pa_values[i]];
    }
    return s + "]";
}

namespace {

struct FunctionalLayout {
    std::vector<std::vector<int>> pa_radix;
    std::vector<std::size_t> offset;  // first functional variable of each endogenous variable
    std::size_t count = 0;
};

FunctionalLayout functional_layout(const Scm& scm) {
    FunctionalLayout l;
    for (int v = 0; v < scm.n_vars(); ++v) {
        std::vector<int> r;
        for (int p : scm.parents(v)) r.push_back(scm.var(p).domain.size());
        l.offset.push_back(l.count);
        l.count += product_size(r);
        l.pa_radix.push_back(std::move(r));
    }
    return l;
}

} // namespace

Pmf functional_ctf_pmf(const Scm& scm, const EvalOptions& opt) {
    auto lay = functional_layout(scm);
    std::vector<Variable> vars;
    double dense = 1;
    for (int v = 0; v < scm.n_vars(); ++v) {
        std::vector<int> cfg(lay.pa_radix[v].size(), 0);
        do {
            vars.push_back(Variable{functional_var_name(scm, v, cfg), scm.var(v).domain});
            dense *= scm.var(v).domain.size();
        } while (next_digits(cfg, lay.pa_radix[v]));
    }
    if (dense > opt.budget || scm.unit_count() * static_cast<double>(lay.count) > opt.budget)
        throw BudgetError("functional counterfactual set exceeds the enumeration budget");
    Pmf out = Pmf::zeros(vars);
    auto radix = out.radix();
    std::vector<int> f(vars.size());
    for_each_unit(scm, [&](const std::vector<int>& u, double p) {
        for (int v = 0; v < scm.n_vars(); ++v) {
            std::vector<int> cfg(lay.pa_radix[v].size(), 0);
            std::size_t k = lay.offset[v];
            do {
                f[k++] = scm.apply_parents(v, cfg, u);
            } while (next_digits(cfg, lay.pa_radix[v]));
        }
        out.prob[encode(f, radix)] += p;
    });
    return out;
}

double ctf_prob_functional(const Scm& scm, const Pmf& fpmf, const CtfQuery& q) {
    auto lay = functional_layout(scm);
    if (fpmf.vars.size() != lay.count) throw ValidationError("functional pmf does not match the model");
    auto rq = resolve_query(scm, q);
    auto radix = fpmf.radix();
    std::vector<int> f, val(scm.n_vars()), pa;
    auto eval = [&](const World& w) {
        for (int v : scm.order()) {
            if (w.intervention[v] >= 0) {
                val[v] = w.intervention[v];
                continue;
            }
            pa.clear();
            for (int p : scm.parents(v)) pa.push_back(val[p]);
            val[v] = f[lay.offset[v] + encode(pa, lay.pa_radix[v])];
        }
        return holds(w, val);
    };
    double num = 0, den = 0;
    for (std::size_t j = 0; j < fpmf.prob.size(); ++j) {
        double p = fpmf.prob[j];
        if (p <= 0) continue;
        decode(j, radix, f);
        bool ok = true;
        for (const auto& w : rq.given) ok = ok && eval(w);
        if (!ok) continue;
        den += p;
        for (const auto& w : rq.terms) ok = ok && eval(w);
        if (ok) num += p;
    }
    if (rq.given.empty()) return num;
    if (den <= 0) throw UndefinedConditional("conditioning event has probability zero");
    return num / den;
}

} // namespace causabs
