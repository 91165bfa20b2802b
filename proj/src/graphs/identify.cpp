#include "causabs/identify.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace causabs {

EstimandPtr make_prob(Names vars, Names given) {
    auto e = std::make_shared<Estimand>();
    e->kind = Estimand::Kind::Prob;
    e->vars = std::move(vars);
    e->given = std::move(given);
    return e;
}

EstimandPtr make_sum(Names vars, EstimandPtr child) {
    if (vars.empty()) return child;
    auto e = std::make_shared<Estimand>();
    e->kind = Estimand::Kind::Sum;
    e->vars = std::move(vars);
    e->kids.push_back(std::move(child));
    return e;
}

EstimandPtr make_product(std::vector<EstimandPtr> kids) {
    if (kids.size() == 1) return kids.front();
    auto e = std::make_shared<Estimand>();
    e->kind = Estimand::Kind::Product;
    e->kids = std::move(kids);
    return e;
}

EstimandPtr make_ratio(EstimandPtr num, EstimandPtr den) {
    auto e = std::make_shared<Estimand>();
    e->kind = Estimand::Kind::Ratio;
    e->kids = {std::move(num), std::move(den)};
    return e;
}

namespace {

std::string list(const Names& s) {
    std::string out = "(";
    bool first = true;
    for (const auto& v : s) {
        if (!first) out += " ";
        first = false;
        out += v;
    }
    return out + ")";
}

Names minus(const Names& a, const Names& b) {
    Names out;
    for (const auto& v : a)
        if (!b.count(v)) out.insert(v);
    return out;
}

Names meet(const Names& a, const Names& b) {
    Names out;
    for (const auto& v : a)
        if (b.count(v)) out.insert(v);
    return out;
}

Names join(Names a, const Names& b) {
    a.insert(b.begin(), b.end());
    return a;
}

struct NotIdentifiable {};

class IdSolver {
public:
    explicit IdSolver(const CausalDiagram& g) : order_(g.topological_order()) {}

    EstimandPtr run(const Names& y, const Names& x, const EstimandPtr& p, const Names& pvars,
                    const CausalDiagram& g) {
        Names v = g.node_set();
        // line 1
        if (x.empty()) return marginalize(p, pvars, y);
        // line 2
        Names an = g.ancestors(y);
        if (an != v) return run(y, meet(x, an), marginalize(p, pvars, an), an, g.induced(an));
        // line 3
        Names w = minus(minus(v, x), g.cut_incoming(x).ancestors(y));
        if (!w.empty()) return run(y, join(x, w), p, pvars, g);
        // line 4
        auto comps = g.induced(minus(v, x)).c_components();
        if (comps.size() > 1) {
            std::vector<EstimandPtr> parts;
            for (const auto& s : comps) parts.push_back(run(s, minus(v, s), p, pvars, g));
            return make_sum(minus(v, join(y, x)), make_product(std::move(parts)));
        }
        const Names& s = comps.front();
        auto whole = g.c_components();
        // line 5
        if (whole.size() == 1) throw NotIdentifiable{};
        // line 6
        if (std::find(whole.begin(), whole.end(), s) != whole.end()) {
            std::vector<EstimandPtr> parts;
            for (const auto& vi : ordered(s)) parts.push_back(conditional(p, pvars, vi, predecessors(vi, v)));
            return make_sum(minus(s, y), make_product(std::move(parts)));
        }
        // line 7
        for (const auto& sp : whole) {
            if (!std::includes(sp.begin(), sp.end(), s.begin(), s.end())) continue;
            std::vector<EstimandPtr> parts;
            for (const auto& vi : ordered(sp)) parts.push_back(conditional(p, pvars, vi, predecessors(vi, v)));
            return run(y, meet(x, sp), make_product(std::move(parts)), sp, g.induced(sp));
        }
        throw NotIdentifiable{};
    }

private:
    std::vector<std::string> order_;

    std::vector<std::string> ordered(const Names& s) const {
        std::vector<std::string> out;
        for (const auto& n : order_)
            if (s.count(n)) out.push_back(n);
        return out;
    }

    Names predecessors(const std::string& vi, const Names& within) const {
        Names out;
        for (const auto& n : order_) {
            if (n == vi) break;
            if (within.count(n)) out.insert(n);
        }
        return out;
    }

    static bool is_joint(const EstimandPtr& p, const Names& pvars) {
        return p->kind == Estimand::Kind::Prob && p->given.empty() && p->vars == pvars;
    }

    static EstimandPtr marginalize(const EstimandPtr& p, const Names& pvars, const Names& keep) {
        if (keep == pvars) return p;
        if (p->kind == Estimand::Kind::Prob && p->given.empty()) return make_prob(keep);
        if (p->kind == Estimand::Kind::Sum) return marginalize(p->kids.front(), join(pvars, p->vars), keep);
        return make_sum(minus(pvars, keep), p);
    }

    static EstimandPtr conditional(const EstimandPtr& p, const Names& pvars, const std::string& vi,
                                   const Names& pred) {
        Names pred_in = meet(pred, pvars);  // predecessors outside pvars are fixed by the caller's scope
        Names outside = minus(pred, pvars);
        if (is_joint(p, pvars) || (p->kind == Estimand::Kind::Prob && p->given.empty()))
            return make_prob({vi}, join(pred_in, outside));
        auto num = marginalize(p, pvars, join(pred_in, {vi}));
        if (pred_in.empty()) return num;
        return make_ratio(num, marginalize(p, pvars, pred_in));
    }
};

// Marginal pmfs by variable set, computed on demand.
class Evaluator {
public:
    explicit Evaluator(const Pmf& p) : p_(p) {}

    double eval(const Estimand& e, ValueMap& b) {
        switch (e.kind) {
        case Estimand::Kind::Prob: {
            double joint = prob(join(e.vars, e.given), b);
            if (e.given.empty()) return joint;
            double den = prob(e.given, b);
            return den > 0 ? joint / den : 0.0;
        }
        case Estimand::Kind::Sum: {
            std::vector<std::string> vars(e.vars.begin(), e.vars.end());
            std::vector<int> radix;
            std::vector<const Variable*> meta;
            for (const auto& v : vars) {
                int i = p_.var_index(v);
                if (i < 0) throw ValidationError("estimand variable " + v + " is not in the data");
                meta.push_back(&p_.vars[i]);
                radix.push_back(p_.vars[i].domain.size());
            }
            std::map<std::string, std::optional<std::string>> saved;
            for (const auto& v : vars) {
                auto it = b.find(v);
                saved[v] = it == b.end() ? std::nullopt : std::optional<std::string>(it->second);
            }
            double total = 0;
            std::vector<int> d(vars.size(), 0);
            do {
                for (std::size_t i = 0; i < vars.size(); ++i) b[vars[i]] = meta[i]->domain.values[d[i]];
                total += eval(*e.kids.front(), b);
            } while (next_digits(d, radix));
            for (const auto& [v, old] : saved) {
                if (old) b[v] = *old;
                else b.erase(v);
            }
            return total;
        }
        case Estimand::Kind::Product: {
            double r = 1;
            for (const auto& k : e.kids) {
                r *= eval(*k, b);
                if (r == 0) break;
            }
            return r;
        }
        case Estimand::Kind::Ratio: {
            double den = eval(*e.kids[1], b);
            return den > 0 ? eval(*e.kids[0], b) / den : 0.0;
        }
        }
        return 0;
    }

private:
    const Pmf& p_;
    std::map<Names, Pmf> cache_;

    double prob(const Names& vars, const ValueMap& b) {
        auto it = cache_.find(vars);
        if (it == cache_.end())
            it = cache_.emplace(vars, p_.marginal(std::vector<std::string>(vars.begin(), vars.end()))).first;
        ValueMap sub;
        for (const auto& v : vars) {
            auto f = b.find(v);
            if (f == b.end()) throw ValidationError("estimand variable " + v + " is unbound");
            sub[v] = f->second;
        }
        return it->second.at(sub);
    }
};

} // namespace

std::string to_sexpr(const EstimandPtr& e) {
    switch (e->kind) {
    case Estimand::Kind::Prob:
        return e->given.empty() ? "(P " + list(e->vars) + ")" : "(P " + list(e->vars) + " " + list(e->given) + ")";
    case Estimand::Kind::Sum:
        return "(sum " + list(e->vars) + " " + to_sexpr(e->kids.front()) + ")";
    case Estimand::Kind::Product: {
        std::string s = "(*";
        for (const auto& k : e->kids) s += " " + to_sexpr(k);
        return s + ")";
    }
    case Estimand::Kind::Ratio:
        return "(/ " + to_sexpr(e->kids[0]) + " " + to_sexpr(e->kids[1]) + ")";
    }
    return "";
}

double evaluate_estimand(const EstimandPtr& e, const Pmf& observational, const ValueMap& bindings) {
    Evaluator ev(observational);
    ValueMap b = bindings;
    return ev.eval(*e, b);
}

IdVerdict identify_interventional(const CausalDiagram& g, const Names& y, const Names& x) {
    for (const auto& n : join(y, x))
        if (!g.has_node(n)) throw ValidationError("query variable " + n + " is not in the graph");
    if (!meet(y, x).empty()) throw ValidationError("outcome and intervention overlap");
    if (y.empty()) return IdVerdict{true, make_prob({})};
    try {
        IdSolver solver(g);
        Names v = g.node_set();
        return IdVerdict{true, solver.run(y, x, make_prob(v), v, g)};
    } catch (const NotIdentifiable&) {
        return IdVerdict{false, nullptr};
    }
}

IdVerdict identify_interventional(const CausalDiagram& g, const CtfQuery& q) {
    if (!q.given.empty()) throw UnsupportedQuery("conditional queries are not handled by the interventional oracle");
    if (q.terms.size() > 1) throw UnsupportedQuery("counterfactual conjunctions are not handled by the interventional oracle");
    if (q.terms.empty()) return IdVerdict{true, make_prob({})};
    Names y, x;
    for (const auto& s : q.terms.front().outcome) y.insert(s.first);
    for (const auto& s : q.terms.front().intervention) x.insert(s.first);
    return identify_interventional(g, y, x);
}

} // namespace causabs
