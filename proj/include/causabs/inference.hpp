#pragma once

#include <string>
#include <vector>

#include "causabs/diagram.hpp"
#include "causabs/pmf.hpp"
#include "causabs/query.hpp"
#include "causabs/scm.hpp"

namespace causabs {

double ctf_prob(const Scm& scm, const CtfQuery& q, const EvalOptions& opt = {});

// Joint of `over` under do(intervention). Empty `over` means all variables.
Pmf layer_pmf(const Scm& scm, const ValueMap& intervention,
              const std::vector<std::string>& over = {}, const EvalOptions& opt = {});

CausalDiagram induced_diagram(const Scm& scm);

// Pmf over the functional counterfactual set. One variable per (V, parent
// configuration), named like "Y[A=1,B=0]" or "R[]" for parentless variables.
Pmf functional_ctf_pmf(const Scm& scm, const EvalOptions& opt = {});
std::string functional_var_name(const Scm& scm, int v, const std::vector<int>& pa_values);

// Evaluates a query through a functional counterfactual pmf instead of P(U).
double ctf_prob_functional(const Scm& scm, const Pmf& fpmf, const CtfQuery& q);

// A query resolved against a model: one world per distinct intervention.
struct World {
    std::vector<int> intervention;           // per variable, -1 = free
    std::vector<std::pair<int, int>> checks; // (variable, value) that must hold
};
struct ResolvedQuery {
    std::vector<World> terms;
    std::vector<World> given;
};
ResolvedQuery resolve_query(const Scm& scm, const CtfQuery& q);
ResolvedQuery resolve_query(const std::vector<Variable>& vars, const CtfQuery& q);

} // namespace causabs
