#pragma once

#include <memory>
#include <string>
#include <vector>

#include "causabs/diagram.hpp"
#include "causabs/errors.hpp"
#include "causabs/pmf.hpp"
#include "causabs/query.hpp"

namespace causabs {

class UnsupportedQuery : public Error {
public:
    using Error::Error;
};

struct Estimand;
using EstimandPtr = std::shared_ptr<const Estimand>;

// Expression over the observational distribution. Variables are bound by name;
// Sum rebinds its variables over their domains (inner bindings shadow outer ones).
struct Estimand {
    enum class Kind { Prob, Sum, Product, Ratio };
    Kind kind = Kind::Prob;
    Names vars;   // Prob: joint variables; Sum: summed variables
    Names given;  // Prob: conditioning variables
    std::vector<EstimandPtr> kids;
};

EstimandPtr make_prob(Names vars, Names given = {});
EstimandPtr make_sum(Names vars, EstimandPtr child);
EstimandPtr make_product(std::vector<EstimandPtr> kids);
EstimandPtr make_ratio(EstimandPtr num, EstimandPtr den);

std::string to_sexpr(const EstimandPtr& e);
// Zero-mass conditioning events contribute 0.
double evaluate_estimand(const EstimandPtr& e, const Pmf& observational, const ValueMap& bindings);

struct IdVerdict {
    bool identifiable = false;
    EstimandPtr estimand;  // set iff identifiable
};

// P(y | do(x)) from P(V) on g.
IdVerdict identify_interventional(const CausalDiagram& g, const Names& y, const Names& x);
// Single-term query without conditioning; anything else throws UnsupportedQuery.
IdVerdict identify_interventional(const CausalDiagram& g, const CtfQuery& q);

} // namespace causabs
