#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "causabs/scm.hpp"

namespace causabs {

// Dense joint pmf, row-major over vars with the first variable most significant.
struct Pmf {
    std::vector<Variable> vars;
    std::vector<double> prob;

    static Pmf zeros(std::vector<Variable> vars);

    std::vector<int> radix() const;
    std::size_t size() const { return prob.size(); }
    int var_index(const std::string& name) const;  // -1 when absent
    std::vector<std::string> names() const;
    double total() const;
    double at(const ValueMap& m) const;  // m must assign every variable

    // Marginal over keep, in the order given.
    Pmf marginal(const std::vector<std::string>& keep) const;
    // Probability that the listed variables take the listed value indices.
    double mass(const std::vector<int>& var_ix, const std::vector<int>& val_ix) const;
    void validate(double tol = 1e-9) const;
};

// A distribution observed under do(intervention); empty means observational.
struct InterventionalPmf {
    ValueMap intervention;
    Pmf pmf;
};

double entropy(const Pmf& p);
// Empirical pmf of n seeded draws from p.
Pmf sample_empirical(const Pmf& p, int n, std::uint64_t seed);
double max_abs_diff(const Pmf& a, const Pmf& b);

} // namespace causabs
