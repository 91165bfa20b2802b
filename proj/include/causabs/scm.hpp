#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace causabs {

// name -> symbolic value
using ValueMap = std::map<std::string, std::string>;

struct Domain {
    std::vector<std::string> values;

    int size() const { return static_cast<int>(values.size()); }
    int find(const std::string& v) const;   // -1 when absent
    int index(const std::string& v) const;  // throws ValidationError when absent
    bool operator==(const Domain&) const = default;
};

Domain binary_domain();

struct Variable {
    std::string name;
    Domain domain;
    bool operator==(const Variable&) const = default;
};

struct ExogenousBlock {
    std::string name;
    Domain domain;
    std::vector<double> pmf;
};

// table is row-major over (endo_parents..., exo_parents...), first parent most
// significant, and stores output value indices.
struct Mechanism {
    std::string output;
    std::vector<std::string> endo_parents;
    std::vector<std::string> exo_parents;
    std::vector<int> table;
    std::string expr;  // source expression, empty for tabular mechanisms
};

// Mixed-radix helpers shared by tables, pmfs and enumerators.
std::size_t product_size(const std::vector<int>& radix);
std::size_t encode(const std::vector<int>& digits, const std::vector<int>& radix);
void decode(std::size_t index, const std::vector<int>& radix, std::vector<int>& out);
// Increment like an odometer, last digit fastest. Returns false after wrapping.
bool next_digits(std::vector<int>& digits, const std::vector<int>& radix);

class Scm {
public:
    Scm() = default;
    Scm(std::vector<Variable> variables, std::vector<ExogenousBlock> exogenous,
        std::vector<Mechanism> mechanisms);

    int n_vars() const { return static_cast<int>(vars_.size()); }
    int n_exo() const { return static_cast<int>(exo_.size()); }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<ExogenousBlock>& exogenous() const { return exo_; }
    const std::vector<Mechanism>& mechanisms() const { return mech_; }  // indexed like variables()
    const Variable& var(int i) const { return vars_[i]; }
    const Mechanism& mechanism(int i) const { return mech_[i]; }

    int var_index(const std::string& name) const;  // throws
    int find_var(const std::string& name) const;   // -1
    int exo_index(const std::string& name) const;  // throws
    std::vector<std::string> var_names() const;

    const std::vector<int>& order() const { return order_; }  // topological
    const std::vector<int>& parents(int v) const { return pa_[v]; }
    const std::vector<int>& exo_parents(int v) const { return upa_[v]; }
    std::vector<int> exo_radix() const;
    double unit_count() const;  // |D_U| as a double to avoid overflow

    // Output value index of variable v given full value vectors.
    int apply(int v, const std::vector<int>& values, const std::vector<int>& u) const;
    // Same, with explicit endogenous parent values (ordered like parents(v)).
    int apply_parents(int v, const std::vector<int>& pa_values, const std::vector<int>& u) const;

private:
    std::vector<Variable> vars_;
    std::vector<ExogenousBlock> exo_;
    std::vector<Mechanism> mech_;
    std::map<std::string, int> var_ix_, exo_ix_;
    std::vector<std::vector<int>> pa_, upa_;
    std::vector<std::vector<int>> radix_;  // per mechanism, parents then exo
    std::vector<int> order_;
};

struct EvalOptions {
    double budget = 1e7;  // exogenous units x worlds
};

// Calls fn(u, P(u)) for every exogenous assignment with positive mass.
void for_each_unit(const Scm& scm, const std::function<void(const std::vector<int>&, double)>& fn);

// Solves the mutilated system. intervention holds a value index per variable or -1.
std::vector<int> evaluate_unit(const Scm& scm, const std::vector<int>& u,
                               const std::vector<int>& intervention);
ValueMap evaluate_unit(const Scm& scm, const ValueMap& u, const ValueMap& intervention);

// Resolves a name->value map into a per-variable index vector (-1 = unset).
std::vector<int> resolve_assignment(const Scm& scm, const ValueMap& m);

} // namespace causabs
