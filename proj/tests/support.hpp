#pragma once

#include <random>
#include <string>
#include <vector>

#include "causabs/io.hpp"
#include "causabs/project.hpp"
#include "causabs/scm.hpp"

namespace testing {

using namespace causabs;

inline std::string data_path(const std::string& name) { return std::string(CAUSABS_DATA_DIR) + "/" + name; }

inline Project project(const std::string& name) { return load_project(data_path(name)); }

inline Scm drug_scm() { return *project("drug.json").scm; }

// Confounded pair: both models share P(X, Y) and disagree on P(Y_{X=1}=1).
// `negate` picks the second model (0.29) over the first (0.95).
inline Scm confounded_pair_model(bool negate) {
    std::string y = negate ? "ite(U_XY == 0, !X & U_Y0, U_Y1)" : "ite(U_XY == 0, X | U_Y0, U_Y1)";
    json j = {
        {"variables", {{{"name", "X"}, {"domain", {0, 1}}}, {{"name", "Y"}, {"domain", {0, 1}}}}},
        {"exogenous",
         {{{"name", "U_XY"}, {"domain", {0, 1}}, {"pmf", {0.66, 0.34}}},
          {{"name", "U_Y0"}, {"domain", {0, 1}}, {"pmf", {0.9, 0.1}}},
          {{"name", "U_Y1"}, {"domain", {0, 1}}, {"pmf", {0.05 / 0.34, 0.29 / 0.34}}}}},
        {"mechanisms",
         {{{"output", "X"}, {"exo_parents", {"U_XY"}}, {"expr", "U_XY"}},
          {{"output", "Y"}, {"endo_parents", {"X"}}, {"exo_parents", {"U_XY", "U_Y0", "U_Y1"}}, {"expr", y}}}}};
    return scm_from_json(j);
}

// Observational P(X, Y) shared by the confounded pair, rows (0,0),(0,1),(1,0),(1,1).
inline std::vector<double> confounded_pair_table() { return {0.594, 0.066, 0.05, 0.29}; }

// Random SCM over n variables with the given cardinality. Each variable takes
// earlier variables as parents with probability 1/2; exogenous blocks are
// private, plus one block shared by a random pair when `confound` is set.
inline Scm random_scm(std::mt19937_64& rng, int n, int card = 2, bool confound = true) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<std::string> dv;
    for (int k = 0; k < card; ++k) dv.push_back(std::to_string(k));
    std::vector<Variable> vars;
    std::vector<ExogenousBlock> exo;
    for (int i = 0; i < n; ++i) vars.push_back({"V" + std::to_string(i), Domain{dv}});
    auto block = [&](const std::string& name, int size) {
        ExogenousBlock b{name, {}, {}};
        double s = 0;
        for (int k = 0; k < size; ++k) {
            b.domain.values.push_back(std::to_string(k));
            b.pmf.push_back(unif(rng));
            s += b.pmf.back();
        }
        for (auto& p : b.pmf) p /= s;
        exo.push_back(b);
    };
    for (int i = 0; i < n; ++i) block("U" + std::to_string(i), 3);
    int a = -1, b = -1;
    if (confound && n >= 2) {
        a = std::uniform_int_distribution<int>(0, n - 1)(rng);
        do b = std::uniform_int_distribution<int>(0, n - 1)(rng);
        while (b == a);
        block("U_shared", 2);
    }
    std::vector<Mechanism> mech;
    for (int i = 0; i < n; ++i) {
        Mechanism m;
        m.output = vars[i].name;
        for (int j = 0; j < i; ++j)
            if (coin(rng)) m.endo_parents.push_back(vars[j].name);
        m.exo_parents.push_back("U" + std::to_string(i));
        if (i == a || i == b) m.exo_parents.push_back("U_shared");
        std::size_t rows = 1;
        for (std::size_t k = 0; k < m.endo_parents.size(); ++k) rows *= card;
        rows *= 3;
        if (i == a || i == b) rows *= 2;
        std::uniform_int_distribution<int> val(0, card - 1);
        for (std::size_t r = 0; r < rows; ++r) m.table.push_back(val(rng));
        mech.push_back(m);
    }
    return Scm(vars, exo, mech);
}

} // namespace testing
