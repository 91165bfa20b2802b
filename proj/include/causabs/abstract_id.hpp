#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causabs/abstraction.hpp"
#include "causabs/diagram.hpp"
#include "causabs/io.hpp"
#include "causabs/ncm.hpp"

namespace causabs {

struct GapTestResult {
    bool accept = false;  // true: the min and max runs agree within epsilon
    std::vector<double> gaps;  // max - min per paired rerun
    double mean = 0, sd = 0, upper = 0;
    double alpha = 0.05, epsilon = 0.05;
};

// One-sided t upper bound on the mean gap; accept when it is below epsilon.
// Throws ValidationError with fewer than 2 pairs or mismatched lengths.
GapTestResult gap_test(const std::vector<double>& min_runs, const std::vector<double>& max_runs, double alpha = 0.05,
                       double epsilon = 0.05);

struct AbstractIdTask {
    CtfQuery query;                           // over the low variables
    std::vector<Variable> low_vars;
    std::vector<InterventionalPmf> datasets;  // over the low variables
    InterClustering inter;
    IntraClustering intra;
    Cdag cdag;                                // over the cluster names
    TrainConfig train;
    int reruns = 4;
    double alpha = 0.05, epsilon = 0.05;
    double data_tol = 1e-2;  // allowed cross-entropy above the data entropy
    int threads = 0;         // 0 = hardware concurrency
    EvalOptions eval;
};

enum class IdStatus { Id, Fail, Inconclusive };
std::string status_name(IdStatus s);
int status_exit_code(IdStatus s);  // 0, 3, 2

struct IdRun {
    std::uint64_t seed = 0;
    FitResult min, max;
};

struct AbstractIdResult {
    IdStatus status = IdStatus::Inconclusive;
    std::optional<double> value;  // mean of the minimizing runs when ID
    GapTestResult gap;
    std::vector<IdRun> runs;
    CtfQuery lifted;
    std::string detail;
};

AbstractIdResult neural_abstract_id(const AbstractIdTask& task);

struct EstimateResult {
    bool matched = false;  // data loss within data_tol of the entropy
    double value = 0;
    FitResult fit;
    CtfQuery lifted;
    Ncm model;
};

// Single unregularized fit; assumes the query is identifiable.
EstimateResult estimate_query(const AbstractIdTask& task);

json gap_to_json(const GapTestResult& g);
json abstract_id_to_json(const AbstractIdResult& r);
json estimate_to_json(const EstimateResult& r);

} // namespace causabs
