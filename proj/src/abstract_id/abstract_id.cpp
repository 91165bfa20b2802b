#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "causabs/abstract_id.hpp"
#include "causabs/errors.hpp"
#include "causabs/ncm_io.hpp"

namespace causabs {

std::string status_name(IdStatus s) {
    switch (s) {
    case IdStatus::Id: return "ID";
    case IdStatus::Fail: return "FAIL";
    default: return "INCONCLUSIVE";
    }
}

int status_exit_code(IdStatus s) {
    switch (s) {
    case IdStatus::Id: return 0;
    case IdStatus::Fail: return 3;
    default: return 2;
    }
}

namespace {

struct Prepared {
    ConstructiveTau tau;
    std::vector<InterventionalPmf> data;
    CtfQuery lifted;
    std::vector<Domain> domains;  // in cdag node order
};

Prepared prepare(const AbstractIdTask& t) {
    if (t.datasets.empty()) throw ValidationError("at least one dataset is required");
    Prepared p;
    p.tau = build_tau(t.low_vars, t.inter, t.intra);
    for (const auto& d : t.datasets) p.data.push_back(push_dataset(p.tau, d));
    p.lifted = lift_query(p.tau, t.query);
    const auto& hv = p.tau.high_vars();
    if (t.cdag.nodes().size() != hv.size()) throw ValidationError("C-DAG nodes must be exactly the cluster names");
    for (const auto& n : t.cdag.nodes()) {
        auto it = std::find_if(hv.begin(), hv.end(), [&](const Variable& v) { return v.name == n; });
        if (it == hv.end()) throw ValidationError("C-DAG node " + n + " is not a cluster");
        p.domains.push_back(it->domain);
    }
    return p;
}

double excess(const FitResult& f) { return f.data_loss - f.data_entropy; }

// Runs jobs[i]() for every i on up to `threads` workers; rethrows the first error.
void run_parallel(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    int k = std::max(1, std::min<int>(static_cast<int>(n), threads > 0 ? threads : std::max(hw, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < k; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace

AbstractIdResult neural_abstract_id(const AbstractIdTask& task) {
    if (task.reruns < 2) throw ValidationError("at least 2 reruns are required");
    Prepared p = prepare(task);
    AbstractIdResult res;
    res.lifted = p.lifted;
    res.runs.resize(task.reruns);

    run_parallel(2 * static_cast<std::size_t>(task.reruns), task.threads, [&](std::size_t i) {
        int r = static_cast<int>(i / 2);
        bool maximize = i % 2 == 1;
        TrainConfig cfg = task.train;
        cfg.seed = task.train.seed + static_cast<std::uint64_t>(r);
        Ncm m(task.cdag, p.domains, cfg);
        QueryReg reg{p.lifted, maximize ? -1.0 : 1.0};
        FitResult f = fit(m, p.data, reg, cfg, task.eval);
        res.runs[r].seed = cfg.seed;
        (maximize ? res.runs[r].max : res.runs[r].min) = std::move(f);
    });

    std::vector<double> lo, hi;
    for (const auto& run : res.runs) {
        for (const FitResult* f : {&run.min, &run.max}) {
            if (excess(*f) > task.data_tol || !f->query_value) {
                res.status = IdStatus::Inconclusive;
                res.detail = "run with seed " + std::to_string(run.seed) + " did not match the data (excess cross-entropy " +
                             std::to_string(excess(*f)) + ")";
                return res;
            }
        }
        lo.push_back(*run.min.query_value);
        hi.push_back(*run.max.query_value);
    }
    res.gap = gap_test(lo, hi, task.alpha, task.epsilon);
    if (res.gap.accept) {
        res.status = IdStatus::Id;
        double s = 0;
        for (double v : lo) s += v;
        res.value = s / static_cast<double>(lo.size());
    } else {
        res.status = IdStatus::Fail;
    }
    return res;
}

EstimateResult estimate_query(const AbstractIdTask& task) {
    Prepared p = prepare(task);
    EstimateResult res;
    res.lifted = p.lifted;
    Ncm m(task.cdag, p.domains, task.train);
    res.fit = fit(m, p.data, std::nullopt, task.train, task.eval);
    res.matched = excess(res.fit) <= task.data_tol;
    res.value = ctf_pmf(m, p.lifted, nullptr, task.eval);
    res.model = std::move(m);
    return res;
}

json gap_to_json(const GapTestResult& g) {
    return {{"accept", g.accept}, {"gaps", g.gaps}, {"mean", g.mean}, {"sd", g.sd},
            {"upper", g.upper}, {"alpha", g.alpha}, {"epsilon", g.epsilon}};
}

json abstract_id_to_json(const AbstractIdResult& r) {
    json j;
    j["status"] = status_name(r.status);
    j["value"] = r.value ? json(*r.value) : json(nullptr);
    j["lifted_query"] = print_query(r.lifted);
    j["gap"] = r.gap.gaps.empty() ? json(nullptr) : gap_to_json(r.gap);
    json runs = json::array();
    for (const auto& run : r.runs)
        runs.push_back({{"seed", run.seed}, {"min", fit_result_to_json(run.min)}, {"max", fit_result_to_json(run.max)}});
    j["runs"] = runs;
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

json estimate_to_json(const EstimateResult& r) {
    return {{"value", r.value}, {"matched", r.matched}, {"lifted_query", print_query(r.lifted)},
            {"fit", fit_result_to_json(r.fit)}};
}

} // namespace causabs
