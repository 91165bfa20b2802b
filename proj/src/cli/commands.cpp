#include "causabs/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "causabs/abstract_id.hpp"
#include "causabs/abstraction_io.hpp"
#include "causabs/errors.hpp"
#include "causabs/inference.hpp"
#include "causabs/ncm_io.hpp"
#include "causabs/project.hpp"

namespace causabs {

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void emit(const json& j, const std::string& path, std::ostream& out) {
    if (path.empty()) out << j.dump(2) << "\n";
    else write_json_file(path, j);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write " + path);
    return f;
}

// "X=1,Y=0" -> map
ValueMap parse_assignment(const std::string& text) {
    ValueMap m;
    if (text.empty()) return m;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
            throw ValidationError("expected VAR=VAL in \"" + item + "\"");
        m[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return m;
}

// A query given as an index into the project's queries or as query text.
CtfQuery pick_query(const Project& p, const std::string& q) {
    if (q.empty()) {
        if (p.queries.empty()) throw ValidationError("project has no queries; pass --query");
        return p.queries.front();
    }
    if (std::all_of(q.begin(), q.end(), ::isdigit)) {
        auto i = std::stoul(q);
        if (i >= p.queries.size()) throw ValidationError("query index out of range");
        return p.queries[i];
    }
    return parse_query(q);
}

struct FitFlags {
    int iterations = -1;
    double lr = -1;
    long long seed = -1;
    int n_c = -1;
    int reruns = 4;
    double epsilon = 0.05, alpha = 0.05, data_tol = 1e-2;
    int threads = 0;

    void add(CLI::App* c, bool id) {
        c->add_option("--iterations", iterations, "Optimizer steps per fit");
        c->add_option("--lr", lr, "Learning rate");
        c->add_option("--seed", seed, "Base seed");
        c->add_option("--n-c", n_c, "Exogenous cardinality per clique");
        c->add_option("--data-tol", data_tol, "Allowed cross-entropy above the data entropy");
        if (id) {
            c->add_option("--reruns", reruns, "Paired min/max reruns");
            c->add_option("--epsilon", epsilon, "Gap tolerance");
            c->add_option("--alpha", alpha, "Test level");
            c->add_option("--threads", threads, "Worker threads (0 = all cores)");
        }
    }

    AbstractIdTask task(const Project& p, const CtfQuery& q) const {
        AbstractIdTask t;
        t.query = q;
        t.low_vars = low_variables(p);
        t.datasets = p.datasets;
        t.inter = p.inter ? *p.inter : singleton_clustering([&] {
            std::vector<std::string> n;
            for (const auto& v : t.low_vars) n.push_back(v.name);
            return n;
        }());
        t.intra = p.intra;
        if (p.cdag) t.cdag = *p.cdag;
        else t.cdag = induce_cdag(need_diagram(p), t.inter);
        t.train = p.train;
        if (iterations >= 0) t.train.iterations = iterations;
        if (lr > 0) t.train.lr = lr;
        if (seed >= 0) t.train.seed = static_cast<std::uint64_t>(seed);
        if (n_c >= 0) t.train.n_c = n_c;
        t.reruns = reruns;
        t.epsilon = epsilon;
        t.alpha = alpha;
        t.data_tol = data_tol;
        t.threads = threads;
        return t;
    }
};

void write_series(const AbstractIdResult& r, const std::string& path) {
    auto f = open_out(path);
    f << "iteration,run,min_query,max_query,gap,min_data_loss,max_data_loss\n";
    for (std::size_t k = 0; k < r.runs.size(); ++k) {
        const auto& a = r.runs[k].min.series;
        const auto& b = r.runs[k].max.series;
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
            f << a[i].iteration << "," << k << "," << a[i].query_value << "," << b[i].query_value << ","
              << b[i].query_value - a[i].query_value << "," << a[i].data_loss << "," << b[i].data_loss << "\n";
    }
}

std::vector<int> parse_sweep(const std::string& s) {
    std::string body = s.rfind("n=", 0) == 0 ? s.substr(2) : s;
    std::vector<int> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ValidationError("bad sweep size \"" + item + "\"");
        }
        if (out.back() <= 0) throw ValidationError("sweep sizes must be positive");
    }
    if (out.empty()) throw ValidationError("empty sweep");
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causal abstraction toolkit"};
    app.require_subcommand(1);

    std::string project, query, out_path, series, given, intervention, checkpoint, sweep, high, data_aic;
    int layer = 0, worlds = 2, n = 100, seeds = 10;
    long long seed = 0;
    double tol = 1e-9;
    bool aic = false, unqueried = false;
    FitFlags ff;

    auto* eval = app.add_subcommand("eval", "Evaluate a query on the project's SCM");
    eval->add_option("project", project, "Project or SCM JSON")->required();
    eval->add_option("query", query, "Query text")->required();

    auto* abs = app.add_subcommand("abstract", "Build the high-level SCM from the project's clusters");
    abs->add_option("project", project)->required();
    abs->add_option("-o,--out", out_path, "Output file (default stdout)");

    auto* check = app.add_subcommand("check", "Check the AIC or layer consistency");
    check->add_option("project", project)->required();
    check->add_flag("--aic", aic, "Abstract invariance condition on the SCM");
    check->add_option("--layer", layer, "Layer consistency (1, 2 or 3) of the built abstraction")->check(CLI::Range(1, 3));
    check->add_option("--worlds", worlds, "Worlds per layer-3 event");
    check->add_option("--tol", tol, "Tolerance");
    check->add_option("--high", high, "Compare against this high-level SCM instead of building one");
    check->add_option("--data-aic", data_aic, "Check the AIC on the datasets: conditional or interventional");

    auto* ident = app.add_subcommand("identify", "Decide identifiability across the abstraction and estimate");
    ident->add_option("project", project)->required();
    ident->add_option("--query", query, "Query text or index (default: first project query)");
    ident->add_option("--series", series, "CSV of min/max trajectories");
    ident->add_option("-o,--out", out_path, "Result JSON (default stdout)");
    ff.add(ident, true);

    auto* est = app.add_subcommand("estimate", "Estimate an identifiable query with a single fit");
    est->add_option("project", project)->required();
    est->add_option("--query", query, "Query text or index");
    est->add_option("--sweep", sweep, "Sample sizes, e.g. n=1000,10000,100000");
    est->add_option("--seeds", seeds, "Seeds per sample size");
    est->add_option("--series", series, "CSV of sweep rows");
    est->add_option("--checkpoint", checkpoint, "Write the fitted model here");
    est->add_option("-o,--out", out_path, "Result JSON (default stdout)");
    ff.add(est, false);

    auto* choose = app.add_subcommand("choose-clusters", "Choose intervariable clusters for the project's queries");
    choose->add_option("project", project)->required();
    choose->add_flag("--project-unqueried", unqueried, "Allow dropping variables no query mentions");
    choose->add_option("-o,--out", out_path, "Output file (default stdout)");

    auto* samp = app.add_subcommand("sample", "Draw samples from a model");
    samp->add_option("project", project)->required();
    samp->add_option("--checkpoint", checkpoint, "Model checkpoint (default: hard encoding of the project's SCM)");
    samp->add_option("--do", intervention, "Intervention, e.g. X=1,Z=0");
    samp->add_option("--given", given, "Evidence events, e.g. Y_{X=1}=1,X=0");
    samp->add_option("-n", n, "Number of samples");
    samp->add_option("--seed", seed, "Seed");
    samp->add_option("-o,--out", out_path, "CSV output (default stdout)");

    std::vector<std::string> argv_s = {"causabs"};
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_s) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        Project p = load_project(project);

        if (eval->parsed()) {
            out << fixed6(ctf_prob(need_scm(p), parse_query(query))) << "\n";
            return 0;
        }

        if (abs->parsed()) {
            try {
                auto a = construct_abstraction(need_scm(p), need_clusters(p), p.intra);
                json j = {{"scm", scm_to_json(a.high)}, {"tau", clusters_to_json(a.tau.inter(), a.tau.intra())}};
                emit(j, out_path, out);
                return 0;
            } catch (const AicError& e) {
                auto tau = build_tau(need_scm(p).variables(), need_clusters(p), p.intra);
                out << aic_report_to_json(e.report, tau).dump(2) << "\n";
                err << "error: " << e.what() << "\n";
                return 1;
            }
        }

        if (check->parsed()) {
            int picked = (aic ? 1 : 0) + (layer ? 1 : 0) + (data_aic.empty() ? 0 : 1);
            if (picked != 1) throw ValidationError("pass exactly one of --aic, --layer, --data-aic");
            if (!data_aic.empty()) {
                DataAicMode mode;
                if (data_aic == "conditional") mode = DataAicMode::Conditional;
                else if (data_aic == "interventional") mode = DataAicMode::Interventional;
                else throw ValidationError("--data-aic takes conditional or interventional");
                auto tau = build_tau(low_variables(p), need_clusters(p), p.intra);
                auto r = check_data_aic(p.datasets, tau, mode, std::max(tol, 1e-12));
                out << aic_report_to_json(r, tau).dump(2) << "\n";
                return r.holds ? 0 : 1;
            }
            const Scm& scm = need_scm(p);
            auto tau = build_tau(scm.variables(), need_clusters(p), p.intra);
            if (aic) {
                auto r = check_aic(scm, tau);
                out << aic_report_to_json(r, tau).dump(2) << "\n";
                return r.holds ? 0 : 1;
            }
            Scm m_high;
            if (!high.empty()) {
                m_high = need_scm(load_project(high));
            } else {
                try {
                    m_high = construct_abstraction(scm, need_clusters(p), p.intra).high;
                } catch (const AicError& e) {
                    out << aic_report_to_json(e.report, tau).dump(2) << "\n";
                    err << "error: " << e.what() << "\n";
                    return 1;
                }
            }
            LayerOptions lo;
            lo.tol = tol;
            lo.worlds = worlds;
            auto r = check_layer_tau_consistency(scm, m_high, tau, layer, lo);
            out << consistency_to_json(r).dump(2) << "\n";
            return r.consistent ? 0 : 1;
        }

        if (ident->parsed()) {
            auto task = ff.task(p, pick_query(p, query));
            auto r = neural_abstract_id(task);
            if (!series.empty()) write_series(r, series);
            emit(abstract_id_to_json(r), out_path, out);
            if (r.status == IdStatus::Inconclusive) err << "inconclusive: " << r.detail << "\n";
            return status_exit_code(r.status);
        }

        if (est->parsed()) {
            auto q = pick_query(p, query);
            auto task = ff.task(p, q);
            if (sweep.empty()) {
                auto r = estimate_query(task);
                if (!checkpoint.empty()) write_json_file(checkpoint, ncm_to_json(r.model, task.train));
                emit(estimate_to_json(r), out_path, out);
                return r.matched ? 0 : 2;
            }
            const Scm& scm = need_scm(p);
            auto tau = build_tau(task.low_vars, task.inter, task.intra);
            double truth = lowered_prob(scm, tau, preimage_event(tau, q));
            std::ofstream csv;
            if (!series.empty()) {
                csv = open_out(series);
                csv << "n,seed,estimate,truth,abs_error\n";
            }
            json rows = json::array();
            bool all_matched = true;
            for (int size : parse_sweep(sweep)) {
                std::vector<double> errs;
                for (int s = 0; s < seeds; ++s) {
                    auto t = task;
                    for (auto& d : t.datasets)
                        d.pmf = sample_empirical(layer_pmf(scm, d.intervention), size,
                                                 static_cast<std::uint64_t>(s) * 1000003ULL + static_cast<std::uint64_t>(size));
                    auto r = estimate_query(t);
                    all_matched = all_matched && r.matched;
                    errs.push_back(std::abs(r.value - truth));
                    if (csv) csv << size << "," << s << "," << r.value << "," << truth << "," << errs.back() << "\n";
                }
                rows.push_back({{"n", size}, {"median_abs_error", median(errs)}, {"seeds", seeds}});
            }
            emit({{"truth", truth}, {"sweep", rows}}, out_path, out);
            return 0;
        }

        if (choose->parsed()) {
            if (!p.noncausal) throw ValidationError("project has no non-causal graph");
            ChooseOptions opt;
            opt.project_unqueried = unqueried;
            auto r = choose_clusters(need_diagram(p), *p.noncausal, p.queries, default_id_oracle, opt);
            json j;
            j["inter"] = r.clusters ? clusters_to_json(*r.clusters, {})["inter"] : json(nullptr);
            j["c_min"] = clusters_to_json(r.c_min, {})["inter"];
            j["c_max"] = clusters_to_json(r.c_max, {})["inter"];
            j["status"] = r.clusters ? "OK" : "FAIL";
            if (!r.reason.empty()) j["reason"] = r.reason;
            emit(j, out_path, out);
            return r.clusters ? 0 : 3;
        }

        if (samp->parsed()) {
            Ncm m = checkpoint.empty() ? ncm_from_scm(need_scm(p)) : ncm_from_json(read_json_file(checkpoint));
            std::vector<Term> ev;
            if (!given.empty()) ev = parse_query("P(" + given + ")").terms;
            auto rows = sample(m, ev, parse_assignment(intervention), n, static_cast<std::uint64_t>(seed));
            std::ofstream file;
            if (!out_path.empty()) file = open_out(out_path);
            std::ostream& o = out_path.empty() ? out : file;
            for (int v = 0; v < m.n_nodes(); ++v) o << (v ? "," : "") << m.names()[v];
            o << "\n";
            for (const auto& r : rows) {
                for (int v = 0; v < m.n_nodes(); ++v) o << (v ? "," : "") << r.at(m.names()[v]);
                o << "\n";
            }
            return 0;
        }
    } catch (const AicError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        err << "error: malformed JSON: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace causabs
