// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "causabs/abstract_id.hpp"
#include "causabs/abstraction.hpp"
#include "causabs/clustering.hpp"
#include "causabs/identify.hpp"
#include "causabs/inference.hpp"
#include "gradcheck.hpp"
#include "support.hpp"

using namespace causabs;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream note;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            note << "[failed: " << what << "] ";
        }
    }
};

AbstractIdTask task_for(const Project& p, const std::string& query) {
    AbstractIdTask t;
    t.query = parse_query(query);
    t.low_vars = low_variables(p);
    t.datasets = p.datasets;
    t.inter = need_clusters(p);
    t.intra = p.intra;
    t.cdag = need_cdag(p);
    t.train = p.train;
    return t;
}

ConstructiveTau tau_of(const Project& p) { return build_tau(p.scm->variables(), *p.inter, p.intra); }

// ---- 1

void golden_table(Outcome& o) {
    // u (U_RY, U_A, U_B, U_Y) -> R, A, B, Y, Y_{A=0,B=0}, Y_{A=1,B=1}, P
    struct Row {
        int u[4];
        int v[4];
        int y00, y11;
        double p;
    };
    const Row rows[16] = {
        {{0, 0, 0, 0}, {0, 0, 0, 0}, 0, 0, 0.288}, {{0, 0, 0, 1}, {0, 0, 0, 1}, 1, 1, 0.032},
        {{0, 0, 1, 0}, {0, 0, 1, 0}, 0, 0, 0.072}, {{0, 0, 1, 1}, {0, 0, 1, 1}, 1, 1, 0.008},
        {{0, 1, 0, 0}, {0, 1, 0, 0}, 0, 0, 0.072}, {{0, 1, 0, 1}, {0, 1, 0, 1}, 1, 1, 0.008},
        {{0, 1, 1, 0}, {0, 1, 1, 0}, 0, 0, 0.018}, {{0, 1, 1, 1}, {0, 1, 1, 1}, 1, 1, 0.002},
        {{1, 0, 0, 0}, {1, 1, 1, 1}, 0, 1, 0.288}, {{1, 0, 0, 1}, {1, 1, 1, 0}, 1, 0, 0.032},
        {{1, 0, 1, 0}, {1, 1, 0, 0}, 0, 1, 0.072}, {{1, 0, 1, 1}, {1, 1, 0, 1}, 1, 0, 0.008},
        {{1, 1, 0, 0}, {1, 0, 0, 0}, 0, 1, 0.072}, {{1, 1, 0, 1}, {1, 0, 0, 1}, 1, 0, 0.008},
        {{1, 1, 1, 0}, {1, 0, 1, 0}, 0, 1, 0.018}, {{1, 1, 1, 1}, {1, 0, 1, 1}, 1, 0, 0.002},
    };
    Scm m = testing::drug_scm();
    Pmf obs = layer_pmf(m, {});
    auto s = [](int x) { return std::to_string(x); };
    double worst = 0;
    for (const auto& r : rows) {
        ValueMap u = {{"U_RY", s(r.u[0])}, {"U_A", s(r.u[1])}, {"U_B", s(r.u[2])}, {"U_Y", s(r.u[3])}};
        ValueMap v = {{"R", s(r.v[0])}, {"A", s(r.v[1])}, {"B", s(r.v[2])}, {"Y", s(r.v[3])}};
        o.require(evaluate_unit(m, u, {}) == v, "factual values");
        o.require(evaluate_unit(m, u, {{"A", "0"}, {"B", "0"}}).at("Y") == s(r.y00), "Y under do(A=0,B=0)");
        o.require(evaluate_unit(m, u, {{"A", "1"}, {"B", "1"}}).at("Y") == s(r.y11), "Y under do(A=1,B=1)");
        std::string q = "P(R=" + s(r.v[0]) + ", A=" + s(r.v[1]) + ", B=" + s(r.v[2]) + ", Y=" + s(r.v[3]) +
                        ", Y_{A=0,B=0}=" + s(r.y00) + ", Y_{A=1,B=1}=" + s(r.y11) + ")";
        worst = std::max(worst, std::abs(ctf_prob(m, parse_query(q)) - r.p));
        worst = std::max(worst, std::abs(obs.at(v) - r.p));
    }
    o.require(worst <= 1e-12, "16 table probabilities");
    double cond = ctf_prob(m, parse_query("P(Y=1 | A=1, B=1)"));
    double inter = ctf_prob(m, parse_query("P(Y_{A=1,B=1}=1)"));
    o.require(std::abs(cond - 0.852941) <= 1e-6, "conditional");
    o.require(std::abs(inter - 0.5) <= 1e-12, "interventional");
    o.note << "max table error " << worst << ", P(Y=1|A=1,B=1)=" << cond << ", P(Y_{A=1,B=1}=1)=" << inter;
}

// ---- 2

void construction(Outcome& o) {
    auto p = testing::project("drug.json");
    auto a = construct_abstraction(*p.scm, *p.inter, p.intra);
    auto l1 = check_layer_tau_consistency(*p.scm, a.high, a.tau, 1);
    auto l2 = check_layer_tau_consistency(*p.scm, a.high, a.tau, 2);
    double q = ctf_prob(a.high, parse_query("P(Y_{X=1}=1)"));
    o.require(l1.consistent, "L1 consistency " + l1.detail);
    o.require(l2.consistent, "L2 consistency " + l2.detail);
    o.require(std::abs(q - 0.5) <= 1e-9, "P(Y_{X=1}=1)");
    o.note << "L1 and L2 consistent, P_H(Y_{X=1}=1)=" << q;
}

// ---- 3

void aic(Outcome& o) {
    auto tc = testing::project("cholesterol_tc.json");
    auto r = check_aic(*tc.scm, tau_of(tc));
    o.require(!r.holds, "TC must fail");
    if (r.witness) {
        std::set<ValueMap> pair = {r.witness->v1, r.witness->v2};
        std::set<ValueMap> want = {{{"HDL", "0"}, {"LDL", "1"}}, {{"HDL", "1"}, {"LDL", "0"}}};
        o.require(pair == want, "witness pair");
    } else {
        o.require(false, "witness missing");
    }
    auto z = testing::project("cholesterol_z.json");
    o.require(check_aic(*z.scm, tau_of(z)).holds, "Z must hold");
    o.note << "TC fails with the (0,1)/(1,0) witness, Z holds";
}

// ---- 4

void witness_pair(Outcome& o) {
    auto table = testing::confounded_pair_table();
    double q[2];
    for (int k = 0; k < 2; ++k) {
        Ncm m = ncm_from_scm(testing::confounded_pair_model(k == 1));
        Pmf p = induced_pmf(m, {});
        double worst = 0;
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(p.prob[i] - table[i]));
        o.require(worst <= 1e-9, "pmf of model " + std::to_string(k + 1));
        q[k] = ctf_pmf(m, parse_query("P(Y_{X=1}=1)"));
    }
    o.require(std::abs(q[0] - 0.95) <= 1e-9, "first model query");
    o.require(std::abs(q[1] - 0.29) <= 1e-9, "second model query");
    o.note << "both match the table, P(Y_{X=1}=1) = " << q[0] << " / " << q[1];
}

// ---- 5 and 7(b)

struct IdCase {
    std::string name;
    AbstractIdResult result;
    bool graph_id = false;
    double seconds = 0;
};
std::vector<IdCase> id_cases;

void end_to_end(Outcome& o) {
    using clock = std::chrono::steady_clock;
    auto run = [&](const std::string& file, const std::string& query) {
        auto p = testing::project(file);
        auto t = task_for(p, query);
        auto start = clock::now();
        IdCase c{file, neural_abstract_id(t), false, 0};
        c.seconds = std::chrono::duration<double>(clock::now() - start).count();
        c.graph_id = identify_interventional(t.cdag, c.result.lifted).identifiable;
        o.require(c.seconds <= 300, file + " runtime");
        id_cases.push_back(c);
        return p;
    };

    run("drug.json", "P(Y_{A=1,B=1}=1)");
    const auto& bow = id_cases.back().result;
    o.require(bow.status == IdStatus::Fail, "bow status");
    o.require(bow.gap.mean >= 0.3, "bow mean gap");
    o.note << "bow " << status_name(bow.status) << " gap " << bow.gap.mean << "; ";

    run("drug_with_r.json", "P(Y_{A=1,B=1}=1)");
    const auto& bd = id_cases.back().result;
    o.require(bd.status == IdStatus::Id && bd.value && std::abs(*bd.value - 0.5) <= 0.05, "backdoor value");
    o.note << "backdoor " << status_name(bd.status) << " " << bd.value.value_or(NAN) << "; ";

    auto pf = run("frontdoor.json", "P(B_{D=1}=1)");
    const auto& fd = id_cases.back().result;
    double truth = ctf_prob(*pf.scm, parse_query("P(B_{D=1}=1)"));
    Cdag g = need_cdag(pf);
    auto verdict = identify_interventional(g, {"B_H"}, {"D_H"});
    double via_estimand = NAN;
    if (verdict.identifiable) {
        Pmf obs = push_pmf(tau_of(pf), layer_pmf(*pf.scm, {}));
        via_estimand = evaluate_estimand(verdict.estimand, obs, {{"D_H", "1"}, {"B_H", "1"}});
    }
    o.require(std::abs(via_estimand - truth) <= 1e-9, "front-door estimand vs enumeration");
    o.require(fd.status == IdStatus::Id && fd.value && std::abs(*fd.value - truth) <= 0.05, "front-door value");
    o.note << "front-door " << status_name(fd.status) << " " << fd.value.value_or(NAN) << " (truth " << truth << ")";
    double slowest = 0;
    for (const auto& c : id_cases) slowest = std::max(slowest, c.seconds);
    o.note << "; slowest run " << slowest << " s";
}

// ---- 6

void mustache(Outcome& o) {
    auto p = testing::project("mustache.json");
    auto r = choose_clusters(*p.diagram, *p.noncausal, p.queries);
    auto make = [](std::vector<std::vector<std::string>> sets) {
        InterClustering c;
        for (auto& s : sets) c.clusters.push_back({default_cluster_name(s), s});
        return c;
    };
    auto expect = make({{"A"}, {"G"}, {"T"}, {"H1", "H2", "O1", "O2", "O3", "O4"}, {"P1", "P2", "P3", "P4"}});
    o.require(r.clusters.has_value(), "clustering returned");
    if (r.clusters) {
        o.require(same_partition(*r.clusters, expect), "expected clustering");
        auto c = check_conditions(*r.clusters, *p.diagram, *p.noncausal, p.queries);
        o.require(c.c1 && c.c2 && c.c3 && c.c4, "C1-C4 recheck");
    }
    auto merged = make({{"A", "G", "H1", "H2", "O1", "O2", "O3", "O4"}, {"T"}, {"P1", "P2", "P3", "P4"}});
    auto m = check_conditions(merged, *p.diagram, *p.noncausal, p.queries);
    o.require(!(m.c1 && m.c2 && m.c3 && m.c4), "A/G/M merge rejected");
    o.note << "5 clusters as expected, merge rejected";
}

// ---- 7

// Two encodings of X = Bern(0.3), Y = X xor Bern(0.2).
Scm l3_model(bool alt) {
    json j;
    j["variables"] = {{{"name", "X"}, {"domain", {0, 1}}}, {{"name", "Y"}, {"domain", {0, 1}}}};
    if (!alt) {
        j["exogenous"] = {{{"name", "U1"}, {"domain", {0, 1}}, {"pmf", {0.7, 0.3}}},
                          {{"name", "U2"}, {"domain", {0, 1}}, {"pmf", {0.8, 0.2}}}};
        j["mechanisms"] = {{{"output", "X"}, {"exo_parents", {"U1"}}, {"expr", "U1"}},
                           {{"output", "Y"}, {"endo_parents", {"X"}}, {"exo_parents", {"U2"}}, {"expr", "ite(U2 == 1, 1 - X, X)"}}};
    } else {
        j["exogenous"] = {{{"name", "W1"}, {"domain", {0, 1, 2}}, {"pmf", {0.35, 0.35, 0.3}}},
                          {{"name", "W2"}, {"domain", {0, 1, 2}}, {"pmf", {0.5, 0.3, 0.2}}}};
        j["mechanisms"] = {{{"output", "X"}, {"exo_parents", {"W1"}}, {"expr", "W1 == 2"}},
                           {{"output", "Y"}, {"endo_parents", {"X"}}, {"exo_parents", {"W2"}}, {"expr", "ite(W2 == 2, 1 - X, X)"}}};
    }
    return scm_from_json(j);
}

bool lemma_equivalence(Outcome& o) {
    Scm a = l3_model(false), b = l3_model(true);
    bool ok = max_abs_diff(functional_ctf_pmf(a), functional_ctf_pmf(b)) <= 1e-12;
    // every one- and two-world joint event
    std::vector<std::vector<Setting>> inters = {{}, {{"X", "0"}}, {{"X", "1"}}, {{"Y", "0"}}, {{"Y", "1"}}};
    std::vector<Term> terms;
    for (const auto& x : inters)
        for (const char* xv : {"0", "1"})
            for (const char* yv : {"0", "1"}) {
                Term t{{}, x};
                if (x.empty() || x[0].first != "X") t.outcome.push_back({"X", xv});
                if (x.empty() || x[0].first != "Y") t.outcome.push_back({"Y", yv});
                if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
            }
    int count = 0;
    double worst = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        worst = std::max(worst, std::abs(ctf_prob(a, {{terms[i]}, {}}) - ctf_prob(b, {{terms[i]}, {}})));
        ++count;
        for (std::size_t k = i + 1; k < terms.size(); ++k) {
            CtfQuery q{{terms[i], terms[k]}, {}};
            worst = std::max(worst, std::abs(ctf_prob(a, q) - ctf_prob(b, q)));
            ++count;
        }
    }
    ok = ok && worst <= 1e-12;
    o.note << "(a) " << count << " queries, max diff " << worst << "; ";
    return ok;
}

bool thm1_crosscheck(Outcome& o) {
    bool ok = !id_cases.empty();
    int agree = 0;
    for (const auto& c : id_cases) {
        bool gap_id = c.result.status == IdStatus::Id;
        if (gap_id == c.graph_id) ++agree;
        else ok = false;
    }
    o.note << "(b) " << agree << "/" << id_cases.size() << " agree; ";
    return ok;
}

// Random partition of the tuples of a cluster; labels b0, b1, ...
ClusterBlocks random_blocks(const std::string& cluster, const std::vector<std::vector<std::string>>& tuples,
                            std::mt19937_64& rng) {
    int k = std::uniform_int_distribution<int>(1, tuples.size())(rng);
    std::vector<std::vector<std::vector<std::string>>> parts(k);
    for (const auto& t : tuples) parts[std::uniform_int_distribution<int>(0, k - 1)(rng)].push_back(t);
    ClusterBlocks out{cluster, {}};
    for (auto& p : parts)
        if (!p.empty()) out.blocks.push_back({"b" + std::to_string(out.blocks.size()), p});
    return out;
}

ClusterBlocks refine(const ClusterBlocks& c, std::mt19937_64& rng) {
    ClusterBlocks out{c.cluster, {}};
    for (const auto& b : c.blocks) {
        auto sub = random_blocks(c.cluster, b.values, rng);
        for (auto& s : sub.blocks) out.blocks.push_back({"b" + std::to_string(out.blocks.size()), s.values});
    }
    return out;
}

bool aic_refinement(Outcome& o) {
    std::mt19937_64 rng(2024);
    std::vector<std::vector<std::vector<std::string>>> layouts = {
        {{"V0", "V1"}, {"V2", "V3"}}, {{"V0"}, {"V1", "V2"}, {"V3"}}, {{"V0", "V1", "V2"}, {"V3"}}};
    int instances = 0, broken = 0, attempts = 0;
    while (instances < 50 && attempts < 100000) {
        ++attempts;
        Scm m = testing::random_scm(rng, 4, 2);
        const auto& layout = layouts[std::uniform_int_distribution<int>(0, layouts.size() - 1)(rng)];
        InterClustering inter;
        IntraClustering coarse;
        for (std::size_t c = 0; c < layout.size(); ++c) {
            std::string name = "C" + std::to_string(c);
            inter.clusters.push_back({name, layout[c]});
            std::vector<std::vector<std::string>> tuples;
            std::vector<int> d(layout[c].size(), 0), radix(layout[c].size(), 2);
            do {
                std::vector<std::string> t;
                for (int x : d) t.push_back(std::to_string(x));
                tuples.push_back(t);
            } while (next_digits(d, radix));
            coarse.clusters.push_back(random_blocks(name, tuples, rng));
        }
        if (!check_aic(m, build_tau(m.variables(), inter, coarse)).holds) continue;
        ++instances;
        IntraClustering fine;
        for (const auto& c : coarse.clusters) fine.clusters.push_back(refine(c, rng));
        if (!check_aic(m, build_tau(m.variables(), inter, fine)).holds) ++broken;
    }
    o.note << "(c) " << instances << " instances, " << broken << " finer clusterings violate the AIC; ";
    return instances == 50 && broken == 0;
}

bool gradients(Outcome& o) {
    std::mt19937_64 rng(99);
    double worst = 0;
    for (int i = 0; i < 20; ++i) worst = std::max(worst, testing::worst_gradient_error(testing::random_ncm(rng), rng));
    o.note << "(d) worst relative gradient error " << worst;
    return worst <= 1e-6;
}

void properties(Outcome& o) {
    o.require(lemma_equivalence(o), "(a)");
    o.require(thm1_crosscheck(o), "(b)");
    o.require(aic_refinement(o), "(c)");
    o.require(gradients(o), "(d)");
}

// ---- 8

void scaling(Outcome& o) {
    auto p = testing::project("drug_with_r.json");
    auto base = task_for(p, "P(Y_{A=1,B=1}=1)");
    double truth = ctf_prob(*p.scm, base.query);
    Pmf obs = layer_pmf(*p.scm, {});
    std::vector<double> medians;
    for (int n : {1000, 10000, 100000}) {
        std::vector<double> errs;
        for (std::uint64_t s = 0; s < 10; ++s) {
            auto t = base;
            t.datasets = {{{}, sample_empirical(obs, n, s * 1000003ULL + n)}};
            errs.push_back(std::abs(estimate_query(t).value - truth));
        }
        std::sort(errs.begin(), errs.end());
        medians.push_back((errs[4] + errs[5]) / 2);
        o.note << "n=" << n << " median MAE " << medians.back() << "; ";
    }
    for (std::size_t i = 1; i < medians.size(); ++i) o.require(medians[i] <= medians[i - 1], "non-increasing");
    o.require(medians.back() <= 0.03, "MAE at 1e5");
}

// ---- 9

void representation(Outcome& o) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd(0, 1);
    Eigen::MatrixXd x(500, 8);
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) x(i, j) = nd(rng);
    RepConfig cfg;
    auto plain = fit_representation(x, cfg);
    o.require(plain.reconstruction < 1e-3, "reconstruction");

    // two classes split by a fixed direction, with label noise
    Eigen::VectorXd dir(8);
    for (int j = 0; j < 8; ++j) dir[j] = nd(rng);
    std::vector<int> labels(x.rows());
    std::bernoulli_distribution flip(0.05);
    for (int i = 0; i < x.rows(); ++i) labels[i] = (x.row(i).dot(dir) > 0) != flip(rng);
    RepConfig aux = cfg;
    aux.lambda_r = 0.5;
    auto guided = fit_representation(x, aux, &labels);
    double raw = fit_linear_probe(x, labels).accuracy(x, labels);
    Eigen::MatrixXd z = guided.map.encode(x);
    double rep = fit_linear_probe(z, labels).accuracy(z, labels);
    o.require(rep >= raw - 0.05, "probe accuracy");
    o.note << "reconstruction " << plain.reconstruction << ", probe raw " << raw << " vs representation " << rep;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<void(Outcome&)> run;
        double limit = 0;  // seconds, 0 = none
    };
    std::vector<Criterion> all = {
        {1, "golden drug table", golden_table, 1},
        {2, "constructed abstraction is L1/L2 consistent", construction, 5},
        {3, "AIC checker on cholesterol clusterings", aic, 1},
        {4, "non-identifiability witness pair", witness_pair},
        {5, "abstract identification end to end", end_to_end},
        {6, "cluster selection on the mustache graph", mustache, 1},
        {7, "property suite", properties},
        {8, "estimation error shrinks with sample size", scaling},
        {9, "representation fit", representation},
    };
    int failed = 0;
    for (const auto& c : all) {
        Outcome o;
        auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.note << "[exception: " << e.what() << "]";
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit > 0) o.require(secs < c.limit, "runtime");
        std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.note.str().c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
