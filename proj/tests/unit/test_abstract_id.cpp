#include <doctest.h>

#include <numeric>

#include "causabs/abstract_id.hpp"
#include "causabs/abstraction.hpp"
#include "causabs/inference.hpp"
#include "support.hpp"

using namespace causabs;

namespace {

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

double mean_of(const std::vector<IdRun>& runs, bool max) {
    double s = 0;
    for (const auto& r : runs) s += *(max ? r.max : r.min).query_value;
    return s / runs.size();
}

} // namespace

TEST_CASE("gap test") {
    auto wide = gap_test({0.1, 0.1, 0.1, 0.1}, {0.7, 0.72, 0.68, 0.71});
    CHECK_FALSE(wide.accept);
    CHECK(wide.gaps.size() == 4);
    CHECK(wide.mean == doctest::Approx(0.6025));

    auto tight = gap_test({0.5, 0.5, 0.5, 0.5}, {0.51, 0.52, 0.515, 0.512});
    CHECK(tight.accept);
    // upper = mean + t_{0.95,3} s / sqrt(4), t quantile from tables
    double m = 0.01425;
    double sd = std::sqrt(((0.01 - m) * (0.01 - m) + (0.02 - m) * (0.02 - m) + (0.015 - m) * (0.015 - m) +
                           (0.012 - m) * (0.012 - m)) / 3);
    CHECK(tight.sd == doctest::Approx(sd).epsilon(1e-9));
    CHECK(tight.upper == doctest::Approx(m + 2.353363 * sd / 2).epsilon(1e-6));

    CHECK(gap_test({0.3, 0.3}, {0.3, 0.3}).accept);
    CHECK_THROWS_AS(gap_test({0.1}, {0.2}), ValidationError);
    CHECK_THROWS_AS(gap_test({0.1, 0.2}, {0.2}), ValidationError);
}

TEST_CASE("status names and exit codes") {
    CHECK(status_exit_code(IdStatus::Id) == 0);
    CHECK(status_exit_code(IdStatus::Inconclusive) == 2);
    CHECK(status_exit_code(IdStatus::Fail) == 3);
    CHECK(status_name(IdStatus::Fail) != status_name(IdStatus::Id));
}

TEST_CASE("confounded treatment is not identifiable from observations") {
    auto p = testing::project("drug.json");
    auto r = neural_abstract_id(task_for(p, "P(Y_{A=1,B=1}=1)"));
    CHECK(r.status == IdStatus::Fail);
    CHECK_FALSE(r.value);
    CHECK(r.lifted == parse_query("P(Y_{X=1}=1)"));
    REQUIRE(r.runs.size() == 4);
    // sharp bounds of the confounded pair: 0.29 and 0.95
    CHECK(mean_of(r.runs, false) == doctest::Approx(0.29).epsilon(0.03));
    CHECK(mean_of(r.runs, true) == doctest::Approx(0.95).epsilon(0.03));

    // the complementary event mirrors the bounds
    auto c = neural_abstract_id(task_for(p, "P(Y_{A=1,B=1}=0)"));
    CHECK(c.status == IdStatus::Fail);
    CHECK(mean_of(c.runs, false) == doctest::Approx(1 - mean_of(r.runs, true)).epsilon(0.03));
    CHECK(mean_of(c.runs, true) == doctest::Approx(1 - mean_of(r.runs, false)).epsilon(0.03));
}

TEST_CASE("interventional data on the query makes it identifiable") {
    auto p = testing::project("drug.json");
    auto t = task_for(p, "P(Y_{A=1,B=1}=1)");
    ValueMap x = {{"A", "1"}, {"B", "1"}};
    t.datasets.push_back({x, layer_pmf(*p.scm, x)});
    auto r = neural_abstract_id(t);
    CHECK(r.status == IdStatus::Id);
    REQUIRE(r.value);
    CHECK(*r.value == doctest::Approx(ctf_prob(*p.scm, t.query)).epsilon(0.01));
}

TEST_CASE("backdoor adjustment through the observed cause") {
    auto p = testing::project("drug_with_r.json");
    auto r = neural_abstract_id(task_for(p, "P(Y_{A=1,B=1}=1)"));
    CHECK(r.status == IdStatus::Id);
    REQUIRE(r.value);
    CHECK(*r.value == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("singleton clusters on a Markovian chain") {
    std::mt19937_64 rng(8);
    Scm m = testing::random_scm(rng, 2, 2, false);
    Project p;
    p.scm = m;
    p.inter = singleton_clustering(m.var_names());
    p.diagram = induced_diagram(m);
    p.datasets = {{{}, layer_pmf(m, {})}};
    auto t = task_for(p, "P(V1_{V0=1}=1)");
    auto r = neural_abstract_id(t);
    CHECK(r.status == IdStatus::Id);
    REQUIRE(r.value);
    CHECK(*r.value == doctest::Approx(ctf_prob(m, t.query)).epsilon(0.03));
}

TEST_CASE("front-door estimate") {
    auto p = testing::project("frontdoor.json");
    auto t = task_for(p, "P(B_{D=1}=1)");
    auto e = estimate_query(t);
    CHECK(e.matched);
    CHECK(e.value == doctest::Approx(ctf_prob(*p.scm, t.query)).epsilon(0.02));
    CHECK(e.fit.data_loss <= e.fit.initial_data_loss);
    CHECK(ctf_pmf(e.model, e.lifted) == doctest::Approx(e.value));
}

TEST_CASE("inconclusive when the data cannot be matched") {
    auto p = testing::project("drug_with_r.json");
    auto t = task_for(p, "P(Y_{A=1,B=1}=1)");
    t.train.iterations = 5;
    t.reruns = 2;
    auto r = neural_abstract_id(t);
    CHECK(r.status == IdStatus::Inconclusive);
    CHECK_FALSE(r.detail.empty());
}

TEST_CASE("task validation") {
    auto p = testing::project("drug.json");
    auto t = task_for(p, "P(Y_{A=1,B=1}=1)");
    t.cdag = Cdag({"X", "Q"});
    CHECK_THROWS_AS(neural_abstract_id(t), ValidationError);
    auto bad = task_for(p, "P(Y_{A=1}=1)");
    CHECK_THROWS_AS(neural_abstract_id(bad), ValidationError);
}

TEST_CASE("results do not depend on the thread count") {
    auto p = testing::project("drug_with_r.json");
    auto t = task_for(p, "P(Y_{A=1,B=1}=1)");
    t.train.iterations = 200;
    t.threads = 1;
    auto a = neural_abstract_id(t);
    t.threads = 4;
    auto b = neural_abstract_id(t);
    CHECK(abstract_id_to_json(a).dump() == abstract_id_to_json(b).dump());
}
