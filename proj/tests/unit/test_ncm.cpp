#include <doctest.h>

#include <cmath>

#include "causabs/abstraction.hpp"
#include "causabs/errors.hpp"
#include "causabs/inference.hpp"
#include "causabs/ncm_io.hpp"
#include "gradcheck.hpp"
#include "support.hpp"

using namespace causabs;

namespace {

Cdag bow() {
    Cdag g({"X", "Y"});
    g.add_directed("X", "Y");
    g.add_bidirected("X", "Y");
    return g;
}

std::vector<Domain> binary(int n) { return std::vector<Domain>(n, binary_domain()); }

InterventionalPmf table_data() {
    Pmf p = Pmf::zeros({{"X", binary_domain()}, {"Y", binary_domain()}});
    p.prob = testing::confounded_pair_table();
    return {{}, p};
}

TrainConfig quick(std::uint64_t seed = 0) {
    TrainConfig c;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("bidirected cliques") {
    Ncm m(bow(), binary(2));
    REQUIRE(m.cliques().size() == 1);
    CHECK(m.cliques()[0] == std::vector<int>{0, 1});

    Cdag chain({"X", "Y"});
    chain.add_directed("X", "Y");
    CHECK(Ncm(chain, binary(2)).cliques() == std::vector<std::vector<int>>{{0}, {1}});

    Cdag tri({"A", "B", "C"});
    tri.add_bidirected("A", "B");
    tri.add_bidirected("B", "C");
    CHECK(bidirected_cliques(tri) == std::vector<std::vector<int>>{{0, 1}, {1, 2}});

    // Bron-Kerbosch against brute force on a 5-node graph
    Cdag g({"a", "b", "c", "d", "e"});
    for (auto [x, y] : std::vector<std::pair<const char*, const char*>>{{"a", "b"}, {"a", "c"}, {"b", "c"}, {"c", "d"}, {"d", "e"}, {"c", "e"}})
        g.add_bidirected(x, y);
    CHECK(bidirected_cliques(g) == std::vector<std::vector<int>>{{0, 1, 2}, {2, 3, 4}});
}

TEST_CASE("uniform logits give a uniform pmf") {
    Ncm m(bow(), binary(2));
    m.set_params(Eigen::VectorXd::Zero(m.n_params()));
    Pmf p = induced_pmf(m, {});
    for (double x : p.prob) CHECK(x == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("induced pmf is normalized and matches single-world queries") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 5; ++rep) {
        auto inst = testing::random_ncm(rng);
        Pmf p = induced_pmf(inst, {});
        CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-9));
        auto names = inst.names();
        ValueMap x = {{names[0], inst.domain(0).values.back()}};
        Pmf px = induced_pmf(inst, x);
        CHECK(px.total() == doctest::Approx(1.0).epsilon(1e-9));
        // one world: ctf_pmf of a full assignment is the pmf entry
        std::vector<int> d(px.vars.size(), 0);
        auto radix = px.radix();
        do {
            Term t;
            t.intervention = {{names[0], x.begin()->second}};
            for (std::size_t k = 1; k < d.size(); ++k) t.outcome.push_back({names[k], px.vars[k].domain.values[d[k]]});
            if (d[0] != inst.domain(0).size() - 1) continue;
            CHECK(ctf_pmf(inst, {{t}, {}}) == doctest::Approx(px.prob[encode(d, radix)]).epsilon(1e-12));
        } while (next_digits(d, radix));
        // all worlds equal: the same as one world
        Term t1{{{names[1], "0"}}, {}};
        Term t2{{{names[1], "0"}}, {}};
        CHECK(ctf_pmf(inst, {{t1, t2}, {}}) == doctest::Approx(ctf_pmf(inst, {{t1}, {}})).epsilon(1e-12));
    }
}

TEST_CASE("gradients match finite differences") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 5; ++rep) {
        auto m = testing::random_ncm(rng);
        CHECK(testing::worst_gradient_error(m, rng) < 1e-6);
    }
}

TEST_CASE("hard tables agree with the explicit SCM") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        Scm s = testing::random_scm(rng, 3, 2);
        Ncm m = ncm_from_scm(s);
        CHECK(max_abs_diff(induced_pmf(m, {}), layer_pmf(s, {})) < 1e-12);
        for (const char* q : {"P(V2_{V0=1}=1, V2_{V0=0}=0)", "P(V1_{V0=0}=1, V2=1)", "P(V2_{V1=1}=0 | V1=0, V2=1)",
                              "P(V0_{V2=0}=1, V1_{V0=1}=1, V2=0)"}) {
            auto cq = parse_query(q);
            double want;
            try {
                want = ctf_prob(s, cq);
            } catch (const UndefinedConditional&) {
                CHECK_THROWS_AS(ctf_pmf(m, cq), UndefinedConditional);
                continue;
            }
            CHECK(ctf_pmf(m, cq) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("hard encoding of the abstracted drug model") {
    auto p = testing::project("drug_with_r.json");
    auto a = construct_abstraction(*p.scm, *p.inter, p.intra);
    Ncm m = ncm_from_scm(a.high);
    CHECK(ctf_pmf(m, parse_query("P(Y_{X=1}=1)")) == doctest::Approx(0.5).epsilon(1e-12));
    Cdag bare({"R", "X", "Y"});
    CHECK_THROWS_AS(ncm_from_scm(a.high, &bare), ValidationError);
}

TEST_CASE("fitting a point mass on a chain") {
    Cdag chain({"X", "Y"});
    chain.add_directed("X", "Y");
    Ncm m(chain, binary(2));
    Pmf p = Pmf::zeros({{"X", binary_domain()}, {"Y", binary_domain()}});
    p.prob = {0, 0, 0, 1};
    auto r = fit(m, {{{}, p}}, std::nullopt, quick());
    CHECK(r.data_entropy == doctest::Approx(0.0));
    CHECK(r.data_loss < 1e-3);
    CHECK(r.data_loss <= r.initial_data_loss);
}

TEST_CASE("fit is deterministic and matches the target table") {
    Ncm a(bow(), binary(2), quick(4)), b(bow(), binary(2), quick(4));
    auto ra = fit(a, {table_data()}, std::nullopt, quick(4));
    auto rb = fit(b, {table_data()}, std::nullopt, quick(4));
    CHECK(ra.data_loss == rb.data_loss);
    CHECK(a.params() == b.params());
    Pmf p = induced_pmf(a, {});
    for (int i = 0; i < 4; ++i) CHECK(std::abs(p.prob[i] - testing::confounded_pair_table()[i]) < 1e-3);
}

TEST_CASE("query-regularized fits reach the bounds of the confounded pair") {
    auto q = parse_query("P(Y_{X=1}=1)");
    Ncm lo(bow(), binary(2), quick()), hi(bow(), binary(2), quick());
    auto rl = fit(lo, {table_data()}, QueryReg{q, 1.0}, quick());
    auto rh = fit(hi, {table_data()}, QueryReg{q, -1.0}, quick());
    REQUIRE(rl.query_value);
    REQUIRE(rh.query_value);
    CHECK(*rl.query_value == doctest::Approx(0.29).epsilon(0.02));
    CHECK(*rh.query_value == doctest::Approx(0.95).epsilon(0.02));
    CHECK(rl.data_loss - rl.data_entropy < 1e-3);
    CHECK(rh.data_loss - rh.data_entropy < 1e-3);
    CHECK(rl.data_loss <= rl.initial_data_loss);
    CHECK(!rl.series.empty());
}

TEST_CASE("sampling matches exact probabilities") {
    Ncm m = ncm_from_scm(testing::drug_scm());
    int n = 20000;
    auto rows = sample(m, {}, {{"A", "1"}, {"B", "1"}}, n, 1);
    double hits = 0;
    for (const auto& r : rows) {
        CHECK(r.at("A") == "1");
        hits += r.at("Y") == "1";
    }
    double p = ctf_pmf(m, parse_query("P(Y_{A=1,B=1}=1)"));
    double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(hits / n - p) < 3 * sigma);

    // a certain event never rejects
    SampleOptions strict;
    strict.max_attempts_factor = 1;
    std::vector<Term> sure = {Term{{{"A", "1"}}, {{"A", "1"}}}};
    CHECK(sample(m, sure, {}, 50, 2, strict).size() == 50);

    // counterfactual evidence on a soft model
    Cdag g({"X", "Y"});
    g.add_directed("X", "Y");
    g.add_bidirected("X", "Y");
    Ncm soft(g, binary(2), quick(3));
    Eigen::VectorXd theta = soft.params();
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0, 1);
    for (int i = 0; i < theta.size(); ++i) theta[i] = nd(rng);
    soft.set_params(theta);
    auto given = parse_query("P(X=0)").terms;
    auto cond = sample(soft, given, {{"X", "1"}}, n, 5);
    double yes = 0;
    for (const auto& r : cond) yes += r.at("Y") == "1";
    double want = ctf_pmf(soft, parse_query("P(Y_{X=1}=1 | X=0)"));
    CHECK(std::abs(yes / n - want) < 3 * std::sqrt(want * (1 - want) / n) + 1e-9);

    auto impossible = parse_query("P(X=0, X_{Y=0}=1)").terms;
    CHECK_THROWS_AS(sample(ncm_from_scm(testing::confounded_pair_model(false)), impossible, {}, 5, 0), UndefinedConditional);
}

TEST_CASE("graph constraint: separate cliques stay independent") {
    Cdag tri({"A", "B", "C"});
    tri.add_bidirected("A", "B");
    tri.add_bidirected("B", "C");
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd(0, 1);
    for (int rep = 0; rep < 5; ++rep) {
        Ncm m(tri, binary(3), quick(rep));
        Eigen::VectorXd t = m.params();
        for (int i = 0; i < t.size(); ++i) t[i] = nd(rng);
        m.set_params(t);
        Pmf p = induced_pmf(m, {});
        Pmf ac = p.marginal({"A", "C"}), a = p.marginal({"A"}), c = p.marginal({"C"});
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(ac.prob[i * 2 + j] == doctest::Approx(a.prob[i] * c.prob[j]).epsilon(1e-12));
    }
}

TEST_CASE("enumeration budget") {
    Ncm m(bow(), binary(2));
    EvalOptions opt;
    opt.budget = 2;
    CHECK_THROWS_AS(induced_pmf(m, {}, opt), BudgetError);
}

TEST_CASE("checkpoint round trip") {
    Ncm m = ncm_from_scm(testing::drug_scm());
    TrainConfig cfg = quick(42);
    json j = ncm_to_json(m, cfg);
    TrainConfig back_cfg;
    Ncm back = ncm_from_json(json::parse(j.dump()), &back_cfg);
    CHECK(back_cfg.seed == 42);
    CHECK(ncm_to_json(back, back_cfg) == j);
    CHECK(max_abs_diff(induced_pmf(back, {}), induced_pmf(m, {})) == 0.0);
}

TEST_CASE("representation learning") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0, 1);
    Eigen::MatrixXd x(400, 8);
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) x(i, j) = nd(rng);
    RepConfig cfg;
    auto r = fit_representation(x, cfg);
    CHECK(r.reconstruction < 1e-4);
    CHECK(r.aux_loss == 0.0);
    Eigen::MatrixXd back = r.map.decode(r.map.encode(x));
    CHECK((back - x).squaredNorm() / x.rows() == doctest::Approx(r.reconstruction).epsilon(1e-9));

    CHECK_THROWS_AS(fit_representation(Eigen::MatrixXd(0, 3), cfg), ValidationError);
    RepConfig aux = cfg;
    aux.lambda_r = 0.1;
    CHECK_THROWS_AS(fit_representation(x, aux), ValidationError);
}
