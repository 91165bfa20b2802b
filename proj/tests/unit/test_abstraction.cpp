#include <doctest.h>

#include <set>

#include "causabs/abstraction.hpp"
#include "causabs/abstraction_io.hpp"
#include "causabs/inference.hpp"
#include "support.hpp"

using namespace causabs;

namespace {

ConstructiveTau tau_of(const Project& p) { return build_tau(p.scm->variables(), *p.inter, p.intra); }

// Every interventional distribution on a union of clusters, plus the observational one.
std::vector<InterventionalPmf> all_interventions(const Scm& m, const InterClustering& inter) {
    std::vector<InterventionalPmf> out;
    int n = inter.size();
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<std::string> vars;
        std::vector<int> radix;
        for (int c = 0; c < n; ++c)
            if (mask >> c & 1)
                for (const auto& v : inter.clusters[c].members) {
                    vars.push_back(v);
                    radix.push_back(m.var(m.var_index(v)).domain.size());
                }
        std::vector<int> d(radix.size(), 0);
        do {
            ValueMap x;
            for (std::size_t k = 0; k < vars.size(); ++k) x[vars[k]] = m.var(m.var_index(vars[k])).domain.values[d[k]];
            out.push_back({x, layer_pmf(m, x)});
        } while (next_digits(d, radix));
    }
    return out;
}

Scm two_cluster_high_model() {
    json j = {{"variables", {{{"name", "X"}, {"domain", {0, 1}}}, {{"name", "Y"}, {"domain", {0, 1}}}}},
              {"exogenous",
               {{{"name", "U_X"}, {"domain", {0, 1}}, {"pmf", {0.66, 0.34}}},
                {{"name", "U_Y0"}, {"domain", {0, 1}}, {"pmf", {0.9, 0.1}}},
                {{"name", "U_Y1"}, {"domain", {0, 1}}, {"pmf", {0.05 / 0.34, 0.29 / 0.34}}}}},
              {"mechanisms",
               {{{"output", "X"}, {"exo_parents", {"U_X"}}, {"expr", "U_X"}},
                {{"output", "Y"}, {"endo_parents", {"X"}}, {"exo_parents", {"U_Y0", "U_Y1"}},
                 {"expr", "ite(X == 1, U_Y1, U_Y0)"}}}}};
    return scm_from_json(j);
}

} // namespace

TEST_CASE("tau maps assignments block by block") {
    auto tau = tau_of(testing::project("drug.json"));
    CHECK(apply_tau(tau, {{"A", "0"}, {"B", "1"}, {"Y", "1"}}) == ValueMap{{"X", "0"}, {"Y", "1"}});
    CHECK(apply_tau(tau, {{"A", "1"}, {"B", "1"}, {"Y", "0"}}) == ValueMap{{"X", "1"}, {"Y", "0"}});
    // R is excluded; assignments must stay within clusters
    CHECK_THROWS_AS(apply_tau(tau, {{"R", "1"}, {"A", "0"}, {"B", "1"}, {"Y", "1"}}), ValidationError);
    CHECK_THROWS_AS(apply_tau(tau, {{"A", "1"}, {"Y", "0"}}), ValidationError);

    for (int c = 0; c < tau.n_clusters(); ++c)
        for (int h = 0; h < tau.high_vars()[c].domain.size(); ++h) CHECK_FALSE(tau.preimage(c, h).empty());
}

TEST_CASE("singleton tau renames nothing") {
    Scm m = testing::drug_scm();
    auto tau = build_tau(m.variables(), singleton_clustering(m.var_names()), {});
    ValueMap v = {{"R", "1"}, {"A", "0"}, {"B", "1"}, {"Y", "1"}};
    CHECK(apply_tau(tau, v) == v);
    auto q = parse_query("P(Y_{A=1,B=0}=1 | R=1)");
    CHECK(lift_query(tau, q) == q);
}

TEST_CASE("query lifting") {
    auto tau = tau_of(testing::project("drug.json"));
    CHECK(lift_query(tau, parse_query("P(Y_{A=1,B=1}=1)")) == parse_query("P(Y_{X=1}=1)"));
    INFO(print_query(lift_query(tau, parse_query("P(Y=1, A=1, B=1)"))));
    CHECK(lift_query(tau, parse_query("P(Y=1, A=1, B=1)")) == parse_query("P(X=1, Y=1)"));
    CHECK_THROWS_AS(lift_query(tau, parse_query("P(Y_{A=1}=1)")), ValidationError);

    auto ftau = tau_of(testing::project("frontdoor.json"));
    CHECK_THROWS_AS(lift_query(ftau, parse_query("P(B_{D=1,C=0,F=1}=1)")), ValidationError);

    for (const char* q : {"P(Y_{X=1}=1)", "P(Y=1, X=0)", "P(Y_{X=0}=1 | X=1)"}) {
        auto hq = parse_query(q);
        CHECK(lift_lowered(tau, lower_query(tau, hq)) == hq);
    }
}

TEST_CASE("AIC on the cholesterol clusterings") {
    auto tc = testing::project("cholesterol_tc.json");
    auto r = check_aic(*tc.scm, tau_of(tc));
    CHECK_FALSE(r.holds);
    REQUIRE(r.witness);
    std::set<ValueMap> pair = {r.witness->v1, r.witness->v2};
    CHECK(pair == std::set<ValueMap>{{{"HDL", "0"}, {"LDL", "1"}}, {{"HDL", "1"}, {"LDL", "0"}}});
    CHECK(r.witness->out1 != r.witness->out2);

    auto z = testing::project("cholesterol_z.json");
    CHECK(check_aic(*z.scm, tau_of(z)).holds);
}

TEST_CASE("singleton blocks always satisfy the AIC") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        Scm m = testing::random_scm(rng, 4, 2);
        InterClustering inter;
        inter.clusters.push_back({"C0", {"V0", "V1"}});
        inter.clusters.push_back({"C1", {"V2", "V3"}});
        auto tau = build_tau(m.variables(), inter, {});
        if (!check_admissible(inter, induced_diagram(m))) continue;
        CHECK(check_aic(m, tau).holds);
    }
}

TEST_CASE("data AIC modes") {
    // symmetric voting model passes the full and both data conditions
    auto v = testing::project("voting.json");
    auto vt = tau_of(v);
    CHECK(check_aic(*v.scm, vt).holds);
    CHECK(check_data_aic({{{}, layer_pmf(*v.scm, {})}}, vt, DataAicMode::Conditional).holds);
    CHECK(check_data_aic(all_interventions(*v.scm, *v.inter), vt, DataAicMode::Interventional).holds);

    auto tc = testing::project("cholesterol_tc.json");
    auto r = check_data_aic(all_interventions(*tc.scm, *tc.inter), tau_of(tc), DataAicMode::Interventional);
    CHECK_FALSE(r.holds);

    // singleton blocks: no two distinct values share an image
    auto s = build_tau(tc.scm->variables(), *tc.inter, {});
    CHECK(check_data_aic({{{}, layer_pmf(*tc.scm, {})}}, s, DataAicMode::Conditional).holds);
    CHECK(check_data_aic(all_interventions(*tc.scm, *tc.inter), s, DataAicMode::Interventional).holds);

    // The full AIC holds under Z, yet conditioning on (HDL, LDL) also shifts the
    // posterior of their common cause X, so the conditional form fails.
    auto z = testing::project("cholesterol_z.json");
    CHECK(check_aic(*z.scm, tau_of(z)).holds);
    CHECK(check_data_aic(all_interventions(*z.scm, *z.inter), tau_of(z), DataAicMode::Interventional).holds);
    CHECK_FALSE(check_data_aic({{{}, layer_pmf(*z.scm, {})}}, tau_of(z), DataAicMode::Conditional).holds);

    CHECK_THROWS(check_data_aic({}, vt, DataAicMode::Conditional));
}

TEST_CASE("abstraction construction") {
    auto d = testing::project("drug.json");
    auto a = construct_abstraction(*d.scm, *d.inter, d.intra);
    CHECK(ctf_prob(a.high, parse_query("P(Y_{X=1}=1)")) == doctest::Approx(0.5).epsilon(1e-12));
    for (int layer : {1, 2, 3}) CHECK(check_layer_tau_consistency(*d.scm, a.high, a.tau, layer).consistent);

    auto z = testing::project("cholesterol_z.json");
    auto az = construct_abstraction(*z.scm, *z.inter, z.intra);
    CHECK(ctf_prob(az.high, parse_query("P(Y_{Z=1}=1)")) == doctest::Approx(ctf_prob(*z.scm, parse_query("P(Y_{HDL=0,LDL=1}=1)"))));
    CHECK(ctf_prob(az.high, parse_query("P(Y_{Z=1}=1)")) == doctest::Approx(0.9));
    CHECK(ctf_prob(az.high, parse_query("P(Y_{Z=-1}=1)")) == doctest::Approx(0.1));

    auto tc = testing::project("cholesterol_tc.json");
    CHECK_THROWS_AS(construct_abstraction(*tc.scm, *tc.inter, tc.intra), AicError);

    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 5; ++rep) {
        Scm m = testing::random_scm(rng, 3, 2);
        auto id = construct_abstraction(m, singleton_clustering(m.var_names()), {});
        for (int mask = 0; mask < 8; ++mask) {
            ValueMap x;
            for (int i = 0; i < 3; ++i)
                if (mask >> i & 1) x[m.var(i).name] = "1";
            CHECK(max_abs_diff(layer_pmf(m, x), layer_pmf(id.high, x)) < 1e-12);
        }
    }
}

TEST_CASE("query consistency against a hand-built high model") {
    auto d = testing::project("drug.json");
    auto tau = tau_of(d);
    Scm high = two_cluster_high_model();
    auto q = check_q_tau_consistency(*d.scm, high, tau, parse_query("P(Y=1, A=1, B=1)"));
    CHECK(q.consistent);
    auto q2 = check_q_tau_consistency(*d.scm, high, tau, parse_query("P(Y_{A=1,B=1}=1)"));
    CHECK_FALSE(q2.consistent);
    CHECK(q2.low == doctest::Approx(0.5));
    CHECK(q2.high == doctest::Approx(0.29 / 0.34));
    CHECK_FALSE(check_layer_tau_consistency(*d.scm, high, tau, 2).consistent);
}

TEST_CASE("orbit clustering") {
    auto v = testing::project("voting.json");
    const auto* blocks = v.intra.find("V");
    REQUIRE(blocks);
    REQUIRE(blocks->blocks.size() == 3);
    std::set<std::set<std::vector<std::string>>> got;
    for (const auto& b : blocks->blocks) got.insert({b.values.begin(), b.values.end()});
    std::set<std::set<std::vector<std::string>>> want = {{{"0", "0"}}, {{"0", "1"}, {"1", "0"}}, {{"1", "1"}}};
    CHECK(got == want);

    std::vector<Variable> two = {{"A", binary_domain()}, {"B", binary_domain()}};
    Permutation identity = {0, 1, 2, 3};
    CHECK(orbit_intra_clustering("C", two, {identity}).blocks.size() == 4);
    CHECK_THROWS_AS(orbit_intra_clustering("C", two, {{0, 0, 1, 2}}), ValidationError);

    Domain three{{"0", "1", "2"}};
    std::vector<Variable> tri = {{"A", three}, {"B", three}, {"C", three}};
    auto cyc = orbit_intra_clustering("C", tri, {cyclic_generator(tri)});
    std::size_t total = 0;
    for (const auto& b : cyc.blocks) {
        CHECK(3 % b.values.size() == 0);
        total += b.values.size();
    }
    CHECK(total == 27);
    CHECK(cyc.blocks.size() == 11);  // 3 fixed points + 24 / 3
}

TEST_CASE("clusters JSON round trip") {
    auto d = testing::project("drug.json");
    json j = clusters_to_json(*d.inter, d.intra);
    CHECK(same_partition(inter_from_json(j["inter"]), *d.inter));
    auto back = intra_from_json(j["intra"]);
    CHECK(clusters_to_json(inter_from_json(j["inter"]), back) == j);
}

TEST_CASE("AIC under refinement of intravariable blocks") {
    json j = {{"variables", {{{"name", "X"}, {"domain", {0, 1}}}, {{"name", "Y"}, {"domain", {0, 1}}}}},
              {"exogenous", {{{"name", "U"}, {"domain", {0, 1}}, {"pmf", {0.5, 0.5}}}}},
              {"mechanisms",
               {{{"output", "X"}, {"exo_parents", {"U"}}, {"expr", "U"}},
                {{"output", "Y"}, {"endo_parents", {"X"}}, {"expr", "X"}}}}};
    Scm m = scm_from_json(j);
    InterClustering inter = singleton_clustering({"X", "Y"});
    ClusterBlocks x_one{"X", {{"x", {{"0"}, {"1"}}}}};
    ClusterBlocks y_one{"Y", {{"y", {{"0"}, {"1"}}}}};
    ClusterBlocks y_fine{"Y", {{"0", {{"0"}}}, {"1", {{"1"}}}}};
    ClusterBlocks x_fine{"X", {{"0", {{"0"}}}, {"1", {{"1"}}}}};
    // one block per cluster: every output lands in the same block
    CHECK(check_aic(m, build_tau(m.variables(), inter, {{x_one, y_one}})).holds);
    // splitting only the child's blocks tightens the output side and breaks it
    CHECK_FALSE(check_aic(m, build_tau(m.variables(), inter, {{x_one, y_fine}})).holds);
    // splitting the parent's blocks as well restores it
    CHECK(check_aic(m, build_tau(m.variables(), inter, {{x_fine, y_fine}})).holds);
}

TEST_CASE("splitting blocks of clusters without parents keeps the AIC") {
    // only the premise gets weaker when a root cluster is refined
    std::mt19937_64 rng(31);
    int checked = 0;
    for (int rep = 0; rep < 400 && checked < 30; ++rep) {
        Scm m = testing::random_scm(rng, 3, 2, false);
        InterClustering inter;
        inter.clusters.push_back({"R", {"V0"}});
        inter.clusters.push_back({"C", {"V1", "V2"}});
        ClusterBlocks root{"R", {{"r", {{"0"}, {"1"}}}}};
        ClusterBlocks rest{"C", {{"a", {{"0", "0"}, {"1", "1"}}}, {"b", {{"0", "1"}}}, {"c", {{"1", "0"}}}}};
        if (!check_aic(m, build_tau(m.variables(), inter, {{root, rest}})).holds) continue;
        ++checked;
        ClusterBlocks split{"R", {{"0", {{"0"}}}, {"1", {{"1"}}}}};
        CHECK(check_aic(m, build_tau(m.variables(), inter, {{split, rest}})).holds);
    }
    CHECK(checked > 0);
}
