#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "bnsv/error.hpp"
#include "bnsv/propagate.hpp"
#include "bnsv/shapley.hpp"
#include "bnsv/simgen.hpp"
#include "stats_helpers.hpp"

using namespace bnsv;
using bnsv::testing::ks2_p_value;

TEST_CASE("association levels carry the fixed numeric mapping") {
    CHECK(association_beta(AssociationLevel::High) == 0.9);
    CHECK(association_beta(AssociationLevel::Medium) == 0.6);
    CHECK(association_beta(AssociationLevel::Low) == 0.3);
}

TEST_CASE("range to CPP parameters") {
    const auto [mu_ph, sd_ph] = range_to_cpp_params({"pH", 6.8, 7.2});
    CHECK(mu_ph == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(sd_ph == doctest::Approx(0.1).epsilon(1e-14));
    const auto [mu_t, sd_t] = range_to_cpp_params({"temperature", 20, 30});
    CHECK(mu_t == 25.0);
    CHECK(sd_t == 2.5);
    const auto [mu_s, sd_s] = range_to_cpp_params({"sym", -3.0, 3.0});
    CHECK(mu_s == 0.0);
    CHECK(sd_s == 1.5);
    CHECK_THROWS_AS(range_to_cpp_params({"bad", 2.0, 2.0}), Error);
}

TEST_CASE("back-engineering: one-parent case and infeasible target") {
    const auto g = ProcessGraph::build({{"P", NodeKind::Cpp}, {"Q", NodeKind::Cqa}},
                                       {{"P", "Q"}});
    Theta t;
    t.mu = {0, 0};
    t.v2 = {0.25, 0.0};  // parent v = 0.5
    t.beta = {1.0};
    back_engineer_v(g, t, {{1, 1.0}});
    CHECK(t.v2[1] == doctest::Approx(0.75).epsilon(1e-15));

    const auto m = node_moments(g, t);
    CHECK(m.variance[1] == doctest::Approx(1.0).epsilon(1e-12));

    Theta bad = t;
    bad.v2 = {4.0, 0.0};
    try {
        back_engineer_v(g, bad, {{1, 1.0}});
        FAIL("expected InfeasibleTarget");
    } catch (const Error& e) {
        CHECK(e.code() == errc::infeasible_target);
        CHECK(std::string(e.what()).find("excess") != std::string::npos);
    }
}

TEST_CASE("literal published coefficients are infeasible at the first fermentation CQA") {
    // four CPPs with range-derived variances, all beta = 0.9 into an
    // impurities CQA whose range pins the marginal SD at 2: the propagated
    // variance alone is 0.81 * 7.945 = 6.44 > 4
    const auto g = ProcessGraph::build(
        {{"pH", NodeKind::Cpp}, {"temp", NodeKind::Cpp}, {"agit", NodeKind::Cpp},
         {"oxy", NodeKind::Cpp}, {"imp", NodeKind::Cqa}},
        {{"pH", "imp"}, {"temp", "imp"}, {"agit", "imp"}, {"oxy", "imp"}});
    Theta t;
    t.mu.assign(5, 0.0);
    t.v2 = {0.01, 6.25, 0.1225, 1.5625, 0.0};
    t.beta.assign(4, association_beta(AssociationLevel::High));
    CHECK_THROWS_AS(back_engineer_v(g, t, {{4, 2.0}}), Error);
}

TEST_CASE("mabs network structure and coefficient census") {
    const auto net = build_mabs_network();
    CHECK(net.graph.node_count() == 20);
    CHECK(net.graph.edge_count() == 44);
    CHECK(net.theta.mu.size() == 20);
    CHECK(net.theta.v2.size() == 20);
    CHECK(net.theta.beta.size() == 44);
    CHECK(validate_theta(net.graph, net.theta).empty());
    CHECK(input_factors(net.graph).size() == 20);

    // 10 CPPs, 8 intermediate CQAs, 2 final-output candidates
    int cpps = 0, responses = 0;
    for (int n = 0; n < 20; ++n) {
        cpps += net.graph.is_cpp(n);
        responses += net.graph.kind(n) == NodeKind::Response;
    }
    CHECK(cpps == 10);
    CHECK(responses == 2);

    // default mapping puts dissolved oxygen at X4 and temperature at X13
    CHECK(net.ranges[3].node == "dissolved oxygen");
    CHECK(net.ranges[12].node == "temperature");
    CHECK(net.theta.mu[3] == doctest::Approx(5.0));
}

TEST_CASE("mabs marginals round-trip the published ranges") {
    const auto net = build_mabs_network();
    const auto m = node_moments(net.graph, net.theta);
    for (int n = 0; n < 20; ++n) {
        const double target = (net.ranges[n].up - net.ranges[n].low) / 4.0;
        CHECK(std::sqrt(m.variance[n]) == doctest::Approx(target).epsilon(1e-10));
        CHECK(m.mean[n] == doctest::Approx((net.ranges[n].up + net.ranges[n].low) / 2.0));
    }
    // protein content X20 has range 1-5, so marginal SD 1.0 by construction
    CHECK(std::sqrt(m.variance[19]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mabs ground-truth criticality profile of X20") {
    const auto net = build_mabs_network();
    const int x20 = net.graph.index_of("X20");
    const auto rep = sv_closed_form(net.graph, net.theta, x20);
    const auto crit = [&](const char* name) {
        return 100.0 * rep.entry_of({InputFactor::Kind::Cpp, net.graph.index_of(name)})
                           .criticality;
    };
    CHECK(crit("X4") == doctest::Approx(58.30).epsilon(0.02));
    CHECK(crit("X13") == doctest::Approx(24.90).epsilon(0.02));
    CHECK(crit("X1") == doctest::Approx(4.67).epsilon(0.05));
    CHECK(crit("X18") == doctest::Approx(3.66).epsilon(0.05));
    CHECK(crit("X3") == doctest::Approx(2.38).epsilon(0.05));
    CHECK(crit("X9") == doctest::Approx(2.16).epsilon(0.05));
    CHECK(crit("X12") == doctest::Approx(1.50).epsilon(0.05));
    CHECK(crit("X17") == doctest::Approx(1.04).epsilon(0.05));
}

TEST_CASE("mabs sub-graph starting at chromatography outputs explains ~90% of X20") {
    const auto net = build_mabs_network();
    std::vector<int> nodes;
    for (const auto& n : net.subgraphs.at("from_chromatography"))
        nodes.push_back(net.graph.index_of(n));
    const auto rep = subgraph_analysis(net.graph, net.theta, nodes,
                                       net.graph.index_of("X20"), BoundaryCov::model());
    double carried = 0.0;
    for (const auto& e : rep.entries)
        if (e.factor.kind == InputFactor::Kind::BoundaryCqa) carried += e.criticality;
    CHECK(carried > 0.85);
    CHECK(carried < 0.99);
}

TEST_CASE("cpp mapping override relabels units without moving the index-keyed profile") {
    auto labels = mabs_default_cpp_labels();
    std::swap(labels[0], labels[1]);  // pH <-> temperature within main fermentation
    const auto net = build_mabs_network(labels);
    CHECK(net.ranges[0].node == "temperature");
    CHECK(net.theta.mu[0] == doctest::Approx(25.0));

    const auto base = build_mabs_network();
    const auto rep = sv_closed_form(net.graph, net.theta, 19);
    const auto rep0 = sv_closed_form(base.graph, base.theta, 19);
    for (std::size_t i = 0; i < rep.entries.size(); ++i)
        CHECK(rep.entries[i].criticality ==
              doctest::Approx(rep0.entries[i].criticality).epsilon(1e-12));

    labels = mabs_default_cpp_labels();
    std::swap(labels[0], labels[4]);  // pH cannot move to the centrifuge
    CHECK_THROWS_AS(build_mabs_network(labels), Error);
}

TEST_CASE("generate_batches: scopes, validation, determinism") {
    const auto net = build_mabs_network();
    std::vector<int> mf;
    for (const auto& n : net.subgraphs.at("main_fermentation"))
        mf.push_back(net.graph.index_of(n));

    const auto pure = generate_batches(net.graph, net.theta, 10, 0, {}, 5);
    CHECK(pure.row_count() == 10);
    CHECK(pure.complete_rows() == 10);

    const auto mixed = generate_batches(net.graph, net.theta, 6, 4, mf, 5);
    CHECK(mixed.complete_rows() == 6);
    CHECK(mixed.incomplete_rows() == 4);
    for (int r = 6; r < 10; ++r)
        for (int n = 0; n < 20; ++n) {
            const bool in_mf = std::find(mf.begin(), mf.end(), n) != mf.end();
            CHECK(mixed.observed(r, n) == in_mf);
        }
    mixed.validate_scopes(net.graph);

    // masking after sampling: complete prefix identical to the pure run
    for (int r = 0; r < 6; ++r)
        for (int n = 0; n < 20; ++n) CHECK(mixed.value(r, n) == pure.value(r, n));

    const auto again = generate_batches(net.graph, net.theta, 6, 4, mf, 5);
    CHECK(mixed.raw().size() == again.raw().size());
    for (std::size_t i = 0; i < mixed.raw().size(); ++i) {
        const bool both_nan = std::isnan(mixed.raw()[i]) && std::isnan(again.raw()[i]);
        CHECK((both_nan || mixed.raw()[i] == again.raw()[i]));
    }

    // X5 without its parents is not parent-closed
    CHECK_THROWS_AS(generate_batches(net.graph, net.theta, 2, 2,
                                     {net.graph.index_of("X5")}, 1),
                    Error);
}

TEST_CASE("masked rows are distributed like complete rows") {
    const auto net = build_mabs_network();
    std::vector<int> mf;
    for (const auto& n : net.subgraphs.at("main_fermentation"))
        mf.push_back(net.graph.index_of(n));
    const int r_total = 10000;
    const auto d = generate_batches(net.graph, net.theta, r_total / 2, r_total / 2, mf, 99);
    for (int n : mf) {
        std::vector<double> complete, masked;
        for (int r = 0; r < d.row_count(); ++r)
            (r < r_total / 2 ? complete : masked).push_back(d.value(r, n));
        CHECK(ks2_p_value(complete, masked) > 0.01);
    }
}
