#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "woc/weights.hpp"

using namespace woc;

namespace {

// published 7-replica object distributions, entries printed at 2 decimals
struct ObjectRow {
    const char* name;
    double ratio;
    double entries[7];
    double threshold;
};
const ObjectRow kObjectRows[] = {
    {"ObjA", 1.40, {7.53, 5.38, 3.84, 2.74, 1.96, 1.40, 1.00}, 11.93},
    {"ObjB", 1.38, {6.91, 5.00, 3.63, 2.63, 1.90, 1.38, 1.00}, 11.23},
    {"ObjC", 1.25, {3.81, 3.05, 2.44, 1.95, 1.56, 1.25, 1.00}, 7.54},
    {"ObjD", 1.10, {1.77, 1.61, 1.46, 1.33, 1.21, 1.10, 1.00}, 4.74},
};

double round_to(double x, int decimals)
{
    const double scale = std::pow(10.0, decimals);
    return std::round(x * scale) / scale;
}

} // namespace

TEST_CASE("geometric weights reproduce the published object rows")
{
    for (const ObjectRow& row : kObjectRows) {
        const WeightVector wv = geometric_weights(7, row.ratio);
        REQUIRE(wv.size() == 7);
        for (int i = 0; i < 7; ++i)
            CHECK(std::abs(wv.weights[i] - row.entries[i]) <= 0.01);
        CHECK(std::abs(consensus_threshold(wv).value - row.threshold) <= 0.01);
        CHECK(wv.ratio == row.ratio);
    }
}

TEST_CASE("geometric weights reproduce the published node rows at table precision")
{
    // node table prints one decimal; thresholds frozen from exact summation
    struct NodeRow {
        int t;
        double ratio;
        double entries[7];
        double threshold;
    };
    const NodeRow rows[] = {
        {1, 1.40, {7.5, 5.4, 3.8, 2.7, 2.0, 1.4, 1.0}, 11.926688},
        {2, 1.38, {6.9, 5.0, 3.6, 2.6, 1.9, 1.4, 1.0}, 11.225437},
        {3, 1.19, {2.8, 2.4, 2.0, 1.7, 1.4, 1.2, 1.0}, 6.261356},
        {4, 1.08, {1.6, 1.5, 1.4, 1.3, 1.2, 1.1, 1.0}, 4.461402},
    };
    for (const NodeRow& row : rows) {
        const WeightVector wv = geometric_weights(7, row.ratio);
        for (int i = 0; i < 7; ++i)
            CHECK(std::abs(round_to(wv.weights[i], 1) - row.entries[i]) <= 0.01);
        CHECK(std::abs(consensus_threshold(wv).value - row.threshold) <= 0.01);
    }
}

TEST_CASE("geometric weights degenerate to uniform at ratio 1")
{
    const WeightVector wv = geometric_weights(3, 1.0);
    CHECK(wv.weights == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(consensus_threshold(wv).value == 1.5);
}

TEST_CASE("geometric weights reject out-of-domain arguments")
{
    CHECK_THROWS_AS(geometric_weights(2, 1.4), std::domain_error);
    CHECK_THROWS_AS(geometric_weights(7, 0.99), std::domain_error);
    CHECK_THROWS_AS(geometric_weights(7, 2.01), std::domain_error);
}

TEST_CASE("invariant report on the published rows")
{
    SUBCASE("ObjA at t=1 satisfies both invariants")
    {
        const InvariantReport rep = check_invariants(geometric_weights(7, 1.40), 1);
        CHECK(rep.i1_holds);
        CHECK(rep.i2_holds);
        CHECK(rep.top_t_plus_1_sum == doctest::Approx(12.907776));
        CHECK(rep.top_t_sum == doctest::Approx(7.529536));
        CHECK(rep.threshold == doctest::Approx(11.926688));
    }
    SUBCASE("uniform 3-replica majority at t=1")
    {
        const InvariantReport rep = check_invariants(geometric_weights(3, 1.0), 1);
        CHECK(rep.i1_holds);  // 2 > 1.5
        CHECK(rep.i2_holds);  // 1 < 1.5
    }
    SUBCASE("ObjD at t=3 violates strict safety")
    {
        // top-3 sum 4.846 is not strictly below the threshold 4.744
        const InvariantReport rep = check_invariants(geometric_weights(7, 1.10), 3);
        CHECK(rep.i1_holds);
        CHECK_FALSE(rep.i2_holds);
        CHECK(rep.top_t_sum == doctest::Approx(4.846171));
        CHECK(rep.threshold == doctest::Approx(4.743586));
    }
    SUBCASE("t out of range is rejected")
    {
        CHECK_THROWS_AS(check_invariants(geometric_weights(7, 1.4), 0), std::invalid_argument);
        CHECK_THROWS_AS(check_invariants(geometric_weights(7, 1.4), 4), std::invalid_argument);
    }
}

TEST_CASE("feasible ratio interval endpoints")
{
    SUBCASE("n=3 t=1 is bounded above by the golden ratio")
    {
        const auto interval = feasible_ratio_interval(3, 1, 0.001);
        REQUIRE(interval);
        CHECK(interval->lo == doctest::Approx(1.0));
        CHECK(interval->hi == doctest::Approx(1.618).epsilon(1e-6));
    }
    SUBCASE("n=7 t=1 contains the ObjA ratio")
    {
        const auto interval = feasible_ratio_interval(7, 1, 0.01);
        REQUIRE(interval);
        CHECK(interval->lo <= 1.40);
        CHECK(1.40 <= interval->hi);
    }
    SUBCASE("n=7 t=2 contains 1.25 but not 1.38")
    {
        const auto interval = feasible_ratio_interval(7, 2, 0.01);
        REQUIRE(interval);
        CHECK(interval->lo <= 1.25);
        CHECK(1.25 <= interval->hi);
        CHECK(interval->hi < 1.38);
    }
    SUBCASE("bad step rejected")
    {
        CHECK_THROWS_AS(feasible_ratio_interval(7, 1, 0.0), std::invalid_argument);
    }
}

TEST_CASE("every ratio inside the feasible interval passes both invariants")
{
    for (int n = 3; n <= 9; ++n) {
        for (int t = 1; t <= (n - 1) / 2; ++t) {
            const auto interval = feasible_ratio_interval(n, t, 0.01);
            REQUIRE_MESSAGE(interval, "n=" << n << " t=" << t);
            for (double r = interval->lo; r <= interval->hi + 1e-12; r += 0.01) {
                const InvariantReport rep = check_invariants(geometric_weights(n, r), t);
                CHECK_MESSAGE(rep.i1_holds && rep.i2_holds,
                              "n=" << n << " t=" << t << " r=" << r);
            }
        }
    }
}

TEST_CASE("brute-force quorum intersection for generated vectors")
{
    for (int n : {3, 5, 7, 9}) {
        for (double r = 1.0; r <= 2.0 + 1e-9; r += 0.05) {
            const WeightVector wv = geometric_weights(n, std::min(r, 2.0));
            CHECK_MESSAGE(woc_test::all_quorums_intersect(wv.weights),
                          "n=" << n << " r=" << r);
        }
    }
}

TEST_CASE("weight monotonicity in rank and in ratio")
{
    for (int n : {3, 5, 7, 9}) {
        double prev_spread = 0.0;
        for (double r = 1.0; r <= 2.0 + 1e-9; r += 0.1) {
            const WeightVector wv = geometric_weights(n, std::min(r, 2.0));
            for (int i = 1; i < n; ++i)
                CHECK(wv.weights[i] <= wv.weights[i - 1]);
            const double spread = wv.weights.front() / wv.weights.back();
            CHECK(spread >= prev_spread);
            prev_spread = spread;
        }
    }
}

TEST_CASE("threshold scales linearly and preserves quorum membership")
{
    const WeightVector base = geometric_weights(7, 1.25);
    for (double c : {0.5, 2.0, 13.7}) {
        WeightVector scaled = base;
        for (double& w : scaled.weights)
            w *= c;
        CHECK(consensus_threshold(scaled).value ==
              doctest::Approx(c * consensus_threshold(base).value));
        CHECK(woc_test::quorum_masks(scaled.weights) == woc_test::quorum_masks(base.weights));
    }
}

TEST_CASE("rank_and_assign orders replicas by smoothed latency")
{
    SUBCASE("clear latency ordering")
    {
        const WeightVector wv = rank_and_assign({{0, 5.0}, {1, 10.0}, {2, 20.0}}, 1.4);
        CHECK(wv.rank_to_replica == std::vector<ReplicaId>{0, 1, 2});
        CHECK(wv.weight_of(0) == doctest::Approx(1.96));
        CHECK(wv.weight_of(1) == doctest::Approx(1.40));
        CHECK(wv.weight_of(2) == doctest::Approx(1.00));
    }
    SUBCASE("ties break toward the lowest replica id")
    {
        const WeightVector wv = rank_and_assign({{0, 5.0}, {1, 5.0}, {2, 5.0}}, 1.4);
        CHECK(wv.rank_to_replica == std::vector<ReplicaId>{0, 1, 2});
    }
    SUBCASE("permuted input")
    {
        const WeightVector wv = rank_and_assign({{0, 20.0}, {1, 5.0}, {2, 10.0}}, 1.4);
        CHECK(wv.rank_to_replica == std::vector<ReplicaId>{1, 2, 0});
        CHECK(wv.weight_of(1) == doctest::Approx(1.96));
        CHECK(wv.weight_of(2) == doctest::Approx(1.40));
        CHECK(wv.weight_of(0) == doctest::Approx(1.00));
    }
    SUBCASE("rejects missing and non-positive latencies")
    {
        CHECK_THROWS_AS(rank_and_assign({}, 1.4), std::invalid_argument);
        CHECK_THROWS_AS(rank_and_assign({{0, 5.0}, {1, 0.0}, {2, 3.0}}, 1.4),
                        std::invalid_argument);
    }
}

TEST_CASE("ewma seeds on the first sample and smooths with alpha 0.2")
{
    Ewma e;
    e.observe(10.0);
    CHECK(e.value() == 10.0);
    e.observe(20.0);
    CHECK(e.value() == doctest::Approx(12.0));  // 0.2*20 + 0.8*10

    Ewma constant;
    for (int i = 0; i < 3; ++i)
        constant.observe(5.0);
    CHECK(constant.value() == doctest::Approx(5.0));
}

TEST_CASE("hand-supplied weight vectors validate")
{
    WeightVector wv;
    wv.weights = {7.5, 5.4, 3.8, 2.7, 2.0, 1.4, 1.0};
    wv.rank_to_replica = {0, 1, 2, 3, 4, 5, 6};
    CHECK_NOTHROW(wv.validate());
    CHECK_FALSE(wv.ratio.has_value());
    CHECK(consensus_threshold(wv).value == doctest::Approx(11.9));

    WeightVector increasing = wv;
    increasing.weights[2] = 9.0;
    CHECK_THROWS_AS(increasing.validate(), ConfigError);

    WeightVector tiny;
    tiny.weights = {1.0, 1.0};
    tiny.rank_to_replica = {0, 1};
    CHECK_THROWS_AS(tiny.validate(), ConfigError);
}
