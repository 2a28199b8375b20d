#include <gtest/gtest.h>

#include "p2pir/bench/workloads.hpp"
#include "p2pir/routing/private_routing.hpp"

using namespace p2pir;
using namespace p2pir::bench;

TEST(Workloads, UsecaseNames) {
    for (Usecase u : {Usecase::Routing, Usecase::Provider, Usecase::Block}) EXPECT_EQ(parse_usecase(usecase_name(u)), u);
    EXPECT_FALSE(parse_usecase("gossip").has_value());
}

TEST(Workloads, Summary) {
    const Stats s = summarize({2, 4, 4, 4, 5, 5, 7, 9});
    EXPECT_DOUBLE_EQ(s.mean, 5.0);
    EXPECT_NEAR(s.stddev, 2.138, 1e-3);
    EXPECT_EQ(summarize({}).mean, 0.0);
    EXPECT_EQ(summarize({3}).stddev, 0.0);
}

TEST(Workloads, ShapesOfTheSyntheticTables) {
    Prg rng(Seed{}, 3);
    const auto routing = random_routing_db(rng);
    EXPECT_EQ(routing.rows(), 256u);
    EXPECT_EQ(routing.row_width(), routing::routing_row_width());
    EXPECT_EQ(routing::decode_bucket(routing.record(9)).size(), routing::kBucketSize);
    const auto w = make_provider_workload(500, rng, 1000, 10);
    EXPECT_EQ(w.store.size(), 500u);
    EXPECT_EQ(w.book.size(), 10u);
    EXPECT_EQ(usecase_rows(Usecase::Provider, 500), provider::kBins);
    EXPECT_EQ(usecase_rows(Usecase::Block, 7), 7u);
}
