#include <gtest/gtest.h>

#include "iotsim/error.hpp"
#include "iotsim/net.hpp"

using namespace iotsim;

namespace {

DataPacket packet_of(std::uint64_t bytes) {
  DataPacket p;
  p.size_bytes = bytes;
  return p;
}

}  // namespace

TEST(Net, LatencyIsPropagationPlusTransfer) {
  ConnectionType t;
  t.bandwidth_Bps = 100.0;
  t.propagation_s = 2;
  EXPECT_EQ(latency(t, 0), 2u);
  EXPECT_EQ(latency(t, 100), 3u);
  EXPECT_EQ(latency(t, 101), 4u);
}

TEST(Net, DefaultTableCoversEveryKind) {
  const auto t = ConnectionTable::defaults();
  for (std::size_t k = 0; k < kConnectionKindCount; ++k) {
    const auto kind = static_cast<ConnectionKind>(k);
    EXPECT_EQ(t.get(kind).kind, kind);
    EXPECT_GT(t.get(kind).range_m, 0.0);
    EXPECT_GT(t.get(kind).bandwidth_Bps, 0.0);
    EXPECT_EQ(connection_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_FALSE(connection_kind_from_string("carrier_pigeon"));
}

TEST(Net, SignalMapsToLossProbability) {
  NetworkConnection c(ConnectionType{}, 1.0, 0.1);
  EXPECT_DOUBLE_EQ(c.loss_probability(), 0.1);
  set_signal(c, 0.6);
  EXPECT_DOUBLE_EQ(c.loss_probability(), 0.4);
  set_signal(c, 0.95);
  EXPECT_DOUBLE_EQ(c.loss_probability(), 0.1);
  EXPECT_THROW(set_signal(c, 1.5), Error);
  EXPECT_THROW(set_signal(c, -0.1), Error);
  EXPECT_THROW(NetworkConnection(ConnectionType{}, 1.0, 2.0), Error);
}

TEST(Net, ZeroStrengthLosesEverything) {
  NetworkConnection c(ConnectionType{}, 0.0);
  RandomStream rng(1, 1);
  for (int i = 0; i < 100; ++i) {
    auto out = transmit(c, packet_of(80), SimTime{1}, rng);
    ASSERT_TRUE(std::holds_alternative<Lost>(out));
    EXPECT_EQ(std::get<Lost>(out).reason, LossReason::Drop);
  }
  EXPECT_EQ(c.lost, 100u);
}

TEST(Net, PerfectLinkDeliversAfterLatency) {
  ConnectionType t;
  t.bandwidth_Bps = 40.0;
  t.propagation_s = 1;
  NetworkConnection c(t);
  RandomStream rng(1, 1);
  auto out = transmit(c, packet_of(80), SimTime{10}, rng);
  ASSERT_TRUE(std::holds_alternative<DeliveredAt>(out));
  EXPECT_EQ(std::get<DeliveredAt>(out).time, SimTime{13});
  EXPECT_EQ(c.transmits, 1u);
  EXPECT_EQ(c.delivered, 1u);
}

TEST(Net, OutageWindowsAreHalfOpen) {
  NetworkConnection c(ConnectionType{});
  c.add_outage({SimTime{10}, SimTime{20}});
  c.add_outage({SimTime{30}, SimTime{40}});
  EXPECT_FALSE(c.in_outage(SimTime{9}));
  EXPECT_TRUE(c.in_outage(SimTime{10}));
  EXPECT_TRUE(c.in_outage(SimTime{19}));
  EXPECT_FALSE(c.in_outage(SimTime{20}));
  EXPECT_TRUE(c.in_outage(SimTime{35}));
  RandomStream rng(1, 1);
  auto out = transmit(c, packet_of(80), SimTime{15}, rng);
  ASSERT_TRUE(std::holds_alternative<Lost>(out));
  EXPECT_EQ(std::get<Lost>(out).reason, LossReason::Outage);
}

TEST(Net, OverlappingOrEmptyOutagesRejected) {
  NetworkConnection c(ConnectionType{});
  c.add_outage({SimTime{10}, SimTime{20}});
  EXPECT_THROW(c.add_outage({SimTime{15}, SimTime{25}}), Error);
  EXPECT_THROW(c.add_outage({SimTime{5}, SimTime{11}}), Error);
  EXPECT_THROW(c.add_outage({SimTime{30}, SimTime{30}}), Error);
  EXPECT_NO_THROW(c.add_outage({SimTime{20}, SimTime{25}}));
  EXPECT_NO_THROW(c.add_outage({SimTime{0}, SimTime{10}}));
  EXPECT_EQ(c.outages().size(), 3u);
}

TEST(Net, RangeIsThreeDimensional) {
  ConnectionType t;
  t.range_m = 100.0;
  EXPECT_TRUE(in_range({0, 0, 0}, {60, 80, 0}, t));
  EXPECT_FALSE(in_range({0, 0, 0}, {60, 80, 1}, t));
  EXPECT_FALSE(in_range({0, 0, -200}, {0, 0, 0}, t));
}

TEST(Net, DropRateMatchesProbability) {
  NetworkConnection c(ConnectionType{}, 1.0, 0.25);
  RandomStream rng(5, 5);
  const int n = 40000;
  for (int i = 0; i < n; ++i) transmit(c, packet_of(80), SimTime{1}, rng);
  EXPECT_EQ(c.delivered + c.lost, static_cast<std::uint64_t>(n));
  EXPECT_NEAR(c.lost / double(n), 0.25, 0.01);
}
