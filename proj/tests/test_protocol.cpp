#include <doctest.h>

#include "gen.hpp"
#include "l3/error.hpp"
#include "l3/protocol.hpp"
#include "l3/scenario_io.hpp"

using namespace l3;
using BS = BlockState;

namespace {

GroundTruth fig5_world() {
  GroundTruth w;
  w.vehicles = {{1, {{22.5, 52.5}, 1.0}}, {2, {{42.5, 53.0}, 1.0}}, {3, {{64.5, 52.5}, 1.0}}};
  return w;
}

VehicleState fig5_vehicle(VehicleId id) {
  const auto w = fig5_world();
  return init_vehicle(id, w.vehicles[static_cast<std::size_t>(id - 1)].body.center, w, GridConfig{}, 25.0);
}

Packet packet_of(const VehicleState& v) { return Packet{v.id, v.matrix.zone(), encode_frame(v.matrix)}; }

VehicleState with_matrix(SensingMatrix m) {
  VehicleState v;
  v.id = 9;
  v.matrix = std::move(m);
  return v;
}

}  // namespace

TEST_CASE("init_vehicle arms only vehicles with uncertain blocks") {
  CHECK(fig5_vehicle(1).pending_tx);
  CHECK(fig5_vehicle(1).fresh);
  CHECK_FALSE(fig5_vehicle(2).pending_tx);
  CHECK_FALSE(fig5_vehicle(3).pending_tx);

  GroundTruth lone;
  lone.vehicles.push_back({1, {{50, 50}, 1.0}});
  const auto v = init_vehicle(1, {50, 50}, lone, GridConfig{}, 25.0);
  CHECK_FALSE(v.pending_tx);
  CHECK(v.tx_slots == 0);
  CHECK(v.rx_slots == 0);

  const auto forced = init_vehicle(2, {42.5, 53.0}, fig5_world(), GridConfig{}, 25.0, true);
  CHECK(forced.pending_tx);
  const auto muted = init_vehicle(1, {22.5, 52.5}, fig5_world(), GridConfig{}, 25.0, false);
  CHECK_FALSE(muted.pending_tx);
}

TEST_CASE("on_slot_begin emits once per arming") {
  auto v = fig5_vehicle(1);
  const auto t = on_slot_begin(v);
  REQUIRE(t);
  CHECK(t->sender == 1);
  CHECK(t->packet.payload == encode(v.matrix));
  CHECK(t->packet.payload.size() == 100);
  CHECK(v.tx_slots == 1);
  CHECK_FALSE(v.pending_tx);
  CHECK_FALSE(on_slot_begin(v));
  CHECK(v.tx_slots == 1);
}

TEST_CASE("on_delivery: an equal matrix schedules nothing") {
  auto v = fig5_vehicle(2);
  const auto before = v.matrix;
  on_delivery(v, packet_of(v));
  CHECK(v.matrix == before);
  CHECK_FALSE(v.pending_tx);
  CHECK(v.rx_slots == 1);
}

TEST_CASE("on_delivery: an equal matrix cancels a pending transmission") {
  auto v = fig5_vehicle(2);
  v.pending_tx = true;
  on_delivery(v, packet_of(v));
  CHECK_FALSE(v.pending_tx);
}

TEST_CASE("on_delivery: filling an uncertain block arms fresh news") {
  // Vehicle 1 learns the block behind vehicle 2 from vehicle 3, while
  // vehicle 3 still lacks vehicle 1's surroundings.
  auto v1 = fig5_vehicle(1);
  on_slot_begin(v1);
  const auto v3 = fig5_vehicle(3);
  on_delivery(v1, packet_of(v3));
  CHECK(v1.matrix(10, 9) == BS::NoObject);
  CHECK(v1.pending_tx);
  CHECK(v1.fresh);
}

TEST_CASE("on_delivery: adopting exactly the sender's matrix arms nothing") {
  SensingMatrix mine({}, 2, 2, BS::OutOfSensing);
  SensingMatrix theirs({}, 2, 2, BS::NoObject);
  auto v = with_matrix(mine);
  on_delivery(v, Packet{1, {}, encode_frame(theirs)});
  CHECK(v.matrix == theirs);
  CHECK_FALSE(v.pending_tx);
}

TEST_CASE("on_delivery: a sender that lacks our information gets a reply") {
  SensingMatrix mine({}, 2, 2, BS::NoObject);
  SensingMatrix theirs({}, 2, 2, BS::OutOfSensing);
  auto v = with_matrix(mine);
  on_delivery(v, Packet{1, {}, encode_frame(theirs)});
  CHECK(v.matrix == mine);
  CHECK(v.pending_tx);
  CHECK_FALSE(v.fresh);
}

TEST_CASE("on_delivery: a contested capture that changed us is fresh news") {
  SensingMatrix mine({}, 2, 2, BS::OutOfSensing);
  SensingMatrix theirs({}, 2, 2, BS::NoObject);
  auto v = with_matrix(mine);
  on_delivery(v, Packet{1, {}, encode_frame(theirs)}, true);
  CHECK(v.pending_tx);
  CHECK(v.fresh);
}

TEST_CASE("on_delivery drops foreign and malformed packets") {
  auto v = fig5_vehicle(2);
  const auto before = v.matrix;
  on_delivery(v, Packet{1, {1, 0}, encode(SensingMatrix({1, 0}, 20, 20, BS::NoObject))});
  CHECK(v.matrix == before);
  CHECK(v.dropped_cross_zone == 1);
  CHECK(v.rx_slots == 1);
  on_delivery(v, Packet{1, {0, 0}, std::vector<std::uint8_t>(7, 0xAA)});
  CHECK(v.matrix == before);
  CHECK(v.protocol_errors == 1);
  CHECK(v.rx_slots == 2);
  CHECK_FALSE(v.pending_tx);
}

TEST_CASE("on_collision arms a retry") {
  auto v = fig5_vehicle(2);
  on_collision(v);
  CHECK(v.pending_tx);
  CHECK_FALSE(v.fresh);
  CHECK(v.collisions == 1);
}

TEST_CASE("access probability") {
  const AccessConfig a;
  VehicleState v;
  v.fresh = true;
  CHECK(access_probability(v, 1, a) == 1.0);
  CHECK(access_probability(v, 6, a) == doctest::Approx(0.5));
  v.fresh = false;
  CHECK(access_probability(v, 8, a) == doctest::Approx(0.125));
  v.idle_streak = 1;
  CHECK(access_probability(v, 8, a) == doctest::Approx(0.25));
  v.idle_streak = 10;
  CHECK(access_probability(v, 8, a) == doctest::Approx(0.5));
  CHECK(access_probability(v, 0, a) == 1.0);
}

TEST_CASE("is_globally_converged") {
  std::vector<VehicleState> all{fig5_vehicle(2), fig5_vehicle(2)};
  all[1].id = 5;
  CHECK(is_globally_converged(all, false));
  CHECK_FALSE(is_globally_converged(all, true));
  all[0].pending_tx = true;
  CHECK_FALSE(is_globally_converged(all, false));
  all[0].pending_tx = false;
  all[1] = fig5_vehicle(3);
  CHECK_FALSE(is_globally_converged(all, false));
}

TEST_CASE("access config validation") {
  AccessConfig a;
  CHECK_NOTHROW(a.validate());
  a.retry_cap = 0;
  CHECK_THROWS_AS(a.validate(), InvalidInput);
  a = AccessConfig{};
  a.fresh = -1;
  CHECK_THROWS_AS(a.validate(), InvalidInput);
  a = AccessConfig{};
  a.idle_growth = 0.5;
  CHECK_THROWS_AS(a.validate(), InvalidInput);
}

TEST_CASE("property: deliveries lose sensed blocks only to contradictions") {
  gen::Engine e(41);
  for (int i = 0; i < 2000; ++i) {
    auto v = with_matrix(gen::matrix(e, 6, 6));
    const auto before = v.matrix;
    const auto other = gen::matrix(e, 6, 6);
    on_delivery(v, Packet{1, {}, encode_frame(other)}, gen::integer(e, 0, 1) == 1);
    for (std::size_t k = 0; k < before.size(); ++k) {
      const BS a = before.cells()[k];
      const BS b = other.cells()[k];
      if (is_sensed(a) && !(is_sensed(b) && low_bit(a) != low_bit(b))) REQUIRE(is_sensed(v.matrix.cells()[k]));
    }
    REQUIRE(v.matrix == aggregate(before, other).matrix);
  }
}
