#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

#include "gen.hpp"
#include "l3/error.hpp"
#include "l3/scenario_io.hpp"
#include "l3/sim.hpp"

using namespace l3;

namespace {

ScenarioConfig bundled(const std::string& name) {
  return load_scenario(std::string(L3_SOURCE_DIR) + "/scenarios/" + name + ".scenario");
}

struct SlotRecord {
  int slot;
  std::vector<VehicleId> senders;
  std::map<VehicleId, std::string> outcomes;
};

SlotRecord parse_trace_line(const std::string& line) {
  SlotRecord r{};
  std::istringstream in(line);
  std::string slot, tx, rx;
  in >> slot >> tx >> rx;
  r.slot = std::stoi(slot.substr(5));
  std::string ids = tx.substr(3);
  if (ids != "-") {
    std::istringstream s(ids);
    for (std::string id; std::getline(s, id, ',');) r.senders.push_back(std::stoi(id));
  }
  std::string outs = rx.substr(3);
  if (outs != "-") {
    std::istringstream s(outs);
    for (std::string item; std::getline(s, item, ',');) {
      const auto colon = item.find(':');
      r.outcomes[std::stoi(item.substr(0, colon))] = item.substr(colon + 1);
    }
  }
  return r;
}

int unsensed_cells(const std::vector<VehicleState>& fleet) {
  int n = 0;
  for (const auto& v : fleet) {
    for (auto c : v.matrix.cells()) n += is_sensed(c) ? 0 : 1;
  }
  return n;
}

}  // namespace

TEST_CASE("a lone vehicle without uncertainty is converged at slot 0") {
  ScenarioConfig c;
  c.vehicles.push_back({1, {50, 50}});
  const auto r = run(c);
  CHECK(r.metrics.converged);
  CHECK(r.metrics.quiescent_slot == 0);
  CHECK(r.metrics.last_tx_slot == 0);
  CHECK(r.metrics.total_transmissions == 0);
  CHECK(r.trace.empty());
}

TEST_CASE("a lone initiator has nobody to talk to") {
  ScenarioConfig c;
  c.vehicles.push_back({1, {50, 50}});
  c.initiators = std::vector<VehicleId>{1};
  const auto r = run(c);
  CHECK(r.metrics.converged);
  CHECK(r.metrics.total_transmissions == 0);
}

TEST_CASE("three-vehicle line replays the narrated exchange") {
  const auto r = run(bundled("fig5_line3"));
  const std::vector<std::string> expected{
      "slot=1 tx=1 rx=1:S,2:D1,3:D1",
      "slot=2 tx=2,3 rx=1:D2,2:S,3:S",
      "slot=3 tx=1 rx=1:S,2:D1,3:D1",
      "slot=4 tx=3 rx=1:D3,2:D3,3:S",
      "slot=5 tx=- rx=-",
  };
  CHECK(r.trace == expected);
  CHECK(r.metrics.converged);
  CHECK(r.metrics.last_tx_slot == 4);
  CHECK(r.metrics.quiescent_slot == 5);
  CHECK(r.metrics.latency_ms == 10.0);
  CHECK(r.metrics.final_matrix(10, 9) == BlockState::NoObject);
  CHECK_FALSE(has_uncertain(r.metrics.final_matrix));
}

TEST_CASE("nine-vehicle lattice runs at seed 0") {
  const auto corner = run(bundled("grid9_corner"));
  const auto middle = run(bundled("grid9_middle"));
  CHECK(corner.metrics.converged);
  CHECK(middle.metrics.converged);
  // Frozen from the reviewed runs.
  CHECK(corner.metrics.quiescent_slot == 17);
  CHECK(middle.metrics.quiescent_slot == 20);
}

TEST_CASE("config validation") {
  ScenarioConfig c;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.vehicles = {{1, {10, 10}}, {1, {20, 20}}};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.vehicles = {{1, {10, 10}}, {2, {120, 20}}};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.vehicles = {{1, {10, 10}}};
  c.slot_duration_ms = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.slot_duration_ms = 2;
  c.initiators = std::vector<VehicleId>{7};
  CHECK_THROWS_AS(run(c), InvalidInput);
  c.initiators.reset();
  c.placement = RandomPlacement{3, {50, 50}, {150, 60}, 1.0};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("random placement respects the box and the separation") {
  ScenarioConfig c;
  c.placement = RandomPlacement{40, {20, 30}, {60, 70}, 2.0};
  c.seed = 99;
  const auto vs = materialize_vehicles(c);
  REQUIRE(vs.size() == 40);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    CHECK(vs[i].id == static_cast<VehicleId>(i + 1));
    CHECK(vs[i].pos.x >= 20);
    CHECK(vs[i].pos.x < 60);
    for (std::size_t j = 0; j < i; ++j) CHECK(distance(vs[i].pos, vs[j].pos) >= 2.0);
  }
  CHECK(materialize_vehicles(c) == vs);
}

TEST_CASE("max_slots default") {
  ScenarioConfig c;
  CHECK(effective_max_slots(c, 3) == 30);
  CHECK(effective_max_slots(c, 5000) == 10000);
  c.max_slots = 7;
  CHECK(effective_max_slots(c, 3) == 7);
}

TEST_CASE("hitting the slot cap reports non-convergence") {
  auto c = bundled("grid9_corner");
  c.max_slots = 3;
  const auto r = run(c);
  CHECK_FALSE(r.metrics.converged);
  CHECK(r.metrics.quiescent_slot == 3);
  CHECK(r.metrics.last_tx_slot <= 3);
}

TEST_CASE("sweep seeds and CSV") {
  ScenarioConfig base;
  base.initiators = std::vector<VehicleId>{1};
  const auto rows = sweep(base, {1, 4}, 3, 5);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].count == 1);
  CHECK(rows[0].quiescent_slot == 0);
  CHECK(rows[0].last_tx_slot == 0);
  CHECK(rows[0].latency_ms == 0.0);
  CHECK(rows[3].seed == derive_seed(5, 4, 0));
  CHECK(derive_seed(5, 4, 0) != derive_seed(5, 4, 1));
  CHECK(derive_seed(5, 4, 0) != derive_seed(6, 4, 0));
  const auto csv = sweep_csv(rows);
  CHECK(csv.rfind("count,trial,seed,mac,last_tx_slot,quiescent_slot,latency_ms,converged\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(sweep(base, {1, 4}, 3, 5).size() == 6);
  CHECK(sweep_csv(sweep(base, {1, 4}, 3, 5)) == csv);
  CHECK_THROWS_AS(sweep(base, {}, 3, 5), InvalidInput);
  CHECK_THROWS_AS(sweep(base, {3}, 0, 5), InvalidInput);

  const auto sum = summarize(rows);
  REQUIRE(sum.size() == 2);
  CHECK(sum[1].count == 4);
  CHECK(sum[1].trials == 3);
  CHECK(sum[1].min_slots <= sum[1].max_slots);
}

TEST_CASE("the baseline shares the protocol and serializes epochs") {
  auto c = bundled("fig5_line3");
  c.mac = MacMode::CsmaBaseline;
  const auto r = simulate(c);
  CHECK(r.metrics.converged);
  CHECK_FALSE(has_uncertain(r.metrics.final_matrix));
  // Every epoch costs at least one slot of air time.
  CHECK(r.metrics.latency_ms >= c.slot_duration_ms * r.metrics.quiescent_slot);
  for (const auto& line : r.trace) {
    const auto rec = parse_trace_line(line);
    for (const auto& [id, out] : rec.outcomes) CHECK(out != "C");
  }
}

TEST_CASE("two vehicles: each leg of the exchange fits in one slot") {
  ScenarioConfig c;
  c.vehicles = {{1, {40, 50}}, {2, {60, 50}}};
  c.initiators = std::vector<VehicleId>{1};
  const auto r = run(c);
  CHECK(r.metrics.converged);
  CHECK(r.trace[0] == "slot=1 tx=1 rx=1:S,2:D1");
  CHECK(r.trace[1] == "slot=2 tx=2 rx=1:D2,2:S");
  CHECK(r.metrics.latency_ms == doctest::Approx(3 * 2.0));
  c.mac = MacMode::CsmaBaseline;
  CHECK(simulate(c).metrics.latency_ms >= r.metrics.latency_ms);
}

TEST_CASE("property: runs on random small worlds") {
  gen::Engine e(53);
  for (int trial = 0; trial < 300; ++trial) {
    auto c = gen::small_world(e, 4, 6, 4);
    if (gen::integer(e, 0, 1)) c.initiators = std::vector<VehicleId>{1};
    const auto r = run(c);
    CAPTURE(write_scenario(c));

    // Determinism.
    const auto again = run(c);
    REQUIRE(again.trace == r.trace);
    REQUIRE(metrics_csv(again.metrics) == metrics_csv(r.metrics));

    REQUIRE(r.metrics.last_tx_slot <= r.metrics.quiescent_slot);
    REQUIRE(r.metrics.quiescent_slot <= effective_max_slots(c, c.vehicles.size()));
    REQUIRE(r.metrics.latency_ms == r.metrics.quiescent_slot * c.slot_duration_ms);
    if (r.metrics.converged) {
      for (const auto& v : r.final_states) REQUIRE(same_information(v.matrix, r.metrics.final_matrix));
    }

    // TX/RX accounting against the trace.
    std::map<VehicleId, int> tx, rx;
    int total = 0;
    for (const auto& line : r.trace) {
      const auto rec = parse_trace_line(line);
      total += static_cast<int>(rec.senders.size());
      for (VehicleId s : rec.senders) {
        ++tx[s];
        if (rec.outcomes.count(s)) REQUIRE(rec.outcomes.at(s) == "S");
      }
      for (const auto& [id, out] : rec.outcomes) {
        if (out[0] == 'D') ++rx[id];
      }
    }
    REQUIRE(total == r.metrics.total_transmissions);
    int tally_tx = 0;
    for (const auto& t : r.metrics.per_vehicle) {
      REQUIRE(t.tx_slots == tx[t.id]);
      REQUIRE(t.rx_slots == rx[t.id]);
      tally_tx += t.tx_slots;
    }
    REQUIRE(tally_tx == total);
  }
}

TEST_CASE("property: unsensed cells never increase from slot to slot") {
  gen::Engine e(59);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = gen::small_world(e, 4, 5, 3);
    c.initiators = std::vector<VehicleId>{1};
    int previous = -1;
    for (int cap = 1; cap <= 25; ++cap) {
      c.max_slots = cap;
      const int now = unsensed_cells(run(c).final_states);
      if (previous >= 0) REQUIRE(now <= previous);
      previous = now;
    }
  }
}

TEST_CASE("property: completion takes at least the initiators' hop eccentricity") {
  gen::Engine e(61);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = gen::small_world(e, 20, 7, 3);
    c.channel.comm_range = gen::real(e, 15, 60);
    c.initiators = std::vector<VehicleId>{1};
    const auto r = run(c);
    if (!r.metrics.converged || r.metrics.total_transmissions == 0) continue;
    const auto& vs = c.vehicles;
    std::vector<int> hops(vs.size(), -1);
    std::queue<std::size_t> q;
    hops[0] = 0;
    q.push(0);
    while (!q.empty()) {
      const auto a = q.front();
      q.pop();
      for (std::size_t b = 0; b < vs.size(); ++b) {
        if (hops[b] < 0 && distance(vs[a].pos, vs[b].pos) <= c.channel.comm_range) {
          hops[b] = hops[a] + 1;
          q.push(b);
        }
      }
    }
    const int ecc = *std::max_element(hops.begin(), hops.end());
    if (std::find(hops.begin(), hops.end(), -1) != hops.end()) continue;
    REQUIRE(r.metrics.quiescent_slot >= ecc);
  }
}
