#include "marichain/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "marichain/errors.hpp"

namespace marichain {

namespace {

constexpr const char* kRegulationSulfur = "MARPOL-VI-R14";

// Consecutive rejected blocks with unchanged stakes after the final pull
// before the drain loop gives up (consensus is deadlocked, e.g. a dishonest
// majority with slashing disabled).
constexpr int kStalledRejectLimit = 256;

std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::vector<PendingTx> TransactionQueue::take(std::size_t n) {
  std::vector<PendingTx> batch;
  while (!queue_.empty() && batch.size() < n) {
    batch.push_back(std::move(queue_.front()));
    queue_.pop_front();
  }
  return batch;
}

void TransactionQueue::return_to_front(std::vector<PendingTx> batch) {
  for (auto it = batch.rbegin(); it != batch.rend(); ++it) {
    queue_.push_front(std::move(*it));
  }
}

std::vector<std::string> notification_recipients(const NonComplianceNotification& n) {
  std::vector<std::string> recipients;
  recipients.push_back("flag:" + n.flag_state);
  if (!n.port_state.empty()) {
    recipients.push_back("port:" + n.port_state);
  }
  return recipients;
}

double RunMetrics::mean_latency() const {
  if (latencies.empty()) return 0.0;
  double sum = 0.0;
  for (double l : latencies) sum += l;
  return sum / static_cast<double>(latencies.size());
}

double RunMetrics::p95_latency() const {
  if (latencies.empty()) return 0.0;
  std::vector<double> sorted = latencies;
  std::sort(sorted.begin(), sorted.end());
  const auto index = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(sorted.size()))) - 1;
  return sorted[std::min(index, sorted.size() - 1)];
}

nlohmann::json RunMetrics::to_json(const FleetScenario& scenario) const {
  const double days = scenario.duration_seconds / 86400.0;
  nlohmann::json per_vessel_json = nlohmann::json::object();
  for (const auto& [imo, vm] : per_vessel) {
    per_vessel_json[std::to_string(imo)] = {
        {"uploads", vm.uploads},
        {"violations", vm.violations},
        {"gas_units", vm.gas_units},
        {"token", vm.token},
        {"usd", vm.usd},
        {"daily_usd_metered", days > 0 ? vm.usd / days : 0.0},
        {"daily_usd_itemized", days > 0 ? vm.usd_itemized / days : 0.0},
        {"daily_usd_quoted", days > 0 ? vm.usd_quoted / days : 0.0},
    };
  }
  return {
      {"scenario", scenario.name},
      {"seed", scenario.seed},
      {"duration_seconds", scenario.duration_seconds},
      {"pull_interval_seconds", scenario.pull_interval_seconds},
      {"counts",
       {{"pulls", pulls},
        {"readings", readings},
        {"invalid_removed", invalid_removed},
        {"suspect_excluded", suspect_excluded},
        {"tx_submitted", tx_submitted},
        {"tx_committed", tx_committed},
        {"blocks_produced", blocks_produced},
        {"blocks_rejected", blocks_rejected},
        {"max_queue_depth", max_queue_depth},
        {"final_queue_depth", final_queue_depth},
        {"violations", violations},
        {"notifications", notifications},
        {"mailbox_deliveries", mailbox_deliveries},
        {"delivery_warnings", delivery_warnings}}},
      {"latency_seconds",
       {{"count", latencies.size()}, {"mean", mean_latency()}, {"p95", p95_latency()}}},
      {"gas",
       {{"total_units", total_gas.gas_units},
        {"total_token", total_gas.token_cost},
        {"total_usd", total_gas.usd_cost},
        {"deployment",
         {{"units", deployment_gas.gas_units},
          {"token", deployment_gas.token_cost},
          {"usd", deployment_gas.usd_cost},
          {"usd_quote", scenario.gas.quote_setup_usd}}},
        {"registration",
         {{"units", registration_gas.gas_units},
          {"token", registration_gas.token_cost},
          {"usd", registration_gas.usd_cost}}}}},
      {"per_vessel", std::move(per_vessel_json)},
  };
}

Simulation::Simulation(FleetScenario scenario)
    : scenario_(std::move(scenario)),
      atlas_(scenario_.load_atlas()),
      world_(scenario_.gas),
      chain_(Chain::genesis()),
      roster_(scenario_.validators),
      id_rng_(Rng::substream(scenario_.seed, "compliance-id")),
      proposer_rng_(Rng::substream(scenario_.seed, "proposer")),
      block_time_rng_(Rng::substream(scenario_.seed, "block-time")) {
  const auto violations = scenario_.validate();
  if (!violations.empty()) {
    throw ConfigError(violations);
  }
  for (const auto& vessel : scenario_.vessels) {
    trackers_.emplace(vessel.identity.imo_number, ConsistencyTracker(scenario_.consistency));
  }
}

void Simulation::initialize_world() {
  if (initialized_) return;
  const CallContext admin{"admin", Role::Admin};
  metrics_.deployment_gas = world_.deploy_contracts(admin);
  for (const auto& vessel : scenario_.vessels) {
    const GasReceipt r = world_.register_vessel(admin, vessel.identity.imo_number,
                                                vessel.identity.owner,
                                                vessel.identity.flag_state);
    metrics_.registration_gas.gas_units += r.gas_units;
    metrics_.registration_gas.token_cost += r.token_cost;
    metrics_.registration_gas.usd_cost += r.usd_cost;
  }
  initialized_ = true;
}

double Simulation::sulfur_at(const VesselSpec& vessel, double now) const {
  double value = vessel.sulfur_percent;
  for (const auto& phase : vessel.sulfur_schedule) {
    if (now >= phase.from_time && now < phase.until_time) {
      value = phase.value;
    }
  }
  return value;
}

void Simulation::position_at(const VesselSpec& vessel, double now, GeoPosition& pos,
                             std::string& location) const {
  pos = vessel.position;
  location = vessel.location;
  for (const auto& wp : vessel.waypoints) {
    if (now >= wp.from_time) {
      pos = wp.position;
      location = wp.location;
    }
  }
}

bool Simulation::fault_active(const Fault& fault, double now) const {
  return now >= fault.from_time && now < fault.until_time;
}

double Simulation::reading_value(const VesselSpec& vessel, const SensorSpec& sensor, double now,
                                 double true_value, double& wall_time) const {
  double value = true_value;
  for (const auto& fault : scenario_.faults) {
    if (fault.imo != vessel.identity.imo_number || fault.sensor_id != sensor.id ||
        !fault_active(fault, now)) {
      continue;
    }
    switch (fault.kind) {
      case FaultKind::Stuck:
      case FaultKind::OutOfRange:
        value = fault.value;
        break;
      case FaultKind::Drift:
        value += fault.value;
        break;
      case FaultKind::ClockSkew:
        wall_time += fault.value;
        break;
      case FaultKind::DishonestValidator:
        break;
    }
  }
  return value;
}

ValidatorSet Simulation::effective_set(double now) const {
  std::vector<Validator> members = roster_;
  for (auto& member : members) {
    for (const auto& fault : scenario_.faults) {
      if (fault.kind == FaultKind::DishonestValidator && fault.validator_id == member.id &&
          fault_active(fault, now)) {
        member.honest = false;
      }
    }
  }
  return ValidatorSet(std::move(members), scenario_.threshold_fraction);
}

void Simulation::submit_tx(PendingTx tx) {
  queue_.submit(std::move(tx));
  metrics_.tx_submitted += 1;
  metrics_.max_queue_depth = std::max(metrics_.max_queue_depth, queue_.size());
  assert_conservation();
}

std::map<std::string, int> Simulation::monitoring_cycle(long long time_index, double now) {
  if (!initialized_) {
    throw StateError("world not initialized: call initialize_world() first");
  }
  std::map<std::string, int> delta;
  clock_ = std::max(clock_, now);
  metrics_.pulls += 1;

  for (const auto& vessel : scenario_.vessels) {
    const long long imo = vessel.identity.imo_number;
    GeoPosition position;
    std::string location;
    position_at(vessel, now, position, location);
    const double true_value = sulfur_at(vessel, now);

    // Collect + validate.
    std::map<std::string, double> valid_values;
    for (const auto& sensor : vessel.sensors) {
      double wall_time = now;
      const double value = reading_value(vessel, sensor, now, true_value, wall_time);
      SensorReading reading{sensor.id, QuantityKind::SulfurContentPercent, value,
                            time_index, wall_time, sensor.calibration_expiry};
      DataPoint provisional{imo, kRegulationSulfur, QuantityKind::SulfurContentPercent,
                            value, time_index, position};
      metrics_.readings += 1;
      const ValidationVerdict verdict = validate(provisional, reading, scenario_.rules, now);
      if (!verdict.valid) {
        metrics_.invalid_removed += 1;
        event_log_.push_back("t=" + std::to_string(time_index) + " vessel=" +
                             std::to_string(imo) + " sensor=" + sensor.id +
                             " invalid: " + std::string(reason_name(verdict.reason)));
        continue;
      }
      valid_values[sensor.id] = value;
    }

    // Cross-sensor consistency: drop sensors whose every evaluated pair is
    // flagged for the current window.
    if (!valid_values.empty()) {
      const auto suspects = trackers_.at(imo).update(valid_values);
      for (const auto& suspect : suspects) {
        metrics_.suspect_excluded += 1;
        event_log_.push_back("t=" + std::to_string(time_index) + " vessel=" +
                             std::to_string(imo) + " sensor=" + suspect + " excluded: " +
                             std::string(reason_name(VerdictReason::SuspectSensor)));
        valid_values.erase(suspect);
      }
    }

    if (valid_values.empty()) {
      continue;  // nothing credible to commit this pull
    }

    double fused = 0.0;
    for (const auto& [id, value] : valid_values) fused += value;
    fused /= static_cast<double>(valid_values.size());

    DataPoint point{imo, kRegulationSulfur, QuantityKind::SulfurContentPercent, fused,
                    time_index, position};
    const Digest digest = hash_data_point(point);
    const ComplianceId id = generate_compliance_id(id_rng_);
    const ComplianceResult result = registry_.evaluate(point, atlas_);

    PendingTx tx;
    tx.entry = LedgerEntry{id, digest, result.bit, imo, time_index};
    tx.sulfur_value = fused;
    tx.position = position;
    tx.in_eca = result.area == AreaKind::Eca;
    tx.location = location;
    tx.submitted_at = now;
    submit_tx(std::move(tx));

    delta[id.hex()] = result.bit;
    compliance_map_[id.hex()] = result.bit;
    if (result.bit == 0) {
      metrics_.violations += 1;
    }
  }

  schedule_block(now);
  return delta;
}

void Simulation::schedule_block(double now) {
  if (!queue_.empty() && !next_block_time_) {
    next_block_time_ = now + block_time_rng_.uniform(scenario_.block_time_lo,
                                                     scenario_.block_time_hi);
  }
}

bool Simulation::produce_block_attempt(double when) {
  if (queue_.empty()) {
    next_block_time_.reset();
    return false;
  }
  clock_ = std::max(clock_, when);
  next_block_time_.reset();

  const ValidatorSet set = effective_set(when);
  const Validator& proposer = select_proposer(set, proposer_rng_);
  auto batch = queue_.take(static_cast<std::size_t>(scenario_.block_capacity));

  std::vector<LedgerEntry> entries;
  entries.reserve(batch.size());
  for (const auto& tx : batch) entries.push_back(tx.entry);
  Block candidate = assemble_block(std::move(entries), proposer.id, chain_);
  if (!set.find(proposer.id)->honest) {
    // Simulated fraud: corrupt a bundled digest after the hash was computed.
    candidate.entries.front().digest.bytes[0] ^= 0xff;
  }

  const VoteRecord record = vote(set, candidate, chain_);
  if (scenario_.slash_fraction > 0.0) {
    const ValidatorSet updated =
        detect_and_slash(set, record, candidate, scenario_.slash_fraction);
    for (auto& member : roster_) {
      if (const Validator* v = updated.find(member.id)) {
        member.stake = v->stake;
      }
    }
  }

  const AppendResult result =
      append_block(chain_, candidate, record.approvals, record.approved);
  bool committed = false;
  if (result == AppendResult::Appended) {
    committed = true;
    metrics_.tx_committed += static_cast<long long>(batch.size());
    metrics_.blocks_produced += 1;
    apply_committed(batch, when, chain_.tip().height);
  } else {
    metrics_.blocks_rejected += 1;
    event_log_.push_back("block rejected at t=" + csv_double(when) + " (" +
                         std::string(append_result_name(result)) + ")");
    queue_.return_to_front(std::move(batch));
  }

  schedule_block(when);
  assert_conservation();
  return committed;
}

void Simulation::apply_committed(const std::vector<PendingTx>& batch, double when,
                                 long long height) {
  const CallContext admin{"admin", Role::Admin};
  const long long gas_before = world_.total_gas().gas_units;

  for (const auto& tx : batch) {
    const long long imo = tx.entry.vessel_imo;
    const auto owner_it =
        std::find_if(scenario_.vessels.begin(), scenario_.vessels.end(),
                     [&](const VesselSpec& v) { return v.identity.imo_number == imo; });
    const std::string owner =
        owner_it != scenario_.vessels.end() ? owner_it->identity.owner : "owner";
    const CallContext owner_ctx{owner, Role::VesselOwner};
    const long long timestamp = std::llround(tx.submitted_at);

    VesselMetrics& vm = metrics_.per_vessel[imo];
    auto port = scenario_.port_states.find(tx.location);
    if (port != scenario_.port_states.end()) {
      const GasReceipt r = world_.set_port_state(admin, tx.location, port->second);
      vm.gas_units += r.gas_units;
      vm.token += r.token_cost;
      vm.usd += r.usd_cost;
      vm.usd_itemized += scenario_.gas.costs.at(GasOp::SetPortState).list_usd;
    }

    const std::size_t notifications_before = world_.notifications_unchecked().size();
    const auto [result, receipt] = world_.record_emission(
        owner_ctx, imo, tx.sulfur_value, tx.position, tx.in_eca, tx.location, timestamp,
        tx.entry.id.hex());
    vm.uploads += 1;
    vm.gas_units += receipt.gas_units;
    vm.token += receipt.token_cost;
    vm.usd += receipt.usd_cost;
    if (result.bit == 1) {
      vm.usd_itemized += scenario_.gas.costs.at(GasOp::RecordEmissionCompliant).list_usd;
      vm.usd_quoted += scenario_.gas.quote_compliant_upload_usd;
    } else {
      vm.usd_itemized += scenario_.gas.costs.at(GasOp::RecordEmissionNonCompliant).list_usd;
      vm.usd_quoted += scenario_.gas.quote_non_compliant_upload_usd;
      vm.violations += 1;
    }

    for (std::size_t i = notifications_before; i < world_.notifications_unchecked().size();
         ++i) {
      deliver(world_.notifications_unchecked()[i], tx.location, tx.submitted_at, when);
    }
  }

  block_rows_.push_back({height, when, static_cast<int>(batch.size()),
                         world_.total_gas().gas_units - gas_before});
}

void Simulation::deliver(const NonComplianceNotification& notification,
                         const std::string& location, double violation_time,
                         double delivered_time) {
  metrics_.notifications += 1;
  metrics_.latencies.push_back(delivered_time - violation_time);
  MailboxEntry entry{notification.compliance_id, notification.vessel_imo,
                     notification.message, location, violation_time, delivered_time};
  const auto recipients = notification_recipients(notification);
  for (const auto& recipient : recipients) {
    mailboxes_[recipient].push_back(entry);
    metrics_.mailbox_deliveries += 1;
  }
  if (notification.port_state.empty()) {
    metrics_.delivery_warnings += 1;
    event_log_.push_back("warning: no port state mapped for a violation by vessel " +
                         std::to_string(notification.vessel_imo) +
                         "; delivered to flag state only");
  }
}

void Simulation::run() {
  initialize_world();

  const long long total_pulls = static_cast<long long>(
      std::floor(scenario_.duration_seconds / scenario_.pull_interval_seconds + 1e-9));
  long long next_pull = 1;
  int stalled_rejects = 0;

  while (true) {
    const bool pulls_left = next_pull <= total_pulls;
    const double pull_time = static_cast<double>(next_pull) * scenario_.pull_interval_seconds;

    if (next_block_time_ && (!pulls_left || *next_block_time_ <= pull_time)) {
      const auto stakes_before = roster_;
      const bool committed = produce_block_attempt(*next_block_time_);
      if (committed) {
        stalled_rejects = 0;
      } else if (!pulls_left) {
        bool stakes_changed = false;
        for (std::size_t i = 0; i < roster_.size(); ++i) {
          stakes_changed = stakes_changed || roster_[i].stake != stakes_before[i].stake;
        }
        stalled_rejects = stakes_changed ? 0 : stalled_rejects + 1;
        if (stalled_rejects >= kStalledRejectLimit) {
          event_log_.push_back("drain abandoned: consensus cannot make progress; " +
                               std::to_string(queue_.size()) + " transactions remain queued");
          break;
        }
      }
      double total = 0.0;
      for (const auto& member : roster_) total += member.stake;
      if (!queue_.empty() && !(total > 0.0)) {
        event_log_.push_back("drain abandoned: total stake slashed to zero");
        break;
      }
      continue;
    }

    if (!pulls_left) break;
    monitoring_cycle(next_pull, pull_time);
    ++next_pull;
  }

  metrics_.final_queue_depth = queue_.size();
  metrics_.total_gas = world_.total_gas();
  assert_conservation();
}

void Simulation::assert_conservation() const {
  const long long queued = static_cast<long long>(queue_.size());
  if (metrics_.tx_submitted != metrics_.tx_committed + queued) {
    throw std::logic_error("transaction conservation violated: submitted=" +
                           std::to_string(metrics_.tx_submitted) +
                           " committed=" + std::to_string(metrics_.tx_committed) +
                           " queued=" + std::to_string(queued));
  }
}

void Simulation::write_outputs(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  persist(chain_, (fs::path(dir) / "ledger.jsonl").string());
  world_.export_call_log((fs::path(dir) / "calls.jsonl").string());

  {
    std::ofstream out(fs::path(dir) / "metrics.json", std::ios::binary | std::ios::trunc);
    RunMetrics final_metrics = metrics_;
    final_metrics.final_queue_depth = queue_.size();
    final_metrics.total_gas = world_.total_gas();
    out << final_metrics.to_json(scenario_).dump(2) << '\n';
  }

  {
    std::ofstream out(fs::path(dir) / "blocks.csv", std::ios::binary | std::ios::trunc);
    out << "height,time,tx_count,gas\n";
    for (const auto& row : block_rows_) {
      out << row.height << ',' << csv_double(row.time) << ',' << row.tx_count << ','
          << row.gas_units << '\n';
    }
  }

  {
    nlohmann::json boxes = nlohmann::json::object();
    for (const auto& [recipient, entries] : mailboxes_) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& e : entries) {
        list.push_back({{"compliance_id", e.compliance_id},
                        {"vessel_imo", e.vessel_imo},
                        {"message", e.message},
                        {"location", e.location},
                        {"violation_time", e.violation_time},
                        {"delivered_time", e.delivered_time}});
      }
      boxes[recipient] = std::move(list);
    }
    std::ofstream out(fs::path(dir) / "mailboxes.json", std::ios::binary | std::ios::trunc);
    out << boxes.dump(2) << '\n';
  }
}

RunMetrics run_scenario(const FleetScenario& scenario, const std::string& out_dir) {
  Simulation sim(scenario);
  sim.run();
  sim.write_outputs(out_dir);
  RunMetrics metrics = sim.metrics();
  metrics.final_queue_depth = sim.queue_depth();
  metrics.total_gas = sim.world().total_gas();
  return metrics;
}

}  // namespace marichain
