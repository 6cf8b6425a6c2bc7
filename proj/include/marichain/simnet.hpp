#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "marichain/compliance.hpp"
#include "marichain/consensus.hpp"
#include "marichain/contracts.hpp"
#include "marichain/ledger.hpp"
#include "marichain/scenario.hpp"

namespace marichain {

/// One queued commit: the ledger entry plus everything the contract calls at
/// commit time need.
struct PendingTx {
  LedgerEntry entry;
  double sulfur_value = 0.0;
  GeoPosition position;
  bool in_eca = false;
  std::string location;
  double submitted_at = 0.0;  // simulation seconds
};

/// FIFO queue of pending commits. Nothing is ever dropped: overload shows up
/// as depth (and therefore notification delay), not as loss.
class TransactionQueue {
public:
  void submit(PendingTx tx) { queue_.push_back(std::move(tx)); }

  /// Removes and returns up to `n` transactions from the front.
  std::vector<PendingTx> take(std::size_t n);

  /// Returns a rejected batch to the front, preserving order.
  void return_to_front(std::vector<PendingTx> batch);

  std::size_t size() const { return queue_.size(); }
  bool empty() const { return queue_.empty(); }

private:
  std::deque<PendingTx> queue_;
};

struct MailboxEntry {
  std::string compliance_id;
  long long vessel_imo = 0;
  std::string message;
  std::string location;
  double violation_time = 0.0;
  double delivered_time = 0.0;
};

/// "flag:<name>" and "port:<authority>" recipients for one notification;
/// the port side is absent when no port state is mapped.
std::vector<std::string> notification_recipients(const NonComplianceNotification& n);

struct VesselMetrics {
  long long uploads = 0;
  long long violations = 0;
  long long gas_units = 0;
  double token = 0.0;
  double usd = 0.0;
  double usd_itemized = 0.0;  // sum of published per-call list prices
  double usd_quoted = 0.0;    // flat per-upload quotes
};

struct RunMetrics {
  long long pulls = 0;
  long long readings = 0;
  long long invalid_removed = 0;
  long long suspect_excluded = 0;
  long long tx_submitted = 0;
  long long tx_committed = 0;
  long long blocks_produced = 0;
  long long blocks_rejected = 0;
  std::size_t max_queue_depth = 0;
  std::size_t final_queue_depth = 0;
  long long violations = 0;
  long long notifications = 0;          // contract notification records
  long long mailbox_deliveries = 0;     // per-recipient copies
  long long delivery_warnings = 0;      // flag-only deliveries
  std::vector<double> latencies;        // violation -> delivery, seconds

  GasReceipt total_gas;
  GasReceipt deployment_gas;
  GasReceipt registration_gas;

  std::map<long long, VesselMetrics> per_vessel;

  double mean_latency() const;
  double p95_latency() const;

  nlohmann::json to_json(const FleetScenario& scenario) const;
};

struct BlockRow {
  long long height = 0;
  double time = 0.0;
  int tx_count = 0;
  long long gas_units = 0;
};

/// Event-driven monitoring loop: hourly (configurable) data pulls feed the
/// validation pipeline, survivors are hashed, id'd and queued, and blocks are
/// produced at the sampled block cadence whenever the queue is non-empty.
/// Logically single-threaded for reproducibility; a fixed (seed, scenario)
/// pair determines every output byte.
class Simulation {
public:
  explicit Simulation(FleetScenario scenario);

  /// Deploys contracts and registers the fleet. Called lazily by run() /
  /// monitoring_cycle(); callable once.
  void initialize_world();

  /// Executes the full monitoring cycle for one pull: collect readings,
  /// validate (invalid points logged and removed), cross-sensor consistency
  /// exclusion, hash + compliance-id assignment, queue the commit, compliance
  /// check. Returns the (compliance id -> bit) delta for this cycle.
  std::map<std::string, int> monitoring_cycle(long long time_index, double now);

  /// Submits a transaction directly (the cycle uses this too).
  void submit_tx(PendingTx tx);

  /// One block-production attempt at simulation time `when`: select the
  /// proposer, bundle up to block_capacity transactions, vote, and on
  /// approval commit + apply the contract calls + deliver notifications.
  /// A rejected candidate returns its transactions to the queue head.
  bool produce_block_attempt(double when);

  /// Runs pulls and block production to completion (queue drained), or stops
  /// early if consensus can make no further progress.
  void run();

  /// Writes ledger.jsonl, calls.jsonl, metrics.json, blocks.csv and
  /// mailboxes.json into `dir` (created if needed).
  void write_outputs(const std::string& dir) const;

  double clock() const { return clock_; }
  std::size_t queue_depth() const { return queue_.size(); }
  const Chain& chain() const { return chain_; }
  const ContractWorld& world() const { return world_; }
  const RunMetrics& metrics() const { return metrics_; }
  const std::map<std::string, std::vector<MailboxEntry>>& mailboxes() const {
    return mailboxes_;
  }
  const std::map<std::string, int>& compliance_map() const { return compliance_map_; }
  const std::vector<BlockRow>& block_rows() const { return block_rows_; }
  const std::vector<std::string>& event_log() const { return event_log_; }
  const std::vector<Validator>& roster() const { return roster_; }

  /// Next scheduled block-production time, if any.
  std::optional<double> next_block_time() const { return next_block_time_; }

  /// tx_submitted == tx_committed + queue depth, checked after every event.
  void assert_conservation() const;

private:
  struct ReadingContext {
    SensorReading reading;
    DataPoint provisional;
  };

  double sulfur_at(const VesselSpec& vessel, double now) const;
  void position_at(const VesselSpec& vessel, double now, GeoPosition& pos,
                   std::string& location) const;
  double reading_value(const VesselSpec& vessel, const SensorSpec& sensor, double now,
                       double true_value, double& wall_time) const;
  bool fault_active(const Fault& fault, double now) const;
  ValidatorSet effective_set(double now) const;
  void schedule_block(double now);
  void apply_committed(const std::vector<PendingTx>& batch, double when, long long height);
  void deliver(const NonComplianceNotification& notification, const std::string& location,
               double violation_time, double delivered_time);

  FleetScenario scenario_;
  EcaAtlas atlas_;
  RegulationRegistry registry_;
  ContractWorld world_;
  Chain chain_;
  TransactionQueue queue_;
  std::vector<Validator> roster_;  // stakes evolve through slashing
  std::map<long long, ConsistencyTracker> trackers_;

  Rng id_rng_;
  Rng proposer_rng_;
  Rng block_time_rng_;

  double clock_ = 0.0;
  std::optional<double> next_block_time_;
  bool initialized_ = false;

  RunMetrics metrics_;
  std::map<std::string, int> compliance_map_;
  std::map<std::string, std::vector<MailboxEntry>> mailboxes_;
  std::vector<BlockRow> block_rows_;
  std::vector<std::string> event_log_;
};

/// Runs a scenario end to end and writes the report files into `out_dir`.
RunMetrics run_scenario(const FleetScenario& scenario, const std::string& out_dir);

}  // namespace marichain
