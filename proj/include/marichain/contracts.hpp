#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "marichain/compliance.hpp"
#include "marichain/model.hpp"

namespace marichain {

enum class Role { Admin, VesselOwner, Crew, FlagState, PortState };

std::string_view role_name(Role role);
std::optional<Role> parse_role(std::string_view name);

struct CallContext {
  std::string caller_id;
  Role role = Role::Crew;
};

/// Operations gated by the access control list. Pairs not granted below are
/// denied; registry reads are open to every participant.
enum class AclOp {
  Deploy,
  RegisterVessel,
  SetPortState,
  RecordEmission,
  GetNotifications,
  GetEmissionHistory,
  ReadRegistry,
};

bool acl_allows(AclOp op, Role role);

enum class GasOp {
  DeployVesselRegistration,
  DeployNotification,
  DeployEmissionData,
  RegisterVessel,
  SetPortState,
  RecordEmissionCompliant,
  RecordEmissionNonCompliant,
  Read,
};

std::string_view gas_op_name(GasOp op);

struct GasCost {
  long long units = 0;
  // Published per-call costs for the same operation, carried alongside the
  // metered figures so reports can show both.
  double list_token = 0.0;
  double list_usd = 0.0;
};

struct GasReceipt {
  long long gas_units = 0;
  double token_cost = 0.0;  // gas_units * gas_price_token
  double usd_cost = 0.0;    // token_cost * token_usd
};

/// Per-operation gas units plus the conversion constants and the flat
/// per-event quotes used in summary reporting.
struct GasSchedule {
  std::map<GasOp, GasCost> costs;
  double gas_price_token = 30e-9;  // token per gas unit
  double token_usd = 0.33;         // dollars per token

  // Flat published quotes for whole events (setup = all three deployments,
  // uploads = setPortState + recordEmission).
  double quote_setup_usd = 0.31;
  double quote_compliant_upload_usd = 0.003;
  double quote_non_compliant_upload_usd = 0.005;

  static GasSchedule standard();

  /// Throws NotFoundError for an op missing from the schedule.
  GasReceipt charge(GasOp op) const;
};

GasReceipt charge_gas(const GasSchedule& schedule, GasOp op);

struct NonComplianceNotification {
  long long vessel_imo = 0;
  std::string message;
  std::string flag_state;  // the registry's flag for the vessel at creation time
  std::string port_state;  // empty when the location has no port-state mapping
  long long timestamp = 0;
  std::string compliance_id;  // hex; empty for direct contract calls
};

struct EmissionRecord {
  long long timestamp = 0;
  double sulfur_content = 0.0;
  GeoPosition position;
  bool in_eca = false;
  bool compliant = false;
};

struct CallRecord {
  long long seq = 0;
  std::string caller_id;
  Role role = Role::Admin;
  std::string op;
  nlohmann::json args;
  GasReceipt gas;
};

/// Deterministic state machine mirroring the three deployed contracts
/// (vessel registration, notification/port-state, emission data) behind one
/// ACL. Calls apply sequentially (single writer); reads are const and may be
/// served concurrently from a snapshot.
///
/// Every state-changing call is appended to a replayable call log; replaying
/// a log from a fresh world reproduces the final state and total gas.
class ContractWorld {
public:
  explicit ContractWorld(GasSchedule schedule = GasSchedule::standard());

  /// Deploys all three contracts, charging each deployment. Errors on double
  /// deployment. Allowed for admin, vessel owner, and flag state.
  GasReceipt deploy_contracts(const CallContext& ctx);

  bool deployed() const { return deployed_; }

  /// Admin-only. Errors on duplicate or malformed IMO / empty strings.
  GasReceipt register_vessel(const CallContext& ctx, long long imo, const std::string& owner,
                             const std::string& flag_state);

  /// Zero-gas read, open to all roles.
  bool is_vessel_registered(long long imo) const;

  /// Zero-gas read; throws NotFoundError for an unknown vessel.
  const std::string& get_flag_state(long long imo) const;

  /// Admin-only.
  GasReceipt set_port_state(const CallContext& ctx, const std::string& location,
                            const std::string& authority);

  std::optional<std::string> get_port_state(const std::string& location) const;

  /// Records one emission measurement. Applies the sulfur limits for the
  /// claimed area; a violation automatically appends a non-compliance
  /// notification carrying the vessel's registered flag state and the port
  /// state mapped to `location` (empty if unmapped). Charges the compliant or
  /// non-compliant rate accordingly. Owner-only.
  std::pair<ComplianceResult, GasReceipt> record_emission(
      const CallContext& ctx, long long imo, double sulfur_percent, const GeoPosition& position,
      bool in_eca, const std::string& location, long long timestamp,
      const std::string& compliance_ref = {});

  /// Zero-gas read for flag and port states.
  const std::vector<NonComplianceNotification>& get_notifications(const CallContext& ctx) const;

  /// Zero-gas read for owner, crew, and flag state; chronological.
  const std::vector<EmissionRecord>& get_emission_history(const CallContext& ctx,
                                                          long long imo) const;

  GasReceipt read_receipt() const { return schedule_.charge(GasOp::Read); }

  const GasSchedule& schedule() const { return schedule_; }
  const GasReceipt& total_gas() const { return totals_; }
  long long op_count(GasOp op) const;
  const std::map<long long, VesselIdentity>& registry() const { return registry_; }
  const std::vector<CallRecord>& call_log() const { return call_log_; }
  const std::vector<NonComplianceNotification>& notifications_unchecked() const {
    return notifications_;
  }

  void export_call_log(const std::string& path) const;
  static std::vector<CallRecord> load_call_log(const std::string& path);

  /// Rebuilds a world by applying a recorded log to a fresh state.
  static ContractWorld replay(const GasSchedule& schedule,
                              const std::vector<CallRecord>& records);

private:
  void require(AclOp op, const CallContext& ctx) const;
  void require_deployed() const;
  GasReceipt charge_and_count(GasOp op);
  void log_call(const CallContext& ctx, std::string op, nlohmann::json args,
                const GasReceipt& receipt);

  /// Invoked by record_emission on a violation.
  void report_non_compliance(long long imo, const std::string& message,
                             const std::string& flag_state, const std::string& port_state,
                             long long timestamp, const std::string& compliance_ref);

  GasSchedule schedule_;
  bool deployed_ = false;
  std::map<long long, VesselIdentity> registry_;
  std::map<std::string, std::string> port_states_;
  std::vector<NonComplianceNotification> notifications_;
  std::map<long long, std::vector<EmissionRecord>> emissions_;
  std::map<GasOp, long long> op_counts_;
  GasReceipt totals_;
  std::vector<CallRecord> call_log_;
};

}  // namespace marichain
