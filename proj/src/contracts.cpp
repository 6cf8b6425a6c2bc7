#include "marichain/contracts.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "marichain/errors.hpp"

namespace marichain {

namespace {

constexpr char kSeparator = '\x1f';

bool separator_free(const std::string& s) { return s.find(kSeparator) == std::string::npos; }

}  // namespace

std::string_view role_name(Role role) {
  switch (role) {
    case Role::Admin: return "admin";
    case Role::VesselOwner: return "vessel_owner";
    case Role::Crew: return "crew";
    case Role::FlagState: return "flag_state";
    case Role::PortState: return "port_state";
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view name) {
  if (name == "admin") return Role::Admin;
  if (name == "vessel_owner") return Role::VesselOwner;
  if (name == "crew") return Role::Crew;
  if (name == "flag_state") return Role::FlagState;
  if (name == "port_state") return Role::PortState;
  return std::nullopt;
}

bool acl_allows(AclOp op, Role role) {
  switch (op) {
    case AclOp::Deploy:
      return role == Role::Admin || role == Role::VesselOwner || role == Role::FlagState;
    case AclOp::RegisterVessel:
    case AclOp::SetPortState:
      return role == Role::Admin;
    case AclOp::RecordEmission:
      return role == Role::VesselOwner;
    case AclOp::GetNotifications:
      return role == Role::FlagState || role == Role::PortState;
    case AclOp::GetEmissionHistory:
      return role == Role::VesselOwner || role == Role::Crew || role == Role::FlagState;
    case AclOp::ReadRegistry:
      return true;
  }
  return false;
}

std::string_view gas_op_name(GasOp op) {
  switch (op) {
    case GasOp::DeployVesselRegistration: return "deploy:VesselRegistration";
    case GasOp::DeployNotification: return "deploy:Notification";
    case GasOp::DeployEmissionData: return "deploy:EmissionData";
    case GasOp::RegisterVessel: return "registerVessel";
    case GasOp::SetPortState: return "setPortState";
    case GasOp::RecordEmissionCompliant: return "recordEmission(Compliant)";
    case GasOp::RecordEmissionNonCompliant: return "recordEmission(NonCompliant)";
    case GasOp::Read: return "read";
  }
  return "unknown";
}

GasSchedule GasSchedule::standard() {
  GasSchedule s;
  s.costs[GasOp::DeployVesselRegistration] = {665106, 0.01995, 0.0066};
  s.costs[GasOp::DeployNotification] = {1188150, 0.03564, 0.0118};
  s.costs[GasOp::DeployEmissionData] = {1235115, 0.03705, 0.0122};
  s.costs[GasOp::RegisterVessel] = {95741, 0.0029, 0.0009};
  s.costs[GasOp::SetPortState] = {49077, 0.0015, 0.0005};
  s.costs[GasOp::RecordEmissionCompliant] = {135399, 0.0041, 0.0014};
  s.costs[GasOp::RecordEmissionNonCompliant] = {378909, 0.0114, 0.0038};
  s.costs[GasOp::Read] = {0, 0.0, 0.0};
  return s;
}

GasReceipt GasSchedule::charge(GasOp op) const {
  auto it = costs.find(op);
  if (it == costs.end()) {
    throw NotFoundError("gas schedule has no entry for op '" + std::string(gas_op_name(op)) +
                        "'");
  }
  GasReceipt r;
  r.gas_units = it->second.units;
  r.token_cost = static_cast<double>(r.gas_units) * gas_price_token;
  r.usd_cost = r.token_cost * token_usd;
  return r;
}

GasReceipt charge_gas(const GasSchedule& schedule, GasOp op) { return schedule.charge(op); }

ContractWorld::ContractWorld(GasSchedule schedule) : schedule_(std::move(schedule)) {}

void ContractWorld::require(AclOp op, const CallContext& ctx) const {
  if (!acl_allows(op, ctx.role)) {
    throw PermissionError("role '" + std::string(role_name(ctx.role)) +
                          "' is not permitted to perform this operation");
  }
}

void ContractWorld::require_deployed() const {
  if (!deployed_) {
    throw StateError("contracts are not deployed");
  }
}

GasReceipt ContractWorld::charge_and_count(GasOp op) {
  const GasReceipt r = schedule_.charge(op);
  op_counts_[op] += 1;
  totals_.gas_units += r.gas_units;
  totals_.token_cost += r.token_cost;
  totals_.usd_cost += r.usd_cost;
  return r;
}

void ContractWorld::log_call(const CallContext& ctx, std::string op, nlohmann::json args,
                             const GasReceipt& receipt) {
  CallRecord record;
  record.seq = static_cast<long long>(call_log_.size());
  record.caller_id = ctx.caller_id;
  record.role = ctx.role;
  record.op = std::move(op);
  record.args = std::move(args);
  record.gas = receipt;
  call_log_.push_back(std::move(record));
}

GasReceipt ContractWorld::deploy_contracts(const CallContext& ctx) {
  require(AclOp::Deploy, ctx);
  if (deployed_) {
    throw StateError("contracts are already deployed");
  }
  GasReceipt total;
  nlohmann::json contracts = nlohmann::json::object();
  const std::pair<GasOp, const char*> deployments[] = {
      {GasOp::DeployVesselRegistration, "VesselRegistration"},
      {GasOp::DeployNotification, "Notification"},
      {GasOp::DeployEmissionData, "EmissionData"},
  };
  for (const auto& [op, name] : deployments) {
    const GasReceipt r = charge_and_count(op);
    total.gas_units += r.gas_units;
    total.token_cost += r.token_cost;
    total.usd_cost += r.usd_cost;
    contracts[name] = r.gas_units;
  }
  deployed_ = true;
  log_call(ctx, "deployContracts", {{"contracts", std::move(contracts)}}, total);
  return total;
}

GasReceipt ContractWorld::register_vessel(const CallContext& ctx, long long imo,
                                          const std::string& owner,
                                          const std::string& flag_state) {
  require(AclOp::RegisterVessel, ctx);
  require_deployed();
  if (!is_valid_imo(imo)) {
    throw std::invalid_argument("IMO number must be a 7-digit positive integer");
  }
  if (owner.empty() || flag_state.empty() || !separator_free(owner) ||
      !separator_free(flag_state)) {
    throw std::invalid_argument("owner and flag state must be non-empty, separator-free strings");
  }
  if (registry_.count(imo) > 0) {
    throw StateError("vessel " + std::to_string(imo) + " is already registered");
  }
  const GasReceipt r = charge_and_count(GasOp::RegisterVessel);
  registry_[imo] = VesselIdentity{imo, owner, flag_state};
  log_call(ctx, "registerVessel", {{"imo", imo}, {"owner", owner}, {"flag_state", flag_state}},
           r);
  return r;
}

bool ContractWorld::is_vessel_registered(long long imo) const { return registry_.count(imo) > 0; }

const std::string& ContractWorld::get_flag_state(long long imo) const {
  auto it = registry_.find(imo);
  if (it == registry_.end()) {
    throw NotFoundError("vessel " + std::to_string(imo) + " is not registered");
  }
  return it->second.flag_state;
}

GasReceipt ContractWorld::set_port_state(const CallContext& ctx, const std::string& location,
                                         const std::string& authority) {
  require(AclOp::SetPortState, ctx);
  require_deployed();
  if (location.empty() || authority.empty()) {
    throw std::invalid_argument("location and authority must be non-empty");
  }
  const GasReceipt r = charge_and_count(GasOp::SetPortState);
  port_states_[location] = authority;
  log_call(ctx, "setPortState", {{"location", location}, {"authority", authority}}, r);
  return r;
}

std::optional<std::string> ContractWorld::get_port_state(const std::string& location) const {
  auto it = port_states_.find(location);
  if (it == port_states_.end()) return std::nullopt;
  return it->second;
}

std::pair<ComplianceResult, GasReceipt> ContractWorld::record_emission(
    const CallContext& ctx, long long imo, double sulfur_percent, const GeoPosition& position,
    bool in_eca, const std::string& location, long long timestamp,
    const std::string& compliance_ref) {
  require(AclOp::RecordEmission, ctx);
  require_deployed();
  auto vessel = registry_.find(imo);
  if (vessel == registry_.end()) {
    throw NotFoundError("vessel " + std::to_string(imo) + " is not registered");
  }
  const ComplianceResult result = evaluate_sulfur(sulfur_percent, in_eca);
  const GasReceipt r = charge_and_count(result.bit == 1 ? GasOp::RecordEmissionCompliant
                                                        : GasOp::RecordEmissionNonCompliant);
  emissions_[imo].push_back({timestamp, sulfur_percent, position, in_eca, result.bit == 1});
  if (result.bit == 0) {
    const auto port = get_port_state(location);
    report_non_compliance(imo, result.message, vessel->second.flag_state,
                          port.value_or(std::string{}), timestamp, compliance_ref);
  }
  log_call(ctx, "recordEmission",
           {{"imo", imo},
            {"sulfur_percent", sulfur_percent},
            {"latitude", position.latitude},
            {"longitude", position.longitude},
            {"in_eca", in_eca},
            {"location", location},
            {"timestamp", timestamp},
            {"compliance_ref", compliance_ref},
            {"compliant", result.bit == 1}},
           r);
  return {result, r};
}

void ContractWorld::report_non_compliance(long long imo, const std::string& message,
                                          const std::string& flag_state,
                                          const std::string& port_state, long long timestamp,
                                          const std::string& compliance_ref) {
  notifications_.push_back({imo, message, flag_state, port_state, timestamp, compliance_ref});
}

const std::vector<NonComplianceNotification>& ContractWorld::get_notifications(
    const CallContext& ctx) const {
  require(AclOp::GetNotifications, ctx);
  return notifications_;
}

const std::vector<EmissionRecord>& ContractWorld::get_emission_history(const CallContext& ctx,
                                                                       long long imo) const {
  require(AclOp::GetEmissionHistory, ctx);
  auto it = emissions_.find(imo);
  if (it == emissions_.end()) {
    if (registry_.count(imo) == 0) {
      throw NotFoundError("vessel " + std::to_string(imo) + " is not registered");
    }
    static const std::vector<EmissionRecord> kEmpty;
    return kEmpty;
  }
  return it->second;
}

long long ContractWorld::op_count(GasOp op) const {
  auto it = op_counts_.find(op);
  return it == op_counts_.end() ? 0 : it->second;
}

void ContractWorld::export_call_log(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw LedgerIoError("cannot open call log for writing: " + path);
  }
  for (const auto& record : call_log_) {
    nlohmann::json j{{"seq", record.seq},
                     {"caller", record.caller_id},
                     {"role", std::string(role_name(record.role))},
                     {"op", record.op},
                     {"args", record.args},
                     {"gas",
                      {{"units", record.gas.gas_units},
                       {"token", record.gas.token_cost},
                       {"usd", record.gas.usd_cost}}}};
    out << j.dump() << '\n';
  }
  out.flush();
  if (!out) {
    throw LedgerIoError("failed writing call log: " + path);
  }
}

std::vector<CallRecord> ContractWorld::load_call_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw LedgerIoError("cannot open call log: " + path);
  }
  std::vector<CallRecord> records;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      CallRecord record;
      record.seq = j.at("seq").get<long long>();
      record.caller_id = j.at("caller").get<std::string>();
      const auto role = parse_role(j.at("role").get<std::string>());
      if (!role) throw EncodingError("unknown role");
      record.role = *role;
      record.op = j.at("op").get<std::string>();
      record.args = j.at("args");
      record.gas.gas_units = j.at("gas").at("units").get<long long>();
      record.gas.token_cost = j.at("gas").at("token").get<double>();
      record.gas.usd_cost = j.at("gas").at("usd").get<double>();
      records.push_back(std::move(record));
    } catch (const std::exception& e) {
      throw LedgerIoError(std::string("invalid call log record: ") + e.what(), line_no);
    }
  }
  return records;
}

ContractWorld ContractWorld::replay(const GasSchedule& schedule,
                                    const std::vector<CallRecord>& records) {
  ContractWorld world(schedule);
  for (const auto& record : records) {
    const CallContext ctx{record.caller_id, record.role};
    if (record.op == "deployContracts") {
      world.deploy_contracts(ctx);
    } else if (record.op == "registerVessel") {
      world.register_vessel(ctx, record.args.at("imo").get<long long>(),
                            record.args.at("owner").get<std::string>(),
                            record.args.at("flag_state").get<std::string>());
    } else if (record.op == "setPortState") {
      world.set_port_state(ctx, record.args.at("location").get<std::string>(),
                           record.args.at("authority").get<std::string>());
    } else if (record.op == "recordEmission") {
      const GeoPosition position{record.args.at("latitude").get<double>(),
                                 record.args.at("longitude").get<double>()};
      world.record_emission(ctx, record.args.at("imo").get<long long>(),
                            record.args.at("sulfur_percent").get<double>(), position,
                            record.args.at("in_eca").get<bool>(),
                            record.args.at("location").get<std::string>(),
                            record.args.at("timestamp").get<long long>(),
                            record.args.at("compliance_ref").get<std::string>());
    } else {
      throw StateError("call log contains unknown op '" + record.op + "'");
    }
  }
  return world;
}

}  // namespace marichain
