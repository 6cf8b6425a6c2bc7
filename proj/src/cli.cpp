#include "marichain/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <vector>

#include "marichain/errors.hpp"
#include "marichain/simnet.hpp"

namespace marichain {

namespace {

namespace fs = std::filesystem;

std::string sibling(const std::string& ledger_path, const char* name) {
  return (fs::path(ledger_path).parent_path() / name).string();
}

std::string fmt8(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.8f", v);
  return buf;
}

struct OpAggregate {
  long long count = 0;
  long long gas_per_call = 0;
  double token_per_call = 0.0;
  double usd_per_call = 0.0;
};

struct ReportData {
  // keyed by row label
  std::map<std::string, OpAggregate> functions;
  std::map<std::string, long long> deploy_units;  // per contract
  long long deploy_count = 0;
  GasReceipt deploy_total;
  GasReceipt grand_total;
  double implied_price = 0.0;
  double implied_rate = 0.0;
  nlohmann::json metrics;  // null when absent
};

ReportData aggregate_report(const std::vector<CallRecord>& records,
                            const std::string& metrics_path) {
  ReportData data;
  for (const auto& record : records) {
    data.grand_total.gas_units += record.gas.gas_units;
    data.grand_total.token_cost += record.gas.token_cost;
    data.grand_total.usd_cost += record.gas.usd_cost;

    if (record.gas.gas_units > 0 && data.implied_price == 0.0) {
      data.implied_price = record.gas.token_cost / static_cast<double>(record.gas.gas_units);
      if (record.gas.token_cost > 0.0) {
        data.implied_rate = record.gas.usd_cost / record.gas.token_cost;
      }
    }

    if (record.op == "deployContracts") {
      data.deploy_count += 1;
      data.deploy_total.gas_units += record.gas.gas_units;
      data.deploy_total.token_cost += record.gas.token_cost;
      data.deploy_total.usd_cost += record.gas.usd_cost;
      if (record.args.contains("contracts")) {
        for (const auto& [name, units] : record.args.at("contracts").items()) {
          data.deploy_units[name] += units.get<long long>();
        }
      }
      continue;
    }

    std::string label = record.op;
    if (record.op == "recordEmission") {
      label += record.args.value("compliant", true) ? " (Compliant)" : " (Non-Compliant)";
    }
    auto& agg = data.functions[label];
    agg.count += 1;
    agg.gas_per_call = record.gas.gas_units;
    agg.token_per_call = record.gas.token_cost;
    agg.usd_per_call = record.gas.usd_cost;
  }

  std::ifstream metrics_in(metrics_path);
  if (metrics_in) {
    try {
      metrics_in >> data.metrics;
    } catch (const nlohmann::json::exception&) {
      data.metrics = nlohmann::json();
    }
  }
  return data;
}

const GasCost* list_cost_for(const GasSchedule& schedule, const std::string& label) {
  static const std::map<std::string, GasOp> kByLabel = {
      {"VesselRegistration", GasOp::DeployVesselRegistration},
      {"Notification", GasOp::DeployNotification},
      {"EmissionData", GasOp::DeployEmissionData},
      {"registerVessel", GasOp::RegisterVessel},
      {"setPortState", GasOp::SetPortState},
      {"recordEmission (Compliant)", GasOp::RecordEmissionCompliant},
      {"recordEmission (Non-Compliant)", GasOp::RecordEmissionNonCompliant},
  };
  auto it = kByLabel.find(label);
  if (it == kByLabel.end()) return nullptr;
  auto cost = schedule.costs.find(it->second);
  return cost == schedule.costs.end() ? nullptr : &cost->second;
}

void emit_csv(const ReportData& data, const GasSchedule& schedule, double quote_setup,
              std::ostream& out) {
  out << "kind,name,count,gas_per_call,gas_total,token,usd,list_token,list_usd\n";
  for (const auto& [name, units] : data.deploy_units) {
    const GasCost* list = list_cost_for(schedule, name);
    const double token = static_cast<double>(units) * data.implied_price;
    out << "deployment," << name << ',' << data.deploy_count << ',' << units << ','
        << units * data.deploy_count << ',' << fmt8(token) << ',' << fmt8(token * data.implied_rate)
        << ',' << (list ? fmt8(list->list_token) : "") << ','
        << (list ? fmt8(list->list_usd) : "") << '\n';
  }
  out << "total,deployment," << data.deploy_count << ",," << data.deploy_total.gas_units << ','
      << fmt8(data.deploy_total.token_cost) << ',' << fmt8(data.deploy_total.usd_cost) << ",,"
      << fmt8(quote_setup) << '\n';
  for (const auto& [label, agg] : data.functions) {
    const GasCost* list = list_cost_for(schedule, label);
    out << "function," << label << ',' << agg.count << ',' << agg.gas_per_call << ','
        << agg.gas_per_call * agg.count << ',' << fmt8(agg.token_per_call) << ','
        << fmt8(agg.usd_per_call) << ',' << (list ? fmt8(list->list_token) : "") << ','
        << (list ? fmt8(list->list_usd) : "") << '\n';
  }
  out << "total,all,," << ',' << data.grand_total.gas_units << ','
      << fmt8(data.grand_total.token_cost) << ',' << fmt8(data.grand_total.usd_cost) << ",,\n";
  if (data.metrics.is_object() && data.metrics.contains("per_vessel")) {
    for (const auto& [imo, vm] : data.metrics.at("per_vessel").items()) {
      out << "daily," << imo << ',' << vm.value("uploads", 0LL) << ",,,"
          << fmt8(vm.value("daily_usd_metered", 0.0)) << ','
          << fmt8(vm.value("daily_usd_itemized", 0.0)) << ','
          << fmt8(vm.value("daily_usd_quoted", 0.0)) << ",\n";
    }
  }
}

void emit_text(const ReportData& data, const GasSchedule& schedule, double quote_setup,
               std::ostream& out) {
  out << "Deployment costs\n";
  out << "  contract              count  gas/call   token         usd           (list token/usd)\n";
  for (const auto& [name, units] : data.deploy_units) {
    const GasCost* list = list_cost_for(schedule, name);
    const double token = static_cast<double>(units) * data.implied_price;
    out << "  " << std::left << std::setw(20) << name << std::right << "  " << std::setw(5)
        << data.deploy_count << "  " << std::setw(8) << units << "  " << fmt8(token) << "  "
        << fmt8(token * data.implied_rate);
    if (list) out << "  (" << fmt8(list->list_token) << " / " << fmt8(list->list_usd) << ")";
    out << '\n';
  }
  out << "  deployment total: gas " << data.deploy_total.gas_units << ", token "
      << fmt8(data.deploy_total.token_cost) << ", usd " << fmt8(data.deploy_total.usd_cost)
      << " (flat setup quote: $" << quote_setup << ")\n\n";

  out << "Function costs\n";
  out << "  function                        count  gas/call   token/call    usd/call      (list token/usd)\n";
  for (const auto& [label, agg] : data.functions) {
    const GasCost* list = list_cost_for(schedule, label);
    out << "  " << std::left << std::setw(30) << label << std::right << "  " << std::setw(5)
        << agg.count << "  " << std::setw(8) << agg.gas_per_call << "  "
        << fmt8(agg.token_per_call) << "  " << fmt8(agg.usd_per_call);
    if (list) out << "  (" << fmt8(list->list_token) << " / " << fmt8(list->list_usd) << ")";
    out << '\n';
  }
  out << "  grand total: gas " << data.grand_total.gas_units << ", token "
      << fmt8(data.grand_total.token_cost) << ", usd " << fmt8(data.grand_total.usd_cost)
      << "\n";

  if (data.metrics.is_object() && data.metrics.contains("per_vessel")) {
    out << "\nPer-vessel daily operating cost (USD)\n";
    out << "  imo       uploads  metered      itemized     quoted\n";
    for (const auto& [imo, vm] : data.metrics.at("per_vessel").items()) {
      out << "  " << std::left << std::setw(9) << imo << std::right << "  " << std::setw(7)
          << vm.value("uploads", 0LL) << "  " << fmt8(vm.value("daily_usd_metered", 0.0))
          << "  " << fmt8(vm.value("daily_usd_itemized", 0.0)) << "  "
          << fmt8(vm.value("daily_usd_quoted", 0.0)) << '\n';
    }
  }
}

}  // namespace

int cmd_run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (config.scenario_path.empty()) {
    err << "run requires --scenario\n";
    return kExitConfig;
  }
  FleetScenario scenario;
  try {
    scenario = FleetScenario::load(config.scenario_path);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  if (config.seed_override) scenario.seed = *config.seed_override;
  if (config.epsilon_override) scenario.consistency.epsilon = *config.epsilon_override;
  if (config.gamma_override) scenario.consistency.gamma = *config.gamma_override;

  try {
    const auto violations = scenario.validate();
    if (!violations.empty()) {
      throw ConfigError(violations);
    }
    const RunMetrics metrics = run_scenario(scenario, config.output_dir);
    out << "scenario '" << scenario.name << "' complete: " << metrics.tx_committed
        << " tx committed in " << metrics.blocks_produced << " blocks, "
        << metrics.notifications << " notifications, total gas " << metrics.total_gas.gas_units
        << "\n";
    out << "outputs written to " << config.output_dir << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_verify(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (config.ledger_path.empty()) {
    err << "verify requires --ledger\n";
    return kExitConfig;
  }
  try {
    const auto bad_height = verify_ledger_file(config.ledger_path);
    if (bad_height) {
      out << "ledger verification FAILED: first bad height " << *bad_height << "\n";
      return kExitVerifyFailed;
    }
    const Chain chain = load_ledger(config.ledger_path);
    out << "ledger verified: " << chain.blocks().size() << " blocks, "
        << chain.entry_count() << " entries\n";
    return kExitOk;
  } catch (const LedgerIoError& e) {
    err << "cannot verify ledger: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "verify failed: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_inspect(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (config.ledger_path.empty()) {
    err << "inspect requires --ledger\n";
    return kExitConfig;
  }
  if (!config.as_role) {
    err << "inspect requires --as <role>\n";
    return kExitConfig;
  }
  const Role role = *config.as_role;
  const std::string calls_path =
      config.calls_path.empty() ? sibling(config.ledger_path, "calls.jsonl") : config.calls_path;

  try {
    load_ledger(config.ledger_path);  // surface corrupt ledgers before replaying state
    const auto records = ContractWorld::load_call_log(calls_path);
    const ContractWorld world = ContractWorld::replay(GasSchedule::standard(), records);
    const CallContext ctx{std::string(role_name(role)), role};

    if (config.imo) {
      if (!acl_allows(AclOp::GetEmissionHistory, role)) {
        err << "permission denied: role '" << role_name(role)
            << "' may not view emission history\n";
        return kExitPermission;
      }
      if (!world.is_vessel_registered(*config.imo)) {
        err << "unknown vessel: " << *config.imo << '\n';
        return kExitUnknownVessel;
      }
      const auto& history = world.get_emission_history(ctx, *config.imo);
      out << "emission history for vessel " << *config.imo << " (" << history.size()
          << " records)\n";
      for (const auto& r : history) {
        out << "  t=" << r.timestamp << " sulfur=" << fmt8(r.sulfur_content) << "% "
            << (r.in_eca ? "ECA" : "non-ECA") << ' '
            << (r.compliant ? "compliant" : "NON-COMPLIANT") << " at ("
            << render_fixed6(r.position.latitude) << ", " << render_fixed6(r.position.longitude)
            << ")\n";
      }
    } else if (!acl_allows(AclOp::GetNotifications, role)) {
      err << "permission denied: role '" << role_name(role)
          << "' may not view notifications\n";
      return kExitPermission;
    }

    if (acl_allows(AclOp::GetNotifications, role)) {
      const auto& notifications = world.get_notifications(ctx);
      out << "notifications (" << notifications.size() << ")\n";
      for (const auto& n : notifications) {
        if (config.imo && n.vessel_imo != *config.imo) continue;
        out << "  t=" << n.timestamp << " vessel=" << n.vessel_imo << " flag=" << n.flag_state
            << " port=" << (n.port_state.empty() ? "(none)" : n.port_state) << " id="
            << n.compliance_id << " \"" << n.message << "\"\n";
      }
    }
    return kExitOk;
  } catch (const LedgerIoError& e) {
    err << "cannot inspect: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PermissionError& e) {
    err << "permission denied: " << e.what() << '\n';
    return kExitPermission;
  } catch (const NotFoundError& e) {
    err << e.what() << '\n';
    return kExitUnknownVessel;
  } catch (const std::exception& e) {
    err << "inspect failed: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_report(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (config.ledger_path.empty()) {
    err << "report requires --ledger\n";
    return kExitConfig;
  }
  const std::string calls_path =
      config.calls_path.empty() ? sibling(config.ledger_path, "calls.jsonl") : config.calls_path;
  const std::string metrics_path =
      config.metrics_path.empty() ? sibling(config.ledger_path, "metrics.json")
                                  : config.metrics_path;
  try {
    const auto records = ContractWorld::load_call_log(calls_path);
    const ReportData data = aggregate_report(records, metrics_path);
    const GasSchedule schedule = GasSchedule::standard();
    double quote_setup = schedule.quote_setup_usd;
    if (data.metrics.is_object()) {
      quote_setup = data.metrics.value(
          nlohmann::json::json_pointer("/gas/deployment/usd_quote"), quote_setup);
    }
    if (config.format == "csv") {
      emit_csv(data, schedule, quote_setup, out);
    } else {
      emit_text(data, schedule, quote_setup, out);
    }
    return kExitOk;
  } catch (const LedgerIoError& e) {
    err << "cannot report: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "report failed: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.command) {
    case Command::Run: return cmd_run(config, out, err);
    case Command::Verify: return cmd_verify(config, out, err);
    case Command::Inspect: return cmd_inspect(config, out, err);
    case Command::Report: return cmd_report(config, out, err);
  }
  err << "unknown command\n";
  return kExitConfig;
}

}  // namespace marichain
