// Copyright 2026 The OptiVote Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "optivote/cli.hpp"

#include <fmt/format.h>
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "optivote/config.hpp"
#include "optivote/errors.hpp"
#include "optivote/montecarlo.hpp"
#include "optivote/orchestrator.hpp"
#include "optivote/parallel.hpp"
#include "optivote/theory.hpp"

namespace optivote {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// "--section.key value" and "--section.key=value" pairs are config
// overrides; everything else goes to CLI11.
struct SplitArgs {
  std::vector<std::string> rest;
  std::vector<std::pair<std::string, std::string>> overrides;
};

SplitArgs split_overrides(int argc, const char* const* argv) {
  SplitArgs out;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a.rfind("--", 0) == 0 && a.find('.') != std::string::npos &&
        a.find('.') < a.find('=')) {
      std::string key = a.substr(2);
      std::string value;
      if (auto eq = key.find('='); eq != std::string::npos) {
        value = key.substr(eq + 1);
        key.resize(eq);
      } else if (i + 1 < argc) {
        value = argv[++i];
      } else {
        throw ConfigError(key, "override is missing a value");
      }
      out.overrides.emplace_back(key, value);
    } else {
      out.rest.push_back(std::move(a));
    }
  }
  return out;
}

json load_raw(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot open config file '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
}

Config resolve_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
  json raw = load_raw(path);
  for (const auto& [k, v] : overrides) apply_override(raw, k, v);
  Config cfg = config_from_json(raw);
  apply_env_overrides(cfg);
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("output.directory", fmt::format("cannot write '{}'", p.string()));
  f << text;
}

int cmd_simulate(const Config& cfg, std::size_t threads, std::ostream& out) {
  const fs::path dir = cfg.output.directory;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("output.directory", ec.message());
  write_file(dir / "resolved_config.json", to_json(cfg).dump(2) + "\n");

  std::ofstream power_csv, slot_csv;
  RunOptions opts;
  opts.threads = threads;
  if (cfg.output.dump_power) {
    power_csv.open(dir / "power.csv", std::ios::binary);
    opts.power_csv = &power_csv;
  }
  if (cfg.output.dump_slots) {
    slot_csv.open(dir / "slots.csv", std::ios::binary);
    opts.slot_csv = &slot_csv;
  }
  const RunSummary s = run(cfg, opts);
  std::ostringstream metrics;
  write_metrics_csv(metrics, s);
  write_file(dir / "metrics.csv", metrics.str());
  write_file(dir / "summary.json", summary_to_json(s).dump(2) + "\n");
  out << fmt::format("scheme={} rounds={} final_accuracy={:.4f} wall_time_s={:.2f}\n",
                     to_string(cfg.run.scheme), s.rounds.size(), s.final_accuracy, s.wall_time_s);
  return kExitOk;
}

struct TheoryArgs {
  std::string op;
  double M = 10, xi = 1, q = 0.2;
  double g = 0, alpha = 1, d_b = 1;
  double m_plus = 0, m_minus = 0, theta = 1, sigma_n2 = 0.1, p_avg = 1, lambda = 0;
  double l1 = 1, gap = 0, alpha_l1 = 0;
  long long N = 1, gamma = 1;
};

json cmd_theory(const TheoryArgs& a, const Config& cfg) {
  namespace th = theory;
  if (a.op == "error_bound") return {{"error_bound", th::error_bound(a.M, a.xi, a.q)}};
  if (a.op == "q_bound") return {{"q_bound", th::q_bound(a.g, a.alpha, a.d_b)}};
  if (a.op == "error_bound_full")
    return {{"error_bound_full", th::error_bound_full(a.M, a.xi, a.g, a.alpha, a.d_b)}};
  if (a.op == "energy_means") {
    const auto e = th::energy_means(a.m_plus, a.m_minus, a.theta, a.sigma_n2);
    return {{"mu_plus", e.plus}, {"mu_minus", e.minus}};
  }
  if (a.op == "xi_snr") return {{"xi_snr", th::xi_snr(a.theta, a.sigma_n2)}};
  if (a.op == "lambda_eff") {
    const ChannelParams p = cfg.channel.params();
    return {{"lambda_eff", lambda_eff(p)}, {"lambda_oracle", lambda_oracle(p)}};
  }
  if (a.op == "theta") {
    const ChannelParams p = cfg.channel.params();
    const double t = th::theta(a.p_avg, lambda_eff(p));
    return {{"theta", t}, {"xi_snr", th::xi_snr(t, p.sigma_n2)}};
  }
  if (a.op == "convergence_bound") {
    th::ConvergenceInputs in;
    in.M = a.M;
    in.xi = a.xi;
    in.l1_smoothness = a.l1;
    in.initial_gap = a.gap;
    in.alpha = {a.alpha_l1};
    in.gamma = a.gamma;
    in.N = a.N;
    return {{"convergence_bound", th::convergence_bound(in)},
            {"learning_rate", th::theorem1_learning_rate(a.l1, static_cast<double>(a.N / a.gamma))}};
  }
  throw UsageError(fmt::format("unknown theory op '{}'", a.op));
}

int cmd_verify(std::size_t samples, std::uint64_t seed, std::size_t threads,
               const std::string& report_path, const Config& cfg, std::ostream& out) {
  mc::SuiteOptions so;
  so.samples = samples;
  so.mc.seed = seed;
  so.mc.threads = threads;
  so.mc.noise = cfg.channel.noise_model;
  so.channel = cfg.channel.params();
  so.p_avg = cfg.power.params.p_avg;
  const auto reports = mc::run_suite(so);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  json doc = {{"samples", samples}, {"seed", seed}, {"all_pass", ok}, {"checks", mc::to_json(reports)}};
  if (report_path.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    write_file(report_path, doc.dump(2) + "\n");
    std::size_t failed = 0;
    for (const auto& r : reports) failed += !r.pass;
    out << fmt::format("{} checks, {} failed, report written to {}\n", reports.size(), failed,
                       report_path);
  }
  return ok ? kExitOk : kExitVerification;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) items.push_back(item);
  return items;
}

int cmd_sweep(const std::string& config_path,
              const std::vector<std::pair<std::string, std::string>>& overrides,
              const std::string& key, const std::string& values, const std::string& schemes,
              std::size_t threads, const std::string& out_path, std::ostream& out) {
  const auto value_list = split_list(values);
  auto scheme_list = split_list(schemes);
  if (key.empty() || value_list.empty()) throw UsageError("sweep needs --key and --values");
  std::ostringstream csv;
  csv << "key,value,scheme,seed,final_accuracy,final_train_loss,mean_mv_error_rate,config_hash\n";
  for (const auto& v : value_list) {
    auto ov = overrides;
    ov.emplace_back(key, v);
    Config base = resolve_config(config_path, ov);
    if (scheme_list.empty()) scheme_list.push_back(to_string(base.run.scheme));
    for (const auto& sname : scheme_list) {
      Config cfg = base;
      cfg.run.scheme = scheme_from_string(sname);
      RunOptions opts;
      opts.threads = threads;
      const RunSummary s = run(cfg, opts);
      double err = 0.0, loss = 0.0;
      for (const auto& r : s.rounds) err += r.mv_error_rate;
      if (!s.rounds.empty()) {
        err /= static_cast<double>(s.rounds.size());
        loss = s.rounds.back().train_loss;
      }
      csv << fmt::format("{},{},{},{},{:.17g},{:.17g},{:.17g},{}\n", key, v, sname, cfg.run.seed,
                         s.final_accuracy, loss, err, s.config_hash);
    }
  }
  if (out_path.empty()) {
    out << csv.str();
  } else {
    write_file(out_path, csv.str());
  }
  return kExitOk;
}

int cmd_partition_inspect(const Config& cfg, std::ostream& out) {
  const DataBundle data = load_data(cfg);
  const Partition parts = partition(data.train, cfg.run.M, cfg.learner.partition, cfg.run.seed);
  const int C = data.train.num_classes;
  out << "node_id,samples";
  for (int c = 0; c < C; ++c) out << ",label_" << c;
  out << "\n";
  for (std::size_t node = 0; node < parts.size(); ++node) {
    std::vector<std::size_t> hist(static_cast<std::size_t>(C), 0);
    for (std::size_t i : parts[node]) ++hist[static_cast<std::size_t>(data.train.labels[i])];
    out << node << "," << parts[node].size();
    for (std::size_t h : hist) out << "," << h;
    out << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    SplitArgs args = split_overrides(argc, argv);

    CLI::App app{"Sign-based federated learning over optical over-the-air links"};
    app.require_subcommand(1);
    app.fallthrough();
    std::size_t threads = default_thread_count();
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    std::string config_path;

    auto* sim = app.add_subcommand("simulate", "Run federated training and write metrics");
    sim->add_option("-c,--config", config_path, "JSON config file");

    TheoryArgs ta;
    auto* th = app.add_subcommand("theory", "Evaluate a closed-form expression");
    th->add_option("--op", ta.op,
                   "error_bound | q_bound | error_bound_full | energy_means | xi_snr | theta | "
                   "lambda_eff | convergence_bound")
        ->required();
    th->add_option("-c,--config", config_path, "JSON config file (channel ops)");
    th->add_option("--M", ta.M);
    th->add_option("--xi", ta.xi);
    th->add_option("--q", ta.q);
    th->add_option("--g", ta.g, "|gradient| of one coordinate");
    th->add_option("--alpha", ta.alpha, "gradient noise scale");
    th->add_option("--d-b,--d_b", ta.d_b, "batch size");
    th->add_option("--m-plus,--m_plus", ta.m_plus);
    th->add_option("--m-minus,--m_minus", ta.m_minus);
    th->add_option("--theta", ta.theta);
    th->add_option("--sigma-n2,--sigma_n2", ta.sigma_n2);
    th->add_option("--p-avg,--p_avg", ta.p_avg);
    th->add_option("--L1,--l1", ta.l1, "||L||_1");
    th->add_option("--gap", ta.gap, "F(w0) - F*");
    th->add_option("--alpha-l1,--alpha_l1", ta.alpha_l1, "||alpha||_1");
    th->add_option("--N", ta.N);
    th->add_option("--gamma", ta.gamma);

    std::size_t samples = 100000;
    std::uint64_t verify_seed = 1;
    std::string report_path;
    auto* ver = app.add_subcommand("verify", "Monte Carlo checks against closed forms");
    ver->add_option("--samples", samples, "Samples per check")->check(CLI::PositiveNumber);
    ver->add_option("--seed", verify_seed);
    ver->add_option("-o,--out", report_path, "JSON report path (default stdout)");
    ver->add_option("-c,--config", config_path, "JSON config file (channel block)");

    std::string sweep_key, sweep_values, sweep_schemes, sweep_out;
    auto* sw = app.add_subcommand("sweep", "Final accuracy over a grid of one config key");
    sw->add_option("-c,--config", config_path, "JSON config file");
    sw->add_option("--key", sweep_key, "Dotted config key")->required();
    sw->add_option("--values", sweep_values, "Comma-separated values")->required();
    sw->add_option("--schemes", sweep_schemes, "Comma-separated schemes");
    sw->add_option("-o,--out", sweep_out, "CSV path (default stdout)");

    auto* pi = app.add_subcommand("partition-inspect", "Per-node label histogram");
    pi->add_option("-c,--config", config_path, "JSON config file");

    std::vector<std::string> rest(args.rest.rbegin(), args.rest.rend());
    try {
      app.parse(rest);
    } catch (const CLI::CallForHelp& e) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return kExitOk;
      err << "error: " << e.what() << "\n";
      return kExitConfig;
    }

    if (*sw) {
      return cmd_sweep(config_path, args.overrides, sweep_key, sweep_values, sweep_schemes,
                       threads, sweep_out, out);
    }
    const Config cfg = resolve_config(config_path, args.overrides);
    if (*sim) return cmd_simulate(cfg, threads, out);
    if (*th) {
      out << cmd_theory(ta, cfg).dump() << "\n";
      return kExitOk;
    }
    if (*ver) return cmd_verify(samples, verify_seed, threads, report_path, cfg, out);
    if (*pi) return cmd_partition_inspect(cfg, out);
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace optivote
