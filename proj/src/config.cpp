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

#include "optivote/config.hpp"

#include <fmt/format.h>
#include <cstdlib>
#include <fstream>
#include <set>

#include "optivote/errors.hpp"

namespace optivote {

using nlohmann::json;

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::kOptivote: return "optivote";
    case Scheme::kOptivoteFixedPower: return "optivote_fixed_power";
    case Scheme::kIdealMv: return "ideal_mv";
    case Scheme::kFedavgAir: return "fedavg_air";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  for (Scheme v : {Scheme::kOptivote, Scheme::kOptivoteFixedPower, Scheme::kIdealMv,
                   Scheme::kFedavgAir})
    if (to_string(v) == s) return v;
  throw ConfigError("run.scheme", fmt::format("unknown scheme '{}'", s));
}

ChannelParams ChannelConfig::params() const {
  ChannelParams p;
  p.d_min = d_min_km * 1e3;
  p.d_max = d_max_km * 1e3;
  p.lambda_opt = lambda_opt_nm * 1e-9;
  p.a0 = a0;
  p.xi_p = xi_p;
  p.sigma_n2 = sigma_n2;
  switch (c_fspl_mode) {
    case CFsplMode::kNormalized: p.c_fspl_override = ChannelParams::normalized_c_fspl(p.d_min); break;
    case CFsplMode::kPhysical: break;
    case CFsplMode::kValue: p.c_fspl_override = c_fspl; break;
  }
  return p;
}

double RunConfig::learning_rate() const {
  if (lr_mode == LrMode::kTheorem1)
    return 1.0 / std::sqrt(l1_estimate * static_cast<double>(d_b));
  return eta;
}

namespace {

// Walks one JSON object, tracking which keys were consumed so leftovers can
// be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw ConfigError(key_path(key), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer() || (std::is_unsigned_v<T> && v->get<long long>() < 0))
          throw ConfigError(key_path(key), "expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw ConfigError(key_path(key), "expected a number");
      } else {
        if (!v->is_string()) throw ConfigError(key_path(key), "expected a string");
      }
      out = v->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(key_path(key), e.what());
    }
  }

  template <typename Fn>
  void object(const std::string& key, Fn&& fn) {
    const json* v = find(key);
    if (!v) return;
    Reader sub(*v, key_path(key));
    fn(sub);
    sub.finish();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum>
Enum parse_enum(Reader& r, const std::string& key, Enum current,
                std::initializer_list<std::pair<const char*, Enum>> options) {
  std::string text;
  for (auto& [name, value] : options)
    if (value == current) text = name;
  r.get(key, text);
  for (auto& [name, value] : options)
    if (text == name) return value;
  throw ConfigError(r.key_path(key), fmt::format("invalid value '{}'", text));
}

const std::initializer_list<std::pair<const char*, NoiseModel>> kNoiseNames = {
    {"energy", NoiseModel::kEnergy}, {"additive", NoiseModel::kAdditive}};
const std::initializer_list<std::pair<const char*, AbarScope>> kScopeNames = {
    {"all", AbarScope::kAll}, {"active", AbarScope::kActive}};
const std::initializer_list<std::pair<const char*, DatasetKind>> kDatasetNames = {
    {"synthetic", DatasetKind::kSynthetic}, {"mnist", DatasetKind::kMnist}};
const std::initializer_list<std::pair<const char*, Arch>> kArchNames = {
    {"logistic", Arch::kLogistic}, {"mlp", Arch::kMlp}};
const std::initializer_list<std::pair<const char*, PartitionMode>> kPartitionNames = {
    {"iid", PartitionMode::kIid}, {"noniid", PartitionMode::kNonIid}};

template <typename Enum>
const char* enum_name(Enum v, std::initializer_list<std::pair<const char*, Enum>> options) {
  for (auto& [name, value] : options)
    if (value == v) return name;
  return "?";
}

}  // namespace

void Config::validate() const {
  auto fail = [](const char* path, const std::string& msg) { throw ConfigError(path, msg); };
  if (!(channel.d_min_km > 0)) fail("channel.d_min_km", "must be > 0");
  if (!(channel.d_min_km < channel.d_max_km)) fail("channel.d_min_km", "must be < d_max_km");
  if (!(channel.lambda_opt_nm > 0)) fail("channel.lambda_opt_nm", "must be > 0");
  if (!(channel.a0 > 0 && channel.a0 <= 1)) fail("channel.a0", "must lie in (0, 1]");
  if (!(channel.xi_p > 0)) fail("channel.xi_p", "must be > 0");
  if (!(channel.sigma_n2 >= 0)) fail("channel.sigma_n2", "must be >= 0");
  if (channel.c_fspl_mode == CFsplMode::kValue && !(channel.c_fspl > 0))
    fail("channel.c_fspl", "must be > 0");

  const PowerParams& p = power.params;
  if (!(p.p_min > 0)) fail("power.p_min", "must be > 0");
  if (!(p.p_min <= p.p_max)) fail("power.p_min", "must be <= power.p_max");
  if (!(p.p_min <= p.p_avg)) fail("power.p_min", "must be <= power.p_avg");
  if (!(p.p_avg <= p.p_max)) fail("power.p_avg", "must be <= power.p_max");
  if (!(p.rho >= 0)) fail("power.rho", "must be >= 0");

  const DatasetConfig& d = learner.dataset;
  if (d.kind == DatasetKind::kSynthetic) {
    if (d.num_classes < 2) fail("learner.dataset.num_classes", "must be >= 2");
    if (d.n_train < 1) fail("learner.dataset.n_train", "must be >= 1");
    if (d.n_test < 1) fail("learner.dataset.n_test", "must be >= 1");
    if (d.dim < 1) fail("learner.dataset.dim", "must be >= 1");
    if (!(d.separation >= 0)) fail("learner.dataset.separation", "must be >= 0");
  } else {
    if (d.train_images.empty()) fail("learner.dataset.train_images", "required for mnist");
    if (d.train_labels.empty()) fail("learner.dataset.train_labels", "required for mnist");
    if (d.test_images.empty()) fail("learner.dataset.test_images", "required for mnist");
    if (d.test_labels.empty()) fail("learner.dataset.test_labels", "required for mnist");
  }
  if (learner.model.arch == Arch::kMlp && learner.model.hidden < 1)
    fail("learner.model.hidden", "must be >= 1");
  if (learner.partition.labels_per_node < 1)
    fail("learner.partition.labels_per_node", "must be >= 1");
  if (learner.local_steps < 1) fail("learner.local_steps", "must be >= 1");

  if (run.M < 1) fail("run.M", "must be >= 1");
  if (run.m < 1 || run.m > run.M) fail("run.m", "must satisfy 1 <= m <= M");
  if (run.d_b < 1) fail("run.d_b", "must be >= 1");
  if (run.lr_mode == LrMode::kConstant && !(run.eta > 0)) fail("run.eta", "must be > 0");
  if (run.lr_mode == LrMode::kTheorem1 && !(run.l1_estimate > 0))
    fail("run.l1_estimate", "must be > 0 when eta = \"theorem1\"");
  if (run.frame_capacity != 0 && (run.frame_capacity < 2 || run.frame_capacity % 2))
    fail("run.frame_capacity", "must be 0 or an even number >= 2");
}

Config config_from_json(const json& j) {
  Config cfg;
  Reader root(j, "");
  root.object("channel", [&](Reader& r) {
    auto& c = cfg.channel;
    r.get("d_min_km", c.d_min_km);
    r.get("d_max_km", c.d_max_km);
    r.get("lambda_opt_nm", c.lambda_opt_nm);
    r.get("a0", c.a0);
    r.get("xi_p", c.xi_p);
    r.get("sigma_n2", c.sigma_n2);
    if (const json* v = r.find("c_fspl")) {
      if (v->is_number()) {
        c.c_fspl_mode = CFsplMode::kValue;
        c.c_fspl = v->get<double>();
      } else if (v->is_string() && *v == "normalized") {
        c.c_fspl_mode = CFsplMode::kNormalized;
      } else if (v->is_string() && *v == "physical") {
        c.c_fspl_mode = CFsplMode::kPhysical;
      } else {
        throw ConfigError("channel.c_fspl", "expected a number, \"normalized\" or \"physical\"");
      }
    }
    c.noise_model = parse_enum(r, "noise_model", c.noise_model, kNoiseNames);
  });
  root.object("power", [&](Reader& r) {
    auto& p = cfg.power;
    r.get("p_avg", p.params.p_avg);
    r.get("p_min", p.params.p_min);
    r.get("p_max", p.params.p_max);
    r.get("rho", p.params.rho);
    p.abar_scope = parse_enum(r, "abar_scope", p.abar_scope, kScopeNames);
  });
  root.object("learner", [&](Reader& r) {
    auto& l = cfg.learner;
    r.object("dataset", [&](Reader& d) {
      auto& ds = l.dataset;
      ds.kind = parse_enum(d, "kind", ds.kind, kDatasetNames);
      d.get("num_classes", ds.num_classes);
      d.get("n_train", ds.n_train);
      d.get("n_test", ds.n_test);
      d.get("dim", ds.dim);
      d.get("separation", ds.separation);
      d.get("train_images", ds.train_images);
      d.get("train_labels", ds.train_labels);
      d.get("test_images", ds.test_images);
      d.get("test_labels", ds.test_labels);
    });
    r.object("model", [&](Reader& m) {
      l.model.arch = parse_enum(m, "arch", l.model.arch, kArchNames);
      m.get("hidden", l.model.hidden);
    });
    r.object("partition", [&](Reader& p) {
      l.partition.mode = parse_enum(p, "mode", l.partition.mode, kPartitionNames);
      p.get("labels_per_node", l.partition.labels_per_node);
    });
    r.get("local_steps", l.local_steps);
  });
  root.object("run", [&](Reader& r) {
    auto& run = cfg.run;
    r.get("M", run.M);
    r.get("m", run.m);
    r.get("rounds", run.rounds);
    r.get("d_b", run.d_b);
    if (const json* v = r.find("eta")) {
      if (v->is_number()) {
        run.lr_mode = LrMode::kConstant;
        run.eta = v->get<double>();
      } else if (v->is_string() && *v == "theorem1") {
        run.lr_mode = LrMode::kTheorem1;
      } else {
        throw ConfigError("run.eta", "expected a number or \"theorem1\"");
      }
    }
    r.get("l1_estimate", run.l1_estimate);
    std::string scheme = to_string(run.scheme);
    r.get("scheme", scheme);
    run.scheme = scheme_from_string(scheme);
    r.get("seed", run.seed);
    r.get("frame_capacity", run.frame_capacity);
  });
  root.object("output", [&](Reader& r) {
    r.get("directory", cfg.output.directory);
    r.get("dump_power", cfg.output.dump_power);
    r.get("dump_slots", cfg.output.dump_slots);
  });
  root.finish();
  cfg.validate();
  return cfg;
}

json to_json(const Config& cfg) {
  const auto& c = cfg.channel;
  json channel = {{"d_min_km", c.d_min_km}, {"d_max_km", c.d_max_km},
                  {"lambda_opt_nm", c.lambda_opt_nm}, {"a0", c.a0},
                  {"xi_p", c.xi_p}, {"sigma_n2", c.sigma_n2},
                  {"noise_model", enum_name(c.noise_model, kNoiseNames)}};
  switch (c.c_fspl_mode) {
    case CFsplMode::kNormalized: channel["c_fspl"] = "normalized"; break;
    case CFsplMode::kPhysical: channel["c_fspl"] = "physical"; break;
    case CFsplMode::kValue: channel["c_fspl"] = c.c_fspl; break;
  }
  const auto& p = cfg.power;
  json power = {{"p_avg", p.params.p_avg}, {"p_min", p.params.p_min}, {"p_max", p.params.p_max},
                {"rho", p.params.rho}, {"abar_scope", enum_name(p.abar_scope, kScopeNames)}};
  const auto& l = cfg.learner;
  const auto& ds = l.dataset;
  json dataset = {{"kind", enum_name(ds.kind, kDatasetNames)}, {"num_classes", ds.num_classes},
                  {"n_train", ds.n_train}, {"n_test", ds.n_test},
                  {"dim", ds.dim}, {"separation", ds.separation},
                  {"train_images", ds.train_images}, {"train_labels", ds.train_labels},
                  {"test_images", ds.test_images}, {"test_labels", ds.test_labels}};
  json learner = {
      {"dataset", dataset},
      {"model", {{"arch", enum_name(l.model.arch, kArchNames)}, {"hidden", l.model.hidden}}},
      {"partition",
       {{"mode", enum_name(l.partition.mode, kPartitionNames)},
        {"labels_per_node", l.partition.labels_per_node}}},
      {"local_steps", l.local_steps}};
  const auto& r = cfg.run;
  json run = {{"M", r.M}, {"m", r.m}, {"rounds", r.rounds}, {"d_b", r.d_b},
              {"l1_estimate", r.l1_estimate}, {"scheme", to_string(r.scheme)},
              {"seed", r.seed}, {"frame_capacity", r.frame_capacity}};
  if (r.lr_mode == LrMode::kTheorem1)
    run["eta"] = "theorem1";
  else
    run["eta"] = r.eta;
  json output = {{"directory", cfg.output.directory}, {"dump_power", cfg.output.dump_power},
                 {"dump_slots", cfg.output.dump_slots}};
  return {{"channel", channel}, {"power", power}, {"learner", learner},
          {"run", run}, {"output", output}};
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot open config file '{}'", path));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("{}: {}", path, e.what()));
  }
  return config_from_json(j);
}

void apply_override(json& raw, const std::string& dotted_key, const std::string& value) {
  if (!raw.is_object()) raw = json::object();
  json* node = &raw;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(start, dot - start);
    if (part.empty()) throw ConfigError(dotted_key, "malformed override key");
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
      (*node)[part] = parsed.is_discarded() ? json(value) : parsed;
      return;
    }
    json& child = (*node)[part];
    if (!child.is_object()) child = json::object();
    node = &child;
    start = dot + 1;
  }
}

void apply_env_overrides(Config& cfg) {
  if (const char* s = std::getenv("OPTIVOTE_SEED"); s && *s) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (!end || *end != '\0') throw ConfigError("OPTIVOTE_SEED", "expected an unsigned integer");
    cfg.run.seed = v;
  }
}

std::string config_hash(const Config& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) h = (h ^ c) * 0x100000001b3ULL;
  return fmt::format("{:016x}", h);
}

}  // namespace optivote
