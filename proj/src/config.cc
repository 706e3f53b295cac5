/*
 * Copyright 2026 The ShieldFL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "shieldfl/config.h"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "shieldfl/errors.h"

namespace shieldfl {
namespace {

std::string Trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Shortest text that parses back to the same double.
std::string FormatDouble(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double ParseDouble(const std::string& key, const std::string& v) {
  if (v.empty()) throw ConfigError(key, "expected a number");
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (*end != '\0' || errno == ERANGE) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  if (!std::isfinite(d)) throw ConfigError(key, "value must be finite");
  return d;
}

std::uint64_t ParseUnsigned(const std::string& key, const std::string& v) {
  if (v.empty() || v[0] == '-' || v[0] == '+') {
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  }
  char* end = nullptr;
  errno = 0;
  const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
  if (*end != '\0' || errno == ERANGE) {
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  }
  return u;
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> ParseList(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (Trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseDouble(key, Trim(item)));
  return out;
}

std::string FormatList(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += FormatDouble(v[i]);
  }
  return out;
}

struct Field {
  const char* key;
  const char* help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field SizeField(const char* key, const char* help, T ExperimentConfig::*m) {
  return {key, help,
          [key, m](ExperimentConfig& c, const std::string& v) {
            const std::uint64_t u = ParseUnsigned(key, v);
            if (u > std::numeric_limits<T>::max()) {
              throw ConfigError(key, "value too large");
            }
            c.*m = static_cast<T>(u);
          },
          [m](const ExperimentConfig& c) { return std::to_string(c.*m); }};
}

Field DoubleField(const char* key, const char* help,
                  double ExperimentConfig::*m) {
  return {key, help,
          [key, m](ExperimentConfig& c, const std::string& v) {
            c.*m = ParseDouble(key, v);
          },
          [m](const ExperimentConfig& c) { return FormatDouble(c.*m); }};
}

Field BoolField(const char* key, const char* help, bool ExperimentConfig::*m) {
  return {key, help,
          [key, m](ExperimentConfig& c, const std::string& v) {
            c.*m = ParseBool(key, v);
          },
          [m](const ExperimentConfig& c) {
            return std::string(c.*m ? "true" : "false");
          }};
}

Field StringField(const char* key, const char* help,
                  std::string ExperimentConfig::*m) {
  return {key, help,
          [m](ExperimentConfig& c, const std::string& v) { c.*m = v; },
          [m](const ExperimentConfig& c) { return c.*m; }};
}

Field ListField(const char* key, const char* help,
                std::vector<double> ExperimentConfig::*m) {
  return {key, help,
          [key, m](ExperimentConfig& c, const std::string& v) {
            c.*m = ParseList(key, v);
          },
          [m](const ExperimentConfig& c) { return FormatList(c.*m); }};
}

template <typename E>
Field EnumField(const char* key, const char* help, E ExperimentConfig::*m,
                std::vector<std::pair<std::string, E>> names) {
  return {key, help,
          [key, m, names](ExperimentConfig& c, const std::string& v) {
            for (const auto& [name, e] : names) {
              if (name == v) {
                c.*m = e;
                return;
              }
            }
            std::string options;
            for (const auto& [name, e] : names) {
              options += (options.empty() ? "" : "|") + name;
            }
            throw ConfigError(key, "expected one of " + options + ", got '" +
                                       v + "'");
          },
          [m, names](const ExperimentConfig& c) {
            for (const auto& [name, e] : names) {
              if (e == c.*m) return name;
            }
            return std::string("?");
          }};
}

const std::vector<Field>& Fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> fields = {
      SizeField("seed", "master RNG seed", &C::seed),
      EnumField<DatasetSource>("dataset", "synth | csv", &C::dataset,
                               {{"synth", DatasetSource::kSynth},
                                {"csv", DatasetSource::kCsv}}),
      StringField("dataset_path", "CSV training data (label first)",
                  &C::dataset_path),
      StringField("test_path", "CSV held-out data; empty splits the training set",
                  &C::test_path),
      DoubleField("test_fraction", "held-out share when test_path is empty",
                  &C::test_fraction),
      SizeField("synth_classes", "synthetic classes", &C::synth_classes),
      SizeField("synth_dim", "synthetic input dimension", &C::synth_dim),
      SizeField("synth_train", "synthetic training samples", &C::synth_train),
      SizeField("synth_test", "synthetic held-out samples", &C::synth_test),
      DoubleField("synth_separation", "distance between class means",
                  &C::synth_separation),
      SizeField("hidden1", "first hidden layer width", &C::hidden1),
      SizeField("hidden2", "second hidden layer width", &C::hidden2),
      SizeField("n_clients", "number of clients", &C::n_clients),
      SizeField("rounds", "communication rounds", &C::rounds),
      SizeField("local_epochs", "local epochs per round", &C::local_epochs),
      SizeField("batch_size", "local minibatch size", &C::batch_size),
      DoubleField("lr", "local learning rate", &C::lr),
      DoubleField("dirichlet_alpha", "label-skew concentration",
                  &C::dirichlet_alpha),
      DoubleField("q", "client sampling probability", &C::q),
      DoubleField("tau", "sensitivity threshold", &C::tau),
      DoubleField("rho", "consensus ratio", &C::rho),
      EnumField<FisherMode>("fisher_mode", "per_sample_avg | whole_batch",
                            &C::fisher_mode,
                            {{"per_sample_avg", FisherMode::kPerSampleAvg},
                             {"whole_batch", FisherMode::kWholeBatch}}),
      SizeField("fisher_max_samples", "Fisher sample cap, 0 = all",
                &C::fisher_max_samples),
      DoubleField("clip", "L2 clipping norm", &C::clip),
      DoubleField("sigma", "noise multiplier", &C::sigma),
      DoubleField("delta", "target delta", &C::delta),
      EnumField<NoiseScaling>("noise_scaling", "standard | per_participant",
                              &C::noise_scaling,
                              {{"standard", NoiseScaling::kStandard},
                               {"per_participant", NoiseScaling::kPerParticipant}}),
      ListField("alpha_grid", "Renyi orders", &C::alpha_grid),
      EnumField<ServerLrMode>(
          "server_lr_mode", "fedavg_equiv | participants | explicit",
          &C::server_lr_mode,
          {{"fedavg_equiv", ServerLrMode::kFedAvgEquiv},
           {"participants", ServerLrMode::kParticipants},
           {"explicit", ServerLrMode::kExplicit}}),
      DoubleField("server_lr", "global step when server_lr_mode = explicit",
                  &C::server_lr),
      EnumField<AggregationDivisor>(
          "divisor", "participants | contributors", &C::divisor,
          {{"participants", AggregationDivisor::kParticipants},
           {"contributors", AggregationDivisor::kContributors}}),
      SizeField("modulus_bits", "Paillier modulus size", &C::modulus_bits),
      SizeField("frac_bits", "fixed-point fractional bits", &C::frac_bits),
      SizeField("int_bits", "fixed-point integer bits", &C::int_bits),
      SizeField("guard_bits", "per-slot carry headroom", &C::guard_bits),
      BoolField("attack", "run the honest-but-curious attacker", &C::attack),
      BoolField("attack_ablation", "attack mode: sigma = 0 and no clipping",
                &C::attack_ablation),
      SizeField("attack_idlg_steps", "gradient-inversion steps, 0 = off",
                &C::attack_idlg_steps),
      BoolField("dump_fisher", "write per-client Fisher CSVs", &C::dump_fisher),
      BoolField("message_log", "write the binary message log",
                &C::message_log),
      ListField("sweep_tau", "tau grid for sweep", &C::sweep_tau),
      ListField("sweep_rho", "rho grid for sweep", &C::sweep_rho),
  };
  return fields;
}

}  // namespace

void ExperimentConfig::Validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
  };
  require(dataset != DatasetSource::kCsv || !dataset_path.empty(),
          "dataset_path", "required when dataset = csv");
  require(test_fraction > 0.0 && test_fraction < 1.0, "test_fraction",
          "must lie in (0, 1)");
  require(synth_classes >= 2, "synth_classes", "must be at least 2");
  require(synth_dim >= 1, "synth_dim", "must be positive");
  require(synth_train >= 1, "synth_train", "must be positive");
  require(synth_test >= 1, "synth_test", "must be positive");
  require(synth_separation > 0.0, "synth_separation", "must be positive");
  require(hidden1 >= 1, "hidden1", "must be positive");
  require(hidden2 >= 1, "hidden2", "must be positive");
  require(n_clients >= 1, "n_clients", "must be positive");
  require(local_epochs >= 1, "local_epochs", "must be positive");
  require(batch_size >= 1, "batch_size", "must be positive");
  require(lr > 0.0, "lr", "must be positive");
  require(dirichlet_alpha > 0.0, "dirichlet_alpha", "must be positive");
  require(q > 0.0 && q <= 1.0, "q", "must lie in (0, 1]");
  require(rho > 0.0 && rho <= 1.0, "rho", "must lie in (0, 1]");
  require(clip > 0.0, "clip", "must be positive");
  require(sigma >= 0.0, "sigma", "must be non-negative");
  require(delta > 0.0 && delta < 1.0, "delta", "must lie in (0, 1)");
  require(!alpha_grid.empty(), "alpha_grid", "must not be empty");
  for (double a : alpha_grid) require(a > 1.0, "alpha_grid", "orders must exceed 1");
  require(server_lr > 0.0, "server_lr", "must be positive");
  require(modulus_bits >= 512, "modulus_bits", "must be at least 512");
  require(frac_bits + int_bits + guard_bits + 1 <= 63, "frac_bits",
          "slot width frac_bits + int_bits + guard_bits + 1 exceeds 63");
  require(guard_bits >= 1, "guard_bits", "must be positive");
  require(frac_bits + int_bits + guard_bits + 1 <= modulus_bits - 1,
          "modulus_bits", "too small for one slot");
  for (double r : sweep_rho) {
    require(r > 0.0 && r <= 1.0, "sweep_rho", "values must lie in (0, 1]");
  }
}

ExperimentConfig ParseConfig(const std::string& text) {
  ExperimentConfig config;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno),
                        "expected 'key = value'");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& f : Fields()) {
      if (key == f.key) field = &f;
    }
    if (field == nullptr) throw ConfigError(key, "unknown key");
    field->set(config, value);
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string SerializeConfig(const ExperimentConfig& config) {
  std::string out;
  for (const auto& f : Fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += "\n";
  }
  return out;
}

std::string ConfigHelp() {
  const ExperimentConfig defaults;
  std::string out;
  for (const auto& f : Fields()) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "  %-20s %-14s %s\n", f.key,
                  f.get(defaults).c_str(), f.help);
    out += buf;
  }
  return out;
}

}  // namespace shieldfl
