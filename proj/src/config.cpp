#include "kglr/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace kglr {
namespace {

struct KeyValue {
  std::string value;
  std::string location;  // "source:line:col" of the value
};

[[noreturn]] void fail(const std::string& location, const std::string& message) {
  throw ConfigError(location + ": " + message);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_real(const KeyValue& kv) {
  const char* begin = kv.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE)
    fail(kv.location, "invalid real literal '" + kv.value + "'");
  return value;
}

long long parse_int(const KeyValue& kv) {
  const char* begin = kv.value.c_str();
  char* end = nullptr;
  errno = 0;
  const long long value = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE)
    fail(kv.location, "invalid integer literal '" + kv.value + "'");
  return value;
}

std::uint64_t parse_seed(const KeyValue& kv) {
  std::string_view s = kv.value;
  const bool negative = !s.empty() && s.front() == '-';
  if (negative) s.remove_prefix(1);
  const std::string digits(s);
  const char* begin = digits.c_str();
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(begin, &end, 10);
  if (digits.empty() || end == begin || *end != '\0' || errno == ERANGE)
    fail(kv.location, "invalid seed literal '" + kv.value + "'");
  return negative ? ~static_cast<std::uint64_t>(value) + 1 : value;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const std::size_t comma = s.find(',');
    out.emplace_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

ExperimentKind kind_from_token(const KeyValue& kv) {
  if (kv.value == "convergence") return ExperimentKind::Convergence;
  if (kv.value == "efficiency") return ExperimentKind::Efficiency;
  if (kv.value == "energy-drift") return ExperimentKind::EnergyDrift;
  if (kv.value == "reversibility") return ExperimentKind::Reversibility;
  fail(kv.location, "unknown kind '" + kv.value + "'");
}

Nonlinearity nonlinearity_from_token(const KeyValue& kv) {
  if (kv.value == "sine") return Nonlinearity::Sine;
  if (kv.value == "cubic") return Nonlinearity::CubicDefocusing;
  if (kv.value == "zero") return Nonlinearity::Zero;
  fail(kv.location, "unknown nonlinearity '" + kv.value + "'");
}

MethodTag method_from_token(const std::string& token, const std::string& location) {
  if (token == "slr") return MethodTag::SLR;
  if (token == "lr23") return MethodTag::LR23;
  if (token == "ti") return MethodTag::TI;
  fail(location, "unknown method '" + token + "'");
}

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

bool divides(double h, double T) {
  const double n = std::round(T / h);
  return n >= 1.0 && std::abs(n * h - T) <= 1e-9 * T;
}

}  // namespace

std::string to_token(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::Efficiency: return "efficiency";
    case ExperimentKind::EnergyDrift: return "energy-drift";
    case ExperimentKind::Reversibility: return "reversibility";
  }
  return "?";
}

std::string to_token(MethodTag method) {
  switch (method) {
    case MethodTag::SLR: return "slr";
    case MethodTag::LR23: return "lr23";
    case MethodTag::TI: return "ti";
  }
  return "?";
}

std::string to_token(Nonlinearity nl) {
  switch (nl) {
    case Nonlinearity::Zero: return "zero";
    case Nonlinearity::Sine: return "sine";
    case Nonlinearity::CubicDefocusing: return "cubic";
  }
  return "?";
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view source_name,
                                   const std::vector<std::string>& overrides) {
  std::map<std::string, KeyValue> entries;

  auto add_entry = [&](std::string_view line, const std::string& location, bool allow_duplicate) {
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(location, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(location, "empty key");
    if (value.empty()) fail(location, "empty value for key '" + key + "'");
    if (!allow_duplicate && entries.count(key)) fail(location, "duplicate key '" + key + "'");
    const std::size_t col = eq + 2;
    entries[key] = KeyValue{value, location + ":" + std::to_string(col)};
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    ++line_no;
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    add_entry(line, std::string(source_name) + ":" + std::to_string(line_no), false);
  }
  for (std::size_t i = 0; i < overrides.size(); ++i)
    add_entry(overrides[i], "override[" + std::to_string(i) + "]", true);

  auto take = [&](const std::string& key) -> std::optional<KeyValue> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    KeyValue kv = it->second;
    entries.erase(it);
    return kv;
  };
  auto require = [&](const std::string& key) -> KeyValue {
    auto kv = take(key);
    if (!kv) fail(std::string(source_name), "missing required key '" + key + "'");
    return *kv;
  };

  if (auto version = take("schema_version")) {
    if (parse_int(*version) != 1) fail(version->location, "unsupported schema_version");
  }

  ExperimentConfig cfg;
  cfg.kind = kind_from_token(require("kind"));

  const KeyValue m_kv = require("M");
  const long long m = parse_int(m_kv);
  if (m < 2) fail(m_kv.location, "M must be >= 2");
  cfg.M = static_cast<Index>(m);

  const KeyValue theta_kv = require("theta");
  cfg.theta = parse_real(theta_kv);
  if (!(cfg.theta > 0)) fail(theta_kv.location, "theta must be > 0");

  if (auto kv = take("rho")) {
    cfg.rho = parse_real(*kv);
    if (!(cfg.rho >= 0)) fail(kv->location, "rho must be >= 0");
  }
  if (auto kv = take("nonlinearity")) cfg.nonlinearity = nonlinearity_from_token(*kv);
  if (auto kv = take("seed")) cfg.seed = parse_seed(*kv);
  if (auto kv = take("data_scale")) {
    cfg.data_scale = parse_real(*kv);
    if (!(cfg.data_scale > 0)) fail(kv->location, "data_scale must be > 0");
  }
  if (auto kv = take("observe_every")) {
    const long long oe = parse_int(*kv);
    if (oe < 1) fail(kv->location, "observe_every must be >= 1");
    cfg.observe_every = static_cast<Index>(oe);
  }

  const KeyValue methods_kv = require("methods");
  for (const std::string& token : split_list(methods_kv.value))
    cfg.methods.push_back(method_from_token(token, methods_kv.location));

  const KeyValue t_kv = require("T_final");
  cfg.T_final = parse_real(t_kv);
  if (!(cfg.T_final > 0)) fail(t_kv.location, "T_final must be > 0");

  const KeyValue steps_kv = require("step_sizes");
  for (const std::string& token : split_list(steps_kv.value)) {
    const double h = parse_real(KeyValue{token, steps_kv.location});
    if (!(h > 0 && h < 1)) fail(steps_kv.location, "step_sizes entries must lie in (0, 1)");
    if (!cfg.step_sizes.empty() && !(h < cfg.step_sizes.back()))
      fail(steps_kv.location, "step_sizes must be strictly decreasing");
    if (!divides(h, cfg.T_final))
      fail(steps_kv.location,
           "step size " + token + " does not divide T_final = " + format_real(cfg.T_final));
    cfg.step_sizes.push_back(h);
  }

  const auto h_ref_kv = take("h_ref");
  if (h_ref_kv) {
    cfg.h_ref = parse_real(*h_ref_kv);
  } else if (cfg.kind == ExperimentKind::Convergence || cfg.kind == ExperimentKind::Efficiency) {
    cfg.h_ref = cfg.step_sizes.back() / 8.0;
  }
  if (cfg.h_ref) {
    const std::string loc = h_ref_kv ? h_ref_kv->location : std::string(source_name);
    if (!(*cfg.h_ref > 0)) fail(loc, "h_ref must be > 0");
    if (!(*cfg.h_ref < cfg.step_sizes.back() / 4.0))
      fail(loc, "h_ref must be smaller than min(step_sizes)/4");
    if (!divides(*cfg.h_ref, cfg.T_final)) fail(loc, "h_ref does not divide T_final");
  }

  if (!entries.empty()) {
    const auto& [key, kv] = *entries.begin();
    fail(kv.location, "unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string(), overrides);
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "schema_version = 1\n";
  out << "kind = " << to_token(cfg.kind) << "\n";
  out << "M = " << cfg.M << "\n";
  out << "rho = " << format_real(cfg.rho) << "\n";
  out << "theta = " << format_real(cfg.theta) << "\n";
  out << "nonlinearity = " << to_token(cfg.nonlinearity) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "data_scale = " << format_real(cfg.data_scale) << "\n";
  out << "methods = ";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i)
    out << (i ? "," : "") << to_token(cfg.methods[i]);
  out << "\n";
  out << "step_sizes = ";
  for (std::size_t i = 0; i < cfg.step_sizes.size(); ++i)
    out << (i ? "," : "") << format_real(cfg.step_sizes[i]);
  out << "\n";
  out << "T_final = " << format_real(cfg.T_final) << "\n";
  if (cfg.h_ref) out << "h_ref = " << format_real(*cfg.h_ref) << "\n";
  out << "observe_every = " << cfg.observe_every << "\n";
  return out.str();
}

}  // namespace kglr
