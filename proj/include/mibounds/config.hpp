#pragma once

#include "mibounds/models.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mibounds {

/// Plain-text `key = value` configuration. `#` starts a comment; blank lines
/// are ignored; later keys override earlier ones.
///
/// Model keys: family (gaussian | sequence | poisson | bernoulli |
/// gaussian_natural), dim, v, b, L, theta0 (comma list or "smooth" for the
/// sequence model), domain ("lo,hi"), seed. Other keys pass through untouched
/// for the caller.
using ConfigMap = std::map<std::string, std::string, std::less<>>;

ConfigMap parse_config(std::istream& in);
ConfigMap load_config(const std::string& path);

std::vector<double> parse_real_list(std::string_view text);
std::vector<long> parse_int_list(std::string_view text);

std::optional<std::string> config_get(const ConfigMap& cfg, std::string_view key);
double config_real(const ConfigMap& cfg, std::string_view key, double fallback);
long config_int(const ConfigMap& cfg, std::string_view key, long fallback);

struct ModelConfig {
  std::string family;
  ModelSpec model;
  Vector theta0;
  std::uint64_t seed = 0;
};

/// Builds a model (and theta0) from the documented keys. `n_trunc` overrides
/// the sequence-model truncation level (default: n, else 100).
ModelConfig model_from_config(const ConfigMap& cfg);

}  // namespace mibounds
