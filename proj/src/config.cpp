#include "mibounds/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mibounds {

namespace {

std::string trim(std::string_view s) {
  auto b = s.begin();
  auto e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

double to_real(std::string_view s, std::string_view key) {
  const std::string t = trim(s);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + std::string(key) + "' expects a number, got '" +
                                t + "'");
  }
}

}  // namespace

ConfigMap parse_config(std::istream& in) {
  ConfigMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    }
    out[std::move(key)] = trim(std::string_view(body).substr(eq + 1));
  }
  return out;
}

ConfigMap load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in);
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_real(item, "list"));
  }
  return out;
}

std::vector<long> parse_int_list(std::string_view text) {
  std::vector<long> out;
  for (double v : parse_real_list(text)) {
    if (v != static_cast<double>(static_cast<long>(v))) {
      throw std::invalid_argument("expected an integer list");
    }
    out.push_back(static_cast<long>(v));
  }
  return out;
}

std::optional<std::string> config_get(const ConfigMap& cfg, std::string_view key) {
  if (auto it = cfg.find(key); it != cfg.end()) return it->second;
  return std::nullopt;
}

double config_real(const ConfigMap& cfg, std::string_view key, double fallback) {
  const auto v = config_get(cfg, key);
  return v ? to_real(*v, key) : fallback;
}

long config_int(const ConfigMap& cfg, std::string_view key, long fallback) {
  const auto v = config_get(cfg, key);
  if (!v) return fallback;
  const double d = to_real(*v, key);
  if (d != static_cast<double>(static_cast<long>(d))) {
    throw std::invalid_argument("config: key '" + std::string(key) + "' expects an integer");
  }
  return static_cast<long>(d);
}

ModelConfig model_from_config(const ConfigMap& cfg) {
  ModelConfig out;
  out.family = config_get(cfg, "family").value_or("gaussian");
  out.seed = static_cast<std::uint64_t>(config_int(cfg, "seed", 0));
  const auto theta_text = config_get(cfg, "theta0");

  auto domain = [&](double lo, double hi) {
    if (auto d = config_get(cfg, "domain")) {
      const auto v = parse_real_list(*d);
      if (v.size() != 2) throw std::invalid_argument("config: domain expects 'lo,hi'");
      return std::pair{v[0], v[1]};
    }
    return std::pair{lo, hi};
  };

  auto scalar_theta = [&](double fallback) {
    if (!theta_text) return scalar_param(fallback);
    const auto v = parse_real_list(*theta_text);
    if (v.size() != 1) throw std::invalid_argument("config: theta0 must be a scalar here");
    return scalar_param(v[0]);
  };

  if (out.family == "gaussian") {
    const int dim = static_cast<int>(config_int(cfg, "dim", 1));
    GaussianMeanModel m(dim, config_real(cfg, "v", 1.0));
    out.model = m;
    if (theta_text) {
      const auto v = parse_real_list(*theta_text);
      if (v.size() == 1 && dim > 1) {
        out.theta0 = Vector::Constant(dim, v[0]);
      } else if (static_cast<int>(v.size()) == dim) {
        out.theta0 = Eigen::Map<const Vector>(v.data(), dim);
      } else {
        throw std::invalid_argument("config: theta0 length does not match dim");
      }
    } else {
      out.theta0 = Vector::Zero(dim);
    }
  } else if (out.family == "sequence") {
    const long fallback = config_int(cfg, "n", 100);
    GaussianSequenceModel m(config_real(cfg, "b", 1.0), config_real(cfg, "L", 1.0),
                            static_cast<int>(config_int(cfg, "n_trunc", fallback)));
    out.model = m;
    if (!theta_text || *theta_text == "smooth") {
      out.theta0 = smooth_sequence_theta0(m);
    } else if (*theta_text == "0" || *theta_text == "zero") {
      out.theta0 = Vector::Zero(m.n_trunc);
    } else {
      const auto v = parse_real_list(*theta_text);
      out.theta0 = Vector::Zero(m.n_trunc);
      for (std::size_t i = 0; i < v.size() && static_cast<int>(i) < m.n_trunc; ++i) {
        out.theta0[static_cast<Eigen::Index>(i)] = v[i];
      }
    }
    if (!m.admits(out.theta0)) throw std::domain_error("config: theta0 outside the Sobolev ball");
  } else if (out.family == "poisson") {
    const auto [lo, hi] = domain(0.0, 1.0);
    out.model = poisson_family(lo, hi);
    out.theta0 = scalar_theta(0.5 * (lo + hi));
  } else if (out.family == "bernoulli") {
    const auto [lo, hi] = domain(-1.0, 1.0);
    out.model = bernoulli_family(lo, hi);
    out.theta0 = scalar_theta(0.5 * (lo + hi));
  } else if (out.family == "gaussian_natural") {
    const auto [lo, hi] = domain(-3.0, 3.0);
    out.model = gaussian_natural_family(config_real(cfg, "v", 1.0), lo, hi);
    out.theta0 = scalar_theta(0.5 * (lo + hi));
  } else {
    throw std::invalid_argument("config: unknown family '" + out.family + "'");
  }
  if (const auto* f = std::get_if<ExpFamily1D>(&out.model)) {
    f->require_domain(out.theta0[0], "config theta0");
  }
  return out;
}

}  // namespace mibounds
