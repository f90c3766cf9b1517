// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cfmimo {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SystemConfig: ") + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("SystemConfig: bad value '" + value + "' for key '" +
                                key + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw std::invalid_argument("SystemConfig: key '" + key + "' expects an integer, got '" +
                                value + "'");
  }
  return i;
}

}  // namespace

void SystemConfig::validate() const {
  require(W > 0.0, "W must be > 0");
  require(side > 0.0, "side must be > 0");
  require(M >= 1, "M must be >= 1");
  require(N_AP >= 1, "N_AP must be >= 1");
  require(K >= 1, "K must be >= 1");
  require(tau_p >= 1, "tau_p must be >= 1");
  require(tau_p < tau_c, "tau_p must be < tau_c");
  require(tau_u >= 0 && tau_d >= 0, "tau_u and tau_d must be >= 0");
  require(tau_u + tau_d + tau_p <= tau_c, "tau_u + tau_d + tau_p must be <= tau_c");
  require(N_serving >= 1 && N_serving <= M, "N_serving must be in [1, M]");
  require(p_k > 0.0, "p_k must be > 0");
  require(P_dl_m > 0.0, "P_dl_m must be > 0");
  require(P0_ul > 0.0, "P0_ul must be > 0");
  require(P_max_ul > 0.0, "P_max_ul must be > 0");
  require(sigma_sh_dB >= 0.0, "sigma_sh_dB must be >= 0");
  require(d_decorr > 0.0, "d_decorr must be > 0");
  require(delta_sh >= 0.0 && delta_sh <= 1.0, "delta_sh must be in [0, 1]");
  require(d_min > 0.0, "d_min must be > 0");
}

SystemConfig SystemConfig::from_text(const std::string& text) {
  SystemConfig cfg;
  bool tau_u_set = false, tau_d_set = false;

  const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
      setters = {
          {"W", [&](auto& k, auto& v) { cfg.W = parse_double(k, v); }},
          {"f0", [&](auto& k, auto& v) { cfg.f0 = parse_double(k, v); }},
          {"h_AP", [&](auto& k, auto& v) { cfg.h_AP = parse_double(k, v); }},
          {"h_MS", [&](auto& k, auto& v) { cfg.h_MS = parse_double(k, v); }},
          {"noise_figure_dB", [&](auto& k, auto& v) { cfg.noise_figure_dB = parse_double(k, v); }},
          {"M", [&](auto& k, auto& v) { cfg.M = parse_int(k, v); }},
          {"N_AP", [&](auto& k, auto& v) { cfg.N_AP = parse_int(k, v); }},
          {"K", [&](auto& k, auto& v) { cfg.K = parse_int(k, v); }},
          {"tau_p", [&](auto& k, auto& v) { cfg.tau_p = parse_int(k, v); }},
          {"tau_c", [&](auto& k, auto& v) { cfg.tau_c = parse_int(k, v); }},
          {"tau_u", [&](auto& k, auto& v) { cfg.tau_u = parse_int(k, v); tau_u_set = true; }},
          {"tau_d", [&](auto& k, auto& v) { cfg.tau_d = parse_int(k, v); tau_d_set = true; }},
          {"N_serving", [&](auto& k, auto& v) { cfg.N_serving = parse_int(k, v); }},
          {"p_k", [&](auto& k, auto& v) { cfg.p_k = parse_double(k, v); }},
          {"P_dl_m", [&](auto& k, auto& v) { cfg.P_dl_m = parse_double(k, v); }},
          {"P0_ul", [&](auto& k, auto& v) { cfg.P0_ul = parse_double(k, v); }},
          {"P_max_ul", [&](auto& k, auto& v) { cfg.P_max_ul = parse_double(k, v); }},
          {"alpha_dl", [&](auto& k, auto& v) { cfg.alpha_dl = parse_double(k, v); }},
          {"alpha_ul", [&](auto& k, auto& v) { cfg.alpha_ul = parse_double(k, v); }},
          {"side", [&](auto& k, auto& v) { cfg.side = parse_double(k, v); }},
          {"pl_const_dB", [&](auto& k, auto& v) { cfg.pl_const_dB = parse_double(k, v); }},
          {"pl_slope", [&](auto& k, auto& v) { cfg.pl_slope = parse_double(k, v); }},
          {"sigma_sh_dB", [&](auto& k, auto& v) { cfg.sigma_sh_dB = parse_double(k, v); }},
          {"d_decorr", [&](auto& k, auto& v) { cfg.d_decorr = parse_double(k, v); }},
          {"delta_sh", [&](auto& k, auto& v) { cfg.delta_sh = parse_double(k, v); }},
          {"d_min", [&](auto& k, auto& v) { cfg.d_min = parse_double(k, v); }},
      };

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("SystemConfig: line " + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument("SystemConfig: line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
    it->second(key, value);
  }

  if (!tau_u_set) cfg.tau_u = (cfg.tau_c - cfg.tau_p) / 2;
  if (!tau_d_set) cfg.tau_d = (cfg.tau_c - cfg.tau_p) / 2;
  cfg.validate();
  return cfg;
}

SystemConfig SystemConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("SystemConfig: cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

}  // namespace cfmimo
