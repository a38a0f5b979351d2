#include "isinglab/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "isinglab/errors.hpp"

namespace isinglab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Whole-string numeric parses; trailing junk is an error, not a truncation.
double parse_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE)
    throw ValidationError("config: bad numeric value '" + v + "' for " + key);
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE)
    throw ValidationError("config: bad integer value '" + v + "' for " + key);
  return x;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  if (!v.empty() && v[0] == '-')
    throw ValidationError("config: bad unsigned value '" + v + "' for " + key);
  errno = 0;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE)
    throw ValidationError("config: bad unsigned value '" + v + "' for " + key);
  return x;
}

} // namespace

void RunConfig::validate() const {
  if (grid_m < 8 || grid_m % 2 != 0)
    throw ValidationError("config: grid.m must be even and at least 8");
  if (!(grid_safety > 0.0) || !(grid_safety < 1.0))
    throw ValidationError("config: grid.safety must lie in (0, 1)");
  if (!(tol_identity > 0.0) || !(tol_hull > 0.0) || !(tol_active > 0.0))
    throw ValidationError("config: tolerances must be positive");
  if (threads < 1)
    throw ValidationError("config: threads must be at least 1");
  if (output_format != "csv" && output_format != "json")
    throw ValidationError("config: output.format must be csv or json");
}

RunConfig default_config() {
  RunConfig cfg;
  unsigned hw = std::thread::hardware_concurrency();
  cfg.threads = hw == 0 ? 1 : static_cast<int>(hw);
  return cfg;
}

void config_assign(RunConfig& cfg, const std::string& key,
                   const std::string& value) {
  if (key == "grid.m")
    cfg.grid_m = static_cast<int>(parse_int(key, value));
  else if (key == "grid.safety")
    cfg.grid_safety = parse_double(key, value);
  else if (key == "tol.identity")
    cfg.tol_identity = parse_double(key, value);
  else if (key == "tol.hull")
    cfg.tol_hull = parse_double(key, value);
  else if (key == "tol.active")
    cfg.tol_active = parse_double(key, value);
  else if (key == "threads")
    cfg.threads = static_cast<int>(parse_int(key, value));
  else if (key == "seed")
    cfg.seed = parse_uint(key, value);
  else if (key == "output.path")
    cfg.output_path = value;
  else if (key == "output.format")
    cfg.output_format = value;
  else
    throw ValidationError("config: unknown key '" + key + "'");
}

void config_apply_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: line " + std::to_string(lineno) +
                            " has no '='");
    config_assign(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void config_apply_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  config_apply_text(cfg, buf.str());
}

std::string config_to_text(const RunConfig& cfg) {
  std::ostringstream out;
  char num[64];
  out << "grid.m = " << cfg.grid_m << "\n";
  std::snprintf(num, sizeof num, "%.17g", cfg.grid_safety);
  out << "grid.safety = " << num << "\n";
  std::snprintf(num, sizeof num, "%.17g", cfg.tol_identity);
  out << "tol.identity = " << num << "\n";
  std::snprintf(num, sizeof num, "%.17g", cfg.tol_hull);
  out << "tol.hull = " << num << "\n";
  std::snprintf(num, sizeof num, "%.17g", cfg.tol_active);
  out << "tol.active = " << num << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "output.path = " << cfg.output_path << "\n";
  out << "output.format = " << cfg.output_format << "\n";
  return out.str();
}

} // namespace isinglab
