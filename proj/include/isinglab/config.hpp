#pragma once

#include <cstdint>
#include <string>

namespace isinglab {

// Run-wide knobs shared by the command-line driver.  Stored flat so a config
// file is a faithful record of a run: one key=value per line, '#' comments,
// later assignments win, flags override the file.
struct RunConfig {
  int grid_m = 128;
  double grid_safety = 0.5;
  double tol_identity = 1e-10;
  double tol_hull = 1e-10;
  double tol_active = 1e-9;
  int threads = 0; // 0 until finalized; validate() requires >= 1
  std::uint64_t seed = 42;
  std::string output_path;           // empty writes to stdout
  std::string output_format = "csv"; // csv | json

  // Throws ValidationError on any violated invariant: positive tolerances,
  // threads >= 1, even grid_m >= 8, safety in (0,1), known format.
  void validate() const;
};

// A config with every default filled in, threads resolved to the hardware
// thread count.
RunConfig default_config();

// Assigns one key.  Known keys: grid.m, grid.safety, tol.identity, tol.hull,
// tol.active, threads, seed, output.path, output.format.  Throws
// ValidationError on an unknown key or an unparseable value.
void config_assign(RunConfig& cfg, const std::string& key,
                   const std::string& value);

// Applies key=value lines from text on top of cfg.  Does not validate the
// final state; callers validate once after all overrides are in.
void config_apply_text(RunConfig& cfg, const std::string& text);

// Reads the file and applies it on top of cfg.  Throws ValidationError when
// the file cannot be read.
void config_apply_file(RunConfig& cfg, const std::string& path);

// Serializes in the file format, every key present, stable key order.
// config_apply_text(default, config_to_text(cfg)) reproduces cfg.
std::string config_to_text(const RunConfig& cfg);

} // namespace isinglab
