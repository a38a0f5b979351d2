#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "isinglab/config.hpp"
#include "isinglab/errors.hpp"

using namespace isinglab;

TEST_CASE("defaults match the documented values and validate") {
  RunConfig cfg = default_config();
  CHECK(cfg.grid_m == 128);
  CHECK(cfg.grid_safety == 0.5);
  CHECK(cfg.tol_identity == 1e-10);
  CHECK(cfg.tol_hull == 1e-10);
  CHECK(cfg.tol_active == 1e-9);
  CHECK(cfg.threads >= 1);
  CHECK(cfg.seed == 42);
  CHECK(cfg.output_path.empty());
  CHECK(cfg.output_format == "csv");
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("text parsing handles comments, blanks, and whitespace") {
  RunConfig cfg = default_config();
  config_apply_text(cfg, "# experiment record\n"
                         "\n"
                         "  grid.m = 256   # override\n"
                         "tol.hull=1e-8\r\n"
                         "output.format = json\n"
                         "seed = 7\n");
  CHECK(cfg.grid_m == 256);
  CHECK(cfg.tol_hull == 1e-8);
  CHECK(cfg.output_format == "json");
  CHECK(cfg.seed == 7);
  // Untouched keys keep their defaults.
  CHECK(cfg.grid_safety == 0.5);
}

TEST_CASE("later assignments win") {
  RunConfig cfg = default_config();
  config_apply_text(cfg, "grid.m = 64\ngrid.m = 96\n");
  CHECK(cfg.grid_m == 96);
}

TEST_CASE("unknown keys and malformed lines are rejected") {
  RunConfig cfg = default_config();
  CHECK_THROWS_AS(config_apply_text(cfg, "grid.n = 12\n"), ValidationError);
  CHECK_THROWS_AS(config_apply_text(cfg, "just a line\n"), ValidationError);
  CHECK_THROWS_AS(config_apply_text(cfg, "grid.m = twelve\n"), ValidationError);
  CHECK_THROWS_AS(config_apply_text(cfg, "grid.m = 12x\n"), ValidationError);
  CHECK_THROWS_AS(config_apply_text(cfg, "seed = -3\n"), ValidationError);
}

TEST_CASE("validate enforces the documented invariants") {
  RunConfig bad = default_config();
  bad.grid_m = 7;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = default_config();
  bad.grid_m = 6; // even but below the floor
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = default_config();
  bad.grid_safety = 1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = default_config();
  bad.tol_identity = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = default_config();
  bad.tol_hull = -1e-10;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = default_config();
  bad.threads = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = default_config();
  bad.output_format = "xml";
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("serialization round-trips") {
  RunConfig cfg = default_config();
  cfg.grid_m = 192;
  cfg.grid_safety = 0.35;
  cfg.tol_active = 2.5e-9;
  cfg.seed = 99;
  cfg.output_path = "out.csv";
  cfg.output_format = "json";
  RunConfig back = default_config();
  config_apply_text(back, config_to_text(cfg));
  CHECK(back.grid_m == cfg.grid_m);
  CHECK(back.grid_safety == cfg.grid_safety);
  CHECK(back.tol_identity == cfg.tol_identity);
  CHECK(back.tol_hull == cfg.tol_hull);
  CHECK(back.tol_active == cfg.tol_active);
  CHECK(back.threads == cfg.threads);
  CHECK(back.seed == cfg.seed);
  CHECK(back.output_path == cfg.output_path);
  CHECK(back.output_format == cfg.output_format);
}

TEST_CASE("file loading applies on top and reports unreadable paths") {
  const char* path = "test_config_tmp.cfg";
  {
    std::ofstream out(path);
    out << "grid.m = 64\nthreads = 2\n";
  }
  RunConfig cfg = default_config();
  config_apply_file(cfg, path);
  CHECK(cfg.grid_m == 64);
  CHECK(cfg.threads == 2);
  std::remove(path);
  CHECK_THROWS_AS(config_apply_file(cfg, "no_such_file.cfg"), ValidationError);
}
