#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "isinglab/errors.hpp"
#include "isinglab/scan.hpp"

using namespace isinglab;

namespace {

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}
} // namespace

TEST_CASE("safety ladder steps down as eps shrinks") {
  CHECK(scan_safety(0.25) == 0.5);
  CHECK(scan_safety(0.05) == 0.5);
  CHECK(scan_safety(0.01) == 0.35);
  CHECK(scan_safety(0.005) == 0.35);
  CHECK(scan_safety(0.001) == 0.25);
}

TEST_CASE("rays off the critical directions stabilize quickly") {
  // phi = pi/4 sits between the singular directions; moderate eps converges
  // at small m and the converged values at successive eps stay order-1.
  auto rows = ray_scan({pi / 4}, {1e-1, 1e-2});
  REQUIRE(rows.size() == 2);
  for (const ScanRow& r : rows) {
    CHECK(r.status == ScanStatus::Ok);
    CHECK(std::isfinite(r.value.real()));
    CHECK(std::isfinite(r.value.imag()));
    CHECK(r.err_est < 1e-4 * std::abs(r.value));
    CHECK(r.r_used > 0.0);
    CHECK(r.r_used < 1.0);
  }
  // Closer to the circle needs at least as many nodes.
  CHECK(rows[1].m_used >= rows[0].m_used);
  CHECK(std::abs(rows[1].value) < 100.0);
}

TEST_CASE("row ordering is phi outer, eps inner") {
  auto rows = ray_scan({0.5, 1.0}, {2e-1, 1e-1});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].phi == 0.5);
  CHECK(rows[0].eps == 2e-1);
  CHECK(rows[1].phi == 0.5);
  CHECK(rows[1].eps == 1e-1);
  CHECK(rows[2].phi == 1.0);
  CHECK(rows[2].eps == 2e-1);
  CHECK(rows[3].phi == 1.0);
  CHECK(rows[3].eps == 1e-1);
}

TEST_CASE("conjugate rays give conjugate values") {
  // s -> conj(s) conjugates the whole construction, so the row at -phi
  // must match the conjugate of the row at +phi within both error bars.
  auto plus = ray_scan({pi / 3}, {5e-2});
  auto minus = ray_scan({-pi / 3}, {5e-2});
  REQUIRE(plus[0].status == ScanStatus::Ok);
  REQUIRE(minus[0].status == ScanStatus::Ok);
  double tol = plus[0].err_est + minus[0].err_est + 1e-12;
  CHECK(std::abs(minus[0].value - std::conj(plus[0].value)) <= 10 * tol);
}

TEST_CASE("starved budget is reported per row, not thrown") {
  // Budget below the m=64 first rung: the row fails, the scan survives.
  auto rows = ray_scan({pi / 4}, {1e-1}, 0, 1000);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == ScanStatus::BudgetExceeded);
  CHECK(std::isnan(rows[0].value.real()));
  CHECK(std::isnan(rows[0].value.imag()));
  CHECK(std::isnan(rows[0].err_est));
  CHECK(rows[0].m_used == 0);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(ray_scan({}, {1e-1}), ValidationError);
  CHECK_THROWS_AS(ray_scan({0.5}, {}), ValidationError);
  CHECK_THROWS_AS(ray_scan({0.5}, {0.6}), ValidationError);
  CHECK_THROWS_AS(ray_scan({0.5}, {-0.1}), ValidationError);
  CHECK_THROWS_AS(ray_scan({0.5}, {1e-1, 1e-1}), ValidationError);
  CHECK_THROWS_AS(ray_scan({0.5}, {1e-2, 1e-1}), ValidationError);
  CHECK_THROWS_AS(divergence_indicator(0.5, 1e-1, 0.0), ValidationError);
}

TEST_CASE("divergence indicator grows toward the circle at a singular angle") {
  // phi = pi/2 heads at a boundary accumulation direction; the curvature
  // of Re chi across the ray blows up as eps -> 0.
  double d1 = divergence_indicator(pi / 2, 1e-1, 0.05);
  double d2 = divergence_indicator(pi / 2, 3e-2, 0.05);
  double d3 = divergence_indicator(pi / 2, 1e-2, 0.05);
  CHECK(d1 > 0.0);
  CHECK(d2 > d1);
  CHECK(d3 > d2);
}

TEST_CASE("divergence indicator refuses failed rays") {
  CHECK_THROWS_AS(divergence_indicator(pi / 2, 1e-1, 0.05, 0, 1000),
                  ComputeError);
}

TEST_CASE("csv carries one line per row plus the fixed header") {
  auto rows = ray_scan({pi / 4}, {1e-1});
  std::string csv = scan_csv(rows);
  auto lines = split_lines(csv);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "phi,epsilon,re_chi,im_chi,err_est,r_used,m_used,status");
  CHECK(lines[1].find(",ok") != std::string::npos);
  // Round-trip the leading fields.
  std::istringstream in(lines[1]);
  std::string field;
  std::getline(in, field, ',');
  CHECK(std::stod(field) == rows[0].phi);
  std::getline(in, field, ',');
  CHECK(std::stod(field) == rows[0].eps);
  std::getline(in, field, ',');
  CHECK(std::stod(field) == rows[0].value.real());
}

TEST_CASE("csv marks failed rows with nan values and the status name") {
  auto rows = ray_scan({pi / 4}, {1e-1}, 0, 1000);
  std::string csv = scan_csv(rows);
  auto lines = split_lines(csv);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].find("nan") != std::string::npos);
  CHECK(lines[1].find("BudgetExceeded") != std::string::npos);
}
