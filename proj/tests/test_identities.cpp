#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>

#include "isinglab/identities.hpp"

using namespace isinglab;

TEST_CASE("battery passes at full scale") {
  auto reports = identity_battery(1000, 42);
  REQUIRE(reports.size() == 7);
  for (const IdentityReport& r : reports) {
    INFO(r.name, ": residual ", r.max_residual, " vs tol ", r.tol);
    CHECK(r.ok());
    CHECK(r.samples > 0);
    CHECK(r.tol > 0.0);
  }
}

TEST_CASE("battery covers the expected families with expected sample counts") {
  auto reports = identity_battery(50, 7);
  std::set<std::string> names;
  for (const IdentityReport& r : reports) names.insert(r.name);
  CHECK(names.size() == 7);
  CHECK(names.count("gamma inversion symmetry") == 1);
  CHECK(names.count("quadratic factorization of y*D") == 1);
  CHECK(names.count("h dual-form agreement") == 1);
  CHECK(names.count("D argument symmetries") == 1);
  // Pointwise families sample each of the three parameter points.
  for (const IdentityReport& r : reports)
    if (r.name == "gamma inversion symmetry") CHECK(r.samples == 150);
  // Determinant families are fixed at 100 tuples regardless of trials.
  for (const IdentityReport& r : reports)
    if (r.name == "determinant product identity (4 angles)")
      CHECK(r.samples == 100);
  // Residue family: 16 contour points x 6 orders, plus the pinned point.
  for (const IdentityReport& r : reports)
    if (r.name == "residue reduction of the y-contour") CHECK(r.samples == 98);
}

TEST_CASE("battery is reproducible for a fixed seed") {
  auto a = identity_battery(200, 1234);
  auto b = identity_battery(200, 1234);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].max_residual == b[i].max_residual);
    CHECK(a[i].samples == b[i].samples);
  }
}

TEST_CASE("different seeds move the randomized residuals") {
  auto a = identity_battery(200, 1);
  auto b = identity_battery(200, 2);
  bool moved = false;
  for (std::size_t i = 0; i < 4; ++i)
    if (a[i].max_residual != b[i].max_residual) moved = true;
  CHECK(moved);
}
