#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "patchdyn/nullclines.hpp"

using namespace patchdyn;

namespace {

GridSpec domain(double lo = 0.0, double hi = 1.5) {
  return GridSpec{Axis{"x0", lo, hi, 2, {}}, Axis{"y0", lo, hi, 2, {}}};
}

double distance_to_vertices(const CurveSet& set, const PatchState& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Polyline& line : set.curves) {
    for (const PatchState& v : line.vertices) {
      best = std::min(best, std::hypot(v.x - p.x, v.y - p.y));
    }
  }
  return best;
}

double residual(const CoupledParams& cp, int iterate, NullclineFamily family,
                const PatchState& p) {
  PatchState s = p;
  for (int k = 0; k < iterate; ++k) s = step(cp, s);
  return family == NullclineFamily::X ? s.x - p.x : s.y - p.y;
}

}  // namespace

TEST_CASE("first-iterate nullclines pass through the diagonal fixed points") {
  const CoupledParams cp(LocalParams(0.63, 1.0, 0.2), 0.01);
  const NullclineSet set = nullclines(cp, 1, domain(), 400);
  const double cell = 1.5 / 399.0;
  for (const PatchState target :
       {PatchState{0.0, 0.0}, PatchState{0.2, 0.2}, PatchState{1.0, 1.0}}) {
    CHECK(distance_to_vertices(set.x_family, target) < 1.5 * cell);
    CHECK(distance_to_vertices(set.y_family, target) < 1.5 * cell);
  }
}

TEST_CASE("uncoupled x-nullcline is the three vertical lines x in {0, A, K}") {
  const CoupledParams cp(LocalParams(0.63, 1.0, 0.2), 0.0);
  const NullclineSet set = nullclines(cp, 1, domain(), 400);
  CHECK(!set.x_family.curves.empty());
  CHECK(!set.y_family.curves.empty());
  for (const Polyline& line : set.x_family.curves) {
    for (const PatchState& v : line.vertices) {
      const double nearest = std::min(
          {std::abs(v.x - 0.0), std::abs(v.x - 0.2), std::abs(v.x - 1.0)});
      CHECK(nearest < 5e-3);
    }
  }
  for (const Polyline& line : set.y_family.curves) {
    for (const PatchState& v : line.vertices) {
      const double nearest = std::min(
          {std::abs(v.y - 0.0), std::abs(v.y - 0.2), std::abs(v.y - 1.0)});
      CHECK(nearest < 5e-3);
    }
  }
}

TEST_CASE("every vertex satisfies the residual bound, including iterate 2") {
  const CoupledParams cp(LocalParams(0.89, 1.0, 0.2), 0.186);
  const double curve_tol = 1e-3;
  const NullclineSet set = nullclines(cp, 2, domain(), 300, curve_tol);
  long vertices = 0;
  for (const CurveSet* family : {&set.x_family, &set.y_family}) {
    for (const Polyline& line : family->curves) {
      for (const PatchState& v : line.vertices) {
        ++vertices;
        CHECK(std::abs(residual(cp, 2, family->family, v)) < curve_tol);
      }
    }
  }
  CHECK(vertices > 0);
}

TEST_CASE("halving the resolution moves vertices by less than a coarse cell") {
  const CoupledParams cp(LocalParams(0.63, 1.0, 0.2), 0.05);
  const NullclineSet coarse = nullclines(cp, 1, domain(), 150);
  const NullclineSet fine = nullclines(cp, 1, domain(), 300);
  const double coarse_cell = 1.5 / 149.0 * std::sqrt(2.0);
  for (const auto& [coarse_family, fine_family] :
       {std::pair{&coarse.x_family, &fine.x_family},
        std::pair{&coarse.y_family, &fine.y_family}}) {
    for (const Polyline& line : coarse_family->curves) {
      for (std::size_t k = 0; k < line.vertices.size(); k += 7) {
        CHECK(distance_to_vertices(*fine_family, line.vertices[k]) <
              coarse_cell);
      }
    }
  }
}

TEST_CASE("uncoupled fixed points are the nine equilibrium combinations") {
  const CoupledParams cp(LocalParams(0.4, 1.0, 0.2), 0.0);
  std::vector<PatchState> seeds;
  for (const double x : {0.01, 0.21, 0.99}) {
    for (const double y : {0.015, 0.19, 1.02}) {
      seeds.push_back({x, y});
    }
  }
  const FixedPointResult result = fixed_points(cp, 1, seeds);
  CHECK(result.non_converged.empty());
  REQUIRE(result.points.size() == 9);
  int stable = 0;
  for (const FixedPointRecord& fp : result.points) {
    const double nx = std::min(
        {std::abs(fp.point.x), std::abs(fp.point.x - 0.2), std::abs(fp.point.x - 1.0)});
    const double ny = std::min(
        {std::abs(fp.point.y), std::abs(fp.point.y - 0.2), std::abs(fp.point.y - 1.0)});
    CHECK(nx < 1e-8);
    CHECK(ny < 1e-8);
    CHECK(fp.residual < 1e-10);
    if (fp.stable) ++stable;
  }
  // (0,0), (K,0), (0,K) and (K,K) are stable; the five with an A coordinate
  // are not.
  CHECK(stable == 4);

  SUBCASE("fixed points of the first iterate recur under the second") {
    const FixedPointResult second = fixed_points(cp, 2, seeds);
    for (const FixedPointRecord& fp : result.points) {
      const bool found = std::any_of(
          second.points.begin(), second.points.end(),
          [&](const FixedPointRecord& other) {
            return std::max(std::abs(other.point.x - fp.point.x),
                            std::abs(other.point.y - fp.point.y)) < 1e-7;
          });
      CHECK(found);
    }
  }
}

TEST_CASE("diagonal stability matches the closed-form eigenvalues") {
  const CoupledParams cp(LocalParams(0.887, 1.0, 0.2), 0.01);
  const FixedPointResult result =
      fixed_points(cp, 1, std::vector<PatchState>{{0.19, 0.21}});
  REQUIRE(result.points.size() == 1);
  const FixedPointRecord& fp = result.points[0];
  CHECK(fp.point.x == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(fp.point.y == doctest::Approx(0.2).epsilon(1e-9));
  const double slope = eval_f_prime(cp.local, fp.point.x);
  const double expected =
      std::max(std::abs(slope), std::abs((1.0 - 2.0 * cp.d) * slope));
  CHECK(fp.spectral_radius == doctest::Approx(expected).epsilon(1e-6));
  CHECK(!fp.stable);  // the Allee state repels along the diagonal
}

TEST_CASE("boundary-crisis actors are present near the second threshold") {
  const CoupledParams cp(LocalParams(0.887, 1.0, 0.2), 0.01);
  std::vector<PatchState> seeds = {{0.01, 0.01}, {0.19, 0.21}, {0.99, 1.01},
                                   {0.02, 0.2},  {0.2, 0.02}};
  const FixedPointResult result = fixed_points(cp, 1, seeds);
  REQUIRE(result.points.size() == 5);
  auto has_point_near = [&](double x, double y, double tol) {
    return std::any_of(result.points.begin(), result.points.end(),
                       [&](const FixedPointRecord& fp) {
                         return std::abs(fp.point.x - x) < tol &&
                                std::abs(fp.point.y - y) < tol;
                       });
  };
  CHECK(has_point_near(0.0, 0.0, 1e-6));
  CHECK(has_point_near(0.2, 0.2, 0.05));
  CHECK(has_point_near(1.0, 1.0, 0.05));
  CHECK(has_point_near(0.0, 0.2, 0.05));
  CHECK(has_point_near(0.2, 0.0, 0.05));
}

TEST_CASE("the origin refines to a stable fixed point from any seed nearby") {
  const CoupledParams cp(LocalParams(0.89, 1.0, 0.2), 0.186);
  const FixedPointResult result =
      fixed_points(cp, 1, std::vector<PatchState>{{0.005, 0.004}});
  REQUIRE(result.points.size() == 1);
  CHECK(std::abs(result.points[0].point.x) < 1e-9);
  CHECK(std::abs(result.points[0].point.y) < 1e-9);
  CHECK(result.points[0].stable);
}

TEST_CASE("period-2 points of the out-of-phase attractor lie on both "
          "second-iterate nullcline families") {
  const CoupledParams cp(LocalParams(0.89, 1.0, 0.2), 0.19);
  const long resolution = 400;
  const std::vector<PatchState> crossings =
      nullcline_intersections(cp, 2, domain(), resolution);
  REQUIRE(!crossings.empty());
  const FixedPointResult refined = fixed_points(cp, 2, crossings);
  // Keep genuine period-2 points: off the diagonal and above the threshold
  // in both patches.
  std::vector<PatchState> period2;
  for (const FixedPointRecord& fp : refined.points) {
    if (std::abs(fp.point.x - fp.point.y) > 0.05 && fp.point.x > 0.2 &&
        fp.point.y > 0.2) {
      period2.push_back(fp.point);
    }
  }
  REQUIRE(!period2.empty());
  const NullclineSet set = nullclines(cp, 2, domain(), resolution);
  const double cell = 1.5 / static_cast<double>(resolution - 1);
  for (const PatchState& p : period2) {
    CHECK(distance_to_vertices(set.x_family, p) < 2.0 * cell);
    CHECK(distance_to_vertices(set.y_family, p) < 2.0 * cell);
  }
}

TEST_CASE("non-finite seeds are reported as non-converged") {
  const CoupledParams cp(LocalParams(0.63, 1.0, 0.2), 0.01);
  const FixedPointResult result = fixed_points(
      cp, 1, std::vector<PatchState>{{std::nan(""), 0.5}, {0.01, 0.01}});
  CHECK(result.non_converged.size() == 1);
  CHECK(result.points.size() == 1);
}

TEST_CASE("invalid arguments") {
  const CoupledParams cp(LocalParams(0.63, 1.0, 0.2), 0.01);
  CHECK_THROWS_AS(nullclines(cp, 3, domain(), 100), std::invalid_argument);
  CHECK_THROWS_AS(nullclines(cp, 1, domain(), 1), std::invalid_argument);
  CHECK_THROWS_AS(nullclines(cp, 1, GridSpec{Axis{"x", 0, 1, 4, {}}, {}}, 10),
                  std::invalid_argument);
}
