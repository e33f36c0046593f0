#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <thread>
#include <vector>

#include "neontrap/errors.hpp"
#include "neontrap/layered_dielectric.hpp"

using namespace neontrap;

namespace {

constexpr double kLamInf = -0.10873440285204991;  // (1 - 1.244) / (1 + 1.244)
const double kPrefactor = kDefaultConstants.image_prefactor;

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("reflection coefficient reference values") {
  const auto sc = DielectricStack::superconducting(10.0);
  CHECK(reflection_coefficient(sc, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));
  const double t = std::tanh(1.0);
  CHECK(reflection_coefficient(sc, 0.1) == doctest::Approx((t - 1.244) / (t + 1.244)).epsilon(1e-14));
  CHECK(reflection_coefficient(sc, 0.1) == doctest::Approx(-0.24053).epsilon(1e-4));
  CHECK(reflection_coefficient(sc, 50.0) == doctest::Approx(kLamInf).epsilon(1e-12));

  const auto si = DielectricStack::dielectric(12.0, 10.0);
  CHECK(reflection_coefficient(si, 0.0) == doctest::Approx(-11.0 / 13.0).epsilon(1e-14));
  CHECK(reflection_coefficient(si, 50.0) == doctest::Approx(kLamInf).epsilon(1e-12));

  const auto bulk = DielectricStack::superconducting(kInfiniteThickness);
  CHECK(reflection_coefficient(bulk, 0.0) == doctest::Approx(kLamInf).epsilon(1e-15));
  CHECK(bulk.bulk_reflection() == doctest::Approx(kLamInf).epsilon(1e-15));
}

TEST_CASE("reflection coefficient rejects negative wavenumbers") {
  const auto sc = DielectricStack::superconducting(10.0);
  CHECK_THROWS_AS(reflection_coefficient(sc, -1e-9), DomainError);
  CHECK_THROWS_AS(reflection_coefficient(sc, std::nan("")), DomainError);
}

TEST_CASE("stack construction validates permittivities and thickness") {
  CHECK_THROWS_AS(DielectricStack::superconducting(10.0, 1.0), DomainError);
  CHECK_THROWS_AS(DielectricStack::dielectric(0.5, 10.0), DomainError);
  CHECK_THROWS_AS(DielectricStack::superconducting(-1.0), DomainError);
  CHECK_NOTHROW(DielectricStack::superconducting(0.0));
  CHECK(DielectricStack::superconducting(kInfiniteThickness).is_bulk());
}

TEST_CASE("property: superconducting reflection stays in [-1, Lambda_inf] and rises with kL") {
  for (double L : {0.5, 2.0, 10.0, 100.0}) {
    const auto sc = DielectricStack::superconducting(L);
    double previous = -1.0;
    for (double kL = 0.0; kL <= 20.0; kL += 0.01) {
      const double lam = reflection_coefficient(sc, kL / L);
      CHECK(lam >= -1.0 - 1e-15);
      CHECK(lam <= kLamInf + 1e-15);
      CHECK(lam >= previous - 1e-15);
      previous = lam;
    }
  }
}

TEST_CASE("property: dielectric reflection lies in [-1, 0] when eps_b >= eps_neon") {
  for (double eb : {1.244, 2.0, 4.0, 12.0, 100.0}) {
    const auto stack = DielectricStack::dielectric(eb, 5.0);
    for (double k = 0.0; k <= 10.0; k += 0.05) {
      const double lam = reflection_coefficient(stack, k);
      CHECK(lam >= -1.0);
      CHECK(lam <= 0.0);
    }
  }
}

TEST_CASE("perpendicular potential closed-form limits") {
  const auto bulk = DielectricStack::superconducting(kInfiniteThickness);
  CHECK(perpendicular_potential(bulk, 1.0) == doctest::Approx(kPrefactor * kLamInf / 2.0).epsilon(1e-14));
  CHECK(perpendicular_potential(bulk, 1.0) == doctest::Approx(-39.14).epsilon(2e-4));

  // Mirror charge: L = 0 collapses the neon layer onto the conductor.
  const auto mirror = DielectricStack::superconducting(0.0);
  CHECK(perpendicular_potential(mirror, 1.0) == doctest::Approx(-kPrefactor / 2.0).epsilon(1e-9));
  CHECK(perpendicular_potential(mirror, 1.0) == doctest::Approx(-359.99).epsilon(1e-5));
}

TEST_CASE("perpendicular potential rejects z <= 0") {
  const auto sc = DielectricStack::superconducting(10.0);
  CHECK_THROWS_AS(perpendicular_potential(sc, 0.0), DomainError);
  CHECK_THROWS_AS(perpendicular_potential(sc, -0.1), DomainError);
}

TEST_CASE("quadrature agrees with the image-charge series") {
  const auto sc = DielectricStack::superconducting(10.0);
  CHECK(rel(perpendicular_potential(sc, 2.0), image_series_oracle(sc, 2.0, 50)) < 1e-6);

  for (double L : {2.0, 5.0, 10.0, 50.0, 100.0}) {
    for (const auto& stack : {DielectricStack::superconducting(L), DielectricStack::dielectric(12.0, L)}) {
      for (double z : log_spaced(0.23, 30.0, 25)) {
        const double quad = perpendicular_potential(stack, z);
        const double series = image_series_oracle(stack, z, 200);
        INFO("L = " << L << ", z = " << z);
        CHECK(rel(quad, series) < 1e-6);
      }
    }
  }
}

TEST_CASE("image series: leading term is the bulk image, far field sees the bare conductor") {
  const auto sc = DielectricStack::superconducting(10.0);
  const auto bulk = DielectricStack::superconducting(kInfiniteThickness);
  CHECK(image_series_oracle(sc, 2.0, 1) == doctest::Approx(kPrefactor * kLamInf / 4.0).epsilon(1e-14));
  // The image strengths sum to Lambda(k = 0) = -1, so for z >> L the layer is invisible
  // and the conductor's mirror image dominates, with an O(L/z) correction.
  CHECK(rel(image_series_oracle(sc, 1000.0, 400), -kPrefactor / 2000.0) < 0.01);
  CHECK(rel(image_series_oracle(sc, 1e4, 400), -kPrefactor / 2e4) < 1e-3);

  // Partial sums approach the quadrature value.
  const double target = perpendicular_potential(sc, 2.0);
  double previous_error = std::abs(image_series_oracle(sc, 2.0, 1) - target);
  for (int n : {2, 4, 8, 16}) {
    const double error = std::abs(image_series_oracle(sc, 2.0, n) - target);
    CHECK(error < previous_error);
    previous_error = error;
  }
  CHECK_THROWS_AS(image_series_oracle(bulk, 1.0, 10), DomainError);
  CHECK_THROWS_AS(image_series_oracle(sc, 1.0, 0), DomainError);
}

TEST_CASE("thick and thin layers approach the closed-form limits") {
  const double bulk = kPrefactor * kLamInf / 2.0;
  const double mirror = -kPrefactor / 2.0;
  CHECK(rel(perpendicular_potential(DielectricStack::superconducting(1e6), 1.0), bulk) < 1e-4);
  CHECK(rel(perpendicular_potential(DielectricStack::superconducting(1e-5), 1.0), mirror) < 1e-4);

  // The deviation falls off like 1/L (thick) and like L (thin).
  const double d3 = rel(perpendicular_potential(DielectricStack::superconducting(1e3), 1.0), bulk);
  const double d4 = rel(perpendicular_potential(DielectricStack::superconducting(1e4), 1.0), bulk);
  CHECK(d3 / d4 == doctest::Approx(10.0).epsilon(0.05));
  const double t3 = rel(perpendicular_potential(DielectricStack::superconducting(1e-3), 1.0), mirror);
  const double t4 = rel(perpendicular_potential(DielectricStack::superconducting(1e-4), 1.0), mirror);
  CHECK(t3 / t4 == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("property: superconducting image potential is negative and rises toward zero with z") {
  for (double L : {2.0, 10.0, 50.0}) {
    const auto sc = DielectricStack::superconducting(L);
    double previous = -std::numeric_limits<double>::infinity();
    for (double z : log_spaced(0.05, 1e3, 80)) {
      const double v = perpendicular_potential(sc, z);
      CHECK(v < 0.0);
      CHECK(v > previous);
      previous = v;
    }
    CHECK(std::abs(perpendicular_potential(sc, 1e6)) < 1e-3);
  }
}

TEST_CASE("property: thinner layers bind more strongly at every height") {
  const std::vector<double> thicknesses{0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 1e3};
  for (double z : log_spaced(0.1, 50.0, 30)) {
    double previous = -std::numeric_limits<double>::infinity();
    for (double L : thicknesses) {
      const double v = perpendicular_potential(DielectricStack::superconducting(L), z);
      CHECK(v >= previous);
      previous = v;
    }
    CHECK(perpendicular_potential(DielectricStack::superconducting(kInfiniteThickness), z) >= previous);
  }
}

TEST_CASE("external potential") {
  const auto sc = DielectricStack::superconducting(10.0);
  CHECK(external_potential(sc, {1e6}, -10.0) == 0.0);
  CHECK(external_potential(sc, {-3e5}, -10.0) == 0.0);
  CHECK(external_potential(sc, {1e6}, 0.0) == doctest::Approx(10.0 / 1.244).epsilon(1e-14));
  CHECK(external_potential(sc, {1e6}, 0.0) == doctest::Approx(8.039).epsilon(1e-4));
  // Continuous across the surface, slope 1 meV/nm per 1e6 V/m in vacuum.
  CHECK(external_potential(sc, {1e6}, -1e-12) == doctest::Approx(external_potential(sc, {1e6}, 1e-12)).epsilon(1e-12));
  CHECK(external_potential(sc, {1e6}, 5.0) - external_potential(sc, {1e6}, 0.0) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK_THROWS_AS(external_potential(sc, {1e6}, -10.0001), DomainError);
}

TEST_CASE("property: external potential is exactly linear in the field") {
  const auto sc = DielectricStack::superconducting(7.3);
  for (double e : {1.0, 2.5e5, -7e5, 1e6}) {
    for (double z : {-7.3, -3.0, 0.0, 0.4, 12.0}) {
      CHECK(external_potential(sc, {2.0 * e}, z) == 2.0 * external_potential(sc, {e}, z));
    }
  }
  CHECK(external_potential(sc, {0.0}, 4.0) == 0.0);
}

TEST_CASE("total potential: barrier inside neon, image potential held below the cutoff") {
  const auto sc = DielectricStack::superconducting(10.0);
  const double zc = kDefaultConstants.cutoff_zc;
  const FieldSpec field{5e5};
  CHECK(total_perpendicular_potential(sc, field, -0.5) ==
        doctest::Approx(700.0 + external_potential(sc, field, -0.5)).epsilon(1e-14));
  CHECK(total_perpendicular_potential(sc, field, zc / 2) ==
        doctest::Approx(perpendicular_potential(sc, zc) + external_potential(sc, field, zc / 2)).epsilon(1e-14));
  CHECK(total_perpendicular_potential(sc, {}, 5.0) == perpendicular_potential(sc, 5.0));
  const auto bulk = DielectricStack::superconducting(kInfiniteThickness);
  CHECK(total_perpendicular_potential(bulk, {}, 1.0) == doctest::Approx(-39.14).epsilon(2e-4));
}

TEST_CASE("potential cache memoizes per stack and grid, and is safe under concurrent use") {
  PotentialCache cache;
  const auto sc = DielectricStack::superconducting(10.0);
  const auto a = cache.samples(sc, -2.0, 40.0, 1001);
  const auto b = cache.samples(sc, -2.0, 40.0, 1001);
  CHECK(a == b);
  CHECK(cache.size() == 1);
  cache.samples(sc.with_thickness(5.0), -2.0, 40.0, 1001);
  CHECK(cache.size() == 2);

  const double h = 42.0 / 1000.0;
  for (std::size_t i = 0; i < a->size(); i += 37) {
    const double z = -2.0 + h * static_cast<double>(i);
    if (std::abs(z) < h) continue;  // cell-averaged surface node
    CHECK((*a)[i] == doctest::Approx(capped_image_potential(sc, z)).epsilon(1e-14));
  }

  cache.clear();
  std::vector<PotentialCache::Samples> results(8);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < results.size(); ++t) {
    threads.emplace_back([&, t] { results[t] = cache.samples(sc, -2.0, 40.0, 2001); });
  }
  for (auto& th : threads) th.join();
  for (const auto& r : results) CHECK(*r == *results.front());
  CHECK(cache.size() == 1);
}
