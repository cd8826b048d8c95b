#include "doctest.h"

#include <cmath>
#include <vector>

#include "distwave/coeff_field.hpp"
#include "distwave/error.hpp"
#include "distwave/wavelet_basis.hpp"

using namespace distwave;

namespace {

// Midpoint-rule inner product on a 2^R grid.
double inner_product(const WaveletBasis& basis, int j, int k, int jj, int kk, int depth) {
  const std::size_t grid = std::size_t{1} << depth;
  double sum = 0.0;
  for (std::size_t g = 0; g < grid; ++g) {
    const double t = (static_cast<double>(g) + 0.5) / static_cast<double>(grid);
    sum += basis.psi(j, k, t) * basis.psi(jj, kk, t);
  }
  return sum / static_cast<double>(grid);
}

void check_orthonormal(const WaveletBasis& basis, int max_level) {
  // Haar carries no table; its products are exact on any fine grid.
  const bool tabulated = basis.refinement_depth() > 0;
  const int depth = tabulated ? basis.refinement_depth() : 12;
  const double tolerance = tabulated ? 10.0 * std::exp2(-depth / 2.0) : 1e-12;
  double worst = 0.0;
  for (int j = 0; j <= max_level; ++j) {
    for (int k = 0; k < (1 << j); ++k) {
      for (int jj = j; jj <= max_level; ++jj) {
        for (int kk = 0; kk < (1 << jj); ++kk) {
          const double expected = (j == jj && k == kk) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(inner_product(basis, j, k, jj, kk, depth) - expected));
        }
      }
    }
  }
  CHECK(worst <= tolerance);
}

}  // namespace

TEST_CASE("haar mother wavelet values") {
  const WaveletBasis haar = WaveletBasis::haar();
  CHECK(haar.psi(0, 0, 0.25) == 1.0);
  CHECK(haar.psi(0, 0, 0.75) == -1.0);
  // 2^{1/2} psi(2 * 0.9 - 1) = 2^{1/2} psi(0.8) = -sqrt 2
  CHECK(haar.psi(1, 1, 0.9) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));
  CHECK(haar.psi(1, 1, 0.2) == 0.0);
  CHECK(haar.psi(2, 3, 0.8) == doctest::Approx(2.0));
}

TEST_CASE("psi rejects bad arguments") {
  const WaveletBasis haar = WaveletBasis::haar();
  CHECK_THROWS_AS(haar.psi(2, 4, 0.5), Error);
  CHECK_THROWS_AS(haar.psi(-1, 0, 0.5), Error);

  const WaveletBasis db = WaveletBasis::daubechies(4, 12);
  CHECK(db.max_level() == 10);
  CHECK_NOTHROW(db.psi(10, 0, 0.5));
  try {
    db.psi(11, 0, 0.5);
    FAIL("expected LevelTooDeep");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LevelTooDeep);
  }
}

TEST_CASE("daubechies-2 mother at integers matches the closed form") {
  // With phi(1) = (1 + sqrt 3)/2, phi(2) = (1 - sqrt 3)/2 and
  // g_k = (-1)^k h_{3-k}, the two-scale relation gives the values below.
  const WaveletBasis db = WaveletBasis::daubechies(2, 14);
  const double r3 = std::sqrt(3.0);
  CHECK(db.mother(1.0) == doctest::Approx((1.0 - r3) / 2.0).epsilon(1e-12));
  CHECK(db.mother(2.0) == doctest::Approx(-(1.0 + r3) / 2.0).epsilon(1e-12));
  CHECK(db.mother(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(db.mother(3.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(db.mother(-0.5) == 0.0);
  CHECK(db.mother(3.5) == 0.0);
}

TEST_CASE("daubechies-4 has vanishing integrals on the grid") {
  const WaveletBasis db = WaveletBasis::daubechies(4, 12);
  const int depth = db.refinement_depth();
  const std::size_t grid = std::size_t{1} << depth;
  for (int j = 0; j <= 6; ++j) {
    for (int k = 0; k < (1 << j); k += std::max(1, (1 << j) / 8)) {
      double integral = 0.0;
      for (std::size_t g = 0; g < grid; ++g) {
        integral += db.psi(j, k, (static_cast<double>(g) + 0.5) / static_cast<double>(grid));
      }
      integral /= static_cast<double>(grid);
      CHECK(std::abs(integral) <= 10.0 * std::exp2(-depth));
    }
  }
}

TEST_CASE("daubechies mother has N vanishing moments") {
  for (int N : {2, 3, 4}) {
    const WaveletBasis db = WaveletBasis::daubechies(N, 14);
    const int width = db.support_width();
    const int steps = width << 12;
    for (int p = 0; p < N; ++p) {
      double moment = 0.0, norm = 0.0;
      for (int i = 0; i < steps; ++i) {
        const double x = (i + 0.5) * width / steps;
        const double v = db.mother(x);
        moment += std::pow(x, p) * v;
        norm += v * v;
      }
      moment *= static_cast<double>(width) / steps;
      norm *= static_cast<double>(width) / steps;
      CHECK(std::abs(moment) < 1e-3 * std::pow(width, p));
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
}

TEST_CASE("orthonormality, exhaustive up to level 5") {
  check_orthonormal(WaveletBasis::haar(), 5);
  check_orthonormal(WaveletBasis::daubechies(2, 12), 5);
  check_orthonormal(WaveletBasis::daubechies(4, 12), 5);
}

TEST_CASE("support length is (2N - 1) 2^-j") {
  const WaveletBasis db = WaveletBasis::daubechies(3, 12);
  const int j = 5;
  const int k = 7;
  const std::size_t grid = 1 << 14;
  double first = 2.0, last = -1.0;
  for (std::size_t g = 0; g < grid; ++g) {
    const double t = (static_cast<double>(g) + 0.5) / static_cast<double>(grid);
    if (std::abs(db.psi(j, k, t)) > 1e-12) {
      first = std::min(first, t);
      last = std::max(last, t);
    }
  }
  CHECK(last - first <= 5.0 / 32.0 + 1e-3);
  CHECK(first >= k / 32.0 - 1e-3);
}

TEST_CASE("for_each_nonzero agrees with psi") {
  for (const WaveletBasis& basis : {WaveletBasis::haar(), WaveletBasis::daubechies(4, 12)}) {
    for (int j : {0, 1, 2, 5}) {
      for (double t : {0.0, 0.013, 0.5, 0.77, 0.999}) {
        std::vector<double> dense(1u << j, 0.0);
        basis.for_each_nonzero(j, t, [&](std::int64_t k, double v) { dense[k] += v; });
        for (int k = 0; k < (1 << j); ++k) {
          CHECK(dense[k] == doctest::Approx(basis.psi(j, k, t)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("synthesize examples") {
  const WaveletBasis haar = WaveletBasis::haar();
  CoeffField zero(3);
  for (double v : haar.synthesize(zero, 16)) CHECK(v == 0.0);

  CoeffField mother(0);
  mother.at(0, 0) = 1.0;
  const auto halves = haar.synthesize(mother, 8);
  for (int i = 0; i < 8; ++i) CHECK(halves[i] == (i < 4 ? 1.0 : -1.0));

  // f = psi_00 + 0.5 psi_11, summed term by term at t = 1/8, 3/8, 5/8, 7/8.
  CoeffField two(1);
  two.at(0, 0) = 1.0;
  two.at(1, 1) = 0.5;
  const double r2 = std::sqrt(2.0);
  const std::vector<double> expected{1.0, 1.0, -1.0 + 0.5 * r2, -1.0 - 0.5 * r2};
  const auto values = haar.synthesize(two, 4);
  for (int i = 0; i < 4; ++i) CHECK(values[i] == doctest::Approx(expected[i]).epsilon(1e-15));

  CHECK_THROWS_AS(haar.synthesize(two, 3), Error);
  CHECK_THROWS_AS(haar.synthesize(two, 2), Error);
}

TEST_CASE("Parseval on the quadrature grid") {
  CoeffField field(6);
  double expected = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double v = std::sin(1.7 * static_cast<double>(i) + 0.3) / (1.0 + static_cast<double>(i));
    field.values()[i] = v;
    expected += v * v;
  }
  auto quadrature = [&](const WaveletBasis& basis, std::size_t grid) {
    double sum = 0.0;
    for (double v : basis.synthesize(field, grid)) sum += v * v;
    return sum / static_cast<double>(grid);
  };
  CHECK(quadrature(WaveletBasis::haar(), 1 << 8) == doctest::Approx(expected).epsilon(1e-6));
  CHECK(quadrature(WaveletBasis::daubechies(4, 12), 1 << 12) ==
        doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("evaluation is deterministic") {
  const WaveletBasis a = WaveletBasis::daubechies(5, 12);
  const WaveletBasis b = WaveletBasis::daubechies(5, 12);
  for (double t : {0.1, 0.33, 0.9}) CHECK(a.psi(4, 3, t) == b.psi(4, 3, t));
  CHECK(WaveletBasis::from_name("daubechies5").name() == "daubechies5");
  CHECK(WaveletBasis::from_name("haar").name() == "haar");
  CHECK_THROWS_AS(WaveletBasis::from_name("coiflet3"), Error);
}
