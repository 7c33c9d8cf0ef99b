#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "incompat/sampling.hpp"
#include "incompat/spectra.hpp"

using namespace incompat;

TEST_CASE("kesten_mckay: arcsine case, support, symmetry, moments") {
  const SpectralLaw arcsine = kesten_mckay(2);
  CHECK(arcsine.lo == doctest::Approx(-2.0));
  CHECK(arcsine.hi == doctest::Approx(2.0));
  CHECK(arcsine.density(0.0) ==
        doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-12));
  // Matches 1/(pi sqrt(4 - x^2)) on a grid.
  for (double x = -1.9; x < 2.0; x += 0.37) {
    CHECK(arcsine.density(x) ==
          doctest::Approx(1.0 / (std::numbers::pi * std::sqrt(4.0 - x * x)))
              .epsilon(1e-12));
  }
  CHECK(arcsine.total_mass() == doctest::Approx(1.0).epsilon(1e-6));

  const SpectralLaw km5 = kesten_mckay(5);
  CHECK(km5.hi == doctest::Approx(4.0));
  for (double x = 0.1; x < 4.0; x += 0.53) {
    CHECK(km5.density(x) == doctest::Approx(km5.density(-x)).epsilon(1e-12));
  }

  for (int g : {2, 3, 5, 8}) {
    const SpectralLaw law = kesten_mckay(g);
    CHECK(law.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(law.moment(2) == doctest::Approx(static_cast<double>(g)).epsilon(1e-4));
  }
  CHECK_THROWS_AS(kesten_mckay(1), ParameterOutOfRange);
}

TEST_CASE("haar_projection_moment exact values and the factorial bound") {
  CHECK(haar_projection_moment(2, 1) == 0.0);
  CHECK(haar_projection_moment(4, 7) == 0.0);
  CHECK(haar_projection_moment(2, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(haar_projection_moment(4, 4) == doctest::Approx(3.0 / 35.0).epsilon(1e-12));
  CHECK(haar_projection_moment(6, 0) == doctest::Approx(1.0));

  for (Eigen::Index d = 2; d <= 20; d += 2) {
    for (int p = 2; p <= 10; p += 2) {
      const int q = p / 2;
      double bound = std::pow(2.0 / static_cast<double>(d), q);
      for (int j = 2; j <= q; ++j) bound *= j;
      CHECK(haar_projection_moment(d, p) <= bound * (1.0 + 1e-12));
    }
  }
  CHECK_THROWS_AS(haar_projection_moment(3, 2), ParameterOutOfRange);
}

TEST_CASE("Monte-Carlo check of the second and fourth moments") {
  SeededRng rng(51, 0);
  const Eigen::Index d = 2;
  const int n = 1000000;
  double m2 = 0.0, m4 = 0.0, m8 = 0.0;
  for (int i = 0; i < n; ++i) {
    cvector_t psi(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      psi(j) = complex_t(rng.normal(), rng.normal());
    }
    psi.normalize();
    double x = std::norm(psi(0)) - std::norm(psi(1));
    m2 += x * x;
    m4 += x * x * x * x;
    m8 += std::pow(x, 8);
  }
  m2 /= n;
  m4 /= n;
  m8 /= n;
  const double sd2 = std::sqrt((m4 - m2 * m2) / n);
  CHECK(std::abs(m2 - haar_projection_moment(2, 2)) <= 3.0 * sd2);
  const double sd4 = std::sqrt((m8 - m4 * m4) / n);
  CHECK(std::abs(m4 - haar_projection_moment(2, 4)) <= 3.0 * sd4);
}

TEST_CASE("phi_pm values and symmetry") {
  const auto [lo, hi] = phi_pm(0.5, 0.5);
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(1.0));

  const auto [a, b] = phi_pm(0.25, 0.5);
  CHECK(a == doctest::Approx(0.5 - 2.0 * std::sqrt(0.046875)).epsilon(1e-12));
  CHECK(b == doctest::Approx(0.5 + 2.0 * std::sqrt(0.046875)).epsilon(1e-12));
  CHECK(a == doctest::Approx(0.0669873).epsilon(1e-5));

  for (double s = 0.1; s < 1.0; s += 0.2) {
    for (double t = 0.1; t < 1.0; t += 0.2) {
      const auto [l1, h1] = phi_pm(s, t);
      const auto [l2, h2] = phi_pm(t, s);
      CHECK(l1 == doctest::Approx(l2).epsilon(1e-14));
      CHECK(h1 == doctest::Approx(h2).epsilon(1e-14));
      CHECK(l1 >= 0.0);
      CHECK(h1 <= 1.0);
    }
  }
  CHECK_THROWS_AS(phi_pm(0.0, 0.5), ParameterOutOfRange);
}

TEST_CASE("nu_kc atoms, projective limit, and normalization") {
  const SpectralLaw proj = nu_kc(2, 1.0);
  REQUIRE(proj.atoms.size() == 2);
  CHECK(proj.atoms[0].second == doctest::Approx(0.5));
  CHECK(proj.atoms[1].second == doctest::Approx(0.5));
  CHECK(proj.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

  const SpectralLaw quarter = nu_kc(2, 0.25);
  CHECK(quarter.atoms.empty());
  CHECK(quarter.lo == doctest::Approx(0.0669873).epsilon(1e-5));
  CHECK(quarter.hi == doctest::Approx(0.9330127).epsilon(1e-5));

  for (int k : {2, 3, 5}) {
    for (double c : {0.1, 0.25, 0.5, 0.8, 0.95}) {
      const SpectralLaw law = nu_kc(k, c);
      CHECK(law.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(law.mean() ==
            doctest::Approx(1.0 / static_cast<double>(k)).epsilon(1e-4));
    }
  }
  CHECK_THROWS_AS(nu_kc(1, 0.5), ParameterOutOfRange);
  CHECK_THROWS_AS(nu_kc(2, 1.5), ParameterOutOfRange);
}

TEST_CASE("subspace overlap law is normalized") {
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{
           {0.5, 0.5}, {0.94, 0.94}, {0.3, 0.6}}) {
    const SpectralLaw law = subspace_overlap_law(a, b);
    CHECK(law.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
  }
  // Balanced case is the arcsine law on [0, 1].
  const SpectralLaw bal = subspace_overlap_law(0.5, 0.5);
  CHECK(bal.density(0.5) ==
        doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("induced_thresholds: exact k = 2 values and asymptotics") {
  const InducedThresholds t = induced_thresholds(2, 2);
  CHECK(t.witness_c == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t.jordan_c_g2 ==
        doctest::Approx((2.0 - std::numbers::sqrt2) / 4.0).epsilon(1e-14));
  CHECK(t.noise_c_g2 ==
        doctest::Approx(1.0 / (8.0 + 4.0 * std::sqrt(3.0))).epsilon(1e-14));

  const double k = 1e4;
  const InducedThresholds big = induced_thresholds(10000, 2);
  CHECK(k * big.witness_c == doctest::Approx(8.0).epsilon(0.01));
  CHECK(k * big.jordan_c_g2 ==
        doctest::Approx(3.0 - 2.0 * std::numbers::sqrt2).epsilon(0.01));
  CHECK(k * big.noise_c_g2 ==
        doctest::Approx(1.0 / (6.0 + 4.0 * std::numbers::sqrt2)).epsilon(0.01));

  const InducedThresholds bigg = induced_thresholds(2, 10000);
  CHECK(1e8 * bigg.noise_c_g == doctest::Approx(0.25).epsilon(0.01));

  CHECK_THROWS_AS(induced_thresholds(1, 2), ParameterOutOfRange);
}

TEST_CASE("empirical_spectrum basics") {
  const EmpiricalSpectrum id3 =
      empirical_spectrum(HermitianOperator(cmatrix_t::Identity(3, 3)));
  CHECK(id3.eigenvalues == std::vector<double>{1.0, 1.0, 1.0});

  const EmpiricalSpectrum z = empirical_spectrum(HermitianOperator(pauli_z()));
  CHECK(z.eigenvalues.front() == doctest::Approx(-1.0));
  CHECK(z.eigenvalues.back() == doctest::Approx(1.0));

  SeededRng rng(52, 0);
  const HermitianOperator p = random_projection(50, 25, rng);
  const EmpiricalSpectrum obs = empirical_spectrum(
      HermitianOperator(2.0 * p.mat() - cmatrix_t::Identity(50, 50)));
  int plus = 0, minus = 0;
  for (double x : obs.eigenvalues) {
    if (std::abs(x - 1.0) <= 1e-9) ++plus;
    if (std::abs(x + 1.0) <= 1e-9) ++minus;
  }
  CHECK(plus == 25);
  CHECK(minus == 25);
}

TEST_CASE("ks_distance reference cases") {
  // Exact quantiles of the arcsine law.
  const SpectralLaw law = kesten_mckay(2);
  const int n = 1000;
  EmpiricalSpectrum emp;
  emp.dim = n;
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;
    emp.eigenvalues.push_back(-2.0 * std::cos(std::numbers::pi * u));
  }
  CHECK(ks_distance(emp, law) <= 1.0 / n + 1e-3);

  // Z against the symmetric two-atom law.
  SpectralLaw atoms;
  atoms.atoms = {{-1.0, 0.5}, {1.0, 0.5}};
  EmpiricalSpectrum z;
  z.dim = 2;
  z.eigenvalues = {-1.0, 1.0};
  CHECK(ks_distance(z, atoms) <= 1e-12);
}

TEST_CASE("signed projector sums approach the Kesten-McKay law") {
  SeededRng rng(53, 0);
  const Eigen::Index d = 300;
  const int g = 3;
  cmatrix_t sum = cmatrix_t::Zero(d, d);
  for (int x = 0; x < g; ++x) {
    const double sign = (rng.bits() & 1u) ? -1.0 : 1.0;
    const HermitianOperator p = random_projection(d, d / 2, rng);
    sum += sign * (2.0 * p.mat() - cmatrix_t::Identity(d, d));
  }
  const EmpiricalSpectrum emp = empirical_spectrum(HermitianOperator(sum));
  CHECK(ks_distance(emp, kesten_mckay(g)) <= 0.05);
  CHECK(std::abs(emp.eigenvalues.back()) <= 2.0 * std::numbers::sqrt2 + 0.2);
}
