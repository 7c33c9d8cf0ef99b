#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "incompat/sampling.hpp"

using namespace incompat;

TEST_CASE("same seed and stream reproduce identical samples") {
  SeededRng a(42, 3);
  SeededRng b(42, 3);
  const cmatrix_t ua = haar_unitary(6, a);
  const cmatrix_t ub = haar_unitary(6, b);
  CHECK((ua - ub).cwiseAbs().maxCoeff() == 0.0);

  SeededRng c(42, 4);
  const cmatrix_t uc = haar_unitary(6, c);
  CHECK((ua - uc).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("haar unitary is unitary; d = 1 is a uniform phase") {
  SeededRng rng(1, 0);
  for (Eigen::Index d : {1, 2, 5, 17}) {
    const cmatrix_t u = haar_unitary(d, rng);
    CHECK((u.adjoint() * u - cmatrix_t::Identity(d, d)).cwiseAbs().maxCoeff() <=
          1e-10);
  }
  double mean_re = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const cmatrix_t u = haar_unitary(1, rng);
    CHECK(std::abs(std::abs(u(0, 0)) - 1.0) <= 1e-12);
    mean_re += u(0, 0).real();
  }
  // Uniform phase: E[Re] = 0, sd of the mean = 1/sqrt(2n).
  CHECK(std::abs(mean_re / n) <= 4.0 / std::sqrt(2.0 * n));
}

TEST_CASE("haar first moment: E[U rho U^H] = Tr(rho) I / d") {
  const Eigen::Index d = 4;
  SeededRng rng(7, 1);
  cmatrix_t rho = cmatrix_t::Zero(d, d);
  rho(0, 0) = 0.7;
  rho(1, 1) = 0.2;
  rho(2, 3) = complex_t(0.05, 0.02);
  rho(3, 2) = complex_t(0.05, -0.02);
  rho(3, 3) = 0.1;
  const int n = 10000;
  cmatrix_t mean = cmatrix_t::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const cmatrix_t u = haar_unitary(d, rng);
    mean += u * rho * u.adjoint();
  }
  mean /= static_cast<double>(n);
  // Entry fluctuations are O(1/sqrt(n)); allow 3 sigma with sd <= 1/sqrt(d n).
  const double tol = 3.0 / std::sqrt(static_cast<double>(d) * n);
  CHECK((mean - 0.25 * cmatrix_t::Identity(d, d)).cwiseAbs().maxCoeff() <= tol);
}

TEST_CASE("|U_11|^2 follows the Beta(1, d-1) law (KS <= 0.01)") {
  const Eigen::Index d = 8;
  const int n = 100000;
  SeededRng rng(5, 2);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = std::norm(haar_unitary(d, rng)(0, 0));
  }
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::pow(1.0 - xs[i], static_cast<double>(d - 1));
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
  }
  CHECK(ks <= 0.01);
}

TEST_CASE("entry moduli match the Beta law at permuted positions (chi^2)") {
  // The phase-corrected sampler has no preferred row or column; bin
  // |U_ij|^2 through the Beta(1, d-1) CDF and test uniformity per position.
  const Eigen::Index d = 6;
  const int n = 20000;
  const int bins = 10;
  SeededRng rng(9, 4);
  const std::vector<std::pair<int, int>> positions = {
      {0, 0}, {0, d - 1}, {d - 1, 0}, {2, 3}, {d - 1, d - 1}};
  std::vector<std::vector<int>> counts(positions.size(),
                                       std::vector<int>(bins, 0));
  for (int i = 0; i < n; ++i) {
    const cmatrix_t u = haar_unitary(d, rng);
    for (std::size_t p = 0; p < positions.size(); ++p) {
      const double x = std::norm(u(positions[p].first, positions[p].second));
      const double cdf = 1.0 - std::pow(1.0 - x, static_cast<double>(d - 1));
      int b = std::min(bins - 1, static_cast<int>(cdf * bins));
      ++counts[p][static_cast<std::size_t>(b)];
    }
  }
  const double expected = static_cast<double>(n) / bins;
  for (const auto& c : counts) {
    double chi2 = 0.0;
    for (int b = 0; b < bins; ++b) {
      const double diff = c[static_cast<std::size_t>(b)] - expected;
      chi2 += diff * diff / expected;
    }
    // 9 dof; 27.9 is the 99.9% quantile.
    CHECK(chi2 <= 27.9);
  }
}

TEST_CASE("random projection spectrum and invariance basics") {
  SeededRng rng(12, 0);
  const HermitianOperator zero = random_projection(4, 0, rng);
  CHECK(zero.mat().norm() == doctest::Approx(0.0));
  const HermitianOperator id = random_projection(4, 4, rng);
  CHECK((id.mat() - cmatrix_t::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);

  const HermitianOperator p = random_projection(100, 50, rng);
  const rvector_t ev = p.eigenvalues();
  for (int i = 0; i < 50; ++i) CHECK(std::abs(ev(i)) <= 1e-10);
  for (int i = 50; i < 100; ++i) CHECK(std::abs(ev(i) - 1.0) <= 1e-10);
  CHECK(p.trace() == doctest::Approx(50.0).epsilon(1e-12));
  CHECK((p.mat() * p.mat() - p.mat()).cwiseAbs().maxCoeff() <= 1e-10);

  CHECK_THROWS_AS(random_projection(3, 4, rng), RankOutOfRange);
}

TEST_CASE("random basis measurement is projective and orthogonal") {
  SeededRng rng(13, 0);
  const Povm one = random_basis_measurement(1, rng);
  CHECK(one.effects[0].mat()(0, 0).real() == doctest::Approx(1.0));

  const Povm p = random_basis_measurement(5, rng);
  CHECK(is_projective(p, 1e-10));
  cmatrix_t sum = cmatrix_t::Zero(5, 5);
  for (const auto& e : p.effects) sum += e.mat();
  CHECK((sum - cmatrix_t::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);

  const Povm q = random_basis_measurement(2, rng);
  CHECK(std::abs((q.effects[0].mat() * q.effects[1].mat()).trace()) <= 1e-10);
}

TEST_CASE("random subspace basics") {
  SeededRng rng(14, 0);
  const Subspace full = random_subspace(3, 3, rng);
  CHECK((full.projector() - cmatrix_t::Identity(3, 3)).cwiseAbs().maxCoeff() <=
        1e-10);

  const Subspace s = random_subspace(6, 3, rng);
  CHECK((s.basis.adjoint() * s.basis - cmatrix_t::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
  const cmatrix_t proj = s.projector();
  CHECK((proj * proj - proj).cwiseAbs().maxCoeff() <= 1e-10);

  // Uniform unit vector: E[|<e_1|v>|^2] = 1/d.
  const Eigen::Index d = 5;
  const int n = 100000;
  double mean = 0.0;
  double second = 0.0;
  for (int i = 0; i < n; ++i) {
    const Subspace line = random_subspace(d, 1, rng);
    const double v = std::norm(line.basis(0, 0));
    mean += v;
    second += v * v;
  }
  mean /= n;
  second /= n;
  const double sd = std::sqrt((second - mean * mean) / n);
  CHECK(std::abs(mean - 1.0 / static_cast<double>(d)) <= 3.0 * sd);
}

TEST_CASE("induced POVM: projective at c = 1, valid in general") {
  SeededRng rng(15, 0);
  const Povm qubit = random_induced_povm(2, 2, 1, rng);
  CHECK(is_projective(qubit, 1e-9));
  CHECK(qubit.outcomes() == 2);

  const Povm p = random_induced_povm(4, 2, 16, rng);
  double tr = 0.0;
  for (const auto& e : p.effects) tr += e.trace();
  CHECK(tr == doctest::Approx(4.0).epsilon(1e-10));

  CHECK_THROWS_AS(random_induced_povm(8, 2, 3, rng), AncillaTooSmall);
}
