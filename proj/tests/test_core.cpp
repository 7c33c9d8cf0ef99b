#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "incompat/core.hpp"
#include "incompat/json_io.hpp"
#include "incompat/rng.hpp"

using namespace incompat;

namespace {

cmatrix_t diag2(double a, double b) {
  cmatrix_t m = cmatrix_t::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("validate_povm accepts the trivial POVM") {
  const cmatrix_t half = 0.5 * cmatrix_t::Identity(2, 2);
  const Povm p = validate_povm({half, half});
  CHECK(p.dim == 2);
  CHECK(p.outcomes() == 2);
}

TEST_CASE("validate_povm accepts a projective basis measurement") {
  const Povm p = validate_povm({diag2(1, 0), diag2(0, 1)});
  CHECK(is_projective(p, 1e-12));
}

TEST_CASE("validate_povm rejects a negative effect and reports it") {
  try {
    validate_povm({diag2(1.2, 0), diag2(-0.2, 1)});
    FAIL("expected NegativeEffect");
  } catch (const NegativeEffect& e) {
    CHECK(e.worst_eigenvalue == doctest::Approx(-0.2).epsilon(1e-9));
  }
}

TEST_CASE("validate_povm rejects unnormalized effect lists") {
  CHECK_THROWS_AS(validate_povm({diag2(0.5, 0.5), diag2(0.4, 0.5)}),
                  NotNormalized);
}

TEST_CASE("validate_povm rejects non-Hermitian input") {
  cmatrix_t m = cmatrix_t::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(validate_povm({m, cmatrix_t::Identity(2, 2) - m}),
                  NonHermitian);
}

TEST_CASE("white noise endpoints") {
  const Povm basis = validate_povm({diag2(1, 0), diag2(0, 1)});

  const Povm same = apply_white_noise(basis, 1.0);
  CHECK((same.effects[0].mat() - basis.effects[0].mat()).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));

  const Povm flat = apply_white_noise(basis, 0.0);
  CHECK((flat.effects[0].mat() - 0.5 * cmatrix_t::Identity(2, 2)).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));

  const Povm mid = apply_white_noise(basis, 0.5);
  CHECK(mid.effects[0].mat()(0, 0).real() == doctest::Approx(0.75));
  CHECK(mid.effects[0].mat()(1, 1).real() == doctest::Approx(0.25));
  CHECK(mid.effects[1].mat()(0, 0).real() == doctest::Approx(0.25));
  CHECK(mid.effects[1].mat()(1, 1).real() == doctest::Approx(0.75));

  CHECK_THROWS_AS(apply_white_noise(basis, 1.5), TOutOfRange);
}

TEST_CASE("white noise composes multiplicatively in t") {
  SeededRng rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    cmatrix_t e(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) e(i, j) = complex_t(rng.normal(), rng.normal());
    }
    e = 0.5 * (e + e.adjoint().eval());
    // Squash into a valid effect.
    e = 0.5 * cmatrix_t::Identity(3, 3) + 0.1 * e / (1.0 + e.cwiseAbs().maxCoeff());
    const Povm p = validate_povm({e, cmatrix_t::Identity(3, 3) - e});
    const double t = rng.uniform();
    const double s = rng.uniform();
    const Povm ab = apply_white_noise(apply_white_noise(p, t), s);
    const Povm c = apply_white_noise(p, t * s);
    for (int i = 0; i < 2; ++i) {
      CHECK((ab.effects[i].mat() - c.effects[i].mat()).cwiseAbs().maxCoeff() <=
            1e-12);
    }
  }
}

TEST_CASE("observable round trip") {
  const Povm trivial = validate_povm(
      {0.5 * cmatrix_t::Identity(2, 2), 0.5 * cmatrix_t::Identity(2, 2)});
  CHECK(observable_of(trivial).a.mat().norm() ==
        doctest::Approx(0.0).epsilon(1e-14));

  const Povm basis = validate_povm({diag2(1, 0), diag2(0, 1)});
  CHECK((observable_of(basis).a.mat() - pauli_z()).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));

  // Rank-r projector pair on d = 5.
  cmatrix_t p = cmatrix_t::Zero(5, 5);
  p(0, 0) = p(1, 1) = 1.0;
  const Povm pair = validate_povm({p, cmatrix_t::Identity(5, 5) - p});
  const DichotomicObservable a = observable_of(pair);
  const rvector_t ev = a.a.eigenvalues();
  CHECK(ev(0) == doctest::Approx(-1.0));
  CHECK(ev(4) == doctest::Approx(1.0));
  int plus = 0;
  for (int i = 0; i < 5; ++i) {
    if (ev(i) > 0) ++plus;
  }
  CHECK(plus == 2);

  const Povm back = povm_of(a);
  for (int i = 0; i < 2; ++i) {
    CHECK((back.effects[i].mat() - pair.effects[i].mat()).cwiseAbs().maxCoeff() <=
          1e-12);
  }

  CHECK_THROWS_AS(observable_of(Povm{2, {HermitianOperator(diag2(1, 1))}}),
                  NotDichotomic);
}

TEST_CASE("is_projective distinguishes noisy bases") {
  const Povm basis = validate_povm({diag2(1, 0), diag2(0, 1)});
  CHECK(is_projective(basis, 1e-10));
  CHECK_FALSE(is_projective(apply_white_noise(basis, 0.5), 1e-10));
  const Povm whole = validate_povm({cmatrix_t::Identity(3, 3)});
  CHECK(is_projective(whole, 1e-10));
}

TEST_CASE("pauli_basis small cases") {
  const auto g2 = pauli_basis(2);
  CHECK(g2.size() == 2);
  CHECK((g2[0].a.mat() - pauli_z()).norm() == doctest::Approx(0.0));
  CHECK((g2[1].a.mat() - pauli_x()).norm() == doctest::Approx(0.0));

  const auto g3 = pauli_basis(3);
  CHECK((g3[2].a.mat() - pauli_y()).norm() == doctest::Approx(0.0));
}

TEST_CASE("pauli_basis anticommutation and trace orthogonality") {
  for (int g : {2, 3, 4, 5, 6, 7}) {
    const auto obs = pauli_basis(g);
    const Eigen::Index d = obs.front().dim;
    CHECK(d == (Eigen::Index{1} << ((g - 1 + 1) / 2)));
    for (int x = 0; x < g; ++x) {
      const cmatrix_t& ax = obs[x].a.mat();
      CHECK((ax * ax - cmatrix_t::Identity(d, d)).cwiseAbs().maxCoeff() <=
            1e-12);
      for (int y = 0; y < g; ++y) {
        const cmatrix_t& ay = obs[y].a.mat();
        const double tr = (ax * ay).trace().real();
        if (x == y) {
          CHECK(tr == doctest::Approx(static_cast<double>(d)));
        } else {
          CHECK(std::abs(tr) <= 1e-12);
          CHECK((ax * ay + ay * ax).cwiseAbs().maxCoeff() <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("fourier matrix is a MUB partner of the identity") {
  for (Eigen::Index d : {2, 3, 5}) {
    const cmatrix_t f = fourier_matrix(d);
    CHECK((f.adjoint() * f - cmatrix_t::Identity(d, d)).cwiseAbs().maxCoeff() <=
          1e-12);
    CHECK((f.cwiseAbs().array() - 1.0 / std::sqrt(static_cast<double>(d)))
              .abs()
              .maxCoeff() <= 1e-12);
  }
}

TEST_CASE("povm and measurement set JSON round trip") {
  SeededRng rng(3, 7);
  cmatrix_t e(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) e(i, j) = complex_t(rng.normal(), rng.normal());
  }
  e = 0.5 * (e + e.adjoint().eval());
  e = 0.4 * cmatrix_t::Identity(3, 3) + 0.05 * e / e.cwiseAbs().maxCoeff();
  const Povm p = validate_povm({e, cmatrix_t::Identity(3, 3) - e});
  const Povm q = povm_from_json(povm_to_json(p));
  for (int i = 0; i < 2; ++i) {
    CHECK((p.effects[i].mat() - q.effects[i].mat()).norm() ==
          doctest::Approx(0.0).epsilon(1e-15));
  }

  const MeasurementSet set = make_measurement_set({p, p});
  const MeasurementSet round = measurement_set_from_json(measurement_set_to_json(set));
  CHECK(round.dim == 3);
  CHECK(round.outcome_counts() == set.outcome_counts());
}
