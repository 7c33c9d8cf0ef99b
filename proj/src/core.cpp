#include "incompat/core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>

namespace incompat {

HermitianOperator::HermitianOperator(cmatrix_t m, double tol) {
  if (m.rows() != m.cols()) {
    throw NonHermitian("matrix is not square");
  }
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!(dev <= tol)) {
    std::ostringstream oss;
    oss << "matrix is not Hermitian: symmetry deviation " << dev;
    throw NonHermitian(oss.str());
  }
  mat_ = 0.5 * (m + m.adjoint().eval());
}

rvector_t HermitianOperator::eigenvalues() const {
  return hermitian_eigenvalues(mat_);
}

double HermitianOperator::lambda_min() const {
  return eigenvalues()(0);
}

double HermitianOperator::lambda_max() const {
  return eigenvalues()(dim() - 1);
}

rvector_t hermitian_eigenvalues(const cmatrix_t& m) {
  Eigen::SelfAdjointEigenSolver<cmatrix_t> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();  // ascending
}

double lambda_min(const cmatrix_t& m) {
  return hermitian_eigenvalues(m)(0);
}

double lambda_max(const cmatrix_t& m) {
  return hermitian_eigenvalues(m)(m.rows() - 1);
}

double operator_norm(const cmatrix_t& m) {
  if (is_hermitian(m, 1e-10)) {
    const rvector_t ev = hermitian_eigenvalues(0.5 * (m + m.adjoint().eval()));
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  Eigen::JacobiSVD<cmatrix_t> svd(m);
  return svd.singularValues()(0);
}

std::vector<Eigen::Index> MeasurementSet::outcome_counts() const {
  std::vector<Eigen::Index> counts;
  counts.reserve(povms.size());
  for (const auto& p : povms) counts.push_back(p.outcomes());
  return counts;
}

Povm validate_povm(const std::vector<cmatrix_t>& effects) {
  std::vector<HermitianOperator> ops;
  ops.reserve(effects.size());
  for (const auto& e : effects) ops.emplace_back(e);
  return validate_povm(ops);
}

Povm validate_povm(const std::vector<HermitianOperator>& effects) {
  if (effects.empty()) {
    throw Error("POVM needs at least one effect");
  }
  const Eigen::Index d = effects.front().dim();
  for (const auto& e : effects) {
    if (e.dim() != d) {
      throw DimensionMismatch("POVM effects have mixed dimensions");
    }
  }
  for (std::size_t i = 0; i < effects.size(); ++i) {
    const double lmin = effects[i].lambda_min();
    if (lmin < -kPsdFloor) {
      std::ostringstream oss;
      oss << "effect " << i << " is not positive semidefinite: lambda_min = "
          << lmin;
      throw NegativeEffect(oss.str(), lmin);
    }
  }
  cmatrix_t sum = cmatrix_t::Zero(d, d);
  for (const auto& e : effects) sum += e.mat();
  const double dev = (sum - cmatrix_t::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > 1e-9) {
    std::ostringstream oss;
    oss << "effects do not sum to identity: deviation " << dev;
    throw NotNormalized(oss.str(), dev);
  }
  Povm povm;
  povm.dim = d;
  povm.effects = effects;
  return povm;
}

MeasurementSet make_measurement_set(std::vector<Povm> povms) {
  if (povms.empty()) {
    throw Error("measurement set needs at least one POVM");
  }
  const Eigen::Index d = povms.front().dim;
  for (const auto& p : povms) {
    if (p.dim != d) {
      throw DimensionMismatch("POVMs in a set must share one dimension");
    }
  }
  MeasurementSet set;
  set.dim = d;
  set.povms = std::move(povms);
  return set;
}

Povm apply_white_noise(const Povm& povm, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw TOutOfRange("noise parameter t must lie in [0, 1]");
  }
  const Eigen::Index d = povm.dim;
  const double k = static_cast<double>(povm.outcomes());
  std::vector<HermitianOperator> noisy;
  noisy.reserve(povm.effects.size());
  for (const auto& e : povm.effects) {
    noisy.emplace_back(t * e.mat() +
                       ((1.0 - t) / k) * cmatrix_t::Identity(d, d));
  }
  return validate_povm(noisy);
}

MeasurementSet apply_white_noise(const MeasurementSet& set, double t) {
  std::vector<Povm> noisy;
  noisy.reserve(set.povms.size());
  for (const auto& p : set.povms) noisy.push_back(apply_white_noise(p, t));
  return make_measurement_set(std::move(noisy));
}

DichotomicObservable observable_of(const Povm& povm) {
  if (povm.outcomes() != 2) {
    throw NotDichotomic("observable_of requires exactly two effects");
  }
  const Eigen::Index d = povm.dim;
  return make_observable(2.0 * povm.effects[0].mat() -
                         cmatrix_t::Identity(d, d));
}

DichotomicObservable make_observable(const cmatrix_t& a, double tol) {
  HermitianOperator op(a);
  const rvector_t ev = op.eigenvalues();
  if (ev(0) < -1.0 - tol || ev(ev.size() - 1) > 1.0 + tol) {
    throw ParameterOutOfRange("observable spectrum must lie in [-1, 1]");
  }
  DichotomicObservable obs;
  obs.dim = op.dim();
  obs.a = std::move(op);
  return obs;
}

Povm povm_of(const DichotomicObservable& obs) {
  const Eigen::Index d = obs.dim;
  const cmatrix_t id = cmatrix_t::Identity(d, d);
  return validate_povm(
      std::vector<cmatrix_t>{0.5 * (id + obs.a.mat()), 0.5 * (id - obs.a.mat())});
}

bool is_projective(const Povm& povm, double tol) {
  for (const auto& e : povm.effects) {
    const cmatrix_t diff = e.mat() * e.mat() - e.mat();
    if (diff.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

cmatrix_t pauli_x() {
  cmatrix_t m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

cmatrix_t pauli_y() {
  cmatrix_t m(2, 2);
  m << 0, complex_t(0, -1), complex_t(0, 1), 0;
  return m;
}

cmatrix_t pauli_z() {
  cmatrix_t m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

namespace {

cmatrix_t kron(const cmatrix_t& a, const cmatrix_t& b) {
  cmatrix_t out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Z^{x(j-1)} (x) S (x) I^{x(m-j)} on m qubits, S in slot j (1-based).
cmatrix_t z_chain(int m, int slot, const cmatrix_t& s) {
  cmatrix_t out = cmatrix_t::Identity(1, 1);
  for (int q = 1; q <= m; ++q) {
    if (q < slot) {
      out = kron(out, pauli_z());
    } else if (q == slot) {
      out = kron(out, s);
    } else {
      out = kron(out, cmatrix_t::Identity(2, 2));
    }
  }
  return out;
}

}  // namespace

std::vector<DichotomicObservable> pauli_basis(int g) {
  if (g < 1) {
    throw ParameterOutOfRange("pauli_basis requires g >= 1");
  }
  const int m = (g - 1 + 1) / 2;  // ceil((g-1)/2)
  std::vector<cmatrix_t> chain;
  if (m == 0) {
    chain.push_back(cmatrix_t::Identity(1, 1));
  } else {
    chain.push_back(z_chain(m, m + 1, cmatrix_t::Identity(1, 1)));  // Z^{xm}
    for (int j = 1; j <= m; ++j) {
      chain.push_back(z_chain(m, j, pauli_x()));
      chain.push_back(z_chain(m, j, pauli_y()));
    }
  }
  std::vector<DichotomicObservable> out;
  out.reserve(g);
  for (int x = 0; x < g; ++x) out.push_back(make_observable(chain[x]));
  return out;
}

cmatrix_t fourier_matrix(Eigen::Index d) {
  if (d < 1) throw ParameterOutOfRange("fourier_matrix requires d >= 1");
  cmatrix_t f(d, d);
  const double w = 2.0 * std::numbers::pi / static_cast<double>(d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      f(j, k) = std::polar(norm, w * static_cast<double>(j * k));
    }
  }
  return f;
}

Povm basis_measurement(const cmatrix_t& unitary) {
  const Eigen::Index d = unitary.rows();
  std::vector<cmatrix_t> effects;
  effects.reserve(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    effects.push_back(unitary.col(i) * unitary.col(i).adjoint());
  }
  return validate_povm(effects);
}

}  // namespace incompat
