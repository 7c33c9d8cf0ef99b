#ifndef INCOMPAT_ERRORS_HPP
#define INCOMPAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace incompat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonHermitian : Error {
  explicit NonHermitian(const std::string& what) : Error(what) {}
};

struct NegativeEffect : Error {
  NegativeEffect(const std::string& what, double worst)
      : Error(what), worst_eigenvalue(worst) {}
  double worst_eigenvalue;
};

struct NotNormalized : Error {
  NotNormalized(const std::string& what, double dev)
      : Error(what), deviation(dev) {}
  double deviation;  // ||sum E_i - I||_inf
};

struct TOutOfRange : Error {
  using Error::Error;
};

struct NotDichotomic : Error {
  using Error::Error;
};

struct RankOutOfRange : Error {
  using Error::Error;
};

struct AncillaTooSmall : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct GTooLarge : Error {
  using Error::Error;
};

struct ProblemTooLarge : Error {
  using Error::Error;
};

struct ParameterOutOfRange : Error {
  using Error::Error;
};

struct SolverFailure : Error {
  using Error::Error;
};

struct NoNontrivialAngle : Error {
  using Error::Error;
};

struct SinZero : Error {
  using Error::Error;
};

struct QuadratureFailure : Error {
  using Error::Error;
};

struct ConfigInvalid : Error {
  using Error::Error;
};

}  // namespace incompat

#endif
