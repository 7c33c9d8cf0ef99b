#ifndef INCOMPAT_SDP_HPP
#define INCOMPAT_SDP_HPP

#include <string>
#include <vector>

#include "incompat/core.hpp"

namespace incompat::sdp {

/// One w * E_{rc} term of a sparse Hermitian constraint matrix. The entry
/// list of a constraint block must sum to a Hermitian matrix.
struct Entry {
  int r = 0;
  int c = 0;
  complex_t w{0.0, 0.0};
};

struct ConstraintBlock {
  int block = 0;
  std::vector<Entry> entries;
};

/// <A_i, X> = b_i with A_i given blockwise by sparse entries.
struct Constraint {
  std::vector<ConstraintBlock> terms;
  double rhs = 0.0;
};

/// Standard-form conic program over Hermitian PSD blocks:
///   minimize sum_b <C_b, X_b>  s.t.  <A_i, X> = b_i,  X_b >= 0.
struct Problem {
  std::vector<int> block_dims;
  std::vector<cmatrix_t> cost;  // one Hermitian C_b per block (may be zero)
  std::vector<Constraint> constraints;

  int add_block(int dim, cmatrix_t c = cmatrix_t());
  void add_constraint(Constraint c) { constraints.push_back(std::move(c)); }
};

enum class Status { Optimal, Infeasible, Inaccurate, SolverFailure };

std::string to_string(Status s);

struct Options {
  double tol_gap = 1e-9;    // relative duality gap target
  double tol_feas = 1e-10;  // relative primal/dual residual target
  int max_iter = 120;
  bool verbose = false;
};

struct Solution {
  Status status = Status::SolverFailure;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double rel_gap = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  int iterations = 0;
  std::vector<cmatrix_t> x;  // primal blocks
  std::vector<cmatrix_t> z;  // dual slack blocks
  Eigen::VectorXd y;         // equality multipliers
};

/// HKM predictor-corrector interior-point method (infeasible start).
Solution solve(const Problem& problem, const Options& options = {});

/// scale * X_b for a d x d block sharing the equality rows.
struct MatrixTerm {
  int block = 0;
  double scale = 1.0;
};

/// scale * x_b * I_d for a 1 x 1 block (enters diagonal rows only).
struct ScalarIdentityTerm {
  int block = 0;
  double scale = 1.0;
};

// A d x d Hermitian matrix equality expands into d^2 real rows: the diagonal,
// then 2Re / 2Im of the strict upper triangle.
void append_matrix_equality(Problem& p, const std::vector<MatrixTerm>& terms,
                            const std::vector<ScalarIdentityTerm>& scalars,
                            const cmatrix_t& rhs);

/// Single row sum_b scale_b * Tr(X_b) = rhs.
void append_trace_equality(Problem& p,
                           const std::vector<std::pair<int, double>>& blocks,
                           double rhs);

}  // namespace incompat::sdp

#endif
