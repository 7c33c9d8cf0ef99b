#include "incompat/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace incompat::sdp {

namespace {

using block_list = std::vector<cmatrix_t>;

double inner(const cmatrix_t& a, const cmatrix_t& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();  // Re Tr(a^H b)
}

// <A_i, X> over the blocks the constraint touches.
double apply_row(const Constraint& con, const block_list& x) {
  double v = 0.0;
  for (const auto& term : con.terms) {
    const cmatrix_t& xb = x[term.block];
    for (const auto& e : term.entries) {
      v += (e.w * xb(e.c, e.r)).real();  // Tr(E_rc X) = X(c, r)
    }
  }
  return v;
}

// Y_b += sum_i y_i A_i^b.
void accumulate_adjoint(const std::vector<Constraint>& cons,
                        const Eigen::VectorXd& y, block_list& out) {
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const double yi = y(static_cast<Eigen::Index>(i));
    if (yi == 0.0) continue;
    for (const auto& term : cons[i].terms) {
      cmatrix_t& m = out[term.block];
      for (const auto& e : term.entries) m(e.r, e.c) += yi * e.w;
    }
  }
}

// Largest alpha in (0, 1] with X + alpha*dX >= 0, scaled by `shrink`;
// computed from the minimum eigenvalue of L^-1 dX L^-H.
double max_step(const block_list& x, const block_list& dx, double shrink) {
  double alpha = 1.0 / shrink;  // allow full step after shrink
  for (std::size_t b = 0; b < x.size(); ++b) {
    Eigen::LLT<cmatrix_t> llt(x[b]);
    if (llt.info() != Eigen::Success) return 0.0;
    const cmatrix_t l = llt.matrixL();
    cmatrix_t w = l.triangularView<Eigen::Lower>().solve(dx[b]);
    w = l.triangularView<Eigen::Lower>().solve(w.adjoint().eval());
    const double lmin =
        Eigen::SelfAdjointEigenSolver<cmatrix_t>(
            0.5 * (w + w.adjoint().eval()), Eigen::EigenvaluesOnly)
            .eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return std::min(1.0, shrink * alpha);
}

struct Workspace {
  // Per block: indices of constraints touching it.
  std::vector<std::vector<int>> touching;
};

}  // namespace

int Problem::add_block(int dim, cmatrix_t c) {
  block_dims.push_back(dim);
  if (c.size() == 0) c = cmatrix_t::Zero(dim, dim);
  cost.push_back(std::move(c));
  return static_cast<int>(block_dims.size()) - 1;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Inaccurate: return "Inaccurate";
    case Status::SolverFailure: return "SolverFailure";
  }
  return "SolverFailure";
}

Solution solve(const Problem& problem, const Options& options) {
  const int nblocks = static_cast<int>(problem.block_dims.size());
  const int m = static_cast<int>(problem.constraints.size());
  const auto& cons = problem.constraints;

  Solution sol;
  sol.y = Eigen::VectorXd::Zero(m);
  if (m == 0 || nblocks == 0) {
    sol.status = Status::SolverFailure;
    return sol;
  }

  double total_dim = 0.0;
  for (int d : problem.block_dims) total_dim += d;

  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) b(i) = cons[i].rhs;
  const double bnorm = b.norm();
  double cnorm = 0.0;
  for (const auto& c : problem.cost) cnorm += c.squaredNorm();
  cnorm = std::sqrt(cnorm);

  Workspace ws;
  ws.touching.assign(nblocks, {});
  for (int i = 0; i < m; ++i) {
    for (const auto& term : cons[i].terms) {
      ws.touching[term.block].push_back(i);
    }
  }

  // Infeasible start on the central ray.
  const double xi = std::max(10.0, std::sqrt(total_dim));
  block_list x(nblocks), z(nblocks);
  for (int bI = 0; bI < nblocks; ++bI) {
    const int d = problem.block_dims[bI];
    x[bI] = xi * cmatrix_t::Identity(d, d);
    z[bI] = xi * cmatrix_t::Identity(d, d);
  }
  Eigen::VectorXd& y = sol.y;

  Eigen::MatrixXd schur(m, m);
  Eigen::VectorXd rp(m), rhs(m), dy(m);
  block_list zinv(nblocks), rd(nblocks), dxa(nblocks), dza(nblocks),
      dx(nblocks), dz(nblocks);

  auto objective = [&](const block_list& blocks) {
    double v = 0.0;
    for (int bI = 0; bI < nblocks; ++bI) v += inner(problem.cost[bI], blocks[bI]);
    return v;
  };

  // Near-degenerate instances can lose digits after the best point is
  // reached; keep the iterate with the smallest merit and report that one.
  struct Snapshot {
    block_list x, z;
    Eigen::VectorXd y;
    double pobj, dobj, gap, pinf, dinf;
    int iter;
  };
  Snapshot best;
  double best_merit = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int iter = 0; iter < options.max_iter; ++iter) {
    // Residuals.
    for (int i = 0; i < m; ++i) rp(i) = b(i) - apply_row(cons[i], x);
    for (int bI = 0; bI < nblocks; ++bI) {
      rd[bI] = problem.cost[bI] - z[bI];
    }
    {
      block_list aty(nblocks);
      for (int bI = 0; bI < nblocks; ++bI) {
        aty[bI] = cmatrix_t::Zero(problem.block_dims[bI], problem.block_dims[bI]);
      }
      accumulate_adjoint(cons, y, aty);
      for (int bI = 0; bI < nblocks; ++bI) rd[bI] -= aty[bI];
    }

    double xz = 0.0;
    for (int bI = 0; bI < nblocks; ++bI) xz += inner(x[bI], z[bI]);
    const double mu = xz / total_dim;

    const double pobj = objective(x);
    const double dobj = b.dot(y);
    const double rel_gap = std::abs(pobj - dobj) /
                           (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pinf = rp.norm() / (1.0 + bnorm);
    double dinf2 = 0.0;
    for (int bI = 0; bI < nblocks; ++bI) dinf2 += rd[bI].squaredNorm();
    const double dinf = std::sqrt(dinf2) / (1.0 + cnorm);

    if (options.verbose) {
      std::printf("it %3d  pobj % .9e dobj % .9e gap %.2e pinf %.2e dinf %.2e\n",
                  iter, pobj, dobj, rel_gap, pinf, dinf);
    }

    const double merit = std::max({rel_gap, pinf, dinf});
    if (merit < best_merit) {
      best_merit = merit;
      best = Snapshot{x, z, y, pobj, dobj, rel_gap, pinf, dinf, iter};
      stall = 0;
    } else if (++stall > 8 || merit > 100.0 * best_merit) {
      break;
    }

    if (rel_gap <= options.tol_gap && pinf <= options.tol_feas &&
        dinf <= options.tol_feas) {
      break;
    }

    // Factor Z blocks.
    bool ok = true;
    for (int bI = 0; bI < nblocks; ++bI) {
      Eigen::LLT<cmatrix_t> llt(z[bI]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      const int d = problem.block_dims[bI];
      zinv[bI] = llt.solve(cmatrix_t::Identity(d, d));
      zinv[bI] = 0.5 * (zinv[bI] + zinv[bI].adjoint().eval());
    }
    if (!ok) break;

    // Schur complement M_ij = Re Tr(A_i X A_j Z^-1), assembled block-wise.
    schur.setZero();
    for (int bI = 0; bI < nblocks; ++bI) {
      const auto& idx = ws.touching[bI];
      if (idx.empty()) continue;
      const int d = problem.block_dims[bI];
      std::vector<cmatrix_t> t(idx.size());
      for (std::size_t j = 0; j < idx.size(); ++j) {
        t[j] = cmatrix_t::Zero(d, d);
        for (const auto& term : cons[idx[j]].terms) {
          if (term.block != bI) continue;
          for (const auto& e : term.entries) {
            t[j] += e.w * (x[bI].col(e.r) * zinv[bI].row(e.c));
          }
        }
      }
      for (std::size_t a = 0; a < idx.size(); ++a) {
        const int ia = idx[a];
        for (std::size_t j = a; j < idx.size(); ++j) {
          double v = 0.0;
          for (const auto& term : cons[ia].terms) {
            if (term.block != bI) continue;
            for (const auto& e : term.entries) {
              v += (e.w * t[j](e.c, e.r)).real();
            }
          }
          schur(ia, idx[j]) += v;
          if (idx[j] != ia) schur(idx[j], ia) += v;
        }
      }
    }

    Eigen::LLT<Eigen::MatrixXd> schur_llt(schur);
    if (schur_llt.info() != Eigen::Success) {
      // Tiny ridge for numerically dependent rows near convergence.
      schur.diagonal().array() += 1e-12 * (1.0 + schur.diagonal().maxCoeff());
      schur_llt.compute(schur);
      if (schur_llt.info() != Eigen::Success) break;
    }

    // rhs common part: rp + A(X) + A(X Rd Z^-1); sigma/corrector terms added
    // per pass via A(K Z^-1) with K the current target matrix.
    auto assemble_rhs = [&](double sigma_mu, const block_list* corr) {
      for (int i = 0; i < m; ++i) rhs(i) = rp(i);
      for (int bI = 0; bI < nblocks; ++bI) {
        const auto& idx = ws.touching[bI];
        if (idx.empty()) continue;
        cmatrix_t k = x[bI] + x[bI] * rd[bI] * zinv[bI];
        if (sigma_mu != 0.0) k -= sigma_mu * zinv[bI];
        if (corr) k += (*corr)[bI] * zinv[bI];
        for (int i : idx) {
          double v = 0.0;
          for (const auto& term : cons[i].terms) {
            if (term.block != bI) continue;
            for (const auto& e : term.entries) v += (e.w * k(e.c, e.r)).real();
          }
          rhs(i) += v;
        }
      }
    };

    auto recover_directions = [&](double sigma_mu, const block_list* corr,
                                  block_list& dx_out, block_list& dz_out) {
      // dZ = Rd - At(dy); dX = sigma_mu Z^-1 - X - X dZ Z^-1 - corr Z^-1.
      for (int bI = 0; bI < nblocks; ++bI) {
        dz_out[bI] = rd[bI];
      }
      {
        block_list aty(nblocks);
        for (int bI = 0; bI < nblocks; ++bI) {
          aty[bI] =
              cmatrix_t::Zero(problem.block_dims[bI], problem.block_dims[bI]);
        }
        accumulate_adjoint(cons, dy, aty);
        for (int bI = 0; bI < nblocks; ++bI) dz_out[bI] -= aty[bI];
      }
      for (int bI = 0; bI < nblocks; ++bI) {
        cmatrix_t v = -x[bI] - x[bI] * dz_out[bI] * zinv[bI];
        if (sigma_mu != 0.0) v += sigma_mu * zinv[bI];
        if (corr) v -= (*corr)[bI] * zinv[bI];
        dx_out[bI] = 0.5 * (v + v.adjoint().eval());
      }
    };

    // Predictor (affine scaling).
    assemble_rhs(0.0, nullptr);
    dy = schur_llt.solve(rhs);
    recover_directions(0.0, nullptr, dxa, dza);

    const double ap_aff = max_step(x, dxa, 1.0);
    const double ad_aff = max_step(z, dza, 1.0);
    double xz_aff = 0.0;
    for (int bI = 0; bI < nblocks; ++bI) {
      xz_aff += inner(x[bI] + ap_aff * dxa[bI], z[bI] + ad_aff * dza[bI]);
    }
    double sigma = std::pow(std::max(0.0, xz_aff / xz), 3.0);
    sigma = std::min(1.0, std::max(sigma, 1e-10));

    // Corrector with Mehrotra second-order term dXa dZa.
    block_list corr(nblocks);
    for (int bI = 0; bI < nblocks; ++bI) corr[bI] = dxa[bI] * dza[bI];
    assemble_rhs(sigma * mu, &corr);
    dy = schur_llt.solve(rhs);
    recover_directions(sigma * mu, &corr, dx, dz);

    const double shrink = (mu < 1e-6) ? 0.999 : 0.98;
    const double ap = max_step(x, dx, shrink);
    const double ad = max_step(z, dz, shrink);
    if (ap <= 1e-12 || ad <= 1e-12) break;

    for (int bI = 0; bI < nblocks; ++bI) {
      x[bI] += ap * dx[bI];
      x[bI] = 0.5 * (x[bI] + x[bI].adjoint().eval());
      z[bI] += ad * dz[bI];
      z[bI] = 0.5 * (z[bI] + z[bI].adjoint().eval());
    }
    y += ad * dy;
  }

  if (std::isfinite(best_merit)) {
    sol.x = std::move(best.x);
    sol.z = std::move(best.z);
    sol.y = std::move(best.y);
    sol.primal_value = best.pobj;
    sol.dual_value = best.dobj;
    sol.rel_gap = best.gap;
    sol.primal_infeas = best.pinf;
    sol.dual_infeas = best.dinf;
    sol.iterations = best.iter;
  } else {
    sol.x = std::move(x);
    sol.z = std::move(z);
  }

  if (sol.rel_gap <= 1e-7 && sol.primal_infeas <= 1e-8 &&
      sol.dual_infeas <= 1e-8) {
    sol.status = Status::Optimal;
  } else if (sol.rel_gap <= 1e-5 && sol.primal_infeas <= 1e-6 &&
             sol.dual_infeas <= 1e-6) {
    sol.status = Status::Inaccurate;
  } else {
    sol.status = Status::SolverFailure;
  }
  return sol;
}

void append_matrix_equality(Problem& p, const std::vector<MatrixTerm>& terms,
                            const std::vector<ScalarIdentityTerm>& scalars,
                            const cmatrix_t& rhs) {
  const int d = static_cast<int>(rhs.rows());
  // Diagonal rows.
  for (int r = 0; r < d; ++r) {
    Constraint con;
    for (const auto& t : terms) {
      con.terms.push_back({t.block, {Entry{r, r, complex_t(t.scale, 0.0)}}});
    }
    for (const auto& s : scalars) {
      con.terms.push_back({s.block, {Entry{0, 0, complex_t(s.scale, 0.0)}}});
    }
    con.rhs = rhs(r, r).real();
    p.add_constraint(std::move(con));
  }
  // Off-diagonal rows: 2 Re X(r,c) and 2 Im X(r,c).
  for (int r = 0; r < d; ++r) {
    for (int c = r + 1; c < d; ++c) {
      Constraint re;
      for (const auto& t : terms) {
        re.terms.push_back({t.block,
                            {Entry{r, c, complex_t(t.scale, 0.0)},
                             Entry{c, r, complex_t(t.scale, 0.0)}}});
      }
      re.rhs = 2.0 * rhs(r, c).real();
      p.add_constraint(std::move(re));

      Constraint im;
      for (const auto& t : terms) {
        im.terms.push_back({t.block,
                            {Entry{r, c, complex_t(0.0, t.scale)},
                             Entry{c, r, complex_t(0.0, -t.scale)}}});
      }
      im.rhs = 2.0 * rhs(r, c).imag();
      p.add_constraint(std::move(im));
    }
  }
}

void append_trace_equality(Problem& p,
                           const std::vector<std::pair<int, double>>& blocks,
                           double rhs) {
  Constraint con;
  for (const auto& [blockI, scale] : blocks) {
    ConstraintBlock cb;
    cb.block = blockI;
    const int d = p.block_dims[blockI];
    for (int r = 0; r < d; ++r) cb.entries.push_back({r, r, complex_t(scale, 0.0)});
    con.terms.push_back(std::move(cb));
  }
  con.rhs = rhs;
  p.add_constraint(std::move(con));
}

}  // namespace incompat::sdp
