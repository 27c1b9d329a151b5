#include "qrg/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

namespace qrg {

namespace detail {

RealVector svec(const RealMatrix& x) {
  const Eigen::Index d = x.rows();
  RealVector v(d * (d + 1) / 2);
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    v(p++) = x(i, i);
    for (Eigen::Index j = i + 1; j < d; ++j) v(p++) = std::sqrt(2.0) * x(i, j);
  }
  return v;
}

RealMatrix smat(const RealVector& v, Eigen::Index d) {
  RealMatrix x(d, d);
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    x(i, i) = v(p++);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      x(i, j) = x(j, i) = v(p++) / std::sqrt(2.0);
    }
  }
  return x;
}

namespace {

struct SvecIndex {
  Eigen::Index i;
  Eigen::Index j;
  double scale;  // 1/2 on the diagonal, 1/sqrt2 off it
};

std::vector<SvecIndex> svec_layout(Eigen::Index d) {
  std::vector<SvecIndex> out;
  out.reserve(static_cast<std::size_t>(d * (d + 1) / 2));
  for (Eigen::Index i = 0; i < d; ++i) {
    out.push_back({i, i, 0.5});
    for (Eigen::Index j = i + 1; j < d; ++j) out.push_back({i, j, 1.0 / std::sqrt(2.0)});
  }
  return out;
}

// H_pq = sum_a Tr(W_a B_p W_a B_q) with B_p = s_p (E_ij + E_ji), which for
// symmetric W reduces to 2 s_p s_q (W_ik W_jl + W_il W_jk). With rows[i]
// stacking row i of every W_a, the sum over a for all (k, l) at once is
// C = rows[i]^T rows[j], and the bracket is C_kl + C_lk.
void hessian_row(const std::vector<RealMatrix>& rows, const std::vector<SvecIndex>& layout,
                 std::size_t p, RealMatrix& h) {
  const SvecIndex& bp = layout[p];
  const RealMatrix c =
      rows[static_cast<std::size_t>(bp.i)].transpose() * rows[static_cast<std::size_t>(bp.j)];
  for (std::size_t q = p; q < layout.size(); ++q) {
    const SvecIndex& bq = layout[q];
    const double acc = c(bq.i, bq.j) + c(bq.j, bq.i);
    h(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = 2.0 * bp.scale * bq.scale * acc;
  }
}

// rows[i](a, :) = row i of W_a
std::vector<RealMatrix> stack_rows(const std::vector<RealMatrix>& ws) {
  const Eigen::Index d = ws.front().rows();
  const auto count = static_cast<Eigen::Index>(ws.size());
  std::vector<RealMatrix> rows(static_cast<std::size_t>(d), RealMatrix(count, d));
  for (Eigen::Index a = 0; a < count; ++a) {
    for (Eigen::Index i = 0; i < d; ++i) {
      rows[static_cast<std::size_t>(i)].row(a) = ws[static_cast<std::size_t>(a)].row(i);
    }
  }
  return rows;
}

RealMatrix hessian_impl(const std::vector<RealMatrix>& ws, bool parallel) {
  if (ws.empty()) return RealMatrix();
  const Eigen::Index d = ws.front().rows();
  const auto layout = svec_layout(d);
  const Eigen::Index n = static_cast<Eigen::Index>(layout.size());
  RealMatrix h = RealMatrix::Zero(n, n);
  const std::vector<RealMatrix> rows = stack_rows(ws);
  const auto count = static_cast<std::int64_t>(layout.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t p = 0; p < count; ++p) hessian_row(rows, layout, static_cast<std::size_t>(p), h);
  } else {
    for (std::int64_t p = 0; p < count; ++p) hessian_row(rows, layout, static_cast<std::size_t>(p), h);
  }
  h.triangularView<Eigen::StrictlyLower>() = h.transpose().triangularView<Eigen::StrictlyLower>();
  return h;
}

}  // namespace

RealMatrix barrier_hessian(const std::vector<RealMatrix>& inverses) {
  return hessian_impl(inverses, true);
}

RealMatrix barrier_hessian_serial(const std::vector<RealMatrix>& inverses) {
  return hessian_impl(inverses, false);
}

}  // namespace detail

DiscriminationProblem make_problem(const Ensemble& e, const ConsistencyTable& table) {
  DiscriminationProblem p;
  p.d = e.states.rows();
  p.targets.reserve(table.size());
  for (const auto& xs : table) p.targets.push_back(weighted_target(e, xs));
  return p;
}

DiscriminationProblem hm_problem(const HiddenMatchingGame& game) {
  return make_problem(hm_ensemble(game), consistency_table(game));
}

namespace {

using detail::smat;
using detail::svec;

// The barrier iteration runs on real symmetric matrices. Complex Hermitian
// input is carried by the real representation [[Re, -Im], [Im, Re]], which
// doubles the dimension and the trace; `objective_scale` undoes the latter.
struct RealForm {
  Eigen::Index d = 0;
  bool embedded = false;
  double objective_scale = 1.0;
  std::vector<RealMatrix> targets;
};

RealMatrix embed(const ComplexMatrix& m) {
  const Eigen::Index d = m.rows();
  RealMatrix r(2 * d, 2 * d);
  r.topLeftCorner(d, d) = m.real();
  r.bottomRightCorner(d, d) = m.real();
  r.topRightCorner(d, d) = -m.imag();
  r.bottomLeftCorner(d, d) = m.imag();
  return r;
}

HermitianOperator unembed(const RealMatrix& r, bool embedded) {
  if (!embedded) return HermitianOperator(r);
  const Eigen::Index d = r.rows() / 2;
  ComplexMatrix m(d, d);
  m.real() = 0.5 * (r.topLeftCorner(d, d) + r.bottomRightCorner(d, d));
  m.imag() = 0.5 * (r.bottomLeftCorner(d, d) - r.topRightCorner(d, d));
  return HermitianOperator(m);
}

RealForm to_real_form(const DiscriminationProblem& problem) {
  RealForm f;
  double imag = 0.0;
  double scale = 0.0;
  for (const auto& r : problem.targets) {
    imag = std::max(imag, r.max_imag());
    scale = std::max(scale, r.matrix().cwiseAbs().maxCoeff());
  }
  f.embedded = imag > 1e-14 * std::max(scale, 1.0);
  f.d = f.embedded ? 2 * problem.d : problem.d;
  f.objective_scale = f.embedded ? 0.5 : 1.0;
  for (const auto& r : problem.targets) {
    f.targets.push_back(f.embedded ? embed(r.matrix()) : RealMatrix(r.matrix().real()));
  }
  return f;
}

RealMatrix inverse_sqrt_spd(const RealMatrix& t) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(t);
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

struct BarrierState {
  std::vector<RealMatrix> inverses;  // (Y - R_a)^-1
  double log_det_sum = 0.0;
};

// nullopt when some Y - R_a is not positive definite.
std::optional<BarrierState> evaluate(const RealMatrix& y, const RealForm& f) {
  BarrierState s;
  s.inverses.reserve(f.targets.size());
  const RealMatrix eye = RealMatrix::Identity(f.d, f.d);
  for (const RealMatrix& r : f.targets) {
    Eigen::LLT<RealMatrix> llt(y - r);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const RealVector diag = llt.matrixLLT().diagonal();
    if ((diag.array() <= 0.0).any()) return std::nullopt;
    s.log_det_sum += 2.0 * diag.array().log().sum();
    RealMatrix w = llt.solve(eye);
    s.inverses.push_back(0.5 * (w + w.transpose()));
  }
  return s;
}

struct Certificate {
  RealMatrix y;
  std::vector<RealMatrix> povm;
  double primal = 0.0;
  double dual = 0.0;
};

// Barrier multipliers M_a = W_a / t, rescaled by T^-1/2 (T = sum_a M_a) so
// that the POVM is exactly complete.
Certificate certify(const RealMatrix& y, const BarrierState& s, double t, const RealForm& f) {
  Certificate c;
  c.y = y;
  RealMatrix total = RealMatrix::Zero(f.d, f.d);
  for (const RealMatrix& w : s.inverses) total += w / t;
  const RealMatrix fix = inverse_sqrt_spd(0.5 * (total + total.transpose()));
  for (std::size_t a = 0; a < s.inverses.size(); ++a) {
    RealMatrix m = fix * (s.inverses[a] / t) * fix;
    m = 0.5 * (m + m.transpose());
    c.primal += (m.cwiseProduct(f.targets[a])).sum();
    c.povm.push_back(std::move(m));
  }
  c.primal *= f.objective_scale;
  c.dual = f.objective_scale * y.trace();
  return c;
}

void validate(const DiscriminationProblem& problem) {
  if (problem.targets.empty()) throw SdpError("physical_value: no answers");
  if (problem.d < 1 || problem.d > kMaxSdpDimension) {
    throw SdpError("physical_value: carrier dimension " + std::to_string(problem.d) +
                   " outside [1, " + std::to_string(kMaxSdpDimension) + "]");
  }
  if (problem.targets.size() > kMaxSdpAnswers) {
    throw SdpError("physical_value: " + std::to_string(problem.targets.size()) +
                   " answers exceed the limit of " + std::to_string(kMaxSdpAnswers));
  }
  for (const auto& r : problem.targets) {
    if (r.dim() != problem.d) throw SdpError("physical_value: target dimension mismatch");
    const double lo = min_eigenvalue(r);
    if (lo < -1e-10 * std::max(1.0, spectral_norm(r))) {
      throw SdpError("physical_value: target operator is not positive semidefinite");
    }
  }
}

}  // namespace

SDPSolution physical_value(const DiscriminationProblem& problem, const SolverOptions& options) {
  validate(problem);
  const RealForm f = to_real_form(problem);
  const std::size_t m = f.targets.size();
  const Eigen::Index d = f.d;

  SDPSolution out;
  double top = 0.0;
  for (const RealMatrix& r : f.targets) {
    top = std::max(top, r.selfadjointView<Eigen::Lower>().eigenvalues().cwiseAbs().maxCoeff());
  }
  if (top == 0.0) {
    out.dual = HermitianOperator::zero(problem.d);
    out.povm.assign(m, HermitianOperator::zero(problem.d));
    out.povm.front() = HermitianOperator::identity(problem.d);
    out.converged = true;
    return out;
  }

  const RealMatrix eye = RealMatrix::Identity(d, d);
  const RealVector grad_trace = svec(eye);
  RealMatrix y = (top + 1.0) * eye;
  auto state = evaluate(y, f);
  if (!state) throw SdpError("physical_value: initial point infeasible");

  double t = 0.0;
  for (const RealMatrix& w : state->inverses) t += w.trace();
  t = std::max(t / static_cast<double>(d), 1.0);

  const double centered = 1e-8;
  std::optional<Certificate> best;
  int iter = 0;

  auto record = [&](const Certificate& c) {
    if (!best || c.dual - c.primal < best->dual - best->primal) best = c;
  };

  while (iter < options.max_iterations) {
    RealVector g = t * grad_trace;
    for (const RealMatrix& w : state->inverses) g -= svec(w);
    const RealMatrix h = detail::barrier_hessian(state->inverses);

    Eigen::LLT<RealMatrix> llt(h);
    RealVector step;
    if (llt.info() == Eigen::Success) {
      step = -llt.solve(g);
    } else {
      step = -h.ldlt().solve(g);
    }
    const double decrement2 = std::max(0.0, -g.dot(step));

    if (decrement2 < centered) {
      const Certificate c = certify(y, *state, t, f);
      record(c);
      if (c.dual - c.primal <= options.tolerance) break;
      t *= options.barrier_growth;
      continue;
    }

    // Backtracking line search on t Tr Y - sum_a log det(Y - R_a), starting
    // from the full Newton step.
    const RealMatrix dy = smat(step, d);
    double alpha = 1.0;
    std::optional<BarrierState> next;
    for (int tries = 0; tries < 60; ++tries, alpha *= 0.5) {
      next = evaluate(y + alpha * dy, f);
      if (!next) continue;
      // Change in the objective, formed directly to avoid cancellation at large t.
      const double change = t * alpha * dy.trace() - (next->log_det_sum - state->log_det_sum);
      if (change <= -0.25 * alpha * decrement2) break;
      next.reset();
    }
    ++iter;
    if (!next) {
      // No measurable decrease left: treat the point as centered.
      const Certificate c = certify(y, *state, t, f);
      record(c);
      if (c.dual - c.primal <= options.tolerance) break;
      t *= options.barrier_growth;
      continue;
    }
    y += alpha * dy;
    y = 0.5 * (y + y.transpose());
    state = std::move(next);
    // Any strictly feasible point yields a valid certificate.
    const Certificate c = certify(y, *state, t, f);
    record(c);
    if (c.dual - c.primal <= options.tolerance) break;
  }

  const Certificate last = certify(y, *state, t, f);
  record(last);

  out.iterations = iter;
  out.primal_value = best->primal;
  out.dual_value = best->dual;
  out.gap = best->dual - best->primal;
  out.converged = out.gap <= options.tolerance;
  out.dual = unembed(best->y, f.embedded);
  for (const RealMatrix& pm : best->povm) out.povm.push_back(unembed(pm, f.embedded));

  HermitianOperator total = HermitianOperator::zero(problem.d);
  for (const auto& pm : out.povm) total += pm;
  out.completeness_residual = spectral_norm(total - HermitianOperator::identity(problem.d));
  return out;
}

double dual_feasibility_margin(const SDPSolution& solution, const DiscriminationProblem& problem) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& r : problem.targets) {
    margin = std::min(margin, min_eigenvalue(solution.dual - r));
  }
  return margin;
}

double povm_min_eigenvalue(const SDPSolution& solution) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : solution.povm) lo = std::min(lo, min_eigenvalue(m));
  return lo;
}

std::string format_report(const SDPSolution& s, const DiscriminationProblem& problem) {
  char buf[128];
  std::string out;
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s=%.12g\n", key, v);
    out += buf;
  };
  line("primal_value", s.primal_value);
  line("dual_value", s.dual_value);
  line("gap", s.gap);
  out += "iterations=" + std::to_string(s.iterations) + "\n";
  out += std::string("converged=") + (s.converged ? "true" : "false") + "\n";
  line("completeness_residual", s.completeness_residual);
  line("dual_margin", dual_feasibility_margin(s, problem));
  line("povm_min_eigenvalue", povm_min_eigenvalue(s));
  return out;
}

ValueComparison selective_vs_physical(const Ensemble& e, const ConsistencyTable& table,
                                      const SolverOptions& options) {
  ValueComparison c;
  c.sv = selective_value_numeric(e, table).value;
  c.solution = physical_value(make_problem(e, table), options);
  c.pv = c.solution.primal_value;
  if (c.pv > c.sv + 1e-6) {
    throw std::logic_error("selective_vs_physical: physical value " + std::to_string(c.pv) +
                           " exceeds selective value " + std::to_string(c.sv));
  }
  c.equal = std::abs(c.sv - c.pv) <= std::max(options.tolerance, c.solution.gap) + 1e-9;
  return c;
}

ValueComparison selective_vs_physical(const HiddenMatchingGame& game, const SolverOptions& options) {
  return selective_vs_physical(hm_ensemble(game), consistency_table(game), options);
}

}  // namespace qrg
