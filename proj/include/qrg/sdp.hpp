#pragma once

// Physical value of a retrieval game as a dense SDP:
//
//   maximize  sum_a Tr(M_a R_a)   s.t.  sum_a M_a = 1,  M_a >= 0
//
// solved through its dual  minimize Tr Y  s.t.  Y >= R_a  for every a.
// The solver follows the log-barrier central path with damped Newton steps,
// reads a POVM off the barrier multipliers and restores exact completeness
// before reporting, so primal_value <= optimum <= dual_value always holds.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrg/game.hpp"
#include "qrg/numerics.hpp"

namespace qrg {

class SdpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DiscriminationProblem {
  Eigen::Index d = 0;
  /// R_a = sum_{x : (x,a) in sigma} p(x) rho_x, one per joint answer.
  std::vector<HermitianOperator> targets;
};

inline constexpr Eigen::Index kMaxSdpDimension = 64;
inline constexpr std::size_t kMaxSdpAnswers = 256;

DiscriminationProblem make_problem(const Ensemble& e, const ConsistencyTable& table);
DiscriminationProblem hm_problem(const HiddenMatchingGame& game);

struct SolverOptions {
  double tolerance = 1e-6;  // on the certified duality gap
  int max_iterations = 500; // Newton steps
  double barrier_growth = 8.0;
};

struct SDPSolution {
  std::vector<HermitianOperator> povm;
  HermitianOperator dual;  // Y
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  double completeness_residual = 0.0;  // ||sum_a M_a - 1||
};

SDPSolution physical_value(const DiscriminationProblem& problem, const SolverOptions& options = {});

/// min_a lambda_min(Y - R_a)
double dual_feasibility_margin(const SDPSolution& solution, const DiscriminationProblem& problem);

/// Smallest eigenvalue over all POVM elements.
double povm_min_eigenvalue(const SDPSolution& solution);

/// Line-oriented key=value report.
std::string format_report(const SDPSolution& solution, const DiscriminationProblem& problem);

struct ValueComparison {
  double sv = 0.0;
  double pv = 0.0;
  /// pv and sv agree to within the solver tolerance.
  bool equal = false;
  SDPSolution solution;
};

/// Computes both values and enforces pv <= sv + 1e-6; a violation signals a
/// solver or O_a defect and throws std::logic_error.
ValueComparison selective_vs_physical(const Ensemble& e, const ConsistencyTable& table,
                                      const SolverOptions& options = {});
ValueComparison selective_vs_physical(const HiddenMatchingGame& game,
                                      const SolverOptions& options = {});

namespace detail {

/// Hessian of -sum_a log det(S_a) in the orthonormal svec basis, given the
/// inverses W_a = S_a^-1. Upper and lower triangles are filled.
RealMatrix barrier_hessian(const std::vector<RealMatrix>& inverses);
RealMatrix barrier_hessian_serial(const std::vector<RealMatrix>& inverses);

RealVector svec(const RealMatrix& x);
RealMatrix smat(const RealVector& v, Eigen::Index d);

}  // namespace detail

}  // namespace qrg
