#include "qrg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qrg {

namespace {

void require_finite(const ComplexMatrix& m, const char* where) {
  if (!m.allFinite()) throw NumericsError(std::string(where) + ": non-finite entries");
}

}  // namespace

HermitianOperator::HermitianOperator(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw NumericsError("HermitianOperator: matrix is not square");
  require_finite(m, "HermitianOperator");
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator::HermitianOperator(const RealMatrix& m)
    : HermitianOperator(ComplexMatrix(m.cast<Complex>())) {}

HermitianOperator HermitianOperator::zero(Eigen::Index d) {
  return HermitianOperator(ComplexMatrix(ComplexMatrix::Zero(d, d)));
}

HermitianOperator HermitianOperator::identity(Eigen::Index d) {
  return HermitianOperator(ComplexMatrix(ComplexMatrix::Identity(d, d)));
}

HermitianOperator HermitianOperator::projector(const ComplexVector& v, double weight) {
  return HermitianOperator(ComplexMatrix(weight * (v * v.adjoint())));
}

double HermitianOperator::max_imag() const {
  return m_.size() == 0 ? 0.0 : m_.imag().cwiseAbs().maxCoeff();
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
  m_ += o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& o) {
  m_ -= o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
  m_ *= s;
  return *this;
}

Eigensystem eigensystem(const HermitianOperator& h) {
  require_finite(h.matrix(), "eigensystem");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw NumericsError("eigensystem: solver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double spectral_norm(const HermitianOperator& h) {
  if (h.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericsError("spectral_norm: solver did not converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericsError("min_eigenvalue: solver did not converge");
  return solver.eigenvalues()(0);
}

namespace {

// Shared by pinv_sqrt and support_projector: applies f to eigenvalues on the
// support and zeroes the rest.
template <typename F>
HermitianOperator spectral_map_on_support(const HermitianOperator& h, double support_tol,
                                          const char* where, F f) {
  const Eigensystem es = eigensystem(h);
  const Eigen::Index d = h.dim();
  if (d == 0) return h;
  const double scale = es.values.cwiseAbs().maxCoeff();
  if (scale == 0.0) return HermitianOperator::zero(d);
  if (es.values(0) < -support_tol * scale) {
    throw NumericsError(std::string(where) + ": operator has a materially negative eigenvalue " +
                        std::to_string(es.values(0)));
  }
  RealVector mapped(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    mapped(i) = es.values(i) > support_tol * scale ? f(es.values(i)) : 0.0;
  }
  return HermitianOperator(
      ComplexMatrix(es.vectors * mapped.cast<Complex>().asDiagonal() * es.vectors.adjoint()));
}

}  // namespace

HermitianOperator pinv_sqrt(const HermitianOperator& h, double support_tol) {
  return spectral_map_on_support(h, support_tol, "pinv_sqrt",
                                 [](double l) { return 1.0 / std::sqrt(l); });
}

HermitianOperator support_projector(const HermitianOperator& h, double support_tol) {
  return spectral_map_on_support(h, support_tol, "support_projector", [](double) { return 1.0; });
}

ComplexMatrix gram_embed(const HermitianOperator& gram, double tol) {
  const Eigensystem es = eigensystem(gram);
  const Eigen::Index d = gram.dim();
  const double top = d ? es.values(d - 1) : 0.0;
  if (d && es.values(0) < -tol * std::max(top, 1.0)) {
    throw NumericsError("gram_embed: Gram matrix is not positive semidefinite (min eigenvalue " +
                        std::to_string(es.values(0)) + ")");
  }
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    if (es.values(i) > tol * top) kept.push_back(i);
  }
  // Row r of the result is sqrt(lambda_r) * conj(u_r)^T, so column x holds
  // the coordinates of state x in the eigenbasis.
  ComplexMatrix vectors(static_cast<Eigen::Index>(kept.size()), d);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const Eigen::Index i = kept[r];
    vectors.row(static_cast<Eigen::Index>(r)) =
        std::sqrt(es.values(i)) * es.vectors.col(i).adjoint();
  }
  return vectors;
}

HermitianOperator conjugate(const HermitianOperator& h, const ComplexMatrix& u) {
  return HermitianOperator(ComplexMatrix(u.adjoint() * h.matrix() * u));
}

}  // namespace qrg
