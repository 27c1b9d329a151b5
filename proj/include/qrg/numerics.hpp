#pragma once

// Dense complex linear algebra shared by the value computations.

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qrg {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

class NumericsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dense Hermitian matrix. Construction symmetrizes (A + A^dagger) / 2 and
/// rejects non-finite entries.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const ComplexMatrix& m);
  explicit HermitianOperator(const RealMatrix& m);

  static HermitianOperator zero(Eigen::Index d);
  static HermitianOperator identity(Eigen::Index d);
  /// |v><v| scaled by `weight`.
  static HermitianOperator projector(const ComplexVector& v, double weight = 1.0);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  /// Largest |imaginary part| over all entries.
  double max_imag() const;
  double trace() const { return m_.trace().real(); }

  HermitianOperator& operator+=(const HermitianOperator& o);
  HermitianOperator& operator-=(const HermitianOperator& o);
  HermitianOperator& operator*=(double s);

  friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
  friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
  friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }

 private:
  ComplexMatrix m_;
};

struct Eigensystem {
  RealVector values;     // ascending
  ComplexMatrix vectors; // orthonormal columns
};

Eigensystem eigensystem(const HermitianOperator& h);

/// max |lambda_i|
double spectral_norm(const HermitianOperator& h);

double min_eigenvalue(const HermitianOperator& h);

inline constexpr double kSupportTol = 1e-9;

/// Pseudo-inverse square root on the support. Eigenvalues above
/// support_tol * lambda_max map to lambda^(-1/2), the rest to zero.
HermitianOperator pinv_sqrt(const HermitianOperator& h, double support_tol = kSupportTol);

/// Orthogonal projector onto the eigenvectors kept by pinv_sqrt.
HermitianOperator support_projector(const HermitianOperator& h, double support_tol = kSupportTol);

/// Vectors v_x (columns of the result, dimension = numerical rank) with
/// <v_x, v_y> = G_xy. `tol` is relative to the largest eigenvalue.
ComplexMatrix gram_embed(const HermitianOperator& gram, double tol = kSupportTol);

/// U^dagger * H * U
HermitianOperator conjugate(const HermitianOperator& h, const ComplexMatrix& u);

}  // namespace qrg
