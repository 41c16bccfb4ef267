#pragma once

#include <complex>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace comprec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Shared numerical tolerances.
inline constexpr double kUnitaryTol = 1e-12;
inline constexpr double kPsdFloor = -1e-10;        // eigenvalues below this are an error
inline constexpr double kPseudoCutoff = 1e-12;     // support threshold for pseudo-inverses
inline constexpr double kGramMatchTol = 1e-8;
inline constexpr double kMapperResidualTol = 1e-10;

inline void warn(const std::string& msg) { std::cerr << "[comprec] warning: " << msg << "\n"; }

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

enum class Subsystem { first, second };

// Index convention: the first factor is the major index, row = a*dim_b + b.
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, Eigen::Index dim_a,
                                   Eigen::Index dim_b, Subsystem keep) {
  if (rho.rows() != rho.cols() || rho.rows() != dim_a * dim_b)
    throw std::invalid_argument("partial_trace: dimension mismatch");
  if (keep == Subsystem::first) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
    for (Eigen::Index a = 0; a < dim_a; ++a)
      for (Eigen::Index a2 = 0; a2 < dim_a; ++a2)
        for (Eigen::Index b = 0; b < dim_b; ++b)
          out(a, a2) += rho(a * dim_b + b, a2 * dim_b + b);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
  for (Eigen::Index b = 0; b < dim_b; ++b)
    for (Eigen::Index b2 = 0; b2 < dim_b; ++b2)
      for (Eigen::Index a = 0; a < dim_a; ++a)
        out(b, b2) += rho(a * dim_b + b, a * dim_b + b2);
  return out;
}

// Sum of singular values; equals sum |eigenvalue| for Hermitian input.
inline double trace_norm(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("trace_norm: square matrix required");
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

struct EighResult {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns
};

inline EighResult eigh(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigh: square matrix required");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double hermiticity_residual(const ComplexMatrix& m) {
  return max_abs(ComplexMatrix(m - m.adjoint()));
}

inline double unitarity_residual(const ComplexMatrix& u) {
  return max_abs(ComplexMatrix(u.adjoint() * u -
                               ComplexMatrix::Identity(u.cols(), u.cols())));
}

inline bool is_unitary(const ComplexMatrix& u, double tol = kUnitaryTol) {
  return u.rows() == u.cols() && unitarity_residual(u) <= tol;
}

inline double min_hermitian_eigenvalue(const ComplexMatrix& m) {
  return eigh(ComplexMatrix((m + m.adjoint()) / 2.0)).values.minCoeff();
}

struct DensityResiduals {
  double hermiticity = 0;
  double trace_deviation = 0;
  double min_eigenvalue = 0;
};

inline DensityResiduals density_residuals(const ComplexMatrix& rho) {
  DensityResiduals r;
  r.hermiticity = hermiticity_residual(rho);
  r.trace_deviation = std::abs(rho.trace() - Complex(1.0));
  r.min_eigenvalue = min_hermitian_eigenvalue(rho);
  return r;
}

inline void require_density_matrix(const ComplexMatrix& rho, const std::string& what) {
  const DensityResiduals r = density_residuals(rho);
  if (r.hermiticity > 1e-10 || r.trace_deviation > 1e-10 || r.min_eigenvalue < kPsdFloor)
    throw std::runtime_error(what + ": not a density matrix (hermiticity " +
                             std::to_string(r.hermiticity) + ", trace deviation " +
                             std::to_string(r.trace_deviation) + ", min eigenvalue " +
                             std::to_string(r.min_eigenvalue) + ")");
}

// Inverse square root on the support of a Hermitian PSD matrix.
// Without pseudo, a singular matrix is an error; with pseudo, directions with
// eigenvalue < kPseudoCutoff are dropped. Eigenvalues in [kPsdFloor, 0) are
// clipped to 0; the clip is only reported when it exceeds roundoff scale.
inline ComplexMatrix herm_sqrt_inv(const ComplexMatrix& m, bool pseudo = false) {
  if (hermiticity_residual(m) > 1e-10)
    throw std::invalid_argument("herm_sqrt_inv: matrix is not Hermitian");
  const EighResult es = eigh(ComplexMatrix((m + m.adjoint()) / 2.0));
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    double lam = es.values(k);
    if (lam < kPsdFloor)
      throw std::domain_error("herm_sqrt_inv: negative eigenvalue " + std::to_string(lam));
    if (lam < 0) {
      if (lam < -kPseudoCutoff)
        warn("herm_sqrt_inv: clipping eigenvalue " + std::to_string(lam) + " to 0");
      lam = 0;
    }
    if (lam < kPseudoCutoff) {
      if (!pseudo)
        throw std::domain_error("herm_sqrt_inv: singular matrix (eigenvalue " +
                                std::to_string(lam) + "); pseudo mode required");
      continue;
    }
    out += (1.0 / std::sqrt(lam)) * es.vectors.col(k) * es.vectors.col(k).adjoint();
  }
  return out;
}

// Completes the given orthonormal rows to a full unitary. The remaining rows
// come from modified Gram-Schmidt over the canonical basis in index order, so
// the result is deterministic.
inline ComplexMatrix orthonormal_completion(const std::vector<ComplexVector>& rows,
                                            Eigen::Index dim) {
  if (static_cast<Eigen::Index>(rows.size()) > dim)
    throw std::invalid_argument("orthonormal_completion: more rows than dim");
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim)
      throw std::invalid_argument("orthonormal_completion: row length mismatch");
    for (size_t j = 0; j <= i; ++j) {
      const Complex g = rows[j].dot(rows[i]);
      const double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - expect) > 1e-10)
        throw std::invalid_argument("orthonormal_completion: input rows not orthonormal");
    }
  }
  std::vector<ComplexVector> basis = rows;
  basis.reserve(dim);
  for (Eigen::Index k = 0; k < dim && static_cast<Eigen::Index>(basis.size()) < dim; ++k) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(k) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b * b.dot(v);
    const double nrm = v.norm();
    if (nrm > 1e-6) basis.push_back(v / nrm);
  }
  if (static_cast<Eigen::Index>(basis.size()) != dim)
    throw std::runtime_error("orthonormal_completion: failed to complete basis");
  ComplexMatrix u(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) u.row(i) = basis[i].transpose();
  return u;
}

}  // namespace comprec
