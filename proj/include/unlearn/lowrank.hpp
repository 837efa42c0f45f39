#pragma once

#include <Eigen/Dense>
#include <vector>

namespace unlearn {

/// Orthonormal basis for the span of a vector set together with the
/// coefficients that express each input vector in that basis.
struct OrthoFactorization {
  Eigen::MatrixXd basis;   // d x r, orthonormal columns
  Eigen::MatrixXd coeffs;  // k x r, row i reconstructs input vector i
  Eigen::Index effective_rank = 0;
};

/// Positive eigenpairs of A = sum_i x_i x_i^T. Represents the Moore-Penrose
/// pseudoinverse A+ = sum_i eigenvalues[i]^{-1} v_i v_i^T without ever forming
/// a d x d matrix.
struct LowRankPinv {
  Eigen::VectorXd eigenvalues;   // r entries, descending, strictly positive
  Eigen::MatrixXd eigenvectors;  // d x r, orthonormal columns
  Eigen::Index dim = 0;
};

/// Full spectrum of a small symmetric matrix, sorted descending.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // orthonormal columns, col(i) pairs with values(i)
};

/// Modified Gram-Schmidt with one re-orthogonalization pass. Rows of `rows`
/// are the input vectors. Near-dependent vectors (residual norm at most
/// 1e-10 times the input norm) are dropped from the basis, so duplicated
/// inputs reduce the effective rank instead of producing NaNs.
OrthoFactorization gram_schmidt(const Eigen::MatrixXd& rows);
OrthoFactorization gram_schmidt(const std::vector<Eigen::VectorXd>& vectors);

/// Cyclic Jacobi rotations; converges when the off-diagonal Frobenius norm
/// drops below 1e-12 times the matrix norm (at most 50 sweeps). The input
/// must be symmetric within 1e-12.
SymmetricEigen eigendecompose_small(const Eigen::MatrixXd& sym);

/// Pseudoinverse of sum_i x_i x_i^T for the row vectors of `rows`, computed
/// via Gram-Schmidt and the eigendecomposition of the small Gram matrix.
/// Eigenvalues at or below 1e-10 times the largest are treated as zero.
LowRankPinv pseudo_inverse(const Eigen::MatrixXd& rows);
LowRankPinv pseudo_inverse(const std::vector<Eigen::VectorXd>& vectors);

/// A+ v in O(r d): sum_i (eigenvalues[i]^{-1} (v_i . v)) v_i.
Eigen::VectorXd apply_pseudoinverse(const LowRankPinv& pinv,
                                    const Eigen::VectorXd& v);

/// Orthogonal projection of v onto the span of the row vectors of `rows`.
Eigen::VectorXd project_onto_span(const Eigen::MatrixXd& rows,
                                  const Eigen::VectorXd& v);

}  // namespace unlearn
