#include "unlearn/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "unlearn/errors.hpp"

namespace unlearn {

namespace {

constexpr double kDropTol = 1e-10;       // dependent-direction threshold
constexpr double kEigenZeroTol = 1e-10;  // relative eigenvalue cutoff
constexpr double kJacobiTol = 1e-12;     // off-diagonal convergence
constexpr int kJacobiMaxSweeps = 50;

double offdiagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.empty())
    throw std::invalid_argument("gram_schmidt: empty vector set");
  const Eigen::Index d = vectors.front().size();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(vectors.size()), d);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != d)
      throw std::invalid_argument(
          "gram_schmidt: input vectors have mismatched dimensions");
    rows.row(static_cast<Eigen::Index>(i)) = vectors[i].transpose();
  }
  return rows;
}

}  // namespace

OrthoFactorization gram_schmidt(const Eigen::MatrixXd& rows) {
  const Eigen::Index k = rows.rows();
  const Eigen::Index d = rows.cols();
  if (k < 1 || d < 1)
    throw std::invalid_argument("gram_schmidt: need at least one vector");

  const Eigen::Index max_rank = std::min(k, d);
  Eigen::MatrixXd basis(d, max_rank);
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(k, max_rank);
  Eigen::Index rank = 0;

  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::VectorXd w = rows.row(i).transpose();
    const double input_norm = w.norm();
    // Two MGS passes; the second repairs orthogonality lost to cancellation.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < rank; ++j) {
        const double c = basis.col(j).dot(w);
        w -= c * basis.col(j);
        coeffs(i, j) += c;
      }
    }
    const double residual_norm = w.norm();
    // A complete basis cannot be extended.
    if (rank == max_rank || residual_norm <= kDropTol * input_norm) continue;
    basis.col(rank) = w / residual_norm;
    coeffs(i, rank) = residual_norm;
    ++rank;
  }

  basis.conservativeResize(d, rank);
  coeffs.conservativeResize(k, rank);
  return {std::move(basis), std::move(coeffs), rank};
}

OrthoFactorization gram_schmidt(const std::vector<Eigen::VectorXd>& vectors) {
  return gram_schmidt(stack_rows(vectors));
}

SymmetricEigen eigendecompose_small(const Eigen::MatrixXd& sym) {
  const Eigen::Index n = sym.rows();
  if (n < 1 || sym.cols() != n)
    throw std::invalid_argument("eigendecompose_small: matrix must be square");

  const double scale = sym.norm();
  const double sym_tol = 1e-12 * std::max(1.0, scale);
  if ((sym - sym.transpose()).cwiseAbs().maxCoeff() > sym_tol)
    throw std::invalid_argument("eigendecompose_small: matrix not symmetric");

  Eigen::MatrixXd a = 0.5 * (sym + sym.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  if (scale > 0.0) {
    bool converged = false;
    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
      if (offdiagonal_norm(a) <= kJacobiTol * scale) {
        converged = true;
        break;
      }
      for (Eigen::Index p = 0; p < n - 1; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (apq == 0.0) continue;
          const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
          const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(tau) + std::sqrt(1.0 + tau * tau));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          // Similarity transform on rows/columns p and q.
          for (Eigen::Index r = 0; r < n; ++r) {
            const double arp = a(r, p);
            const double arq = a(r, q);
            a(r, p) = c * arp - s * arq;
            a(r, q) = s * arp + c * arq;
          }
          for (Eigen::Index r = 0; r < n; ++r) {
            const double apr = a(p, r);
            const double aqr = a(q, r);
            a(p, r) = c * apr - s * aqr;
            a(q, r) = s * apr + c * aqr;
          }
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          for (Eigen::Index r = 0; r < n; ++r) {
            const double vrp = v(r, p);
            const double vrq = v(r, q);
            v(r, p) = c * vrp - s * vrq;
            v(r, q) = s * vrp + c * vrq;
          }
        }
      }
    }
    if (!converged && offdiagonal_norm(a) > kJacobiTol * scale)
      throw ConvergenceError(
          "eigendecompose_small: Jacobi sweeps did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](Eigen::Index l, Eigen::Index r) {
                     return a(l, l) > a(r, r);
                   });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)],
                      order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

LowRankPinv pseudo_inverse(const Eigen::MatrixXd& rows) {
  const Eigen::Index d = rows.cols();
  OrthoFactorization ortho = gram_schmidt(rows);
  if (ortho.effective_rank == 0)
    return {Eigen::VectorXd(0), Eigen::MatrixXd(d, 0), d};

  // Small Gram matrix sum_i c_i c_i^T shares the nonzero spectrum of
  // sum_i x_i x_i^T; its eigenvectors lift through the basis.
  const Eigen::MatrixXd small_gram = ortho.coeffs.transpose() * ortho.coeffs;
  SymmetricEigen eig = eigendecompose_small(small_gram);

  const double lambda_max = eig.values(0);
  Eigen::Index kept = 0;
  while (kept < eig.values.size() &&
         eig.values(kept) > kEigenZeroTol * lambda_max)
    ++kept;

  LowRankPinv out;
  out.dim = d;
  out.eigenvalues = eig.values.head(kept);
  out.eigenvectors = ortho.basis * eig.vectors.leftCols(kept);
  return out;
}

LowRankPinv pseudo_inverse(const std::vector<Eigen::VectorXd>& vectors) {
  return pseudo_inverse(stack_rows(vectors));
}

Eigen::VectorXd apply_pseudoinverse(const LowRankPinv& pinv,
                                    const Eigen::VectorXd& v) {
  if (v.size() != pinv.dim)
    throw std::invalid_argument(
        "apply_pseudoinverse: vector dimension does not match");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(pinv.dim);
  for (Eigen::Index i = 0; i < pinv.eigenvalues.size(); ++i) {
    const double coeff = pinv.eigenvectors.col(i).dot(v) / pinv.eigenvalues(i);
    out += coeff * pinv.eigenvectors.col(i);
  }
  return out;
}

Eigen::VectorXd project_onto_span(const Eigen::MatrixXd& rows,
                                  const Eigen::VectorXd& v) {
  if (v.size() != rows.cols())
    throw std::invalid_argument(
        "project_onto_span: vector dimension does not match");
  OrthoFactorization ortho = gram_schmidt(rows);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (Eigen::Index j = 0; j < ortho.effective_rank; ++j)
    out += ortho.basis.col(j).dot(v) * ortho.basis.col(j);
  return out;
}

}  // namespace unlearn
