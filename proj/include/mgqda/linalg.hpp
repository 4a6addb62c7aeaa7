#pragma once

#include <Eigen/Core>

namespace mgqda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative spectral cutoff: eigenvalues <= factor * dim * lambda_max are treated as zero.
inline constexpr double kDefaultRankTol = 1e-12;

/*
 * Dense symmetric matrix. Symmetry holds exactly: the constructor keeps
 * the lower triangle of its argument and reflects it into the upper one.
 */
class SymMatrix
{
public:
    SymMatrix() = default;
    explicit SymMatrix(Matrix m);

    static SymMatrix zero(Index dim);
    static SymMatrix identity(Index dim);

    Index dim() const { return m_.rows(); }
    double operator()(Index i, Index j) const { return m_(i, j); }
    const Matrix& matrix() const { return m_; }

private:
    Matrix m_;
};

struct EigenDecomposition
{
    Vector values;   // descending
    Matrix vectors;  // orthonormal columns, vectors.col(k) pairs with values(k)
};

/// Eigenvalues sorted descending. Throws InvalidInput on non-finite entries.
EigenDecomposition sym_eigen(const SymMatrix& a);

/// Cutoff tau = factor * dim * max(lambda_max, 0).
double spectral_cutoff(const Vector& values, double rank_tol_factor);

/// Moore-Penrose pseudoinverse of a PSD matrix via its eigendecomposition.
SymMatrix pseudo_inverse(const SymMatrix& a, double rank_tol_factor = kDefaultRankTol);

/// log of the product of the eigenvalues above the cutoff (0 when none survive).
double log_pseudo_det(const SymMatrix& a, double rank_tol_factor = kDefaultRankTol);

/*
 * Pseudoinverse and log-pseudodeterminant from one eigendecomposition.
 * `invertible` is true when every eigenvalue clears the cutoff, in which case
 * `inverse` is the ordinary inverse and `log_det` the ordinary log-determinant.
 */
struct SpectralInverse
{
    SymMatrix inverse;
    double log_det = 0.0;
    Index rank = 0;
    bool invertible = false;
};

SpectralInverse spectral_inverse(const SymMatrix& a, double rank_tol_factor = kDefaultRankTol);

/// L = V diag(sqrt(max(lambda, 0))) with L L^T = A. Throws NotPSD when
/// lambda_min < -1e-8 * lambda_max.
Matrix psd_factor(const SymMatrix& a);

} // namespace mgqda
