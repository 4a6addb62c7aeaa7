#include <mgqda/linalg.hpp>

#include <mgqda/error.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace mgqda {

SymMatrix::SymMatrix(Matrix m)
    : m_(std::move(m))
{
    if (m_.rows() != m_.cols()) {
        throw InvalidInput("SymMatrix: matrix is not square");
    }
    m_.triangularView<Eigen::StrictlyUpper>() = m_.transpose();
}

SymMatrix SymMatrix::zero(Index dim)
{
    return SymMatrix(Matrix::Zero(dim, dim));
}

SymMatrix SymMatrix::identity(Index dim)
{
    return SymMatrix(Matrix::Identity(dim, dim));
}

EigenDecomposition sym_eigen(const SymMatrix& a)
{
    if (!a.matrix().allFinite()) {
        throw InvalidInput("sym_eigen: non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw InvalidInput("sym_eigen: eigensolver failed to converge");
    }
    // Eigen returns ascending order; flip to descending.
    EigenDecomposition out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

double spectral_cutoff(const Vector& values, double rank_tol_factor)
{
    if (values.size() == 0) return 0.0;
    const double top = std::max(values.maxCoeff(), 0.0);
    return rank_tol_factor * static_cast<double>(values.size()) * top;
}

SpectralInverse spectral_inverse(const SymMatrix& a, double rank_tol_factor)
{
    const auto eig = sym_eigen(a);
    const double tau = spectral_cutoff(eig.values, rank_tol_factor);
    const Index n = a.dim();

    Vector inv_values = Vector::Zero(n);
    SpectralInverse out;
    for (Index k = 0; k < n; ++k) {
        const double lam = eig.values(k);
        if (lam > tau && lam > 0.0) {
            inv_values(k) = 1.0 / lam;
            out.log_det += std::log(lam);
            ++out.rank;
        }
    }
    out.invertible = (out.rank == n);
    out.inverse = SymMatrix(eig.vectors * inv_values.asDiagonal() * eig.vectors.transpose());
    return out;
}

SymMatrix pseudo_inverse(const SymMatrix& a, double rank_tol_factor)
{
    return spectral_inverse(a, rank_tol_factor).inverse;
}

double log_pseudo_det(const SymMatrix& a, double rank_tol_factor)
{
    const auto eig = sym_eigen(a);
    const double tau = spectral_cutoff(eig.values, rank_tol_factor);
    double out = 0.0;
    for (Index k = 0; k < eig.values.size(); ++k) {
        const double lam = eig.values(k);
        if (lam > tau && lam > 0.0) out += std::log(lam);
    }
    return out;
}

Matrix psd_factor(const SymMatrix& a)
{
    const auto eig = sym_eigen(a);
    const double top = std::max(eig.values.maxCoeff(), 0.0);
    const double bottom = eig.values.minCoeff();
    if (bottom < -1e-8 * top || (top == 0.0 && bottom < 0.0)) {
        throw NotPSD("psd_factor: minimum eigenvalue " + std::to_string(bottom)
                     + " is below -1e-8 * lambda_max");
    }
    const Vector roots = eig.values.cwiseMax(0.0).cwiseSqrt();
    return eig.vectors * roots.asDiagonal();
}

} // namespace mgqda
