#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dephase::detail {

using Cplx = std::complex<double>;

/// Eigenvalues of an n-by-n Hermitian matrix stored row-major.
inline std::vector<double> hermitian_eigenvalues(const std::vector<Cplx>& m, int n) {
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = m[static_cast<size_t>(i) * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
    std::vector<double> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = solver.eigenvalues()(i);
    return out;
}

/// Least-squares solve of the overdetermined system A c = b via Householder QR.
inline std::vector<double> lstsq(const std::vector<std::vector<double>>& columns,
                                 const std::vector<double>& rhs) {
    const int rows = static_cast<int>(rhs.size());
    const int cols = static_cast<int>(columns.size());
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (int i = 0; i < rows; ++i) b(i) = rhs[static_cast<size_t>(i)];
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            a(i, j) = columns[static_cast<size_t>(j)][static_cast<size_t>(i)];
    Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    std::vector<double> out(static_cast<size_t>(cols));
    for (int j = 0; j < cols; ++j) out[static_cast<size_t>(j)] = c(j);
    return out;
}

}  // namespace dephase::detail
