#pragma once

#include <complex>
#include <vector>

namespace mpemba {

/// Full eigensystem of a real symmetric tridiagonal matrix.
/// vectors is column-major: entry i of eigenvector k is vectors[k*n + i].
/// Eigenvalues ascend.
struct TridiagEigen {
    int n = 0;
    std::vector<double> values;
    std::vector<double> vectors;

    double vec(int k, int i) const { return vectors[static_cast<size_t>(k) * n + i]; }
};

TridiagEigen tridiagonal_eigensystem(const std::vector<double>& diag,
                                     const std::vector<double>& offdiag);

/// Eigenvalues only (ascending).
std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag,
                                            const std::vector<double>& offdiag);

/// Eigenvalues of a Hermitian band matrix, lower-band column-major storage:
/// banded[j*(kd+1) + (i-j)] = A(i,j) for j <= i <= min(n-1, j+kd).
std::vector<double> hermitian_banded_eigenvalues(int n, int kd,
                                                 const std::vector<std::complex<double>>& banded);

/// Eigenvalues of a dense Hermitian matrix (column-major, lower triangle used).
std::vector<double> hermitian_dense_eigenvalues(int n, std::vector<std::complex<double>> dense);

/// Minimum-norm least-squares solution of A x = b, A column-major rows x cols.
std::vector<double> least_squares(int rows, int cols, std::vector<double> A,
                                  std::vector<double> b);

}  // namespace mpemba
