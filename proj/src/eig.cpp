#include "mpemba/eig.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace mpemba {

TridiagEigen tridiagonal_eigensystem(const std::vector<double>& diag,
                                     const std::vector<double>& offdiag) {
    const int n = static_cast<int>(diag.size());
    if (n < 1 || offdiag.size() + 1 != diag.size())
        throw std::invalid_argument("tridiagonal_eigensystem: size mismatch");
    TridiagEigen out;
    out.n = n;
    out.values = diag;
    std::vector<double> e = offdiag;
    out.vectors.assign(static_cast<size_t>(n) * n, 0.0);
    // divide-and-conquer; much faster than QL iteration for n in the thousands
    lapack_int info = LAPACKE_dstedc(LAPACK_COL_MAJOR, 'I', n, out.values.data(), e.data(),
                                     out.vectors.data(), n);
    if (info != 0)
        throw std::runtime_error("dstedc failed, info = " + std::to_string(info));
    return out;
}

std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag,
                                            const std::vector<double>& offdiag) {
    const int n = static_cast<int>(diag.size());
    if (n < 1 || offdiag.size() + 1 != diag.size())
        throw std::invalid_argument("tridiagonal_eigenvalues: size mismatch");
    std::vector<double> d = diag;
    std::vector<double> e = offdiag;
    lapack_int info = LAPACKE_dsterf(n, d.data(), e.data());
    if (info != 0)
        throw std::runtime_error("dsterf failed, info = " + std::to_string(info));
    return d;
}

std::vector<double> hermitian_banded_eigenvalues(int n, int kd,
                                                 const std::vector<std::complex<double>>& banded) {
    if (n < 1 || kd < 0 || banded.size() < static_cast<size_t>(n) * (kd + 1))
        throw std::invalid_argument("hermitian_banded_eigenvalues: size mismatch");
    std::vector<std::complex<double>> ab = banded;
    std::vector<double> w(n);
    lapack_int info = LAPACKE_zhbev(LAPACK_COL_MAJOR, 'N', 'L', n, kd,
                                    reinterpret_cast<lapack_complex_double*>(ab.data()), kd + 1,
                                    w.data(), nullptr, 1);
    if (info != 0)
        throw std::runtime_error("zhbev failed, info = " + std::to_string(info));
    return w;
}

std::vector<double> least_squares(int rows, int cols, std::vector<double> A,
                                  std::vector<double> b) {
    if (A.size() < static_cast<size_t>(rows) * cols || static_cast<int>(b.size()) < rows)
        throw std::invalid_argument("least_squares: size mismatch");
    const int ldb = std::max(rows, cols);
    b.resize(ldb, 0.0);
    std::vector<double> sv(std::min(rows, cols));
    lapack_int rank = 0;
    lapack_int info = LAPACKE_dgelsd(LAPACK_COL_MAJOR, rows, cols, 1, A.data(), rows, b.data(),
                                     ldb, sv.data(), -1.0, &rank);
    if (info != 0)
        throw std::runtime_error("dgelsd failed, info = " + std::to_string(info));
    b.resize(cols);
    return b;
}

std::vector<double> hermitian_dense_eigenvalues(int n, std::vector<std::complex<double>> dense) {
    if (n < 1 || dense.size() < static_cast<size_t>(n) * n)
        throw std::invalid_argument("hermitian_dense_eigenvalues: size mismatch");
    std::vector<double> w(n);
    lapack_int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'L', n,
                                    reinterpret_cast<lapack_complex_double*>(dense.data()), n,
                                    w.data());
    if (info != 0)
        throw std::runtime_error("zheev failed, info = " + std::to_string(info));
    return w;
}

}  // namespace mpemba
