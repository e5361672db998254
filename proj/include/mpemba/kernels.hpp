#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mpemba/generator.hpp"

namespace mpemba {
namespace kernels {

/// Execution policy for the hot loops. Serial is the reference implementation;
/// parallel must produce bitwise-identical results (outputs are partitioned
/// across threads, reduction order per output is unchanged).
enum class Exec { serial, parallel };

/// y = G x for a tridiagonal generator.
void tridiag_apply(const TridiagonalGenerator& g, std::span<const double> x,
                   std::span<double> y, Exec exec = Exec::serial);
void tridiag_apply(const TridiagonalGenerator& g, std::span<const std::complex<double>> x,
                   std::span<std::complex<double>> y, Exec exec = Exec::serial);

/// a_k = <col_k(V), w> for all k; V column-major n x n.
void project_onto_basis(std::span<const double> V, int n, std::span<const double> w,
                        std::span<double> a, Exec exec);
void project_onto_basis(std::span<const double> V, int n,
                        std::span<const std::complex<double>> w,
                        std::span<std::complex<double>> a, Exec exec);

/// out[j] = V * (a .* exp(lambda * t_j)) for every sample time, parallel over
/// samples. out must hold times.size() vectors of length n.
void propagate_in_basis(std::span<const double> V, int n, std::span<const double> lambda,
                        std::span<const double> a, std::span<const double> times,
                        std::vector<std::vector<double>>& out, Exec exec);
void propagate_in_basis(std::span<const double> V, int n, std::span<const double> lambda,
                        std::span<const std::complex<double>> a, std::span<const double> times,
                        std::vector<std::vector<std::complex<double>>>& out, Exec exec);

}  // namespace kernels
}  // namespace mpemba
