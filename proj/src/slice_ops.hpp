#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "grushin/hermite.hpp"

namespace grushin::detail {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Applies A (m x n) along every axis of a d-dimensional row-major tensor of
// shape n^d, producing shape m^d.
std::vector<double> mode_product_all(const RowMat& A, int d, const std::vector<double>& x);

// B(i, a) = xi^{1/4} h_a(sqrt(xi) x_i) on the prime axis.
RowMat slice_basis(const PrimeGrid& g, double xi, int K);

// First 1-D level whose discrete Gram row deviates from the identity by more
// than tol, or K+1 if all levels up to K are resolved.
int first_unresolved_level(const RowMat& B, double h, double tol);

// Sum of indices of the flat coefficient index within a (K+1)^d tensor.
std::vector<int> level_of_index(int K, int d);

// Apply a per-level spectral multiplier to the x'-function f in place using
// basis B; mult[k] is the factor for level k (0..K).
void apply_levels(const RowMat& B, double h, int d, const std::vector<std::complex<double>>& mult,
                  std::vector<std::complex<double>>& f);

}  // namespace grushin::detail
