#pragma once

#include <vector>

#include "lgcn/graph.hpp"
#include "lgcn/matrix.hpp"

namespace lgcn {

/// Full eigendecomposition of a symmetric matrix, eigenvalues descending,
/// column signs fixed as in the Lanczos module.
struct EigenSystem {
    Matrix vectors;              // U, columns are eigenvectors
    std::vector<double> values;  // descending
};

/// Dense oracle; intended for N <= 1024.
EigenSystem dense_eigensystem(const Matrix& s);

Matrix graph_fourier(const EigenSystem& es, const Matrix& x);          // U^T X
Matrix inverse_graph_fourier(const EigenSystem& es, const Matrix& y);  // U Y

/// Polynomial filtering sum_t coeffs_t * X_tilde(t) with the Chebyshev
/// recursion on L_tilde = 2 L / lambda_max - I.
Matrix chebyshev_filter(const SparseMatrix& laplacian, const Matrix& x,
                        const std::vector<double>& coeffs, double lambda_max);

/// sum_t S^t X W_t via repeated sparse products; never materializes S^t.
Matrix polynomial_filter(const SparseMatrix& s, const Matrix& x, const std::vector<Matrix>& weights);

/// Largest-magnitude eigenvalue: dense oracle for small matrices, power
/// iteration otherwise.
double estimate_lambda_max(const SparseMatrix& s, int power_iters = 200, std::uint64_t seed = 7);

/// Eigenpairs of the random-walk matrix P = D^{-1} A obtained through the
/// symmetric affinity matrix: psi_l = D^{-1/2} u_l, same eigenvalues.
struct DiffusionMap {
    Matrix psi;                  // N x N, column l = psi_l
    std::vector<double> values;  // descending eigenvalues of P (= those of S)
    int t = 1;                   // diffusion time scale
};

DiffusionMap diffusion_map(const Graph& g, int t);

/// Row i = (lambda_1^t psi_1(i), ..., lambda_m^t psi_m(i)); m = top_m
/// coordinates (all N when top_m <= 0).
Matrix diffusion_embedding(const DiffusionMap& dm, int top_m = 0);

/// Squared embedding distance ||Phi_t(i) - Phi_t(j)||^2.
double diffusion_distance(const DiffusionMap& dm, int i, int j);

/// Lambda^t U^T X.
Matrix frequency_representation(const EigenSystem& es, const Matrix& x, int t);

} // namespace lgcn
