#pragma once

#include <cstdint>
#include <vector>

#include "lgcn/graph.hpp"
#include "lgcn/matrix.hpp"

namespace lgcn {

/// Output of the K-step tridiagonalization plus the Ritz step:
/// basis Q (N x K'), symmetric tridiagonal T (diag/offdiag), Ritz
/// vectors V = Q B and Ritz values R (descending).
struct LanczosDecomposition {
    Matrix basis;                     // Q
    std::vector<double> t_diag;       // length K'
    std::vector<double> t_offdiag;    // length K'-1
    Matrix ritz_vectors;              // V, N x K'
    std::vector<double> ritz_values;  // R, descending
    int steps_completed = 0;          // K'
    bool breakdown = false;
    std::uint64_t seed = 0;           // start-vector seed when seeded
    bool clamp_ritz = false;          // operator spectrum known to lie in [-1, 1]

    Matrix tridiagonal() const;       // dense K' x K' T
};

struct LanczosOptions {
    enum class Start { SeededRandomUnit, Given, UniformUnit };

    int steps = 1;                    // K
    double epsilon = 1e-6;            // breakdown tolerance
    bool reorthogonalize = false;     // full Gram-Schmidt after the recurrence
    Start start = Start::SeededRandomUnit;
    std::uint64_t seed = 0;
    std::vector<double> start_vector; // used when start == Given
    bool clamp_ritz = false;          // set when the operator is an affinity matrix
};

/// K-step three-term recurrence with breakdown detection, followed by the
/// eigendecomposition of T. Input must be symmetric.
LanczosDecomposition lanczos_decompose(const SparseMatrix& s, const LanczosOptions& opts);

/// Eigendecomposition of a symmetric tridiagonal matrix by the QL
/// algorithm with implicit shifts. Eigenvalues returned descending with
/// orthogonal eigenvector columns; sign fixed so the first nonzero
/// component of each column is non-negative. Throws ConvergenceError
/// after 50 sweeps on one eigenvalue.
void tridiag_eigendecompose(const std::vector<double>& diag, const std::vector<double>& offdiag,
                            std::vector<double>& eigenvalues, Matrix& eigenvectors);

/// V diag(R) V^T.
Matrix lowrank_reconstruct(const LanczosDecomposition& d);

/// V diag(R)^t V^T x without forming the N x N operator. Ritz values are
/// clamped to [-1, 1] first when the decomposition came from an affinity
/// matrix; t = 0 gives V V^T x.
Matrix lowrank_power(const LanczosDecomposition& d, int t, const Matrix& x);

/// Right-hand side of the Frobenius error bound for the K-step
/// tridiagonal approximation started at v. Throws
/// DegenerateSpectrumError when a denominator degenerates (repeated
/// eigenvalues at the probed gaps or v orthogonal to an eigenvector).
double bound_theorem1(const Matrix& s_dense, const std::vector<double>& v, int steps, int j);

/// Chebyshev polynomial T_m(x) of the first kind (recurrence form).
double chebyshev_t(int m, double x);

} // namespace lgcn
