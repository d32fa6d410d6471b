#include "lgcn/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "lgcn/errors.hpp"
#include "lgcn/rng.hpp"

namespace lgcn {

namespace {

void fix_column_signs(Matrix& m) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double lead = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (std::abs(m(i, j)) > 1e-12) {
                lead = m(i, j);
                break;
            }
        }
        if (lead < 0.0)
            for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = -m(i, j);
    }
}

} // namespace

EigenSystem dense_eigensystem(const Matrix& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("dense_eigensystem: square matrix required");
    const auto n = static_cast<Eigen::Index>(s.rows());
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        s.data(), n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("dense_eigensystem: eigensolver did not converge");

    EigenSystem es;
    es.values.resize(s.rows());
    es.vectors = Matrix(s.rows(), s.cols());
    // Eigen sorts ascending; flip to descending.
    for (std::size_t j = 0; j < s.cols(); ++j) {
        const auto src = static_cast<Eigen::Index>(s.cols() - 1 - j);
        es.values[j] = solver.eigenvalues()(src);
        for (std::size_t i = 0; i < s.rows(); ++i)
            es.vectors(i, j) = solver.eigenvectors()(static_cast<Eigen::Index>(i), src);
    }
    fix_column_signs(es.vectors);
    return es;
}

Matrix graph_fourier(const EigenSystem& es, const Matrix& x) {
    if (x.rows() != es.vectors.rows())
        throw std::invalid_argument("graph_fourier: dimension mismatch");
    return matmul(transpose(es.vectors), x);
}

Matrix inverse_graph_fourier(const EigenSystem& es, const Matrix& y) {
    if (y.rows() != es.vectors.cols())
        throw std::invalid_argument("inverse_graph_fourier: dimension mismatch");
    return matmul(es.vectors, y);
}

Matrix chebyshev_filter(const SparseMatrix& laplacian, const Matrix& x,
                        const std::vector<double>& coeffs, double lambda_max) {
    if (coeffs.empty()) throw std::invalid_argument("chebyshev_filter: need at least one coefficient");
    if (!(lambda_max > 0.0)) throw std::invalid_argument("chebyshev_filter: lambda_max must be > 0");
    if (static_cast<int>(x.rows()) != laplacian.dim())
        throw std::invalid_argument("chebyshev_filter: dimension mismatch");

    const SparseMatrix scaled = laplacian.scaled(2.0 / lambda_max).plus_scaled_identity(-1.0);
    Matrix prev = x;                       // X_tilde(0)
    Matrix out = coeffs[0] * prev;
    if (coeffs.size() == 1) return out;
    Matrix curr = scaled.multiply(x);      // X_tilde(1)
    out += coeffs[1] * curr;
    for (std::size_t t = 2; t < coeffs.size(); ++t) {
        Matrix next = 2.0 * scaled.multiply(curr) - prev;
        out += coeffs[t] * next;
        prev = std::move(curr);
        curr = std::move(next);
    }
    return out;
}

Matrix polynomial_filter(const SparseMatrix& s, const Matrix& x, const std::vector<Matrix>& weights) {
    if (weights.empty()) throw std::invalid_argument("polynomial_filter: need at least one weight");
    if (static_cast<int>(x.rows()) != s.dim())
        throw std::invalid_argument("polynomial_filter: dimension mismatch");
    for (const Matrix& w : weights)
        if (w.rows() != x.cols() || w.cols() != weights.front().cols())
            throw std::invalid_argument("polynomial_filter: weight shape mismatch");

    Matrix z = x;
    Matrix out = matmul(z, weights[0]);
    for (std::size_t t = 1; t < weights.size(); ++t) {
        z = s.multiply(z);
        out += matmul(z, weights[t]);
    }
    return out;
}

double estimate_lambda_max(const SparseMatrix& s, int power_iters, std::uint64_t seed) {
    if (s.dim() <= 64) {
        const EigenSystem es = dense_eigensystem(s.to_dense());
        double lmax = 0.0;
        for (double v : es.values) lmax = std::max(lmax, std::abs(v));
        return lmax;
    }
    Rng rng(seed);
    std::vector<double> v = rng.unit_vector(static_cast<std::size_t>(s.dim()));
    double lambda = 0.0;
    for (int it = 0; it < power_iters; ++it) {
        std::vector<double> w = s.multiply(v);
        const double nw = norm2(w);
        if (nw == 0.0) return 0.0;
        lambda = dot(v, w);
        scale(1.0 / nw, w);
        v = std::move(w);
    }
    return std::abs(lambda);
}

DiffusionMap diffusion_map(const Graph& g, int t) {
    if (t < 0) throw std::invalid_argument("diffusion_map: scale must be non-negative");
    const std::vector<double> deg = degree_vector(g, false);
    for (int i = 0; i < g.num_nodes; ++i)
        if (deg[i] == 0.0)
            throw ZeroDegreeNodeError("diffusion_map: node " + std::to_string(i) + " has zero degree");

    const SparseMatrix s = build_operator(g, {LaplacianKind::Affinity, false});
    const EigenSystem es = dense_eigensystem(s.to_dense());

    DiffusionMap dm;
    dm.t = t;
    dm.values = es.values;
    dm.psi = es.vectors;
    for (std::size_t i = 0; i < dm.psi.rows(); ++i) {
        const double f = 1.0 / std::sqrt(deg[i]);
        for (std::size_t l = 0; l < dm.psi.cols(); ++l) dm.psi(i, l) *= f;
    }
    return dm;
}

Matrix diffusion_embedding(const DiffusionMap& dm, int top_m) {
    const std::size_t n = dm.psi.rows();
    std::size_t m = top_m <= 0 ? dm.psi.cols() : std::min<std::size_t>(static_cast<std::size_t>(top_m), dm.psi.cols());
    Matrix phi(n, m);
    for (std::size_t l = 0; l < m; ++l) {
        const double lp = dm.t == 0 ? 1.0 : std::pow(dm.values[l], dm.t);
        for (std::size_t i = 0; i < n; ++i) phi(i, l) = lp * dm.psi(i, l);
    }
    return phi;
}

double diffusion_distance(const DiffusionMap& dm, int i, int j) {
    const int n = static_cast<int>(dm.psi.rows());
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw std::invalid_argument("diffusion_distance: node index out of range");
    double s = 0.0;
    for (std::size_t l = 0; l < dm.psi.cols(); ++l) {
        const double lp = dm.t == 0 ? 1.0 : std::pow(dm.values[l], dm.t);
        const double d = lp * (dm.psi(static_cast<std::size_t>(i), l) - dm.psi(static_cast<std::size_t>(j), l));
        s += d * d;
    }
    return s;
}

Matrix frequency_representation(const EigenSystem& es, const Matrix& x, int t) {
    if (t < 0) throw std::invalid_argument("frequency_representation: scale must be non-negative");
    Matrix y = graph_fourier(es, x);
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const double lp = t == 0 ? 1.0 : std::pow(es.values[i], t);
        for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) *= lp;
    }
    return y;
}

} // namespace lgcn
