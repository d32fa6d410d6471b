#include "lgcn/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lgcn/errors.hpp"
#include "lgcn/rng.hpp"
#include "lgcn/spectral.hpp"

namespace lgcn {

namespace {

double pythag(double a, double b) {
    const double absa = std::abs(a), absb = std::abs(b);
    if (absa > absb) {
        const double r = absb / absa;
        return absa * std::sqrt(1.0 + r * r);
    }
    if (absb == 0.0) return 0.0;
    const double r = absa / absb;
    return absb * std::sqrt(1.0 + r * r);
}

/// Make the first nonzero component of each column non-negative.
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

std::vector<double> make_start_vector(const SparseMatrix& s, const LanczosOptions& opts) {
    const std::size_t n = static_cast<std::size_t>(s.dim());
    switch (opts.start) {
    case LanczosOptions::Start::SeededRandomUnit: {
        Rng rng(opts.seed);
        return rng.unit_vector(n);
    }
    case LanczosOptions::Start::UniformUnit: {
        std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
        return v;
    }
    case LanczosOptions::Start::Given: {
        std::vector<double> v = opts.start_vector;
        if (v.size() != n) throw std::invalid_argument("lanczos: start vector has wrong length");
        const double nv = norm2(v);
        if (nv == 0.0) throw std::invalid_argument("lanczos: start vector has zero norm");
        scale(1.0 / nv, v);
        return v;
    }
    }
    throw std::logic_error("unreachable");
}

} // namespace

Matrix LanczosDecomposition::tridiagonal() const {
    const std::size_t k = static_cast<std::size_t>(steps_completed);
    Matrix t(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        t(i, i) = t_diag[i];
        if (i + 1 < k) {
            t(i, i + 1) = t_offdiag[i];
            t(i + 1, i) = t_offdiag[i];
        }
    }
    return t;
}

void tridiag_eigendecompose(const std::vector<double>& diag, const std::vector<double>& offdiag,
                            std::vector<double>& eigenvalues, Matrix& eigenvectors) {
    const int n = static_cast<int>(diag.size());
    if (n == 0) {
        eigenvalues.clear();
        eigenvectors = Matrix();
        return;
    }
    if (static_cast<int>(offdiag.size()) != n - 1)
        throw std::invalid_argument("tridiag_eigendecompose: offdiag length must be n-1");

    std::vector<double> d = diag;
    std::vector<double> e(offdiag);
    e.push_back(0.0);  // e[n-1] sentinel
    Matrix z = Matrix::identity(static_cast<std::size_t>(n));

    // QL with implicit shifts; rotations accumulated into z.
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) + dd == dd) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw ConvergenceError("tridiag_eigendecompose: sweep cap (50) exceeded");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = pythag(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = pythag(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });

    eigenvalues.resize(static_cast<std::size_t>(n));
    eigenvectors = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < order.size(); ++j) {
        eigenvalues[j] = d[order[j]];
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
            eigenvectors(i, j) = z(i, order[j]);
    }
    fix_column_signs(eigenvectors);
}

LanczosDecomposition lanczos_decompose(const SparseMatrix& s, const LanczosOptions& opts) {
    const int n = s.dim();
    if (n < 1) throw std::invalid_argument("lanczos_decompose: dimension must be >= 1");
    if (opts.steps < 1) throw std::invalid_argument("lanczos_decompose: K must be >= 1");
    if (!(opts.epsilon > 0.0)) throw std::invalid_argument("lanczos_decompose: epsilon must be > 0");
    if (!s.is_symmetric(1e-10))
        throw std::invalid_argument("lanczos_decompose: input matrix is not symmetric");

    // Krylov subspaces of R^n cannot exceed dimension n.
    const int k_max = std::min(opts.steps, n);

    std::vector<std::vector<double>> q;
    q.reserve(static_cast<std::size_t>(k_max));
    q.push_back(make_start_vector(s, opts));

    std::vector<double> gammas, betas;
    bool breakdown = false;
    double beta_prev = 0.0;
    for (int j = 0; j < k_max; ++j) {
        std::vector<double> z = s.multiply(q[static_cast<std::size_t>(j)]);
        const double gamma = dot(q[static_cast<std::size_t>(j)], z);
        gammas.push_back(gamma);
        axpy(-gamma, q[static_cast<std::size_t>(j)], z);
        if (j > 0) axpy(-beta_prev, q[static_cast<std::size_t>(j) - 1], z);
        if (opts.reorthogonalize)
            for (const auto& qi : q) axpy(-dot(z, qi), qi, z);
        const double beta = norm2(z);
        if (beta < opts.epsilon) {
            breakdown = true;
            break;
        }
        if (j + 1 < k_max) {
            betas.push_back(beta);
            scale(1.0 / beta, z);
            q.push_back(std::move(z));
            beta_prev = beta;
        }
    }

    LanczosDecomposition d;
    d.steps_completed = static_cast<int>(q.size());
    d.breakdown = breakdown;
    d.seed = opts.start == LanczosOptions::Start::SeededRandomUnit ? opts.seed : 0;
    d.clamp_ritz = opts.clamp_ritz;
    d.t_diag = std::move(gammas);
    d.t_diag.resize(q.size());
    d.t_offdiag = std::move(betas);
    d.t_offdiag.resize(q.size() - 1);

    d.basis = Matrix(static_cast<std::size_t>(n), q.size());
    for (std::size_t j = 0; j < q.size(); ++j) d.basis.set_col(j, q[j]);

    std::vector<double> ritz;
    Matrix b;
    tridiag_eigendecompose(d.t_diag, d.t_offdiag, ritz, b);
    d.ritz_values = std::move(ritz);
    d.ritz_vectors = matmul(d.basis, b);
    fix_column_signs(d.ritz_vectors);
    return d;
}

Matrix lowrank_reconstruct(const LanczosDecomposition& d) {
    Matrix scaled = d.ritz_vectors;
    for (std::size_t j = 0; j < scaled.cols(); ++j)
        for (std::size_t i = 0; i < scaled.rows(); ++i) scaled(i, j) *= d.ritz_values[j];
    return matmul(scaled, transpose(d.ritz_vectors));
}

Matrix lowrank_power(const LanczosDecomposition& d, int t, const Matrix& x) {
    if (t < 0) throw std::invalid_argument("lowrank_power: exponent must be non-negative");
    if (x.rows() != d.ritz_vectors.rows())
        throw std::invalid_argument("lowrank_power: dimension mismatch");
    Matrix proj = matmul(transpose(d.ritz_vectors), x);  // K' x F
    for (std::size_t k = 0; k < proj.rows(); ++k) {
        double r = d.ritz_values[k];
        if (d.clamp_ritz) r = std::clamp(r, -1.0, 1.0);
        const double rp = t == 0 ? 1.0 : std::pow(r, t);
        for (std::size_t j = 0; j < proj.cols(); ++j) proj(k, j) *= rp;
    }
    return matmul(d.ritz_vectors, proj);
}

double chebyshev_t(int m, double x) {
    if (m == 0) return 1.0;
    if (m == 1) return x;
    double tkm1 = 1.0, tk = x;
    for (int i = 2; i <= m; ++i) {
        const double next = 2.0 * x * tk - tkm1;
        tkm1 = tk;
        tk = next;
    }
    return tk;
}

double bound_theorem1(const Matrix& s_dense, const std::vector<double>& v, int steps, int j) {
    const int n = static_cast<int>(s_dense.rows());
    if (s_dense.rows() != s_dense.cols())
        throw std::invalid_argument("bound_theorem1: square matrix required");
    if (!(j > 1 && j < n)) throw std::invalid_argument("bound_theorem1: need 1 < j < N");
    if (!(steps > j)) throw std::invalid_argument("bound_theorem1: need K > j");
    if (static_cast<int>(v.size()) != n)
        throw std::invalid_argument("bound_theorem1: start vector length mismatch");

    const EigenSystem es = dense_eigensystem(s_dense);
    const std::vector<double>& lam = es.values;

    std::vector<double> vhat = v;
    const double nv = norm2(vhat);
    if (nv == 0.0) throw std::invalid_argument("bound_theorem1: start vector has zero norm");
    scale(1.0 / nv, vhat);

    // Components of v in the eigenbasis.
    std::vector<double> comp(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += es.vectors(i, k) * vhat[static_cast<std::size_t>(i)];
        comp[static_cast<std::size_t>(k)] = s;
    }

    const double spread = std::abs(lam.front() - lam.back());
    const double gap_tol = 1e-12 * std::max(1.0, spread);

    double product = 1.0;  // prod_{k<j} (lam_k - lam_N) / (lam_k - lam_j)
    for (int k = 0; k < j - 1; ++k) {
        const double denom = lam[k] - lam[static_cast<std::size_t>(j) - 1];
        if (std::abs(denom) <= gap_tol)
            throw DegenerateSpectrumError("bound_theorem1: lambda_k == lambda_j in the gap product");
        product *= (lam[k] - lam.back()) / denom;
    }

    double head = 0.0;
    double prefix_sq = 0.0;  // sum_{k<=i} <v, u_k>^2
    for (int i = 1; i <= j; ++i) {
        prefix_sq += comp[static_cast<std::size_t>(i) - 1] * comp[static_cast<std::size_t>(i) - 1];
        const double sin_sub = std::sqrt(std::max(0.0, 1.0 - prefix_sq));
        const double cos_vec = std::abs(comp[static_cast<std::size_t>(i) - 1]);
        if (cos_vec <= 1e-12)
            throw DegenerateSpectrumError("bound_theorem1: start vector orthogonal to an eigenvector");
        const double gap_denom = lam[static_cast<std::size_t>(i)] - lam.back();  // lam_{i+1} - lam_N
        if (std::abs(gap_denom) <= gap_tol)
            throw DegenerateSpectrumError("bound_theorem1: lambda_{i+1} == lambda_N in the Chebyshev gap");
        const double gamma = (lam[static_cast<std::size_t>(i) - 1] - lam[static_cast<std::size_t>(i)]) / gap_denom;
        const double cheb = chebyshev_t(steps - i, 1.0 + 2.0 * gamma);
        double term = sin_sub * product / (cos_vec * cheb);
        if (!std::isfinite(term)) term = 0.0;  // overflowing Chebyshev sends the term to zero
        head += lam[static_cast<std::size_t>(i) - 1] * lam[static_cast<std::size_t>(i) - 1] * term * term;
    }

    double tail = 0.0;
    for (int i = j; i < n; ++i) tail += lam[static_cast<std::size_t>(i)] * lam[static_cast<std::size_t>(i)];
    return head + tail;
}

} // namespace lgcn
