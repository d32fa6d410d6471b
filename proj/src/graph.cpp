#include "lgcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "lgcn/errors.hpp"

namespace lgcn {

Graph Graph::from_edges(int num_nodes, const std::vector<Edge>& raw) {
    Graph g;
    g.num_nodes = num_nodes;
    std::map<std::pair<int, int>, double> acc;
    for (const Edge& e : raw) {
        int a = std::min(e.i, e.j);
        int b = std::max(e.i, e.j);
        acc[{a, b}] += e.w;  // duplicate pairs summed during ingestion
    }
    g.edges.reserve(acc.size());
    for (const auto& [key, w] : acc) g.edges.push_back({key.first, key.second, w});
    g.validate();
    return g;
}

void Graph::validate() const {
    if (num_nodes < 0) throw std::invalid_argument("Graph: negative node count");
    for (const Edge& e : edges) {
        if (e.i < 0 || e.j < 0 || e.i >= num_nodes || e.j >= num_nodes)
            throw std::invalid_argument("Graph: edge references node index >= N");
        if (e.i > e.j) throw std::invalid_argument("Graph: edges must be stored with i <= j");
        if (!std::isfinite(e.w) || e.w < 0.0)
            throw std::invalid_argument("Graph: edge weights must be finite and non-negative");
    }
    if (features && static_cast<int>(features->rows()) != num_nodes)
        throw std::invalid_argument("Graph: feature row count != N");
    if (!labels.empty() && static_cast<int>(labels.size()) != num_nodes)
        throw std::invalid_argument("Graph: label count != N");
}

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<std::tuple<int, int, double>> triplets) {
    for (const auto& [i, j, v] : triplets) {
        (void)v;
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw std::invalid_argument("SparseMatrix: triplet index out of range");
    }
    std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    SparseMatrix m;
    m.n_ = n;
    m.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    std::size_t k = 0;
    while (k < triplets.size()) {
        auto [i, j, v] = triplets[k];
        double sum = v;
        std::size_t next = k + 1;
        while (next < triplets.size() && std::get<0>(triplets[next]) == i &&
               std::get<1>(triplets[next]) == j) {
            sum += std::get<2>(triplets[next]);
            ++next;
        }
        m.column_indices_.push_back(j);
        m.values_.push_back(sum);
        ++m.row_offsets_[static_cast<std::size_t>(i) + 1];
        k = next;
    }
    for (int i = 0; i < n; ++i) m.row_offsets_[i + 1] += m.row_offsets_[i];
    return m;
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != n_)
        throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
    std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            s += values_[k] * v[column_indices_[k]];
        out[i] = s;
    }
    return out;
}

std::vector<double> SparseMatrix::multiply_transpose(const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != n_)
        throw std::invalid_argument("SparseMatrix::multiply_transpose: dimension mismatch");
    std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i)
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            out[column_indices_[k]] += values_[k] * v[i];
    return out;
}

Matrix SparseMatrix::multiply(const Matrix& x) const {
    if (static_cast<int>(x.rows()) != n_)
        throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
    Matrix out(x.rows(), x.cols());
    for (int i = 0; i < n_; ++i) {
        double* orow = out.data() + static_cast<std::size_t>(i) * x.cols();
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            const double v = values_[k];
            const double* xrow = x.data() + static_cast<std::size_t>(column_indices_[k]) * x.cols();
            for (std::size_t j = 0; j < x.cols(); ++j) orow[j] += v * xrow[j];
        }
    }
    return out;
}

Matrix SparseMatrix::to_dense() const {
    Matrix d(static_cast<std::size_t>(n_), static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            d(i, column_indices_[k]) = values_[k];
    return d;
}

double SparseMatrix::entry(int i, int j) const {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
        if (column_indices_[k] == j) return values_[k];
    return 0.0;
}

bool SparseMatrix::is_symmetric(double tol) const {
    for (int i = 0; i < n_; ++i)
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            if (std::abs(values_[k] - entry(column_indices_[k], i)) > tol) return false;
    return true;
}

SparseMatrix SparseMatrix::scaled(double factor) const {
    SparseMatrix m = *this;
    for (double& v : m.values_) v *= factor;
    return m;
}

SparseMatrix SparseMatrix::plus_scaled_identity(double factor) const {
    std::vector<std::tuple<int, int, double>> triplets;
    triplets.reserve(values_.size() + static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            triplets.emplace_back(i, column_indices_[k], values_[k]);
    for (int i = 0; i < n_; ++i) triplets.emplace_back(i, i, factor);
    return from_triplets(n_, std::move(triplets));
}

std::vector<double> degree_vector(const Graph& g, bool self_loops) {
    g.validate();
    std::vector<double> d(static_cast<std::size_t>(g.num_nodes), self_loops ? 1.0 : 0.0);
    for (const Edge& e : g.edges) {
        d[e.i] += e.w;
        if (e.j != e.i) d[e.j] += e.w;
    }
    return d;
}

SparseMatrix adjacency_matrix(const Graph& g, bool self_loops) {
    std::vector<std::tuple<int, int, double>> triplets;
    triplets.reserve(2 * g.edges.size() + (self_loops ? g.num_nodes : 0));
    for (const Edge& e : g.edges) {
        triplets.emplace_back(e.i, e.j, e.w);
        if (e.i != e.j) triplets.emplace_back(e.j, e.i, e.w);
    }
    if (self_loops)
        for (int i = 0; i < g.num_nodes; ++i) triplets.emplace_back(i, i, 1.0);
    return SparseMatrix::from_triplets(g.num_nodes, std::move(triplets));
}

SparseMatrix build_operator(const Graph& g, const OperatorSpec& spec) {
    g.validate();
    const std::vector<double> deg = degree_vector(g, spec.self_loops);
    const SparseMatrix a = adjacency_matrix(g, spec.self_loops);

    std::vector<std::tuple<int, int, double>> triplets;
    switch (spec.kind) {
    case LaplacianKind::Combinatorial: {
        for (int i = 0; i < a.dim(); ++i)
            for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
                triplets.emplace_back(i, a.column_indices()[k], -a.values()[k]);
        for (int i = 0; i < g.num_nodes; ++i) triplets.emplace_back(i, i, deg[i]);
        break;
    }
    case LaplacianKind::RandomWalk: {
        for (int i = 0; i < g.num_nodes; ++i)
            if (deg[i] == 0.0)
                throw ZeroDegreeNodeError("random-walk operator needs D^{-1}: node " +
                                          std::to_string(i) + " has zero degree");
        for (int i = 0; i < a.dim(); ++i)
            for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
                triplets.emplace_back(i, a.column_indices()[k], -a.values()[k] / deg[i]);
        for (int i = 0; i < g.num_nodes; ++i) triplets.emplace_back(i, i, 1.0);
        break;
    }
    case LaplacianKind::SymmetricNormalized:
    case LaplacianKind::Affinity: {
        std::vector<double> dinv_sqrt(deg.size());
        for (std::size_t i = 0; i < deg.size(); ++i)
            dinv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
        const double sign = spec.kind == LaplacianKind::Affinity ? 1.0 : -1.0;
        for (int i = 0; i < a.dim(); ++i)
            for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
                const int j = a.column_indices()[k];
                triplets.emplace_back(i, j, sign * dinv_sqrt[i] * a.values()[k] * dinv_sqrt[j]);
            }
        if (spec.kind == LaplacianKind::SymmetricNormalized)
            for (int i = 0; i < g.num_nodes; ++i) triplets.emplace_back(i, i, 1.0);
        break;
    }
    }
    return SparseMatrix::from_triplets(g.num_nodes, std::move(triplets));
}

KernelResult graph_kernel_weights(const Graph& g, const Matrix& x, const KernelParams& params) {
    g.validate();
    if (static_cast<int>(x.rows()) != g.num_nodes)
        throw std::invalid_argument("graph_kernel_weights: feature rows != N");
    if (params.epsilon_mode == EpsilonMode::Fixed && !(params.fixed_epsilon > 0.0))
        throw std::invalid_argument("graph_kernel_weights: fixed epsilon must be > 0");
    if (params.epsilon_mode == EpsilonMode::MeanEdgeDistance && g.edges.empty())
        throw std::invalid_argument("graph_kernel_weights: mean-edge-distance epsilon needs at least one edge");

    const Matrix h = params.theta.forward(x);
    std::vector<double> sq_dist(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        double s = 0.0;
        for (std::size_t c = 0; c < h.cols(); ++c) {
            const double d = h(g.edges[e].i, c) - h(g.edges[e].j, c);
            s += d * d;
        }
        sq_dist[e] = s;
    }

    KernelResult result;
    double eps = params.fixed_epsilon;
    if (params.epsilon_mode == EpsilonMode::MeanEdgeDistance) {
        double mean = 0.0;
        for (double d : sq_dist) mean += d;
        mean /= static_cast<double>(sq_dist.size());
        if (mean == 0.0) {
            eps = 1.0;  // all embedded features identical; keep A_ij = exp(0) = 1
            result.epsilon_fallback = true;
        } else {
            eps = mean;
        }
    }
    result.epsilon = eps;

    std::vector<std::tuple<int, int, double>> triplets;
    triplets.reserve(2 * g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const double w = std::exp(-sq_dist[e] / eps);
        triplets.emplace_back(g.edges[e].i, g.edges[e].j, w);
        if (g.edges[e].i != g.edges[e].j) triplets.emplace_back(g.edges[e].j, g.edges[e].i, w);
    }
    result.weights = SparseMatrix::from_triplets(g.num_nodes, std::move(triplets));
    return result;
}

} // namespace lgcn
