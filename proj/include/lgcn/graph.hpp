#pragma once

#include <optional>
#include <tuple>
#include <vector>

#include "lgcn/matrix.hpp"
#include "lgcn/mlp.hpp"

namespace lgcn {

/// One undirected edge, stored once per unordered pair with i <= j.
struct Edge {
    int i;
    int j;
    double w;
};

/// Sparse weighted undirected graph with optional node features and labels.
/// Edges are canonicalized on construction: endpoints ordered, duplicate
/// pairs summed, weights finite and non-negative.
struct Graph {
    int num_nodes = 0;
    std::vector<Edge> edges;                 // i <= j, unique pairs
    std::optional<Matrix> features;          // N x F
    std::vector<int> labels;                 // per-node class ids (classification)
    std::vector<double> target;              // per-graph real vector (regression)

    static Graph from_edges(int num_nodes, const std::vector<Edge>& raw);
    void validate() const;
    std::size_t num_edges() const { return edges.size(); }
};

enum class LaplacianKind {
    Combinatorial,        // D - A
    RandomWalk,           // I - D^{-1} A
    SymmetricNormalized,  // I - D^{-1/2} A D^{-1/2}
    Affinity,             // D^{-1/2} A D^{-1/2}
};

struct OperatorSpec {
    LaplacianKind kind = LaplacianKind::Affinity;
    bool self_loops = false;  // replace A by A + I before degree computation
};

/// Compressed-row symmetric sparse matrix; column indices sorted and
/// unique within each row.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Builds from (row, col, value) triplets; duplicates are summed.
    static SparseMatrix from_triplets(int n, std::vector<std::tuple<int, int, double>> triplets);

    int dim() const { return n_; }
    std::size_t nnz() const { return values_.size(); }

    std::vector<double> multiply(const std::vector<double>& v) const;
    Matrix multiply(const Matrix& x) const;            // out = S * X
    std::vector<double> multiply_transpose(const std::vector<double>& v) const;
    Matrix to_dense() const;
    double entry(int i, int j) const;

    bool is_symmetric(double tol = 1e-10) const;
    SparseMatrix scaled(double factor) const;
    SparseMatrix plus_scaled_identity(double factor) const;

    const std::vector<int>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& column_indices() const { return column_indices_; }
    const std::vector<double>& values() const { return values_; }

private:
    int n_ = 0;
    std::vector<int> row_offsets_;
    std::vector<int> column_indices_;
    std::vector<double> values_;
};

/// Diagonal of the degree matrix: D_ii = sum_j A_ij over the symmetric
/// expansion, with A + I when self_loops is set.
std::vector<double> degree_vector(const Graph& g, bool self_loops);

/// Symmetric adjacency as CSR, optionally with unit self-loops added.
SparseMatrix adjacency_matrix(const Graph& g, bool self_loops);

/// Selected Laplacian / affinity operator. Zero-degree nodes get
/// (D^{-1/2})_ii = 0 except for RandomWalk, which throws.
SparseMatrix build_operator(const Graph& g, const OperatorSpec& spec);

enum class EpsilonMode { MeanEdgeDistance, Fixed };

/// Parameters of the anisotropic graph kernel: a feature map (MLP) and
/// the bandwidth choice.
struct KernelParams {
    MlpParams theta;                                   // empty layers = identity map
    EpsilonMode epsilon_mode = EpsilonMode::MeanEdgeDistance;
    double fixed_epsilon = 1.0;
};

struct KernelResult {
    SparseMatrix weights;    // A_ij = exp(-||f(x_i)-f(x_j)||^2 / eps) on edges
    double epsilon = 0.0;
    bool epsilon_fallback = false;  // mean distance was 0; eps forced to 1
};

KernelResult graph_kernel_weights(const Graph& g, const Matrix& x, const KernelParams& params);

} // namespace lgcn
