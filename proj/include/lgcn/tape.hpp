#pragma once

#include <functional>
#include <vector>

#include "lgcn/graph.hpp"
#include "lgcn/matrix.hpp"

namespace lgcn::ad {

using TensorId = int;

/// Eager reverse-mode differentiation tape over dense matrices. Values
/// are computed when an op is recorded; backward() replays the recorded
/// adjoint closures in reverse. Scalars are 1x1 tensors.
///
/// A Tape instance must stay at a fixed address once ops are recorded
/// (closures capture `this`); it is therefore non-copyable and
/// non-movable. Forward/backward over one tape is single-threaded.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;
    Tape(Tape&&) = delete;
    Tape& operator=(Tape&&) = delete;

    TensorId constant(Matrix value);
    TensorId parameter(Matrix value);

    const Matrix& value(TensorId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    const Matrix& grad(TensorId id) const { return nodes_[static_cast<std::size_t>(id)].grad; }
    double scalar(TensorId id) const { return value(id)(0, 0); }
    std::size_t size() const { return nodes_.size(); }

    // Elementwise and linear algebra.
    TensorId add(TensorId a, TensorId b);
    TensorId sub(TensorId a, TensorId b);
    TensorId mul(TensorId a, TensorId b);  // elementwise
    TensorId matmul(TensorId a, TensorId b);
    TensorId transpose(TensorId a);
    TensorId scale(TensorId a, double c);
    TensorId neg(TensorId a) { return scale(a, -1.0); }
    TensorId relu(TensorId a);
    TensorId tanh(TensorId a);
    TensorId exp(TensorId a);

    // Broadcast against a 1x1 tensor.
    TensorId mul_scalar(TensorId a, TensorId s);
    TensorId div_scalar(TensorId a, TensorId s);
    TensorId sqrt_scalar(TensorId s);

    // Reductions and shape ops.
    TensorId row_sums(TensorId a);   // R x C -> R x 1
    TensorId mean_rows(TensorId a);  // R x C -> 1 x C
    TensorId sum_all(TensorId a);    // -> 1 x 1
    TensorId mean_all(TensorId a);   // -> 1 x 1
    TensorId reshape(TensorId a, std::size_t rows, std::size_t cols);
    TensorId pad_to(TensorId a, std::size_t rows, std::size_t cols);  // top-left embed
    TensorId concat_cols(const std::vector<TensorId>& parts);
    TensorId add_rowvec(TensorId a, TensorId row);  // broadcast 1 x C over rows

    // Structured ops.
    TensorId gather_rows(TensorId a, std::vector<int> rows);
    TensorId scale_rows(TensorId a, TensorId v);  // v is R x 1
    TensorId scale_cols(TensorId a, TensorId v);  // v is C x 1
    TensorId rsqrt_or_zero(TensorId a);           // elementwise; 0 maps to 0
    TensorId sparse_matmul(const SparseMatrix& s, TensorId a);
    /// Symmetric N x N assembly of per-edge weights (E x 1) over a fixed
    /// edge list; optionally adds the identity (self-loops).
    TensorId scatter_edges(TensorId w, const std::vector<Edge>& edges, int n, bool add_identity);
    /// Symmetric tridiagonal from 1x1 diagonal / off-diagonal entries.
    TensorId tridiagonal(const std::vector<TensorId>& diag, const std::vector<TensorId>& offdiag);

    // Loss heads (fused forward+adjoint).
    TensorId softmax_cross_entropy(TensorId logits, const std::vector<int>& labels,
                                   const std::vector<int>& mask);
    TensorId mse(TensorId pred, const Matrix& target);

    /// Seeds d(root)/d(root) = 1 and accumulates adjoints; root must be 1x1.
    void backward(TensorId root);

private:
    struct Node {
        Matrix value;
        Matrix grad;
        bool requires_grad = false;
        std::function<void()> backprop;  // empty for leaves
    };

    TensorId add_node(Matrix value, bool requires_grad, std::function<void()> backprop);
    bool needs(TensorId id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }
    Matrix& grad_ref(TensorId id) { return nodes_[static_cast<std::size_t>(id)].grad; }

    std::vector<Node> nodes_;
};

} // namespace lgcn::ad
