#include "lgcn/tape.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace lgcn::ad {

TensorId Tape::add_node(Matrix value, bool requires_grad, std::function<void()> backprop) {
    assert(value.all_finite());
    Node node;
    node.value = std::move(value);
    node.requires_grad = requires_grad;
    node.backprop = std::move(backprop);
    nodes_.push_back(std::move(node));
    return static_cast<TensorId>(nodes_.size()) - 1;
}

TensorId Tape::constant(Matrix value) { return add_node(std::move(value), false, {}); }

TensorId Tape::parameter(Matrix value) { return add_node(std::move(value), true, {}); }

TensorId Tape::add(TensorId a, TensorId b) {
    Matrix v = value(a) + value(b);
    const TensorId out = add_node(std::move(v), needs(a) || needs(b), {});
    nodes_.back().backprop = [this, a, b, out]() {
        if (needs(a)) grad_ref(a) += grad(out);
        if (needs(b)) grad_ref(b) += grad(out);
    };
    return out;
}

TensorId Tape::sub(TensorId a, TensorId b) {
    Matrix v = value(a) - value(b);
    const TensorId out = add_node(std::move(v), needs(a) || needs(b), {});
    nodes_.back().backprop = [this, a, b, out]() {
        if (needs(a)) grad_ref(a) += grad(out);
        if (needs(b)) grad_ref(b) -= grad(out);
    };
    return out;
}

TensorId Tape::mul(TensorId a, TensorId b) {
    Matrix v = hadamard(value(a), value(b));
    const TensorId out = add_node(std::move(v), needs(a) || needs(b), {});
    nodes_.back().backprop = [this, a, b, out]() {
        if (needs(a)) grad_ref(a) += hadamard(grad(out), value(b));
        if (needs(b)) grad_ref(b) += hadamard(grad(out), value(a));
    };
    return out;
}

TensorId Tape::matmul(TensorId a, TensorId b) {
    Matrix v = lgcn::matmul(value(a), value(b));
    const TensorId out = add_node(std::move(v), needs(a) || needs(b), {});
    nodes_.back().backprop = [this, a, b, out]() {
        if (needs(a)) grad_ref(a) += lgcn::matmul(grad(out), lgcn::transpose(value(b)));
        if (needs(b)) grad_ref(b) += lgcn::matmul(lgcn::transpose(value(a)), grad(out));
    };
    return out;
}

TensorId Tape::transpose(TensorId a) {
    Matrix v = lgcn::transpose(value(a));
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, out]() {
        if (needs(a)) grad_ref(a) += lgcn::transpose(grad(out));
    };
    return out;
}

TensorId Tape::scale(TensorId a, double c) {
    Matrix v = c * value(a);
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, c, out]() {
        if (needs(a)) grad_ref(a) += c * grad(out);
    };
    return out;
}

TensorId Tape::relu(TensorId a) {
    Matrix v = value(a);
    for (double& x : v.storage()) x = x > 0.0 ? x : 0.0;
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, out]() {
        if (!needs(a)) return;
        Matrix& ga = grad_ref(a);
        const Matrix& g = grad(out);
        const Matrix& x = value(a);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x.storage()[i] > 0.0) ga.storage()[i] += g.storage()[i];
    };
    return out;
}

TensorId Tape::tanh(TensorId a) {
    Matrix v = value(a);
    for (double& x : v.storage()) x = std::tanh(x);
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, out]() {
        if (!needs(a)) return;
        Matrix& ga = grad_ref(a);
        const Matrix& g = grad(out);
        const Matrix& y = value(out);
        for (std::size_t i = 0; i < y.size(); ++i)
            ga.storage()[i] += g.storage()[i] * (1.0 - y.storage()[i] * y.storage()[i]);
    };
    return out;
}

TensorId Tape::exp(TensorId a) {
    Matrix v = value(a);
    for (double& x : v.storage()) x = std::exp(x);
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, out]() {
        if (needs(a)) grad_ref(a) += hadamard(grad(out), value(out));
    };
    return out;
}

TensorId Tape::mul_scalar(TensorId a, TensorId s) {
    if (value(s).rows() != 1 || value(s).cols() != 1)
        throw std::invalid_argument("mul_scalar: scalar operand must be 1x1");
    Matrix v = scalar(s) * value(a);
    const TensorId out = add_node(std::move(v), needs(a) || needs(s), {});
    nodes_.back().backprop = [this, a, s, out]() {
        if (needs(a)) grad_ref(a) += scalar(s) * grad(out);
        if (needs(s)) {
            double acc = 0.0;
            const Matrix& g = grad(out);
            const Matrix& x = value(a);
            for (std::size_t i = 0; i < x.size(); ++i) acc += g.storage()[i] * x.storage()[i];
            grad_ref(s)(0, 0) += acc;
        }
    };
    return out;
}

TensorId Tape::div_scalar(TensorId a, TensorId s) {
    if (value(s).rows() != 1 || value(s).cols() != 1)
        throw std::invalid_argument("div_scalar: scalar operand must be 1x1");
    const double sv = scalar(s);
    if (sv == 0.0) throw std::invalid_argument("div_scalar: division by zero");
    Matrix v = (1.0 / sv) * value(a);
    const TensorId out = add_node(std::move(v), needs(a) || needs(s), {});
    nodes_.back().backprop = [this, a, s, out]() {
        const double sv2 = scalar(s);
        if (needs(a)) grad_ref(a) += (1.0 / sv2) * grad(out);
        if (needs(s)) {
            double acc = 0.0;
            const Matrix& g = grad(out);
            const Matrix& y = value(out);
            for (std::size_t i = 0; i < y.size(); ++i) acc += g.storage()[i] * y.storage()[i];
            grad_ref(s)(0, 0) -= acc / sv2;
        }
    };
    return out;
}

TensorId Tape::sqrt_scalar(TensorId s) {
    if (value(s).rows() != 1 || value(s).cols() != 1)
        throw std::invalid_argument("sqrt_scalar: operand must be 1x1");
    Matrix v(1, 1);
    v(0, 0) = std::sqrt(scalar(s));
    const TensorId out = add_node(std::move(v), needs(s), {});
    nodes_.back().backprop = [this, s, out]() {
        if (!needs(s)) return;
        const double y = scalar(out);
        if (y > 0.0) grad_ref(s)(0, 0) += grad(out)(0, 0) / (2.0 * y);
    };
    return out;
}

TensorId Tape::row_sums(TensorId a) {
    const Matrix& x = value(a);
    Matrix v(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j);
        v(i, 0) = s;
    }
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, out]() {
        if (!needs(a)) return;
        Matrix& ga = grad_ref(a);
        const Matrix& g = grad(out);
        for (std::size_t i = 0; i < ga.rows(); ++i)
            for (std::size_t j = 0; j < ga.cols(); ++j) ga(i, j) += g(i, 0);
    };
    return out;
}

TensorId Tape::mean_rows(TensorId a) {
    const Matrix& x = value(a);
    if (x.rows() == 0) throw std::invalid_argument("mean_rows: empty matrix");
    Matrix v(1, x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) s += x(i, j);
        v(0, j) = s / static_cast<double>(x.rows());
    }
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, out]() {
        if (!needs(a)) return;
        Matrix& ga = grad_ref(a);
        const Matrix& g = grad(out);
        const double inv = 1.0 / static_cast<double>(ga.rows());
        for (std::size_t i = 0; i < ga.rows(); ++i)
            for (std::size_t j = 0; j < ga.cols(); ++j) ga(i, j) += inv * g(0, j);
    };
    return out;
}

TensorId Tape::sum_all(TensorId a) {
    double s = 0.0;
    for (double x : value(a).storage()) s += x;
    Matrix v(1, 1);
    v(0, 0) = s;
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, out]() {
        if (!needs(a)) return;
        const double g = grad(out)(0, 0);
        for (double& x : grad_ref(a).storage()) x += g;
    };
    return out;
}

TensorId Tape::mean_all(TensorId a) {
    const double inv = 1.0 / static_cast<double>(value(a).size());
    return scale(sum_all(a), inv);
}

TensorId Tape::reshape(TensorId a, std::size_t rows, std::size_t cols) {
    const Matrix& x = value(a);
    if (rows * cols != x.size()) throw std::invalid_argument("reshape: size mismatch");
    Matrix v(rows, cols);
    v.storage() = x.storage();
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, out]() {
        if (!needs(a)) return;
        Matrix& ga = grad_ref(a);
        const Matrix& g = grad(out);
        for (std::size_t i = 0; i < ga.size(); ++i) ga.storage()[i] += g.storage()[i];
    };
    return out;
}

TensorId Tape::pad_to(TensorId a, std::size_t rows, std::size_t cols) {
    const Matrix& x = value(a);
    if (rows < x.rows() || cols < x.cols()) throw std::invalid_argument("pad_to: target too small");
    Matrix v(rows, cols);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) v(i, j) = x(i, j);
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, out]() {
        if (!needs(a)) return;
        Matrix& ga = grad_ref(a);
        const Matrix& g = grad(out);
        for (std::size_t i = 0; i < ga.rows(); ++i)
            for (std::size_t j = 0; j < ga.cols(); ++j) ga(i, j) += g(i, j);
    };
    return out;
}

TensorId Tape::concat_cols(const std::vector<TensorId>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: no operands");
    const std::size_t rows = value(parts[0]).rows();
    std::size_t cols = 0;
    bool any = false;
    for (TensorId p : parts) {
        if (value(p).rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
        cols += value(p).cols();
        any = any || needs(p);
    }
    Matrix v(rows, cols);
    std::size_t off = 0;
    for (TensorId p : parts) {
        const Matrix& x = value(p);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < x.cols(); ++j) v(i, off + j) = x(i, j);
        off += x.cols();
    }
    const TensorId out = add_node(std::move(v), any, {});
    nodes_.back().backprop = [this, parts, out]() {
        const Matrix& g = grad(out);
        std::size_t off2 = 0;
        for (TensorId p : parts) {
            Matrix& gp = grad_ref(p);
            if (needs(p)) {
                for (std::size_t i = 0; i < gp.rows(); ++i)
                    for (std::size_t j = 0; j < gp.cols(); ++j) gp(i, j) += g(i, off2 + j);
            }
            off2 += value(p).cols();
        }
    };
    return out;
}

TensorId Tape::add_rowvec(TensorId a, TensorId row) {
    const Matrix& x = value(a);
    const Matrix& r = value(row);
    if (r.rows() != 1 || r.cols() != x.cols())
        throw std::invalid_argument("add_rowvec: row vector shape mismatch");
    Matrix v = x;
    for (std::size_t i = 0; i < v.rows(); ++i)
        for (std::size_t j = 0; j < v.cols(); ++j) v(i, j) += r(0, j);
    const TensorId out = add_node(std::move(v), needs(a) || needs(row), {});
    nodes_.back().backprop = [this, a, row, out]() {
        const Matrix& g = grad(out);
        if (needs(a)) grad_ref(a) += g;
        if (needs(row)) {
            Matrix& gr = grad_ref(row);
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) gr(0, j) += g(i, j);
        }
    };
    return out;
}

TensorId Tape::gather_rows(TensorId a, std::vector<int> rows) {
    const Matrix& x = value(a);
    Matrix v(rows.size(), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] < 0 || static_cast<std::size_t>(rows[r]) >= x.rows())
            throw std::invalid_argument("gather_rows: index out of range");
        for (std::size_t j = 0; j < x.cols(); ++j) v(r, j) = x(static_cast<std::size_t>(rows[r]), j);
    }
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, rows = std::move(rows), out]() {
        if (!needs(a)) return;
        Matrix& ga = grad_ref(a);
        const Matrix& g = grad(out);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t j = 0; j < ga.cols(); ++j)
                ga(static_cast<std::size_t>(rows[r]), j) += g(r, j);
    };
    return out;
}

TensorId Tape::scale_rows(TensorId a, TensorId v) {
    const Matrix& x = value(a);
    const Matrix& s = value(v);
    if (s.cols() != 1 || s.rows() != x.rows())
        throw std::invalid_argument("scale_rows: scaling vector must be R x 1");
    Matrix out_v = x;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out_v(i, j) *= s(i, 0);
    const TensorId out = add_node(std::move(out_v), needs(a) || needs(v), {});
    nodes_.back().backprop = [this, a, v, out]() {
        const Matrix& g = grad(out);
        const Matrix& x2 = value(a);
        const Matrix& s2 = value(v);
        if (needs(a)) {
            Matrix& ga = grad_ref(a);
            for (std::size_t i = 0; i < x2.rows(); ++i)
                for (std::size_t j = 0; j < x2.cols(); ++j) ga(i, j) += g(i, j) * s2(i, 0);
        }
        if (needs(v)) {
            Matrix& gs = grad_ref(v);
            for (std::size_t i = 0; i < x2.rows(); ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < x2.cols(); ++j) acc += g(i, j) * x2(i, j);
                gs(i, 0) += acc;
            }
        }
    };
    return out;
}

TensorId Tape::scale_cols(TensorId a, TensorId v) {
    const Matrix& x = value(a);
    const Matrix& s = value(v);
    if (s.cols() != 1 || s.rows() != x.cols())
        throw std::invalid_argument("scale_cols: scaling vector must be C x 1");
    Matrix out_v = x;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out_v(i, j) *= s(j, 0);
    const TensorId out = add_node(std::move(out_v), needs(a) || needs(v), {});
    nodes_.back().backprop = [this, a, v, out]() {
        const Matrix& g = grad(out);
        const Matrix& x2 = value(a);
        const Matrix& s2 = value(v);
        if (needs(a)) {
            Matrix& ga = grad_ref(a);
            for (std::size_t i = 0; i < x2.rows(); ++i)
                for (std::size_t j = 0; j < x2.cols(); ++j) ga(i, j) += g(i, j) * s2(j, 0);
        }
        if (needs(v)) {
            Matrix& gs = grad_ref(v);
            for (std::size_t j = 0; j < x2.cols(); ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < x2.rows(); ++i) acc += g(i, j) * x2(i, j);
                gs(j, 0) += acc;
            }
        }
    };
    return out;
}

TensorId Tape::rsqrt_or_zero(TensorId a) {
    Matrix v = value(a);
    for (double& x : v.storage()) x = x > 0.0 ? 1.0 / std::sqrt(x) : 0.0;
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, a, out]() {
        if (!needs(a)) return;
        Matrix& ga = grad_ref(a);
        const Matrix& g = grad(out);
        const Matrix& x = value(a);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double xv = x.storage()[i];
            if (xv > 0.0)
                ga.storage()[i] += -0.5 * std::pow(xv, -1.5) * g.storage()[i];
        }
    };
    return out;
}

TensorId Tape::sparse_matmul(const SparseMatrix& s, TensorId a) {
    Matrix v = s.multiply(value(a));
    const TensorId out = add_node(std::move(v), needs(a), {});
    nodes_.back().backprop = [this, s, a, out]() {
        if (!needs(a)) return;
        // d a += S^T g, accumulated column-block wise.
        const Matrix& g = grad(out);
        Matrix& ga = grad_ref(a);
        for (int i = 0; i < s.dim(); ++i)
            for (int k = s.row_offsets()[i]; k < s.row_offsets()[i + 1]; ++k) {
                const int j = s.column_indices()[k];
                const double w = s.values()[k];
                for (std::size_t c = 0; c < g.cols(); ++c)
                    ga(static_cast<std::size_t>(j), c) += w * g(static_cast<std::size_t>(i), c);
            }
    };
    return out;
}

TensorId Tape::scatter_edges(TensorId w, const std::vector<Edge>& edges, int n, bool add_identity) {
    const Matrix& wv = value(w);
    if (wv.cols() != 1 || wv.rows() != edges.size())
        throw std::invalid_argument("scatter_edges: weights must be E x 1");
    Matrix v(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (std::size_t e = 0; e < edges.size(); ++e) {
        v(edges[e].i, edges[e].j) += wv(e, 0);
        if (edges[e].i != edges[e].j) v(edges[e].j, edges[e].i) += wv(e, 0);
    }
    if (add_identity)
        for (int i = 0; i < n; ++i) v(i, i) += 1.0;
    const TensorId out = add_node(std::move(v), needs(w), {});
    nodes_.back().backprop = [this, w, edges, out]() {
        if (!needs(w)) return;
        Matrix& gw = grad_ref(w);
        const Matrix& g = grad(out);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            gw(e, 0) += g(edges[e].i, edges[e].j);
            if (edges[e].i != edges[e].j) gw(e, 0) += g(edges[e].j, edges[e].i);
        }
    };
    return out;
}

TensorId Tape::tridiagonal(const std::vector<TensorId>& diag, const std::vector<TensorId>& offdiag) {
    const std::size_t k = diag.size();
    if (offdiag.size() + 1 != k && !(k == 0 && offdiag.empty()))
        throw std::invalid_argument("tridiagonal: offdiag length must be diag length - 1");
    bool any = false;
    Matrix v(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        v(i, i) = scalar(diag[i]);
        any = any || needs(diag[i]);
        if (i + 1 < k) {
            v(i, i + 1) = scalar(offdiag[i]);
            v(i + 1, i) = scalar(offdiag[i]);
            any = any || needs(offdiag[i]);
        }
    }
    const TensorId out = add_node(std::move(v), any, {});
    nodes_.back().backprop = [this, diag, offdiag, out]() {
        const Matrix& g = grad(out);
        for (std::size_t i = 0; i < diag.size(); ++i) {
            if (needs(diag[i])) grad_ref(diag[i])(0, 0) += g(i, i);
            if (i + 1 < diag.size() && needs(offdiag[i]))
                grad_ref(offdiag[i])(0, 0) += g(i, i + 1) + g(i + 1, i);
        }
    };
    return out;
}

TensorId Tape::softmax_cross_entropy(TensorId logits, const std::vector<int>& labels,
                                     const std::vector<int>& mask) {
    if (mask.empty()) throw std::invalid_argument("softmax_cross_entropy: empty mask");
    const Matrix& z = value(logits);
    if (labels.size() != z.rows())
        throw std::invalid_argument("softmax_cross_entropy: label count mismatch");

    // Cache row softmaxes for the masked rows.
    Matrix probs(mask.size(), z.cols());
    double loss = 0.0;
    for (std::size_t r = 0; r < mask.size(); ++r) {
        const auto row = static_cast<std::size_t>(mask[r]);
        if (row >= z.rows()) throw std::invalid_argument("softmax_cross_entropy: mask index out of range");
        double zmax = z(row, 0);
        for (std::size_t c = 1; c < z.cols(); ++c) zmax = std::max(zmax, z(row, c));
        double denom = 0.0;
        for (std::size_t c = 0; c < z.cols(); ++c) denom += std::exp(z(row, c) - zmax);
        const int label = labels[row];
        if (label < 0 || static_cast<std::size_t>(label) >= z.cols())
            throw std::invalid_argument("softmax_cross_entropy: label out of range");
        loss += -(z(row, static_cast<std::size_t>(label)) - zmax - std::log(denom));
        for (std::size_t c = 0; c < z.cols(); ++c)
            probs(r, c) = std::exp(z(row, c) - zmax) / denom;
    }
    loss /= static_cast<double>(mask.size());

    Matrix v(1, 1);
    v(0, 0) = loss;
    const TensorId out = add_node(std::move(v), needs(logits), {});
    nodes_.back().backprop = [this, logits, labels, mask, probs, out]() {
        if (!needs(logits)) return;
        Matrix& gl = grad_ref(logits);
        const double g = grad(out)(0, 0) / static_cast<double>(mask.size());
        for (std::size_t r = 0; r < mask.size(); ++r) {
            const auto row = static_cast<std::size_t>(mask[r]);
            for (std::size_t c = 0; c < gl.cols(); ++c) {
                const double onehot = static_cast<std::size_t>(labels[row]) == c ? 1.0 : 0.0;
                gl(row, c) += g * (probs(r, c) - onehot);
            }
        }
    };
    return out;
}

TensorId Tape::mse(TensorId pred, const Matrix& target) {
    const Matrix& p = value(pred);
    if (!p.same_shape(target)) throw std::invalid_argument("mse: shape mismatch");
    double loss = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p.storage()[i] - target.storage()[i];
        loss += d * d;
    }
    loss /= static_cast<double>(p.size());
    Matrix v(1, 1);
    v(0, 0) = loss;
    const TensorId out = add_node(std::move(v), needs(pred), {});
    nodes_.back().backprop = [this, pred, target, out]() {
        if (!needs(pred)) return;
        Matrix& gp = grad_ref(pred);
        const double g = 2.0 * grad(out)(0, 0) / static_cast<double>(gp.size());
        const Matrix& p2 = value(pred);
        for (std::size_t i = 0; i < gp.size(); ++i)
            gp.storage()[i] += g * (p2.storage()[i] - target.storage()[i]);
    };
    return out;
}

void Tape::backward(TensorId root) {
    const Matrix& r = value(root);
    if (r.rows() != 1 || r.cols() != 1)
        throw std::invalid_argument("Tape::backward: root must be a 1x1 scalar");
    for (Node& n : nodes_) n.grad = Matrix(n.value.rows(), n.value.cols());
    nodes_[static_cast<std::size_t>(root)].grad(0, 0) = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        Node& n = nodes_[i];
        if (n.requires_grad && n.backprop) n.backprop();
    }
}

} // namespace lgcn::ad
