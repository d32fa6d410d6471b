#include "lgcn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace lgcn {

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (double& x : m.storage()) x = rng.uniform(-bound, bound);
    return m;
}

Matrix MlpParams::forward(const Matrix& input) const {
    if (layers.empty()) return input;
    if (input.cols() != input_width())
        throw std::invalid_argument("MlpParams::forward: input width mismatch");
    Matrix h = input;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Matrix z = matmul(h, layers[l].weight);
        for (std::size_t i = 0; i < z.rows(); ++i)
            for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += layers[l].bias(0, j);
        const bool rectify = l + 1 < layers.size() || relu_output;
        if (rectify)
            for (double& x : z.storage()) x = x > 0.0 ? x : 0.0;
        h = std::move(z);
    }
    return h;
}

MlpParams MlpParams::create(const std::vector<int>& widths, Rng& rng, bool relu_output) {
    if (widths.size() < 2) throw std::invalid_argument("MlpParams::create: need at least in/out widths");
    MlpParams p;
    p.relu_output = relu_output;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Layer layer;
        layer.weight = glorot_uniform(static_cast<std::size_t>(widths[l]),
                                      static_cast<std::size_t>(widths[l + 1]), rng);
        layer.bias = Matrix(1, static_cast<std::size_t>(widths[l + 1]));
        p.layers.push_back(std::move(layer));
    }
    return p;
}

} // namespace lgcn
