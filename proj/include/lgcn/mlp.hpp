#pragma once

#include <vector>

#include "lgcn/matrix.hpp"
#include "lgcn/rng.hpp"

namespace lgcn {

/// Plain multi-layer perceptron applied row-wise: affine maps with a
/// rectifier between layers. An empty layer list is the identity map.
/// This is the non-differentiated evaluation; the tape in model.cpp
/// mirrors the same structure when gradients are needed.
struct MlpParams {
    struct Layer {
        Matrix weight;  // in x out
        Matrix bias;    // 1 x out
    };
    std::vector<Layer> layers;
    bool relu_output = false;  // optional final rectifier (non-negative output)

    bool identity() const { return layers.empty(); }
    std::size_t input_width() const { return layers.empty() ? 0 : layers.front().weight.rows(); }
    std::size_t output_width() const { return layers.empty() ? 0 : layers.back().weight.cols(); }

    Matrix forward(const Matrix& input) const;

    /// widths = {in, hidden..., out}; Glorot-uniform weights, zero biases.
    static MlpParams create(const std::vector<int>& widths, Rng& rng, bool relu_output = false);
};

/// Uniform init in +-sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

} // namespace lgcn
