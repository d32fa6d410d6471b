#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lgcn/graph.hpp"
#include "lgcn/lanczos.hpp"
#include "lgcn/matrix.hpp"
#include "lgcn/mlp.hpp"
#include "lgcn/tape.hpp"

namespace lgcn {

/// Short scales (applied by iterated sparse products) and long scales
/// (applied through the low-rank spectral filters).
struct ScaleConfig {
    std::vector<int> short_scales;  // sorted, unique, non-negative
    std::vector<int> long_scales;   // sorted, unique, non-negative

    void validate() const;
    int num_short() const { return static_cast<int>(short_scales.size()); }
    int num_long() const { return static_cast<int>(long_scales.size()); }
};

enum class ModelVariant { LanczosNet, AdaLanczosNet };
enum class Nonlinearity { ReLU, Tanh, Identity };
enum class EmbeddingInit { OneHot, Random };

struct FilterSpec {
    std::vector<int> hidden = {128};
    bool non_negative = false;  // final rectifier on the filter output
};

struct ModelConfig {
    ModelVariant variant = ModelVariant::LanczosNet;
    ScaleConfig scales;
    std::vector<int> layer_dims;  // {D_in, ..., D_out} across graph conv layers
    FilterSpec filter;
    double dropout = 0.0;
    Nonlinearity nonlinearity = Nonlinearity::ReLU;

    int lanczos_steps = 20;
    double lanczos_epsilon = 1e-6;
    bool lanczos_reorthogonalize = false;
    std::uint64_t lanczos_seed = 1;  // start vector fixed per run
    OperatorSpec operator_spec{LaplacianKind::Affinity, true};

    bool graph_readout = false;  // mean over nodes + affine head
    int readout_dim = 0;

    bool use_kernel = false;  // AdaLanczosNet graph kernel f_theta
    std::vector<int> kernel_hidden;
    int kernel_out = 0;  // 0 = same width as the kernel input
    EpsilonMode kernel_epsilon_mode = EpsilonMode::MeanEdgeDistance;
    double kernel_fixed_epsilon = 1.0;

    bool learn_embedding = false;
    int embedding_dim = 0;
    EmbeddingInit embedding_init = EmbeddingInit::OneHot;

    void validate() const;
    int num_layers() const { return static_cast<int>(layer_dims.size()) - 1; }
};

/// Parameter tree for either variant. Copyable; copies are independent.
struct Model {
    ModelConfig config;
    int num_nodes = 0;
    std::uint64_t init_seed = 0;

    std::vector<Matrix> layer_weights;             // W_l, ((M+E) D_in) x D_out
    std::vector<std::vector<MlpParams>> filters;   // [layer][long-scale index]
    MlpParams kernel_mlp;                          // f_theta
    Matrix node_embedding;                         // N x embedding_dim
    Matrix readout_weight;                         // D_last x readout_dim
    Matrix readout_bias;                           // 1 x readout_dim

    static Model create(const ModelConfig& config, int num_nodes, int feature_dim,
                        std::uint64_t seed);

    /// Stable name -> parameter traversal (alphabetical by name).
    std::map<std::string, Matrix*> parameters();
    std::map<std::string, const Matrix*> parameters() const;
};

struct ForwardOptions {
    bool training = false;
    std::uint64_t dropout_seed = 0;
};

/// One recorded forward pass: the tape plus handles into it.
struct ModelRun {
    ad::Tape tape;
    ad::TensorId output = -1;  // N x C logits, or 1 x P after graph readout
    std::map<std::string, ad::TensorId> param_ids;
    bool near_breakdown = false;     // some beta_j came within 10 eps of breakdown
    int lanczos_steps_completed = 0; // K' of the in-forward recurrence (Ada only)

    ModelRun() = default;
    ModelRun(const ModelRun&) = delete;
    ModelRun& operator=(const ModelRun&) = delete;
};

/// Runs the stacked convolution (Alg.-style short scales by iterated
/// sparse products, long scales through the learned spectral filters).
/// LanczosNet takes its decomposition precomputed (required when long
/// scales are present); AdaLanczosNet rebuilds S from the kernel /
/// embedding and re-runs the recurrence on the tape.
std::unique_ptr<ModelRun> model_forward(const Model& m, const Graph& g,
                                        const LanczosDecomposition* precomputed,
                                        const ForwardOptions& opts);

/// Reverse pass from a scalar loss already recorded on the run's tape;
/// returns gradients for every named parameter (zeros where no gradient
/// flows).
std::map<std::string, Matrix> model_backward(ModelRun& run, ad::TensorId loss);

/// Operator of the learnable low-rank spectral filter:
/// sum_k f(r_k^{I_1}, ..., r_k^{I_E}) v_k v_k^T (dense, for analysis).
Matrix learned_operator_lanczos(const LanczosDecomposition& d, const MlpParams& filter,
                                const std::vector<int>& long_scales);

/// Tridiagonal-decomposition variant: Q (f + f^T) Q^T where f is the MLP
/// applied to the concatenated vectorized powers of T.
Matrix learned_operator_ada(const Matrix& basis, const Matrix& tridiag, const MlpParams& filter,
                            const std::vector<int>& long_scales);

/// One dense (non-tape) convolution layer; reference path for tests.
Matrix lanczosnet_layer_dense(const Matrix& y_prev, const SparseMatrix& s,
                              const LanczosDecomposition& d, const Matrix& w,
                              const std::vector<MlpParams>& layer_filters,
                              const ScaleConfig& scales);

/// Operator + decomposition preprocessing for the fixed-basis variant.
LanczosDecomposition precompute_decomposition(const ModelConfig& config, const Graph& g);

void save_checkpoint(const Model& m, const std::string& path);
void load_checkpoint_into(Model& m, const std::string& path);

} // namespace lgcn
