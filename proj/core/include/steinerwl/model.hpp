#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "steinerwl/hanan.hpp"

namespace steinerwl {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ModelConfig {
    int layers = 4;
    int hidden = 32;
    int heads = 1;
    int mlp_hidden = 32;
    bool use_layernorm = true;
    // Message phi(h_u + e_vu) instead of phi(h_v + e_vu).
    bool gine_neighbor_variant = false;
    std::uint64_t seed = 0;

    void validate() const;
    bool same_architecture(const ModelConfig& other) const;
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Biases are stored as 1 x n matrices so every parameter is a Mat<T>.
template <typename T>
struct LayerParams {
    Mat<T> edge_w, edge_b;                    // 2 x d, 1 x d
    Mat<T> gine_w1, gine_b1, gine_w2, gine_b2;  // d x d, 1 x d
    Mat<T> wq, wk, wv;                        // d x d
    Mat<T> fuse_w1, fuse_b1, fuse_w2, fuse_b2;  // d x d, 1 x d
    Mat<T> ln_gamma, ln_beta;                 // 1 x d, empty without layernorm
};

template <typename T>
struct ModelParams {
    ModelConfig config;
    Mat<T> embed_w, embed_b;  // 3 x d, 1 x d
    std::vector<LayerParams<T>> layers;
    Mat<T> out_w1, out_b1, out_w2, out_b2;  // d x h, 1 x h, h x 1, 1 x 1

    // Every tensor in canonical serialization order.
    std::vector<std::pair<std::string, Mat<T>*>> named_tensors();
    std::vector<std::pair<std::string, const Mat<T>*>> named_tensors() const;
    std::size_t parameter_count() const;
};

// Zero-filled parameters with the shapes implied by `config`.
template <typename T>
ModelParams<T> zero_params(const ModelConfig& config);

// Glorot-uniform weights from config.seed; zero biases, unit layernorm scale.
template <typename T>
ModelParams<T> init_params(const ModelConfig& config);

template <typename To, typename From>
ModelParams<To> cast_params(const ModelParams<From>& p);

// Several nets stacked into one block-diagonal graph. Attention is computed
// only inside each net's segment.
template <typename T>
struct GraphBatch {
    Mat<T> node_features;  // N x 3
    Mat<T> edge_features;  // M x 2
    std::vector<std::uint32_t> edge_center;
    std::vector<std::uint32_t> edge_neighbor;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> segments;  // (offset, size)
    std::vector<std::uint8_t> candidate;  // 1 for Hanan candidates (loss mask)

    std::size_t nodes() const { return static_cast<std::size_t>(node_features.rows()); }
    std::size_t edges() const { return edge_center.size(); }
};

template <typename T>
GraphBatch<T> make_batch(const std::vector<const GraphFeatures*>& graphs);
template <typename T>
GraphBatch<T> make_batch(const GraphFeatures& graph);

// --- individual operators ---------------------------------------------------

template <typename T>
Mat<T> embed(const Mat<T>& features, const Mat<T>& w, const Mat<T>& b);

template <typename T>
struct GineCache {
    Mat<T> message_pre;  // M x d, argument of the relu
    Mat<T> aggregate;    // N x d
    Mat<T> hidden_pre;   // N x d
};

template <typename T>
Mat<T> gine_layer(const Mat<T>& x, const GraphBatch<T>& batch, const LayerParams<T>& p,
                  bool neighbor_variant, GineCache<T>* cache = nullptr);
// Accumulates parameter gradients into `grad`, returns d/dx.
template <typename T>
Mat<T> gine_layer_backward(const Mat<T>& d_out, const Mat<T>& x, const GraphBatch<T>& batch,
                           const LayerParams<T>& p, bool neighbor_variant,
                           const GineCache<T>& cache, LayerParams<T>& grad);

template <typename T>
struct AttentionCache {
    Mat<T> q, k, v;
    std::vector<Mat<T>> probs;  // one softmax matrix per segment
};

template <typename T>
Mat<T> global_attention(const Mat<T>& x, const GraphBatch<T>& batch, const LayerParams<T>& p,
                        AttentionCache<T>* cache = nullptr);
template <typename T>
Mat<T> global_attention_backward(const Mat<T>& d_out, const Mat<T>& x, const GraphBatch<T>& batch,
                                 const LayerParams<T>& p, const AttentionCache<T>& cache,
                                 LayerParams<T>& grad);

template <typename T>
struct FuseCache {
    Mat<T> sum;         // x_loc + x_glob
    Mat<T> hidden_pre;  // N x d
    Mat<T> hidden;      // N x d
    Mat<T> normalized;  // layernorm output before scale/shift
    Eigen::Matrix<T, Eigen::Dynamic, 1> inv_std;
};

// MLP(x_loc + x_glob); with layernorm: LayerNorm(x_in + MLP(x_loc + x_glob)).
template <typename T>
Mat<T> fuse(const Mat<T>& x_in, const Mat<T>& x_loc, const Mat<T>& x_glob,
            const LayerParams<T>& p, bool use_layernorm, FuseCache<T>* cache = nullptr);
template <typename T>
struct FuseGrads {
    Mat<T> d_x_in;   // zero without layernorm
    Mat<T> d_sum;    // gradient w.r.t. x_loc and x_glob alike
};
template <typename T>
FuseGrads<T> fuse_backward(const Mat<T>& d_out, const LayerParams<T>& p, bool use_layernorm,
                           const FuseCache<T>& cache, LayerParams<T>& grad);

// Eigen column vector of logits, one per node.
template <typename T>
using Logits = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
Logits<T> output_logits(const Mat<T>& x, const ModelParams<T>& p, Mat<T>* hidden_pre = nullptr);

template <typename T>
struct LossResult {
    T loss = 0;
    Logits<T> d_logits;  // zero outside the mask
    std::size_t count = 0;
};

// Mean binary cross-entropy over masked nodes, stable logit form. With an
// empty mask the loss and gradient are zero.
template <typename T>
LossResult<T> bce_loss(const Logits<T>& logits, const std::vector<std::uint8_t>& labels,
                       const std::vector<std::uint8_t>& mask, T pos_weight = T(1));

// --- whole model -------------------------------------------------------------

template <typename T>
struct ForwardCache {
    std::vector<Mat<T>> inputs;  // X^(l) for l = 0..L
    std::vector<GineCache<T>> gine;
    std::vector<AttentionCache<T>> attention;
    std::vector<Mat<T>> x_loc;
    std::vector<Mat<T>> x_glob;
    std::vector<FuseCache<T>> fuse;
    Mat<T> head_pre;
};

template <typename T>
Logits<T> forward(const ModelParams<T>& params, const GraphBatch<T>& batch,
                  ForwardCache<T>* cache = nullptr);

// Reverse-mode gradients of every parameter given d loss / d logits.
template <typename T>
ModelParams<T> backward(const ModelParams<T>& params, const GraphBatch<T>& batch,
                        const ForwardCache<T>& cache, const Logits<T>& d_logits);

template <typename T>
struct AdamState {
    ModelParams<T> m;
    ModelParams<T> v;
    std::uint64_t step = 0;
};

struct AdamOptions {
    double lr = 1e-4;
    double weight_decay = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <typename T>
AdamState<T> make_adam_state(const ModelConfig& config);

// Adam with L2 decay folded into the gradient (g += weight_decay * param).
template <typename T>
void adam_step(ModelParams<T>& params, const ModelParams<T>& grads, AdamState<T>& state,
               const AdamOptions& options);

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace steinerwl
