#include "steinerwl/model.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

namespace steinerwl {

void ModelConfig::validate() const {
    if (layers < 1) throw std::invalid_argument("model config: layers must be >= 1");
    if (hidden < 1) throw std::invalid_argument("model config: hidden must be >= 1");
    if (mlp_hidden < 1) throw std::invalid_argument("model config: mlp_hidden must be >= 1");
    if (heads != 1) throw std::invalid_argument("model config: only one attention head is supported");
}

bool ModelConfig::same_architecture(const ModelConfig& o) const {
    return layers == o.layers && hidden == o.hidden && heads == o.heads &&
           mlp_hidden == o.mlp_hidden && use_layernorm == o.use_layernorm &&
           gine_neighbor_variant == o.gine_neighbor_variant;
}

namespace {

// Sets flush-to-zero / denormals-are-zero for the current scope. Denormal
// arithmetic is very slow on x86 and shows up in saturated softmax weights
// and decayed Adam moments; every model entry point runs in this mode so
// results do not depend on the caller's floating-point state.
class DenormalGuard {
public:
#if defined(__SSE__)
    DenormalGuard() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
    ~DenormalGuard() { _mm_setcsr(saved_); }

private:
    unsigned saved_;
#endif
};

template <typename P, typename M>
std::vector<std::pair<std::string, M*>> collect(P& p) {
    std::vector<std::pair<std::string, M*>> out;
    out.emplace_back("embed.w", &p.embed_w);
    out.emplace_back("embed.b", &p.embed_b);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        auto& L = p.layers[l];
        const std::string pre = "layer" + std::to_string(l) + ".";
        out.emplace_back(pre + "edge.w", &L.edge_w);
        out.emplace_back(pre + "edge.b", &L.edge_b);
        out.emplace_back(pre + "gine.w1", &L.gine_w1);
        out.emplace_back(pre + "gine.b1", &L.gine_b1);
        out.emplace_back(pre + "gine.w2", &L.gine_w2);
        out.emplace_back(pre + "gine.b2", &L.gine_b2);
        out.emplace_back(pre + "attn.wq", &L.wq);
        out.emplace_back(pre + "attn.wk", &L.wk);
        out.emplace_back(pre + "attn.wv", &L.wv);
        out.emplace_back(pre + "fuse.w1", &L.fuse_w1);
        out.emplace_back(pre + "fuse.b1", &L.fuse_b1);
        out.emplace_back(pre + "fuse.w2", &L.fuse_w2);
        out.emplace_back(pre + "fuse.b2", &L.fuse_b2);
        if (p.config.use_layernorm) {
            out.emplace_back(pre + "norm.gamma", &L.ln_gamma);
            out.emplace_back(pre + "norm.beta", &L.ln_beta);
        }
    }
    out.emplace_back("head.w1", &p.out_w1);
    out.emplace_back("head.b1", &p.out_b1);
    out.emplace_back("head.w2", &p.out_w2);
    out.emplace_back("head.b2", &p.out_b2);
    return out;
}

template <typename T>
void add_bias(Mat<T>& m, const Mat<T>& b) {
    m.rowwise() += b.row(0);
}

template <typename T>
Mat<T> relu(const Mat<T>& m) {
    return m.cwiseMax(T(0));
}

template <typename T>
Mat<T> relu_mask(const Mat<T>& pre) {
    return (pre.array() > T(0)).template cast<T>().matrix();
}

template <typename T>
Mat<T> colsum(const Mat<T>& m) {
    return m.colwise().sum();
}

}  // namespace

template <typename T>
std::vector<std::pair<std::string, Mat<T>*>> ModelParams<T>::named_tensors() {
    return collect<ModelParams<T>, Mat<T>>(*this);
}

template <typename T>
std::vector<std::pair<std::string, const Mat<T>*>> ModelParams<T>::named_tensors() const {
    return collect<const ModelParams<T>, const Mat<T>>(*this);
}

template <typename T>
std::size_t ModelParams<T>::parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, m] : named_tensors()) n += static_cast<std::size_t>(m->size());
    return n;
}

template <typename T>
ModelParams<T> zero_params(const ModelConfig& c) {
    c.validate();
    const int d = c.hidden;
    ModelParams<T> p;
    p.config = c;
    p.embed_w = Mat<T>::Zero(3, d);
    p.embed_b = Mat<T>::Zero(1, d);
    p.layers.resize(static_cast<std::size_t>(c.layers));
    for (auto& L : p.layers) {
        L.edge_w = Mat<T>::Zero(2, d);
        L.edge_b = Mat<T>::Zero(1, d);
        L.gine_w1 = Mat<T>::Zero(d, d);
        L.gine_b1 = Mat<T>::Zero(1, d);
        L.gine_w2 = Mat<T>::Zero(d, d);
        L.gine_b2 = Mat<T>::Zero(1, d);
        L.wq = Mat<T>::Zero(d, d);
        L.wk = Mat<T>::Zero(d, d);
        L.wv = Mat<T>::Zero(d, d);
        L.fuse_w1 = Mat<T>::Zero(d, d);
        L.fuse_b1 = Mat<T>::Zero(1, d);
        L.fuse_w2 = Mat<T>::Zero(d, d);
        L.fuse_b2 = Mat<T>::Zero(1, d);
        if (c.use_layernorm) {
            L.ln_gamma = Mat<T>::Zero(1, d);
            L.ln_beta = Mat<T>::Zero(1, d);
        }
    }
    p.out_w1 = Mat<T>::Zero(d, c.mlp_hidden);
    p.out_b1 = Mat<T>::Zero(1, c.mlp_hidden);
    p.out_w2 = Mat<T>::Zero(c.mlp_hidden, 1);
    p.out_b2 = Mat<T>::Zero(1, 1);
    return p;
}

template <typename T>
ModelParams<T> init_params(const ModelConfig& c) {
    ModelParams<T> p = zero_params<T>(c);
    std::mt19937_64 rng(c.seed);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (auto& [name, m] : p.named_tensors()) {
        if (name.ends_with("gamma")) {
            m->setOnes();
            continue;
        }
        // biases (single-row tensors named *.b*) and layernorm shifts start at zero
        const auto dot = name.rfind('.');
        if (name.compare(dot + 1, 1, "b") == 0) continue;
        const double limit = std::sqrt(6.0 / static_cast<double>(m->rows() + m->cols()));
        for (Eigen::Index i = 0; i < m->size(); ++i) {
            m->data()[i] = static_cast<T>((2.0 * uniform() - 1.0) * limit);
        }
    }
    return p;
}

template <typename To, typename From>
ModelParams<To> cast_params(const ModelParams<From>& p) {
    ModelParams<To> out = zero_params<To>(p.config);
    auto dst = out.named_tensors();
    const auto src = p.named_tensors();
    for (std::size_t i = 0; i < src.size(); ++i) *dst[i].second = src[i].second->template cast<To>();
    return out;
}

template <typename T>
GraphBatch<T> make_batch(const std::vector<const GraphFeatures*>& graphs) {
    std::size_t n = 0, m = 0;
    for (const auto* g : graphs) {
        n += g->nodes.size();
        m += g->edges.size();
    }
    GraphBatch<T> b;
    b.node_features.resize(static_cast<Eigen::Index>(n), 3);
    b.edge_features.resize(static_cast<Eigen::Index>(m), 2);
    b.edge_center.reserve(m);
    b.edge_neighbor.reserve(m);
    b.candidate.reserve(n);
    std::uint32_t offset = 0;
    Eigen::Index erow = 0;
    for (const auto* g : graphs) {
        for (std::size_t i = 0; i < g->nodes.size(); ++i) {
            const auto& f = g->nodes[i];
            for (int j = 0; j < 3; ++j) b.node_features(offset + i, j) = static_cast<T>(f[j]);
            b.candidate.push_back(f[2] > 0.5 ? 0 : 1);
        }
        for (const auto& e : g->edges) {
            b.edge_center.push_back(offset + e.center);
            b.edge_neighbor.push_back(offset + e.neighbor);
            b.edge_features(erow, 0) = static_cast<T>(e.feature[0]);
            b.edge_features(erow, 1) = static_cast<T>(e.feature[1]);
            ++erow;
        }
        b.segments.emplace_back(offset, static_cast<std::uint32_t>(g->nodes.size()));
        offset += static_cast<std::uint32_t>(g->nodes.size());
    }
    return b;
}

template <typename T>
GraphBatch<T> make_batch(const GraphFeatures& graph) {
    return make_batch<T>(std::vector<const GraphFeatures*>{&graph});
}

template <typename T>
Mat<T> embed(const Mat<T>& features, const Mat<T>& w, const Mat<T>& b) {
    if (features.cols() != w.rows() || b.cols() != w.cols()) {
        throw std::invalid_argument("embed: shape mismatch");
    }
    Mat<T> x = features * w;
    add_bias(x, b);
    return x;
}

template <typename T>
Mat<T> gine_layer(const Mat<T>& x, const GraphBatch<T>& batch, const LayerParams<T>& p,
                  bool neighbor_variant, GineCache<T>* cache) {
    Mat<T> msg = batch.edge_features * p.edge_w;
    add_bias(msg, p.edge_b);
    const auto& source = neighbor_variant ? batch.edge_neighbor : batch.edge_center;
    for (std::size_t e = 0; e < batch.edges(); ++e) msg.row(e) += x.row(source[e]);
    Mat<T> agg = x;
    for (std::size_t e = 0; e < batch.edges(); ++e) {
        agg.row(batch.edge_center[e]) += msg.row(e).cwiseMax(T(0));
    }
    Mat<T> hidden_pre = agg * p.gine_w1;
    add_bias(hidden_pre, p.gine_b1);
    Mat<T> out = relu(hidden_pre) * p.gine_w2;
    add_bias(out, p.gine_b2);
    if (cache) {
        cache->message_pre = std::move(msg);
        cache->aggregate = std::move(agg);
        cache->hidden_pre = std::move(hidden_pre);
    }
    return out;
}

template <typename T>
Mat<T> gine_layer_backward(const Mat<T>& d_out, const Mat<T>& x, const GraphBatch<T>& batch,
                           const LayerParams<T>& p, bool neighbor_variant,
                           const GineCache<T>& cache, LayerParams<T>& grad) {
    const Mat<T> hidden = relu(cache.hidden_pre);
    grad.gine_w2.noalias() += hidden.transpose() * d_out;
    grad.gine_b2 += colsum(d_out);
    const Mat<T> d_hidden_pre =
        (d_out * p.gine_w2.transpose()).cwiseProduct(relu_mask(cache.hidden_pre));
    grad.gine_w1.noalias() += cache.aggregate.transpose() * d_hidden_pre;
    grad.gine_b1 += colsum(d_hidden_pre);
    const Mat<T> d_agg = d_hidden_pre * p.gine_w1.transpose();
    Mat<T> dx = d_agg;

    const auto& source = neighbor_variant ? batch.edge_neighbor : batch.edge_center;
    Mat<T> d_msg(static_cast<Eigen::Index>(batch.edges()), x.cols());
    for (std::size_t e = 0; e < batch.edges(); ++e) d_msg.row(e) = d_agg.row(batch.edge_center[e]);
    d_msg = d_msg.cwiseProduct(relu_mask(cache.message_pre));
    for (std::size_t e = 0; e < batch.edges(); ++e) dx.row(source[e]) += d_msg.row(e);
    grad.edge_w.noalias() += batch.edge_features.transpose() * d_msg;
    grad.edge_b += colsum(d_msg);
    return dx;
}

template <typename T>
Mat<T> global_attention(const Mat<T>& x, const GraphBatch<T>& batch, const LayerParams<T>& p,
                        AttentionCache<T>* cache) {
    const T scale = T(1) / std::sqrt(static_cast<T>(p.wq.cols()));
    Mat<T> q = x * p.wq;
    Mat<T> k = x * p.wk;
    Mat<T> v = x * p.wv;
    Mat<T> out(x.rows(), p.wv.cols());
    if (cache) cache->probs.clear();
    for (const auto& [offset, size] : batch.segments) {
        Mat<T> a = (q.middleRows(offset, size) * k.middleRows(offset, size).transpose()) * scale;
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            auto row = a.row(r);
            row.array() = (row.array() - row.maxCoeff()).exp();
            row /= row.sum();
        }
        out.middleRows(offset, size).noalias() = a * v.middleRows(offset, size);
        if (cache) cache->probs.push_back(std::move(a));
    }
    if (cache) {
        cache->q = std::move(q);
        cache->k = std::move(k);
        cache->v = std::move(v);
    }
    return out;
}

template <typename T>
Mat<T> global_attention_backward(const Mat<T>& d_out, const Mat<T>& x, const GraphBatch<T>& batch,
                                 const LayerParams<T>& p, const AttentionCache<T>& cache,
                                 LayerParams<T>& grad) {
    const T scale = T(1) / std::sqrt(static_cast<T>(p.wq.cols()));
    Mat<T> dq(x.rows(), p.wq.cols());
    Mat<T> dk(x.rows(), p.wk.cols());
    Mat<T> dv(x.rows(), p.wv.cols());
    for (std::size_t s = 0; s < batch.segments.size(); ++s) {
        const auto [offset, size] = batch.segments[s];
        const Mat<T>& prob = cache.probs[s];
        const auto d_o = d_out.middleRows(offset, size);
        const Mat<T> d_prob = d_o * cache.v.middleRows(offset, size).transpose();
        dv.middleRows(offset, size).noalias() = prob.transpose() * d_o;
        const Eigen::Matrix<T, Eigen::Dynamic, 1> inner =
            d_prob.cwiseProduct(prob).rowwise().sum();
        Mat<T> d_a = prob.cwiseProduct(d_prob.colwise() - inner) * scale;
        dq.middleRows(offset, size).noalias() = d_a * cache.k.middleRows(offset, size);
        dk.middleRows(offset, size).noalias() = d_a.transpose() * cache.q.middleRows(offset, size);
    }
    grad.wq.noalias() += x.transpose() * dq;
    grad.wk.noalias() += x.transpose() * dk;
    grad.wv.noalias() += x.transpose() * dv;
    Mat<T> dx = dq * p.wq.transpose();
    dx.noalias() += dk * p.wk.transpose();
    dx.noalias() += dv * p.wv.transpose();
    return dx;
}

namespace {
constexpr double kLayerNormEps = 1e-5;
}

template <typename T>
Mat<T> fuse(const Mat<T>& x_in, const Mat<T>& x_loc, const Mat<T>& x_glob,
            const LayerParams<T>& p, bool use_layernorm, FuseCache<T>* cache) {
    Mat<T> sum = x_loc + x_glob;
    Mat<T> hidden_pre = sum * p.fuse_w1;
    add_bias(hidden_pre, p.fuse_b1);
    Mat<T> hidden = relu(hidden_pre);
    Mat<T> out = hidden * p.fuse_w2;
    add_bias(out, p.fuse_b2);
    if (use_layernorm) {
        out += x_in;
        const auto d = static_cast<T>(out.cols());
        Eigen::Matrix<T, Eigen::Dynamic, 1> inv_std(out.rows());
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            auto row = out.row(r);
            const T mean = row.sum() / d;
            row.array() -= mean;
            const T var = row.squaredNorm() / d;
            inv_std(r) = T(1) / std::sqrt(var + static_cast<T>(kLayerNormEps));
            row *= inv_std(r);
        }
        Mat<T> normalized = out;
        out = out.array().rowwise() * p.ln_gamma.row(0).array();
        add_bias(out, p.ln_beta);
        if (cache) {
            cache->normalized = std::move(normalized);
            cache->inv_std = std::move(inv_std);
        }
    }
    if (cache) {
        cache->sum = std::move(sum);
        cache->hidden_pre = std::move(hidden_pre);
        cache->hidden = std::move(hidden);
    }
    return out;
}

template <typename T>
FuseGrads<T> fuse_backward(const Mat<T>& d_out, const LayerParams<T>& p, bool use_layernorm,
                           const FuseCache<T>& cache, LayerParams<T>& grad) {
    FuseGrads<T> g;
    Mat<T> d_mlp;
    if (use_layernorm) {
        grad.ln_gamma += colsum(Mat<T>(d_out.cwiseProduct(cache.normalized)));
        grad.ln_beta += colsum(d_out);
        const Mat<T> d_norm = d_out.array().rowwise() * p.ln_gamma.row(0).array();
        const auto d = static_cast<T>(d_out.cols());
        Mat<T> d_z(d_out.rows(), d_out.cols());
        for (Eigen::Index r = 0; r < d_out.rows(); ++r) {
            const auto dn = d_norm.row(r);
            const auto nr = cache.normalized.row(r);
            const T sum_dn = dn.sum();
            const T sum_dn_n = dn.dot(nr);
            d_z.row(r) = (cache.inv_std(r) / d) *
                         (d * dn.array() - sum_dn - nr.array() * sum_dn_n).matrix();
        }
        g.d_x_in = d_z;
        d_mlp = std::move(d_z);
    } else {
        g.d_x_in = Mat<T>::Zero(d_out.rows(), d_out.cols());
        d_mlp = d_out;
    }
    grad.fuse_w2.noalias() += cache.hidden.transpose() * d_mlp;
    grad.fuse_b2 += colsum(d_mlp);
    const Mat<T> d_hidden_pre =
        (d_mlp * p.fuse_w2.transpose()).cwiseProduct(relu_mask(cache.hidden_pre));
    grad.fuse_w1.noalias() += cache.sum.transpose() * d_hidden_pre;
    grad.fuse_b1 += colsum(d_hidden_pre);
    g.d_sum = d_hidden_pre * p.fuse_w1.transpose();
    return g;
}

template <typename T>
Logits<T> output_logits(const Mat<T>& x, const ModelParams<T>& p, Mat<T>* hidden_pre) {
    Mat<T> h = x * p.out_w1;
    add_bias(h, p.out_b1);
    Logits<T> logits = relu(h) * p.out_w2;
    logits.array() += p.out_b2(0, 0);
    if (hidden_pre) *hidden_pre = std::move(h);
    return logits;
}

template <typename T>
LossResult<T> bce_loss(const Logits<T>& logits, const std::vector<std::uint8_t>& labels,
                       const std::vector<std::uint8_t>& mask, T pos_weight) {
    const auto n = static_cast<std::size_t>(logits.size());
    if (labels.size() != n || mask.size() != n) throw std::invalid_argument("bce_loss: size mismatch");
    LossResult<T> r;
    r.d_logits = Logits<T>::Zero(logits.size());
    for (std::size_t i = 0; i < n; ++i) r.count += mask[i] ? 1 : 0;
    if (r.count == 0) return r;
    auto softplus = [](double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); };
    const double inv_n = 1.0 / static_cast<double>(r.count);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        const double z = logits(i);
        const double s = sigmoid(z);
        if (labels[i]) {
            total += pos_weight * softplus(-z);
            r.d_logits(i) = static_cast<T>(pos_weight * (s - 1.0) * inv_n);
        } else {
            total += softplus(z);
            r.d_logits(i) = static_cast<T>(s * inv_n);
        }
    }
    r.loss = static_cast<T>(total * inv_n);
    return r;
}

template <typename T>
Logits<T> forward(const ModelParams<T>& params, const GraphBatch<T>& batch, ForwardCache<T>* cache) {
    DenormalGuard guard;
    const auto& c = params.config;
    Mat<T> x = embed(batch.node_features, params.embed_w, params.embed_b);
    if (cache) {
        const auto L = static_cast<std::size_t>(c.layers);
        cache->inputs.clear();
        cache->gine.assign(L, {});
        cache->attention.assign(L, {});
        cache->x_loc.assign(L, {});
        cache->x_glob.assign(L, {});
        cache->fuse.assign(L, {});
    }
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& lp = params.layers[l];
        Mat<T> x_loc = gine_layer(x, batch, lp, c.gine_neighbor_variant,
                                  cache ? &cache->gine[l] : nullptr);
        Mat<T> x_glob = global_attention(x, batch, lp, cache ? &cache->attention[l] : nullptr);
        Mat<T> next = fuse(x, x_loc, x_glob, lp, c.use_layernorm, cache ? &cache->fuse[l] : nullptr);
        if (cache) cache->inputs.push_back(std::move(x));
        x = std::move(next);
    }
    Logits<T> logits = output_logits(x, params, cache ? &cache->head_pre : nullptr);
    if (cache) cache->inputs.push_back(std::move(x));
    return logits;
}

template <typename T>
ModelParams<T> backward(const ModelParams<T>& params, const GraphBatch<T>& batch,
                        const ForwardCache<T>& cache, const Logits<T>& d_logits) {
    DenormalGuard guard;
    const auto& c = params.config;
    ModelParams<T> grad = zero_params<T>(c);

    const Mat<T>& x_last = cache.inputs.back();
    const Mat<T> hidden = relu(cache.head_pre);
    grad.out_w2.noalias() = hidden.transpose() * d_logits;
    grad.out_b2(0, 0) = d_logits.sum();
    const Mat<T> d_head_pre =
        (d_logits * params.out_w2.transpose()).cwiseProduct(relu_mask(cache.head_pre));
    grad.out_w1.noalias() = x_last.transpose() * d_head_pre;
    grad.out_b1 = colsum(d_head_pre);
    Mat<T> dx = d_head_pre * params.out_w1.transpose();

    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const auto& lp = params.layers[l];
        auto& lg = grad.layers[l];
        const Mat<T>& x_in = cache.inputs[l];
        FuseGrads<T> fg = fuse_backward(dx, lp, c.use_layernorm, cache.fuse[l], lg);
        Mat<T> next = std::move(fg.d_x_in);
        next += gine_layer_backward(fg.d_sum, x_in, batch, lp, c.gine_neighbor_variant,
                                    cache.gine[l], lg);
        next += global_attention_backward(fg.d_sum, x_in, batch, lp, cache.attention[l], lg);
        dx = std::move(next);
    }
    grad.embed_w.noalias() = batch.node_features.transpose() * dx;
    grad.embed_b = colsum(dx);
    return grad;
}

template <typename T>
AdamState<T> make_adam_state(const ModelConfig& config) {
    return {zero_params<T>(config), zero_params<T>(config), 0};
}

template <typename T>
void adam_step(ModelParams<T>& params, const ModelParams<T>& grads, AdamState<T>& state,
               const AdamOptions& o) {
    DenormalGuard guard;
    ++state.step;
    const double bc1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.step));
    auto p = params.named_tensors();
    const auto g = grads.named_tensors();
    auto m = state.m.named_tensors();
    auto v = state.v.named_tensors();
    if (p.size() != g.size() || p.size() != m.size()) throw std::invalid_argument("adam_step: shape mismatch");
    const T b1 = static_cast<T>(o.beta1), b2 = static_cast<T>(o.beta2);
    const T wd = static_cast<T>(o.weight_decay);
    const T step = static_cast<T>(o.lr / bc1);
    const T inv_bc2 = static_cast<T>(1.0 / bc2);
    const T eps = static_cast<T>(o.eps);
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto& P = *p[i].second;
        if (P.size() != g[i].second->size()) throw std::invalid_argument("adam_step: shape mismatch");
        auto pa = P.array();
        auto ma = m[i].second->array();
        auto va = v[i].second->array();
        const auto grad = (g[i].second->array() + wd * pa).eval();
        ma = b1 * ma + (T(1) - b1) * grad;
        va = b2 * va + (T(1) - b2) * grad.square();
        pa -= step * ma / ((va * inv_bc2).sqrt() + eps);
    }
}

#define STEINERWL_INSTANTIATE(T)                                                              \
    template struct ModelParams<T>;                                                           \
    template ModelParams<T> zero_params<T>(const ModelConfig&);                               \
    template ModelParams<T> init_params<T>(const ModelConfig&);                               \
    template GraphBatch<T> make_batch<T>(const std::vector<const GraphFeatures*>&);           \
    template GraphBatch<T> make_batch<T>(const GraphFeatures&);                               \
    template Mat<T> embed<T>(const Mat<T>&, const Mat<T>&, const Mat<T>&);                    \
    template Mat<T> gine_layer<T>(const Mat<T>&, const GraphBatch<T>&, const LayerParams<T>&, \
                                  bool, GineCache<T>*);                                       \
    template Mat<T> gine_layer_backward<T>(const Mat<T>&, const Mat<T>&, const GraphBatch<T>&, \
                                           const LayerParams<T>&, bool, const GineCache<T>&,  \
                                           LayerParams<T>&);                                  \
    template Mat<T> global_attention<T>(const Mat<T>&, const GraphBatch<T>&,                  \
                                        const LayerParams<T>&, AttentionCache<T>*);           \
    template Mat<T> global_attention_backward<T>(const Mat<T>&, const Mat<T>&,                \
                                                 const GraphBatch<T>&, const LayerParams<T>&, \
                                                 const AttentionCache<T>&, LayerParams<T>&);  \
    template Mat<T> fuse<T>(const Mat<T>&, const Mat<T>&, const Mat<T>&,                      \
                            const LayerParams<T>&, bool, FuseCache<T>*);                      \
    template FuseGrads<T> fuse_backward<T>(const Mat<T>&, const LayerParams<T>&, bool,        \
                                           const FuseCache<T>&, LayerParams<T>&);             \
    template Logits<T> output_logits<T>(const Mat<T>&, const ModelParams<T>&, Mat<T>*);       \
    template LossResult<T> bce_loss<T>(const Logits<T>&, const std::vector<std::uint8_t>&,    \
                                       const std::vector<std::uint8_t>&, T);                  \
    template Logits<T> forward<T>(const ModelParams<T>&, const GraphBatch<T>&,                \
                                  ForwardCache<T>*);                                          \
    template ModelParams<T> backward<T>(const ModelParams<T>&, const GraphBatch<T>&,          \
                                        const ForwardCache<T>&, const Logits<T>&);            \
    template AdamState<T> make_adam_state<T>(const ModelConfig&);                             \
    template void adam_step<T>(ModelParams<T>&, const ModelParams<T>&, AdamState<T>&,         \
                               const AdamOptions&);

STEINERWL_INSTANTIATE(float)
STEINERWL_INSTANTIATE(double)
#undef STEINERWL_INSTANTIATE

template ModelParams<float> cast_params<float, double>(const ModelParams<double>&);
template ModelParams<double> cast_params<double, float>(const ModelParams<float>&);
template ModelParams<float> cast_params<float, float>(const ModelParams<float>&);
template ModelParams<double> cast_params<double, double>(const ModelParams<double>&);

}  // namespace steinerwl
