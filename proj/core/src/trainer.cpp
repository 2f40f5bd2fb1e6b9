#include "steinerwl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <ostream>
#include <set>

#include "steinerwl/evaluate.hpp"
#include "steinerwl/parallel.hpp"
#include "steinerwl/random.hpp"

namespace steinerwl {

namespace {

using Clock = std::chrono::steady_clock;

void run_parallel(ThreadPool* pool, std::size_t n, const std::function<void(std::size_t)>& f) {
    if (pool) {
        pool->parallel_for(n, f);
    } else {
        for (std::size_t i = 0; i < n; ++i) f(i);
    }
}

struct ShardOutput {
    ModelParams<float> grads;
    double loss_sum = 0;
    std::size_t count = 0;
};

ShardOutput shard_gradients(const ModelParams<float>& params, const std::vector<TrainExample>& data,
                            const std::vector<std::size_t>& indices, double pos_weight) {
    std::vector<GraphFeatures> features;
    features.reserve(indices.size());
    std::vector<std::uint8_t> labels;
    for (std::size_t idx : indices) {
        const TrainExample& ex = data[idx];
        const HananGraph graph = build_hanan_graph(ex.net);
        features.push_back(featurize(graph));
        labels.insert(labels.end(), graph.n_pins, 0);
        labels.insert(labels.end(), ex.labels.begin(), ex.labels.end());
    }
    std::vector<const GraphFeatures*> ptrs;
    for (const auto& f : features) ptrs.push_back(&f);
    const auto batch = make_batch<float>(ptrs);

    ShardOutput out;
    ForwardCache<float> cache;
    const Logits<float> logits = forward(params, batch, &cache);
    const auto loss = bce_loss(logits, labels, batch.candidate, static_cast<float>(pos_weight));
    out.count = loss.count;
    out.loss_sum = static_cast<double>(loss.loss) * static_cast<double>(loss.count);
    if (loss.count > 0) out.grads = backward(params, batch, cache, loss.d_logits);
    return out;
}

void accumulate(ModelParams<float>& total, const ModelParams<float>& part, float scale) {
    auto dst = total.named_tensors();
    const auto src = part.named_tensors();
    for (std::size_t i = 0; i < dst.size(); ++i) *dst[i].second += scale * *src[i].second;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

LrSchedule lr_schedule_from_string(const std::string& s) {
    if (s == "constant") return LrSchedule::constant;
    if (s == "cosine") return LrSchedule::cosine;
    throw std::invalid_argument("unknown lr schedule '" + s + "' (expected constant or cosine)");
}

const char* to_string(LrSchedule s) { return s == LrSchedule::cosine ? "cosine" : "constant"; }

double scheduled_lr(const TrainOptions& options, std::size_t step) {
    if (options.schedule == LrSchedule::constant || options.steps <= 1) return options.adam.lr;
    const double progress = static_cast<double>(step - 1) / static_cast<double>(options.steps - 1);
    const double factor = options.lr_floor + (1.0 - options.lr_floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
    return options.adam.lr * factor;
}

TrainExample example_from_record(const DatasetRecord& record) {
    TrainExample ex{record.net(), record.labels, record.wl_opt};
    const HananGraph graph = build_hanan_graph(ex.net);
    if (graph.n_candidates != record.candidates.size() || record.labels.size() != record.candidates.size()) {
        throw DataError("record " + record.id + ": candidate list does not match its Hanan grid");
    }
    for (std::size_t k = 0; k < graph.n_candidates; ++k) {
        if (graph.candidate(k) != record.candidates[k]) {
            throw DataError("record " + record.id + ": candidate list does not match its Hanan grid");
        }
    }
    return ex;
}

std::vector<TrainExample> examples_from_records(const std::vector<DatasetRecord>& records) {
    std::vector<TrainExample> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(example_from_record(r));
    return out;
}

ValidationMetrics validate(const ModelParams<float>& params, const std::vector<TrainExample>& examples,
                           double threshold, ThreadPool* pool) {
    ValidationMetrics m;
    if (examples.empty()) return m;
    std::vector<Net> nets;
    nets.reserve(examples.size());
    for (const auto& ex : examples) nets.push_back(ex.net);
    InferenceOptions opts;
    opts.threshold = threshold;
    const InferenceResult inf = infer_many(nets, params, opts, pool);

    std::size_t tp = 0, selected = 0, positives = 0;
    double err = 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const HananGraph graph = build_hanan_graph(examples[i].net);
        std::set<Point> truth;
        for (std::size_t k = 0; k < graph.n_candidates; ++k) {
            if (examples[i].labels[k]) truth.insert(graph.candidate(k));
        }
        positives += truth.size();
        selected += inf.steiner[i].size();
        for (const Point& p : inf.steiner[i]) tp += truth.count(p);
        err += error_pct(inf.estimates[i].wl, examples[i].wl_opt);
    }
    m.precision = selected ? static_cast<double>(tp) / static_cast<double>(selected) : 0.0;
    m.recall = positives ? static_cast<double>(tp) / static_cast<double>(positives) : 1.0;
    m.wl_error_pct = err / static_cast<double>(examples.size());
    return m;
}

void write_metrics_header(std::ostream& out) {
    out << "step,loss,val_precision,val_recall,val_wl_error_pct,wallclock_ms\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& row, bool with_wallclock) {
    out << row.step << ',';
    if (row.loss) out << fixed6(*row.loss);
    out << ',';
    if (row.validation) {
        out << fixed6(row.validation->precision) << ',' << fixed6(row.validation->recall) << ','
            << fixed6(row.validation->wl_error_pct);
    } else {
        out << ",,";
    }
    out << ',';
    if (with_wallclock) out << static_cast<long long>(std::llround(row.wallclock_ms));
    out << '\n';
}

TrainResult train(ModelParams<float> initial, const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& val_set, const TrainOptions& options, ThreadPool* pool,
                  const MetricsCallback& on_row) {
    initial.config.validate();
    if (options.batch_size == 0) throw std::invalid_argument("batch size must be positive");
    if (options.shard_size == 0) throw std::invalid_argument("shard size must be positive");
    if (options.steps > 0 && train_set.empty()) throw std::invalid_argument("training set is empty");

    const auto start = Clock::now();
    auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - start).count(); };

    TrainResult result;
    result.last = std::move(initial);
    result.best = result.last;
    auto emit = [&](MetricsRow row) {
        row.wallclock_ms = elapsed_ms();
        if (on_row) on_row(row);
        result.metrics.push_back(std::move(row));
    };
    auto run_validation = [&](std::size_t step, std::optional<double> loss) {
        MetricsRow row{step, loss, validate(result.last, val_set, options.val_threshold, pool), 0};
        if (!result.best_validation || row.validation->wl_error_pct < result.best_validation->wl_error_pct) {
            result.best_validation = row.validation;
            result.best = result.last;
            result.best_step = step;
        }
        emit(std::move(row));
    };

    if (!val_set.empty()) run_validation(0, std::nullopt);

    AdamState<float> adam = make_adam_state<float>(result.last.config);
    std::vector<std::size_t> order(train_set.size());
    std::size_t cursor = order.size();
    std::uint64_t epoch = 0;

    for (std::size_t step = 1; step <= options.steps; ++step) {
        std::vector<std::size_t> batch;
        batch.reserve(options.batch_size);
        while (batch.size() < options.batch_size) {
            if (cursor == order.size()) {
                for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                Rng rng(derive_seed(options.seed, epoch++));
                for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
                cursor = 0;
            }
            batch.push_back(order[cursor++]);
        }

        const std::size_t n_shards = (batch.size() + options.shard_size - 1) / options.shard_size;
        std::vector<ShardOutput> shards(n_shards);
        run_parallel(pool, n_shards, [&](std::size_t s) {
            const auto first = batch.begin() + static_cast<std::ptrdiff_t>(s * options.shard_size);
            const auto last = batch.begin() +
                              static_cast<std::ptrdiff_t>(std::min(batch.size(), (s + 1) * options.shard_size));
            shards[s] = shard_gradients(result.last, train_set, std::vector<std::size_t>(first, last),
                                        options.pos_weight);
        });

        std::size_t total = 0;
        double loss_sum = 0;
        for (const auto& s : shards) {
            total += s.count;
            loss_sum += s.loss_sum;
        }
        const double loss = total ? loss_sum / static_cast<double>(total) : 0.0;
        if (!std::isfinite(loss)) {
            throw TrainingError("non-finite loss at step " + std::to_string(step) + " (batch " +
                                std::to_string(step - 1) + ")");
        }
        if (total > 0) {
            ModelParams<float> grads = zero_params<float>(result.last.config);
            for (const auto& s : shards) {
                if (s.count == 0) continue;
                accumulate(grads, s.grads, static_cast<float>(static_cast<double>(s.count) / static_cast<double>(total)));
            }
            AdamOptions step_options = options.adam;
            step_options.lr = scheduled_lr(options, step);
            adam_step(result.last, grads, adam, step_options);
        }

        const bool validate_now = !val_set.empty() &&
                                  ((options.val_every > 0 && step % options.val_every == 0) || step == options.steps);
        if (validate_now) {
            run_validation(step, loss);
        } else {
            emit(MetricsRow{step, loss, std::nullopt, 0});
        }
    }
    if (val_set.empty()) {
        result.best = result.last;
        result.best_step = options.steps;
    }
    return result;
}

TrainOptions fine_tune_defaults() {
    TrainOptions o;
    o.adam.lr = kFineTuneLr;
    return o;
}

std::map<std::string, std::string> training_metadata(const TrainOptions& options, const TrainResult& result,
                                                     std::size_t train_nets) {
    char lr[64], wd[64], pw[64];
    std::snprintf(lr, sizeof lr, "%.9g", options.adam.lr);
    std::snprintf(wd, sizeof wd, "%.9g", options.adam.weight_decay);
    std::snprintf(pw, sizeof pw, "%.9g", options.pos_weight);
    std::map<std::string, std::string> meta{
        {"train.steps", std::to_string(options.steps)},
        {"train.batch_size", std::to_string(options.batch_size)},
        {"train.lr", lr},
        {"train.schedule", to_string(options.schedule)},
        {"train.lr_floor", fixed6(options.lr_floor)},
        {"train.weight_decay", wd},
        {"train.pos_weight", pw},
        {"train.seed", std::to_string(options.seed)},
        {"train.nets", std::to_string(train_nets)},
        {"train.best_step", std::to_string(result.best_step)},
    };
    if (result.best_validation) meta["train.best_val_wl_error_pct"] = fixed6(result.best_validation->wl_error_pct);
    return meta;
}

Checkpoint fine_tune(const std::filesystem::path& base_path, const std::optional<ModelConfig>& expected,
                     const std::vector<TrainExample>& train_set, const std::vector<TrainExample>& val_set,
                     const TrainOptions& options, ThreadPool* pool, const MetricsCallback& on_row,
                     TrainResult* result_out) {
    const Checkpoint base = load_checkpoint(base_path, expected);
    std::ifstream in(base_path, std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    char checksum[32];
    std::snprintf(checksum, sizeof checksum, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));

    TrainResult result = train(base.params, train_set, val_set, options, pool, on_row);
    Checkpoint out;
    out.params = result.best;
    out.metadata = training_metadata(options, result, train_set.size());
    out.metadata["mode"] = "fine-tune";
    out.metadata["base.file"] = base_path.filename().string();
    out.metadata["base.fnv1a64"] = checksum;
    if (result_out) *result_out = std::move(result);
    return out;
}

}  // namespace steinerwl
