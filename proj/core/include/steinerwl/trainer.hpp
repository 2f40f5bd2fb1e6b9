#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinerwl/checkpoint.hpp"
#include "steinerwl/dataset.hpp"
#include "steinerwl/inference.hpp"
#include "steinerwl/model.hpp"

namespace steinerwl {

class ThreadPool;

class TrainingError : public std::runtime_error {
public:
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

// One labeled net, ready for batching. Labels follow the Hanan candidate order.
struct TrainExample {
    Net net;
    std::vector<std::uint8_t> labels;
    Length wl_opt = 0;
};

// Throws DataError if the stored candidates disagree with the net's Hanan grid.
TrainExample example_from_record(const DatasetRecord& record);
std::vector<TrainExample> examples_from_records(const std::vector<DatasetRecord>& records);

enum class LrSchedule { constant, cosine };

LrSchedule lr_schedule_from_string(const std::string& s);
const char* to_string(LrSchedule s);

struct TrainOptions {
    std::size_t steps = 1000;
    std::size_t batch_size = 16;
    AdamOptions adam;
    // cosine: lr decays from adam.lr to lr_floor * adam.lr over `steps`.
    LrSchedule schedule = LrSchedule::constant;
    double lr_floor = 0.0;
    double pos_weight = 1.0;
    std::size_t val_every = 0;  // 0: validate only after the last step
    double val_threshold = kDefaultThreshold;
    std::uint64_t seed = 0;
    // Nets per gradient shard. Shards are the unit of parallel work and are
    // reduced in index order, so results do not depend on the thread count.
    std::size_t shard_size = 4;
};

// Learning rate used at optimizer step `step` (1-based).
double scheduled_lr(const TrainOptions& options, std::size_t step);

struct ValidationMetrics {
    double precision = 0;
    double recall = 0;
    double wl_error_pct = 0;
};

// Candidate-level precision/recall and mean WL error against wl_opt, both
// taken from infer_many.
ValidationMetrics validate(const ModelParams<float>& params, const std::vector<TrainExample>& examples,
                           double threshold, ThreadPool* pool = nullptr);

struct MetricsRow {
    std::size_t step = 0;
    std::optional<double> loss;  // empty for the initial validation row
    std::optional<ValidationMetrics> validation;
    double wallclock_ms = 0;
};

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row, bool with_wallclock = true);

struct TrainResult {
    ModelParams<float> best;   // lowest validation WL error (final params without validation)
    ModelParams<float> last;
    std::vector<MetricsRow> metrics;
    std::size_t best_step = 0;
    std::optional<ValidationMetrics> best_validation;
};

using MetricsCallback = std::function<void(const MetricsRow&)>;

// Mini-batch Adam on the masked BCE loss. Batches are drawn from per-epoch
// shuffles seeded by options.seed. With a validation set, the initial params
// are validated at step 0 and compete for "best".
TrainResult train(ModelParams<float> initial, const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& val_set, const TrainOptions& options,
                  ThreadPool* pool = nullptr, const MetricsCallback& on_row = {});

inline constexpr double kFineTuneLr = 1e-5;

TrainOptions fine_tune_defaults();

// Continues training from a checkpoint. `expected` guards the architecture;
// the returned checkpoint records the base file and its checksum.
Checkpoint fine_tune(const std::filesystem::path& base_path, const std::optional<ModelConfig>& expected,
                     const std::vector<TrainExample>& train_set, const std::vector<TrainExample>& val_set,
                     const TrainOptions& options, ThreadPool* pool = nullptr,
                     const MetricsCallback& on_row = {}, TrainResult* result = nullptr);

std::map<std::string, std::string> training_metadata(const TrainOptions& options, const TrainResult& result,
                                                     std::size_t train_nets);

}  // namespace steinerwl
