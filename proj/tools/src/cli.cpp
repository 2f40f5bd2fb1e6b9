#include "cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "steinerwl/checkpoint.hpp"
#include "steinerwl/dataset.hpp"
#include "steinerwl/evaluate.hpp"
#include "steinerwl/inference.hpp"
#include "steinerwl/netlist.hpp"
#include "steinerwl/parallel.hpp"
#include "steinerwl/random.hpp"
#include "steinerwl/trainer.hpp"

namespace steinerwl {

namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string config;
    std::string out;
};

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string file_checksum(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return hex64(fnv1a64(bytes.data(), bytes.size()));
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw UsageError("not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Reads "key = value" lines and feeds them to options not given on the
// command line. Keys are long option names without the dashes.
void apply_config(CLI::App& app, CLI::App& sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        while (!key.empty() && key[0] == '-') key.erase(0, 1);
        if (key == "config") throw UsageError(path + ":" + std::to_string(no) + ": nested config");
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (!opt) opt = app.get_option_no_throw("--" + key);
        if (!opt) {
            throw UsageError(path + ":" + std::to_string(no) + ": unknown option '" + key + "' for " +
                             sub.get_name());
        }
        if (opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

std::string option_value(const CLI::Option* opt) {
    if (opt->count() > 0) {
        std::string joined;
        for (const auto& r : opt->results()) {
            if (!joined.empty()) joined += ',';
            joined += r;
        }
        return joined;
    }
    if (opt->get_default_str().empty() && opt->get_expected_max() == 0) return "false";
    return opt->get_default_str();
}

// Effective settings of a run, sorted by name.
std::map<std::string, std::string> effective_options(const CLI::App& app, const CLI::App& sub) {
    std::map<std::string, std::string> out;
    for (const CLI::App* a : {&app, &sub}) {
        for (const CLI::Option* opt : a->get_options()) {
            const std::string name = opt->get_single_name();
            if (name == "help" || name.empty()) continue;
            out[name] = option_value(opt);
        }
    }
    return out;
}

class Run {
public:
    Run(const Globals& g, const std::vector<std::string>& args, CLI::App& app, CLI::App& sub,
        std::ostream& out)
        : g_(g), args_(args), app_(app), sub_(sub), out_(out) {}

    const Globals& globals() const { return g_; }
    std::ostream& out() { return out_; }

    ThreadPool& pool() {
        if (!pool_) pool_ = std::make_unique<ThreadPool>(threads());
        return *pool_;
    }
    std::size_t threads() const { return g_.threads ? g_.threads : default_thread_count(); }

    fs::path output(const std::string& fallback) const { return fs::path(g_.out.empty() ? fallback : g_.out); }

    void produced(const fs::path& p) { outputs_.push_back(p.string()); }
    void input(const fs::path& p) { inputs_.push_back(p); }

    void write_manifest() const {
        const fs::path path = g_.out.empty() ? fs::path("steinerwl-" + sub_.get_name() + ".manifest.json")
                                             : fs::path(g_.out + ".manifest.json");
        const auto options = effective_options(app_, sub_);
        std::string canonical;
        for (const auto& [k, v] : options) canonical += k + "=" + v + "\n";

        nlohmann::ordered_json m;
        m["tool"] = "steinerwl";
        m["command"] = sub_.get_name();
        m["argv"] = args_;
        m["seed"] = g_.seed;
        m["threads"] = threads();
        m["config_file"] = g_.config;
        m["config_hash"] = hex64(fnv1a64(canonical.data(), canonical.size()));
        m["options"] = options;
        nlohmann::ordered_json in = nlohmann::ordered_json::array();
        for (const auto& p : inputs_) {
            nlohmann::ordered_json f;
            f["path"] = p.string();
            f["fnv1a64"] = fs::is_regular_file(p) ? file_checksum(p) : "";
            in.push_back(f);
        }
        m["inputs"] = in;
        m["outputs"] = outputs_;
        m["versions"] = {
            {"steinerwl", kVersion},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"cli11", CLI11_VERSION},
            {"compiler", __VERSION__},
            {"dataset_schema", kDatasetSchema},
        };
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot write manifest '" + path.string() + "'");
        f << m.dump(2) << '\n';
    }

private:
    const Globals& g_;
    const std::vector<std::string>& args_;
    CLI::App& app_;
    CLI::App& sub_;
    std::ostream& out_;
    std::unique_ptr<ThreadPool> pool_;
    std::vector<std::string> outputs_;
    std::vector<fs::path> inputs_;
};

// --- shared option groups --------------------------------------------------

struct DegreeFlags {
    std::size_t min_degree = 3;
    std::size_t max_degree = 64;
    DegreeFilter filter() const {
        if (min_degree < 2 || min_degree > max_degree) throw UsageError("invalid degree filter");
        return {min_degree, max_degree};
    }
};

void add_degree_flags(CLI::App* sub, DegreeFlags& d) {
    sub->add_option("--min-degree", d.min_degree, "Drop nets with fewer distinct pins");
    sub->add_option("--max-degree", d.max_degree, "Drop nets with more distinct pins");
}

void add_budget_flag(CLI::App* sub, ExactBudget& b) {
    sub->add_option("--exact-max-degree", b.max_degree,
                    "Largest degree solved exactly; larger nets fall back to iterated 1-Steiner");
}

struct NetInputs {
    std::vector<std::string> paths;
};

// Every .jsonl file is its own netlist; otherwise expects a .nets/.pl pair.
std::vector<ParsedNetlist> load_netlists(const std::vector<std::string>& paths, const DegreeFilter& filter,
                                         Run& run) {
    std::vector<fs::path> ps(paths.begin(), paths.end());
    for (const auto& p : ps) run.input(p);
    bool all_jsonl = !ps.empty();
    for (const auto& p : ps) all_jsonl = all_jsonl && p.extension() == ".jsonl";
    std::vector<ParsedNetlist> out;
    if (all_jsonl) {
        for (const auto& p : ps) out.push_back(parse_nets_jsonl(p, filter));
    } else {
        out.push_back(parse_netlist(ps, filter));
    }
    return out;
}

void report_filter(Run& run, const ParsedNetlist& nl) {
    run.out() << "netlist " << nl.name << ": " << nl.nets.size() << " of " << nl.total_nets
              << " nets kept (" << nl.excluded_small << " below, " << nl.excluded_large
              << " above the degree filter)\n";
}

struct ModelFlags {
    int layers = 4;
    int hidden = 32;
    int mlp_hidden = 32;
    bool no_layernorm = false;
    bool gine_neighbor = false;
};

struct TrainFlags {
    std::string data;
    std::string val_data;
    double val_fraction = 0.05;
    std::size_t steps = 1000;
    std::size_t batch = 16;
    double lr = 1e-4;
    std::string lr_schedule = "constant";
    double lr_floor = 0.0;
    double weight_decay = 1e-5;
    double pos_weight = 1.0;
    std::size_t val_every = 0;
    double threshold = kDefaultThreshold;
    std::size_t shard_size = 4;
};

void add_train_flags(CLI::App* sub, TrainFlags& t) {
    sub->add_option("--data", t.data, "Labeled dataset (JSONL)")->required();
    sub->add_option("--val-data", t.val_data, "Validation dataset; default: tail of --data");
    sub->add_option("--val-fraction", t.val_fraction, "Share of --data held out for validation")
        ->check(CLI::Range(0.0, 0.9));
    sub->add_option("--steps", t.steps, "Optimizer steps");
    sub->add_option("--batch", t.batch, "Nets per mini-batch")->check(CLI::PositiveNumber);
    sub->add_option("--lr", t.lr, "Adam learning rate");
    sub->add_option("--lr-schedule", t.lr_schedule, "Learning rate schedule")
        ->check(CLI::IsMember({"constant", "cosine"}));
    sub->add_option("--lr-floor", t.lr_floor, "Final cosine learning rate as a fraction of --lr")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--weight-decay", t.weight_decay, "L2 decay added to the gradient");
    sub->add_option("--pos-weight", t.pos_weight, "Loss weight of positive (Steiner) candidates");
    sub->add_option("--val-every", t.val_every, "Validate every N steps (0: only at the end)");
    sub->add_option("--threshold", t.threshold, "Validation prediction threshold");
    sub->add_option("--shard-size", t.shard_size, "Nets per gradient shard")->check(CLI::PositiveNumber);
}

TrainOptions train_options(const TrainFlags& t, std::uint64_t seed) {
    TrainOptions o;
    o.steps = t.steps;
    o.batch_size = t.batch;
    o.adam.lr = t.lr;
    o.schedule = lr_schedule_from_string(t.lr_schedule);
    o.lr_floor = t.lr_floor;
    o.adam.weight_decay = t.weight_decay;
    o.pos_weight = t.pos_weight;
    o.val_every = t.val_every;
    o.val_threshold = t.threshold;
    o.seed = seed;
    o.shard_size = t.shard_size;
    return o;
}

std::pair<std::vector<TrainExample>, std::vector<TrainExample>> load_training_data(const TrainFlags& t, Run& run) {
    run.input(t.data);
    std::vector<TrainExample> train_set = examples_from_records(read_dataset(t.data));
    std::vector<TrainExample> val_set;
    if (!t.val_data.empty()) {
        run.input(t.val_data);
        val_set = examples_from_records(read_dataset(t.val_data));
    } else if (t.val_fraction > 0) {
        const auto n_val = static_cast<std::size_t>(t.val_fraction * static_cast<double>(train_set.size()));
        val_set.assign(train_set.end() - static_cast<std::ptrdiff_t>(n_val), train_set.end());
        train_set.resize(train_set.size() - n_val);
    }
    return {std::move(train_set), std::move(val_set)};
}

MetricsCallback metrics_writer(std::ofstream& csv, Run& run) {
    write_metrics_header(csv);
    return [&csv, &run](const MetricsRow& row) {
        write_metrics_row(csv, row);
        if (row.validation) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "step %zu: precision %.4f recall %.4f wl error %.4f%%\n", row.step,
                          row.validation->precision, row.validation->recall, row.validation->wl_error_pct);
            run.out() << buf;
        }
    };
}

fs::path sibling(const fs::path& p, const std::string& suffix) {
    return p.parent_path() / (p.stem().string() + suffix);
}

// --- subcommands -----------------------------------------------------------

void cmd_gen_data(Run& run, const std::string& degrees, Coord extent, const std::string& distribution,
                  std::size_t count, const ExactBudget& budget) {
    GenerateOptions o;
    o.count = count;
    o.seed = run.globals().seed;
    try {
        o.synthetic.degrees = parse_degree_range(degrees);
    } catch (const DataError& e) {
        throw UsageError(e.what());
    }
    o.synthetic.extent = extent;
    o.synthetic.distribution = distribution_from_string(distribution);
    o.budget = budget;
    o.threads = run.threads();
    const fs::path out = run.output("data.jsonl");
    generate_dataset(o, out);
    run.produced(out);
    run.out() << "wrote " << count << " records to " << out.string() << "\n";
}

void cmd_label(Run& run, const NetInputs& in, const DegreeFlags& d, const ExactBudget& budget) {
    std::vector<DatasetRecord> records;
    for (const auto& nl : load_netlists(in.paths, d.filter(), run)) {
        report_filter(run, nl);
        auto part = label_nets(nl.nets, budget, run.threads());
        records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    const fs::path out = run.output("labels.jsonl");
    write_dataset(out, records);
    run.produced(out);
    std::size_t exact = 0;
    for (const auto& r : records) exact += r.provenance == LabelProvenance::exact;
    run.out() << "wrote " << records.size() << " records (" << exact << " exact) to " << out.string() << "\n";
}

void cmd_train(Run& run, const TrainFlags& t, const ModelFlags& m) {
    ModelConfig config;
    config.layers = m.layers;
    config.hidden = m.hidden;
    config.mlp_hidden = m.mlp_hidden;
    config.use_layernorm = !m.no_layernorm;
    config.gine_neighbor_variant = m.gine_neighbor;
    config.seed = run.globals().seed;
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    auto [train_set, val_set] = load_training_data(t, run);
    const TrainOptions options = train_options(t, run.globals().seed);

    const fs::path out = run.output("model.ckpt");
    const fs::path metrics_path = out.string() + ".metrics.csv";
    std::ofstream csv(metrics_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw DataError("cannot write '" + metrics_path.string() + "'");
    const TrainResult result =
        train(init_params<float>(config), train_set, val_set, options, &run.pool(), metrics_writer(csv, run));

    Checkpoint ckpt;
    ckpt.params = result.best;
    ckpt.metadata = training_metadata(options, result, train_set.size());
    ckpt.metadata["mode"] = "train";
    ckpt.metadata["data.file"] = fs::path(t.data).filename().string();
    ckpt.metadata["data.fnv1a64"] = file_checksum(t.data);
    save_checkpoint(out, ckpt);
    run.produced(out);
    run.produced(metrics_path);
    run.out() << "saved checkpoint " << out.string() << " (best step " << result.best_step << ")\n";
}

struct ArchExpect {
    std::optional<int> layers, hidden, mlp_hidden;
};

void cmd_fine_tune(Run& run, const std::string& checkpoint, const TrainFlags& t, const ArchExpect& a) {
    run.input(checkpoint);
    std::optional<ModelConfig> expected;
    if (a.layers || a.hidden || a.mlp_hidden) {
        ModelConfig c = load_checkpoint(checkpoint).params.config;
        if (a.layers) c.layers = *a.layers;
        if (a.hidden) c.hidden = *a.hidden;
        if (a.mlp_hidden) c.mlp_hidden = *a.mlp_hidden;
        expected = c;
    }
    auto [train_set, val_set] = load_training_data(t, run);
    const TrainOptions options = train_options(t, run.globals().seed);

    const fs::path out = run.output("finetuned.ckpt");
    const fs::path metrics_path = out.string() + ".metrics.csv";
    std::ofstream csv(metrics_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw DataError("cannot write '" + metrics_path.string() + "'");
    TrainResult result;
    Checkpoint ckpt = fine_tune(checkpoint, expected, train_set, val_set, options, &run.pool(),
                                metrics_writer(csv, run), &result);
    ckpt.metadata["data.file"] = fs::path(t.data).filename().string();
    ckpt.metadata["data.fnv1a64"] = file_checksum(t.data);
    save_checkpoint(out, ckpt);
    run.produced(out);
    run.produced(metrics_path);
    run.out() << "saved checkpoint " << out.string() << " (best step " << result.best_step << ")\n";
}

void cmd_predict(Run& run, const std::string& checkpoint, const NetInputs& in, const DegreeFlags& d,
                 const InferenceOptions& inf) {
    run.input(checkpoint);
    const Checkpoint ckpt = load_checkpoint(checkpoint);
    std::ostringstream table;
    table << "netlist,net,degree,wl,steiner_points\n";
    for (const auto& nl : load_netlists(in.paths, d.filter(), run)) {
        const InferenceResult r = infer_many(nl.nets, ckpt.params, inf, &run.pool());
        for (std::size_t i = 0; i < nl.nets.size(); ++i) {
            table << nl.name << ',' << nl.nets[i].id << ',' << nl.nets[i].degree() << ',' << r.estimates[i].wl
                  << ',' << r.estimates[i].kept << '\n';
        }
    }
    run.out() << table.str();
    if (!run.globals().out.empty()) {
        std::ofstream f(run.globals().out, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot write '" + run.globals().out + "'");
        f << table.str();
        run.produced(run.globals().out);
    }
}

std::vector<ReferencedNet> referenced(Run& run, const NetInputs& in, const DegreeFlags& d,
                                      const ExactBudget& budget) {
    std::vector<ReferencedNet> refs;
    for (const auto& nl : load_netlists(in.paths, d.filter(), run)) {
        auto part = compute_references(nl.name, nl.nets, budget, &run.pool());
        refs.insert(refs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return refs;
}

void cmd_eval(Run& run, const NetInputs& in, const DegreeFlags& d, const std::string& methods,
              const std::string& checkpoint, const EvalOptions& base) {
    EvalOptions o = base;
    try {
        o.methods = parse_methods(methods);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::optional<Checkpoint> ckpt;
    if (!checkpoint.empty()) {
        run.input(checkpoint);
        ckpt = load_checkpoint(checkpoint);
    }
    const bool wants_model = std::find(o.methods.begin(), o.methods.end(), Method::model) != o.methods.end();
    if (wants_model && !ckpt) throw UsageError("method 'model' requires --checkpoint");

    const auto refs = referenced(run, in, d, o.budget);
    const WlReport report = evaluate(refs, o, ckpt ? &ckpt->params : nullptr, &run.pool());

    const fs::path out = run.output("report.csv");
    const fs::path summary = sibling(out, ".summary.csv");
    const fs::path runtime = sibling(out, ".runtime.csv");
    std::ofstream f1(out, std::ios::binary | std::ios::trunc), f2(summary, std::ios::binary | std::ios::trunc),
        f3(runtime, std::ios::binary | std::ios::trunc);
    if (!f1 || !f2 || !f3) throw DataError("cannot write report files next to '" + out.string() + "'");
    report.write_nets_csv(f1);
    report.write_summary_csv(f2);
    report.write_runtime_csv(f3);
    run.produced(out);
    run.produced(summary);
    run.produced(runtime);
    for (Method m : o.methods) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-6s mean error %.4f%% over %zu nets\n", to_string(m), report.mean_error(m),
                      report.nets.size());
        run.out() << buf;
    }
}

void cmd_bench(Run& run, const NetInputs& in, const DegreeFlags& d, const std::string& checkpoints,
               const std::string& thresholds, const std::string& batch_sizes, std::size_t count,
               const std::string& degrees, std::size_t buckets, std::size_t repeats, const ExactBudget& budget) {
    const auto ckpts = split_list(checkpoints);
    if (ckpts.empty()) throw UsageError("--checkpoints needs at least one file");
    const auto ths = parse_double_list(thresholds);
    std::vector<std::size_t> batches;
    for (double b : parse_double_list(batch_sizes)) {
        if (b < 1 || b != static_cast<double>(static_cast<std::size_t>(b))) {
            throw UsageError("batch sizes must be positive integers");
        }
        batches.push_back(static_cast<std::size_t>(b));
    }

    std::vector<ReferencedNet> refs;
    if (!in.paths.empty()) {
        refs = referenced(run, in, d, budget);
    } else {
        SyntheticOptions so;
        so.degrees = parse_degree_range(degrees);
        std::vector<Net> nets;
        for (std::size_t i = 0; i < count; ++i) {
            nets.push_back(sample_synthetic_net(derive_seed(run.globals().seed, i), so, "bench-" + std::to_string(i)));
        }
        refs = compute_references("synthetic", nets, budget, &run.pool());
    }

    std::vector<SweepRow> rows;
    for (const auto& path : ckpts) {
        run.input(path);
        const Checkpoint ckpt = load_checkpoint(path);
        for (double th : ths) {
            for (std::size_t b : batches) {
                InferenceOptions io;
                io.threshold = th;
                io.batch_size = b;
                io.buckets = buckets;
                rows.push_back(run_sweep_point(fs::path(path).stem().string(), refs, ckpt.params, io, &run.pool(),
                                               repeats));
            }
        }
    }
    const fs::path out = run.output("sweep.csv");
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write '" + out.string() + "'");
    write_sweep_csv(f, rows);
    write_sweep_csv(run.out(), rows);
    run.produced(out);
}

void cmd_report(Run& run, const std::string& input) {
    run.input(input);
    std::ifstream in(input);
    if (!in) throw DataError("cannot open '" + input + "'");
    const WlReport report = WlReport::read_nets_csv(in);
    const fs::path out = run.output("summary.csv");
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write '" + out.string() + "'");
    report.write_summary_csv(f);
    run.produced(out);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %-12s %-6s %8s %14s\n", "scope", "key", "method", "nets", "mean_error_%");
    run.out() << buf;
    for (const auto& a : report.aggregates()) {
        std::snprintf(buf, sizeof buf, "%-8s %-12s %-6s %8zu %14.4f\n", a.scope.c_str(), a.key.c_str(),
                      to_string(a.method), a.count, a.mean_error_pct);
        run.out() << buf;
    }
}

const char* error_category(const std::exception& e) {
    if (dynamic_cast<const CheckpointError*>(&e)) return "checkpoint";
    if (dynamic_cast<const TrainingError*>(&e)) return "training";
    if (dynamic_cast<const DataError*>(&e)) return "data";
    if (dynamic_cast<const DegenerateNetError*>(&e)) return "data";
    if (dynamic_cast<const HananCapExceeded*>(&e)) return "data";
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return "io";
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "input";
    return "internal";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rectilinear Steiner tree wirelength estimation: exact and heuristic solvers plus a "
                 "graph-transformer Steiner point predictor.",
                 "steinerwl"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    Globals g;
    app.add_option("--seed", g.seed, "Random seed for generation, initialization and shuffling");
    app.add_option("--threads", g.threads, "Worker threads (0: all cores)");
    app.add_option("--config", g.config, "Key-value file of option defaults (key = value per line)");
    app.add_option("--out", g.out, "Output path; the run manifest is written to <out>.manifest.json");

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "Generate a labeled synthetic dataset");
    std::size_t gen_count = 1000;
    std::string gen_degrees = "5:15";
    Coord gen_extent = 1000;
    std::string gen_distribution = "uniform";
    ExactBudget gen_budget;
    gen->add_option("--count", gen_count, "Number of nets");
    gen->add_option("--degrees", gen_degrees, "Degree range lo:hi, sampled uniformly");
    gen->add_option("--extent", gen_extent, "Pins lie on the integer grid [0, extent)^2")->check(CLI::PositiveNumber);
    gen->add_option("--distribution", gen_distribution, "Pin distribution")
        ->check(CLI::IsMember({"uniform", "clustered"}));
    add_budget_flag(gen, gen_budget);

    // label
    auto* label = app.add_subcommand("label", "Label nets from a netlist with the exact or heuristic oracle");
    NetInputs label_in;
    DegreeFlags label_deg;
    ExactBudget label_budget;
    label->add_option("--nets", label_in.paths, "One or more .jsonl files, or a .nets/.pl pair")->required();
    add_degree_flags(label, label_deg);
    add_budget_flag(label, label_budget);

    // train
    auto* tr = app.add_subcommand("train", "Train a model on a labeled dataset");
    TrainFlags train_flags;
    ModelFlags model_flags;
    add_train_flags(tr, train_flags);
    tr->add_option("--layers", model_flags.layers, "Graph transformer layers");
    tr->add_option("--hidden", model_flags.hidden, "Hidden width");
    tr->add_option("--mlp-hidden", model_flags.mlp_hidden, "Output head hidden width");
    tr->add_flag("--no-layernorm", model_flags.no_layernorm, "Disable layernorm and residual connections");
    tr->add_flag("--gine-neighbor", model_flags.gine_neighbor, "Use the neighbor's features in GINE messages");

    // fine-tune
    auto* ft = app.add_subcommand("fine-tune", "Continue training from a checkpoint");
    TrainFlags ft_flags;
    ft_flags.lr = kFineTuneLr;
    std::string ft_checkpoint;
    ArchExpect ft_arch;
    ft->add_option("--checkpoint", ft_checkpoint, "Base checkpoint")->required();
    add_train_flags(ft, ft_flags);
    ft->add_option("--layers", ft_arch.layers, "Expected layer count (checked against the checkpoint)");
    ft->add_option("--hidden", ft_arch.hidden, "Expected hidden width");
    ft->add_option("--mlp-hidden", ft_arch.mlp_hidden, "Expected output head width");

    // predict
    auto* pr = app.add_subcommand("predict", "Estimate wirelength of nets with a trained model");
    std::string pr_checkpoint;
    NetInputs pr_in;
    DegreeFlags pr_deg;
    InferenceOptions pr_inf;
    pr->add_option("--checkpoint", pr_checkpoint, "Model checkpoint")->required();
    pr->add_option("--nets", pr_in.paths, "One or more .jsonl files, or a .nets/.pl pair")->required();
    pr->add_option("--threshold", pr_inf.threshold, "Steiner probability threshold");
    pr->add_option("--batch", pr_inf.batch_size, "Nets per inference batch")->check(CLI::PositiveNumber);
    pr->add_option("--buckets", pr_inf.buckets, "Size groups used to form batches")->check(CLI::PositiveNumber);
    add_degree_flags(pr, pr_deg);

    // eval
    auto* ev = app.add_subcommand("eval", "Compare wirelength estimators against the reference");
    NetInputs ev_in;
    DegreeFlags ev_deg;
    std::string ev_methods = "mst,exact";
    std::string ev_checkpoint;
    EvalOptions ev_opts;
    ev->add_option("--nets", ev_in.paths, "One or more .jsonl files, or a .nets/.pl pair")->required();
    ev->add_option("--methods", ev_methods, "Comma-separated subset of mst,i1s,exact,model");
    ev->add_option("--checkpoint", ev_checkpoint, "Model checkpoint (required for method 'model')");
    ev->add_option("--threshold", ev_opts.inference.threshold, "Steiner probability threshold");
    ev->add_option("--batch", ev_opts.inference.batch_size, "Nets per inference batch")->check(CLI::PositiveNumber);
    ev->add_option("--buckets", ev_opts.inference.buckets, "Size groups used to form batches")
        ->check(CLI::PositiveNumber);
    add_degree_flags(ev, ev_deg);
    add_budget_flag(ev, ev_opts.budget);

    // bench
    auto* bench = app.add_subcommand("bench", "Sweep checkpoints, thresholds and batch sizes");
    NetInputs bench_in;
    DegreeFlags bench_deg;
    std::string bench_ckpts, bench_thresholds = "0.3", bench_batches = "16", bench_degrees = "5:8";
    std::size_t bench_count = 1000, bench_buckets = 5, bench_repeats = 3;
    ExactBudget bench_budget;
    bench->add_option("--checkpoints", bench_ckpts, "Comma-separated checkpoint files")->required();
    bench->add_option("--thresholds", bench_thresholds, "Comma-separated thresholds");
    bench->add_option("--batch-sizes", bench_batches, "Comma-separated batch sizes");
    bench->add_option("--nets", bench_in.paths, "Net files; default: synthetic nets");
    bench->add_option("--count", bench_count, "Synthetic nets when --nets is absent");
    bench->add_option("--degrees", bench_degrees, "Synthetic degree range lo:hi");
    bench->add_option("--buckets", bench_buckets, "Size groups used to form batches")->check(CLI::PositiveNumber);
    bench->add_option("--repeats", bench_repeats, "Timing repeats; the fastest is reported")
        ->check(CLI::PositiveNumber);
    add_degree_flags(bench, bench_deg);
    add_budget_flag(bench, bench_budget);

    // report
    auto* rep = app.add_subcommand("report", "Aggregate a per-net evaluation CSV");
    std::string rep_input;
    rep->add_option("--input", rep_input, "Per-net CSV written by eval")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "usage error: " << one_line(e.what()) << "\n";
        const CLI::App* help_for = &app;
        for (const CLI::App* s : app.get_subcommands()) help_for = s;
        err << help_for->help();
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        if (!g.config.empty()) apply_config(app, *sub, g.config);
        Run run(g, args, app, *sub, out);
        const std::string name = sub->get_name();
        if (name == "gen-data") {
            cmd_gen_data(run, gen_degrees, gen_extent, gen_distribution, gen_count, gen_budget);
        } else if (name == "label") {
            cmd_label(run, label_in, label_deg, label_budget);
        } else if (name == "train") {
            cmd_train(run, train_flags, model_flags);
        } else if (name == "fine-tune") {
            cmd_fine_tune(run, ft_checkpoint, ft_flags, ft_arch);
        } else if (name == "predict") {
            cmd_predict(run, pr_checkpoint, pr_in, pr_deg, pr_inf);
        } else if (name == "eval") {
            cmd_eval(run, ev_in, ev_deg, ev_methods, ev_checkpoint, ev_opts);
        } else if (name == "bench") {
            cmd_bench(run, bench_in, bench_deg, bench_ckpts, bench_thresholds, bench_batches, bench_count,
                      bench_degrees, bench_buckets, bench_repeats, bench_budget);
        } else if (name == "report") {
            cmd_report(run, rep_input);
        }
        run.write_manifest();
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << one_line(e.what()) << "\n" << sub->help();
        return 2;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << one_line(e.what()) << "\n" << sub->help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << error_category(e) << ": " << one_line(e.what()) << "\n";
        return 1;
    }
}

}  // namespace steinerwl
