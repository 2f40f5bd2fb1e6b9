// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance                  run everything
//   acceptance --only 1,5,8     run a subset
//   acceptance --cache DIR      reuse the distilled model and datasets in DIR

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "steinerwl/checkpoint.hpp"
#include "steinerwl/dataset.hpp"
#include "steinerwl/evaluate.hpp"
#include "steinerwl/inference.hpp"
#include "steinerwl/oracle.hpp"
#include "steinerwl/parallel.hpp"
#include "steinerwl/random.hpp"
#include "steinerwl/trainer.hpp"
#include "steinerwl/tree.hpp"
#include "tempdir.hpp"

using namespace steinerwl;
namespace t = steinerwl::testing;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr double kMstOracleSeconds = 10.0;
constexpr double kHananSeconds = 300.0;
constexpr double kGapLo = 2.0, kGapHi = 12.0;
constexpr double kGapSeconds = 600.0;
constexpr double kI1sTolerancePct = 1.0;
constexpr double kI1sShare = 0.95;
constexpr double kI1sSeconds = 300.0;
constexpr double kGradRelError = 1e-3;
constexpr double kBceAbsError = 1e-6;
constexpr double kDistillErrorPct = 2.5;
constexpr double kDistillMstShare = 0.40;
constexpr double kDistillSeconds = 4 * 3600.0;
constexpr double kFineTuneGain = 0.10;

// Distillation setup.
constexpr std::uint64_t kDataSeed = 11;
constexpr std::size_t kTrainNets = 200'000;
constexpr std::size_t kTestNets = 5'000;
constexpr std::size_t kValNets = 1'000;  // tail of the training nets
constexpr std::size_t kDistillSteps = 30'000;
constexpr double kDistillLr = 1e-3;
constexpr double kDistillLrFloor = 0.01;
constexpr double kPosWeight = 3.0;
constexpr std::uint64_t kModelSeed = 3;

// Shifted distribution for fine-tuning.
constexpr std::uint64_t kShiftSeed = 12;
constexpr std::size_t kShiftTrain = 10'000;
constexpr std::size_t kShiftVal = 500;
constexpr std::size_t kShiftTest = 2'000;
constexpr std::size_t kFineTuneSteps = 5'000;
constexpr double kFineTuneLrUsed = 1e-5;

// Capacity sweep.
constexpr std::size_t kSweepSteps = 10'000;
constexpr std::size_t kSweepTrain = 50'000;
constexpr std::size_t kSweepTest = 2'000;
constexpr int kSweepRepeats = 3;
constexpr int kBatchRepeats = 5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Net random_point_net(std::mt19937_64& rng, std::size_t n, Coord extent) {
    std::uniform_int_distribution<Coord> d(0, extent - 1);
    std::set<Point> seen;
    std::vector<Point> pts;
    while (pts.size() < n) {
        const Point p{d(rng), d(rng)};
        if (seen.insert(p).second) pts.push_back(p);
    }
    return Net("r", pts);
}

std::vector<Net> synthetic_nets(std::uint64_t seed, std::size_t n, DegreeRange degrees) {
    SyntheticOptions o;
    o.degrees = degrees;
    std::vector<Net> nets;
    nets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) nets.push_back(sample_synthetic_net(derive_seed(seed, i), o));
    return nets;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1001);
    std::size_t equal = 0;
    const std::size_t n = 500;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t size = 2 + i % 5;
        const Net net = random_point_net(rng, size, i % 3 == 0 ? 8 : 1000);
        if (mst_length(net.pins) == t::exhaustive_spanning_tree_min(net.pins)) ++equal;
    }
    const double s = seconds_since(start);
    return {equal == n && s < kMstOracleSeconds,
            fmt("mst == exhaustive spanning-tree minimum on %zu/%zu point sets, %.2f s (limit %.0f s)", equal, n, s,
                kMstOracleSeconds)};
}

Outcome criterion2(ThreadPool& pool) {
    const auto start = Clock::now();
    const std::size_t n = 1000;
    std::vector<int> above_mst(n), brute_differs(n), refined_differs(n);
    std::mt19937_64 rng(2002);
    std::vector<Net> nets;
    for (std::size_t i = 0; i < n; ++i) nets.push_back(random_point_net(rng, 3 + i % 4, i % 2 ? 30 : 1000));
    pool.parallel_for(n, [&](std::size_t i) {
        const Net& net = nets[i];
        const auto exact = exact_rsmt(net);
        above_mst[i] = exact.wl > mst_length(net.pins);
        const auto brute = t::brute_force_hanan_rsmt(net);
        brute_differs[i] = brute.wl != exact.wl || brute.steiner != exact.steiner_points;
        refined_differs[i] = t::refined_grid_steiner_length_scaled(net, 2) != 2 * exact.wl;
    });
    const int a = std::accumulate(above_mst.begin(), above_mst.end(), 0);
    const int b = std::accumulate(brute_differs.begin(), brute_differs.end(), 0);
    const int r = std::accumulate(refined_differs.begin(), refined_differs.end(), 0);
    const double s = seconds_since(start);
    return {a == 0 && b == 0 && r == 0 && s < kHananSeconds,
            fmt("%zu nets degree 3-6: exact > mst %d, differs from Hanan brute force %d, refined grid improves %d, "
                "%.1f s (limit %.0f s)",
                n, a, b, r, s, kHananSeconds)};
}

Outcome criterion3(ThreadPool& pool) {
    const auto start = Clock::now();
    const auto nets = synthetic_nets(3003, 10'000, {5, 8});
    std::vector<double> gap(nets.size());
    std::vector<int> inexact(nets.size());
    pool.parallel_for(nets.size(), [&](std::size_t i) {
        const auto e = exact_rsmt(nets[i]);
        inexact[i] = !e.exact;
        gap[i] = error_pct(mst_length(nets[i].pins), e.wl);
    });
    const double mean = std::accumulate(gap.begin(), gap.end(), 0.0) / static_cast<double>(gap.size());
    const int bad = std::accumulate(inexact.begin(), inexact.end(), 0);
    const double s = seconds_since(start);
    return {bad == 0 && mean >= kGapLo && mean <= kGapHi && s < kGapSeconds,
            fmt("mean (mst-exact)/exact = %.3f%% over %zu nets (band [%.0f, %.0f]), %.1f s", mean, nets.size(), kGapLo,
                kGapHi, s)};
}

Outcome criterion4(ThreadPool& pool) {
    const auto start = Clock::now();
    const std::size_t n = 1000;
    std::mt19937_64 rng(4004);
    std::vector<Net> nets;
    for (std::size_t i = 0; i < n; ++i) nets.push_back(random_point_net(rng, 3 + i % 5, 1000));
    std::vector<int> within(n), above(n);
    pool.parallel_for(n, [&](std::size_t i) {
        const auto e = exact_rsmt(nets[i]);
        const auto h = iterated_one_steiner(nets[i]);
        within[i] = error_pct(h.wl, e.wl) <= kI1sTolerancePct;
        above[i] = h.wl > mst_length(nets[i].pins);
    });
    const int w = std::accumulate(within.begin(), within.end(), 0);
    const int a = std::accumulate(above.begin(), above.end(), 0);
    const double share = static_cast<double>(w) / static_cast<double>(n);
    const double s = seconds_since(start);
    return {share >= kI1sShare && a == 0 && s < kI1sSeconds,
            fmt("iterated 1-Steiner within %.0f%% of exact on %.1f%% of %zu nets degree 3-7 (need %.0f%%), above mst %d, "
                "%.1f s",
                kI1sTolerancePct, 100 * share, n, 100 * kI1sShare, a, s)};
}

Outcome criterion5() {
    double worst = 0;
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SyntheticOptions so;
        so.degrees = {5, 5};
        const LabeledSample s = label_sample(sample_synthetic_net(derive_seed(5005, seed), so));
        const auto batch = make_batch<double>(featurize(s.graph));
        std::vector<std::uint8_t> y(s.graph.n_pins, 0);
        y.insert(y.end(), s.labels.labels.begin(), s.labels.labels.end());
        ModelConfig c;
        c.layers = 2;
        c.hidden = 4;
        c.mlp_hidden = 4;
        ModelParams<double> params = zero_params<double>(c);
        t::randomize(params, seed);
        ForwardCache<double> cache;
        const auto logits = forward(params, batch, &cache);
        const auto loss = bce_loss(logits, y, batch.candidate);
        const auto grads = backward(params, batch, cache, loss.d_logits);
        const auto r = t::check_gradients(
            params, grads,
            [&](const ModelParams<double>& p) { return bce_loss(forward(p, batch), y, batch.candidate).loss; },
            [&](const ModelParams<double>& p) { return t::relu_pattern(p, batch); });
        worst = std::max(worst, r.max_rel_error);
        checked += r.checked;
    }

    double bce_worst = 0;
    std::mt19937_64 rng(5006);
    std::normal_distribution<double> nd(0.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 30;
        Logits<double> z(n);
        std::vector<std::uint8_t> y(static_cast<std::size_t>(n)), mask(static_cast<std::size_t>(n), 1);
        for (int i = 0; i < n; ++i) {
            z(i) = nd(rng);
            y[static_cast<std::size_t>(i)] = rng() % 2;
        }
        const auto r = bce_loss(z, y, mask);
        for (int i = 0; i < n; ++i) {
            const double closed = (sigmoid(z(i)) - y[static_cast<std::size_t>(i)]) / n;
            bce_worst = std::max(bce_worst, std::abs(r.d_logits(i) - closed));
        }
    }
    return {worst < kGradRelError && bce_worst < kBceAbsError,
            fmt("full-model max relative error %.2e over %zu coordinates (limit %.0e); BCE closed-form max abs "
                "error %.2e (limit %.0e)",
                worst, checked, kGradRelError, bce_worst, kBceAbsError)};
}

// ---------------------------------------------------------------------------
// Shared state for the learning criteria.

struct Corpus {
    std::vector<TrainExample> train, val, test;
};

std::vector<ReferencedNet> references(const std::string& name, const std::vector<TrainExample>& examples) {
    std::vector<ReferencedNet> refs;
    refs.reserve(examples.size());
    for (const auto& e : examples) refs.push_back({name, e.net, e.wl_opt, true});
    return refs;
}

std::vector<DatasetRecord> cached_records(const GenerateOptions& g, const fs::path& cache, const std::string& name) {
    if (!cache.empty() && fs::exists(cache / name)) return read_dataset(cache / name);
    auto records = generate_records(g);
    if (!cache.empty()) write_dataset(cache / name, records);
    return records;
}

Corpus distillation_corpus(const fs::path& cache, ThreadPool& pool) {
    GenerateOptions g;
    g.count = kTrainNets + kTestNets;
    g.seed = kDataSeed;
    g.synthetic.degrees = {5, 8};
    g.threads = pool.size();
    auto all = examples_from_records(cached_records(g, cache, "distill.jsonl"));
    Corpus c;
    c.test.assign(all.end() - static_cast<std::ptrdiff_t>(kTestNets), all.end());
    all.resize(kTrainNets);
    c.val.assign(all.end() - static_cast<std::ptrdiff_t>(kValNets), all.end());
    c.train = std::move(all);
    return c;
}

struct Distilled {
    fs::path checkpoint;
    ModelParams<float> params;
    double seconds = 0;
};

ModelConfig distill_config() {
    ModelConfig c;
    c.layers = 4;
    c.hidden = 32;
    c.mlp_hidden = 32;
    c.seed = kModelSeed;
    return c;
}

TrainOptions distill_options(std::size_t steps) {
    TrainOptions o;
    o.steps = steps;
    o.adam.lr = kDistillLr;
    o.schedule = LrSchedule::cosine;
    o.lr_floor = kDistillLrFloor;
    o.pos_weight = kPosWeight;
    o.val_every = 2000;
    o.seed = kModelSeed;
    return o;
}

Distilled distill(const Corpus& c, const fs::path& dir, const fs::path& cache, ThreadPool& pool) {
    Distilled d;
    d.checkpoint = (cache.empty() ? dir : cache) / "distilled.ckpt";
    if (!cache.empty() && fs::exists(d.checkpoint)) {
        d.params = load_checkpoint(d.checkpoint).params;
        return d;
    }
    const auto start = Clock::now();
    const TrainOptions o = distill_options(kDistillSteps);
    const TrainResult r = train(init_params<float>(distill_config()), c.train, c.val, o, &pool,
                                [](const MetricsRow& row) {
                                    if (row.validation && row.step % 6'000 == 0) {
                                        std::cerr << "  distill step " << row.step << " val wl error "
                                                  << row.validation->wl_error_pct << "%\n";
                                    }
                                });
    d.seconds = seconds_since(start);
    d.params = r.best;
    save_checkpoint(d.checkpoint, {r.best, training_metadata(o, r, c.train.size())});
    return d;
}

Outcome criterion6(const Corpus& c, const Distilled& d, double data_seconds, ThreadPool& pool) {
    EvalOptions o;
    o.methods = {Method::mst, Method::model};
    const WlReport rep = evaluate(references("test", c.test), o, &d.params, &pool);
    const double model = rep.mean_error(Method::model);
    const double mst = rep.mean_error(Method::mst);
    const double total = d.seconds + data_seconds;
    return {model < kDistillErrorPct && model < kDistillMstShare * mst && total < kDistillSeconds,
            fmt("model %.3f%% vs mst %.3f%% on %zu held-out nets (need < %.1f%% and < %.0f%% of mst = %.3f%%), "
                "data %.0f s + training %.0f s",
                model, mst, c.test.size(), kDistillErrorPct, 100 * kDistillMstShare, kDistillMstShare * mst,
                data_seconds, d.seconds)};
}

Outcome criterion7(const Distilled& d, const fs::path& cache, ThreadPool& pool) {
    GenerateOptions g;
    g.count = kShiftTrain + kShiftVal + kShiftTest;
    g.seed = kShiftSeed;
    g.synthetic.degrees = {5, 8};
    g.synthetic.distribution = PinDistribution::clustered;
    g.threads = pool.size();
    auto all = examples_from_records(cached_records(g, cache, "clustered.jsonl"));
    const std::vector<TrainExample> train_set(all.begin(), all.begin() + kShiftTrain);
    const std::vector<TrainExample> val_set(all.begin() + kShiftTrain, all.begin() + kShiftTrain + kShiftVal);
    const std::vector<TrainExample> test_set(all.begin() + kShiftTrain + kShiftVal, all.end());

    TrainOptions o = fine_tune_defaults();
    o.steps = kFineTuneSteps;
    o.adam.lr = kFineTuneLrUsed;
    o.pos_weight = kPosWeight;
    o.val_every = 500;
    o.seed = kShiftSeed;
    const Checkpoint tuned = fine_tune(d.checkpoint, distill_config(), train_set, val_set, o, &pool);

    EvalOptions eo;
    eo.methods = {Method::model};
    const auto refs = references("clustered", test_set);
    const double before = evaluate(refs, eo, &d.params, &pool).mean_error(Method::model);
    const double after = evaluate(refs, eo, &tuned.params, &pool).mean_error(Method::model);
    const double gain = before > 0 ? (before - after) / before : 0.0;
    return {gain >= kFineTuneGain,
            fmt("clustered held-out error %.3f%% -> %.3f%% after fine-tuning on %zu nets, relative reduction %.1f%% "
                "(need >= %.0f%%)",
                before, after, train_set.size(), 100 * gain, 100 * kFineTuneGain)};
}

Outcome criterion8(const Corpus& c, const Distilled& d, const fs::path& dir, ThreadPool& pool) {
    std::vector<std::string> failures;

    // checkpoint round trip
    const fs::path ck = dir / "roundtrip.ckpt";
    save_checkpoint(ck, {d.params, {}});
    const auto loaded = load_checkpoint(ck).params;
    std::size_t compared = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        const auto batch = make_batch<float>(featurize(build_hanan_graph(c.test[i].net)));
        const auto a = forward(d.params, batch);
        const auto b = forward(loaded, batch);
        if (std::memcmp(a.data(), b.data(), sizeof(float) * static_cast<std::size_t>(a.size())) != 0) {
            failures.push_back("logits after reload");
            break;
        }
        ++compared;
    }

    // dataset generation
    GenerateOptions g;
    g.count = 300;
    g.seed = 8008;
    g.synthetic.degrees = {3, 10};
    generate_dataset(g, dir / "a.jsonl");
    g.threads = 3;
    generate_dataset(g, dir / "b.jsonl");
    if (t::slurp(dir / "a.jsonl") != t::slurp(dir / "b.jsonl")) failures.push_back("dataset bytes");

    // evaluation CSVs
    const std::vector<TrainExample> subset(c.test.begin(), c.test.begin() + 500);
    const auto refs = references("test", subset);
    EvalOptions eo;
    eo.methods = {Method::mst, Method::i1s, Method::exact, Method::model};
    auto csv = [&](const ModelParams<float>& p, ThreadPool* tp) {
        const WlReport rep = evaluate(refs, eo, &p, tp);
        std::ostringstream nets, summary;
        rep.write_nets_csv(nets);
        rep.write_summary_csv(summary);
        return nets.str() + summary.str();
    };
    if (csv(load_checkpoint(ck).params, &pool) != csv(load_checkpoint(ck).params, nullptr)) {
        failures.push_back("evaluation CSV");
    }

    std::string detail = fmt("logits bit-exact on %zu nets after reload; dataset and evaluation CSV byte comparison",
                             compared);
    for (const auto& f : failures) detail += "; mismatch: " + f;
    return {failures.empty(), detail};
}

Outcome criterion9(const Corpus& c, const Distilled& d, ThreadPool& pool) {
    // Each batch size is timed kBatchRepeats times; the fastest run is the
    // measurement and max - min the noise. A step may not be slower than the
    // previous one by more than the larger of the two noise values.
    const auto refs = references("test", c.test);
    std::vector<double> best, spread;
    std::string detail;
    bool pass = true;
    for (std::size_t b : {1, 2, 4, 8}) {
        InferenceOptions o;
        o.batch_size = b;
        std::vector<double> times;
        double us = 0;
        for (int k = 0; k < kBatchRepeats; ++k) {
            const SweepRow row = run_sweep_point("b" + std::to_string(b), refs, d.params, o, &pool, 1);
            times.push_back(row.total_seconds);
            us = times.back() == *std::min_element(times.begin(), times.end()) ? row.mean_us_per_net : us;
        }
        best.push_back(*std::min_element(times.begin(), times.end()));
        spread.push_back(*std::max_element(times.begin(), times.end()) - best.back());
        detail += fmt("%sbatch %zu: %.3f s +- %.3f (%.1f us/net)", best.size() > 1 ? ", " : "", b, best.back(),
                      spread.back(), us);
        const std::size_t k = best.size() - 1;
        if (k > 0 && best[k] > best[k - 1] + std::max(spread[k], spread[k - 1])) pass = false;
    }
    const bool faster = best.back() < best.front() - std::max(spread.back(), spread.front());
    return {pass, detail + fmt(" on %zu nets; batch 8 vs 1: %s", refs.size(),
                               faster ? "faster beyond noise" : "flat within noise")};
}

struct SweepRun {
    double error = 0;
    std::vector<double> per_net;
    double seconds = 0;
    double noise = 0;
};

Outcome criterion10(const Corpus& c, ThreadPool& pool) {
    const std::vector<TrainExample> train_set(c.train.begin(), c.train.begin() + kSweepTrain);
    const std::vector<TrainExample> val_set(c.val.begin(), c.val.begin() + 500);
    const std::vector<TrainExample> test_set(c.test.begin(), c.test.begin() + kSweepTest);
    const auto refs = references("test", test_set);
    const std::vector<int> depths{2, 4, 8};
    const std::uint64_t seeds[] = {21, 22, 23};

    std::map<std::pair<int, std::uint64_t>, SweepRun> runs;
    for (std::uint64_t seed : seeds) {
        for (int L : depths) {
            ModelConfig mc = distill_config();
            mc.layers = L;
            mc.seed = seed;
            TrainOptions o = distill_options(kSweepSteps);
            o.seed = seed;
            const TrainResult r = train(init_params<float>(mc), train_set, val_set, o, &pool);

            SweepRun run;
            EvalOptions eo;
            eo.methods = {Method::model};
            const WlReport rep = evaluate(refs, eo, &r.best, &pool);
            run.error = rep.mean_error(Method::model);
            for (const auto& n : rep.nets) {
                run.per_net.push_back(error_pct(*n.wl[static_cast<std::size_t>(Method::model)], n.wl_ref));
            }
            std::vector<double> times;
            for (int k = 0; k < kSweepRepeats; ++k) {
                times.push_back(run_sweep_point("L", refs, r.best, {}, &pool, 1).total_seconds);
            }
            run.seconds = *std::min_element(times.begin(), times.end());
            run.noise = *std::max_element(times.begin(), times.end()) - run.seconds;
            std::cerr << "  capacity L=" << L << " seed " << seed << ": error " << run.error << "%, " << run.seconds
                      << " s\n";
            runs[{L, seed}] = std::move(run);
        }
    }

    // Per seed and adjacent depth pair: error may not rise by more than the
    // paired standard error of the per-net differences, runtime may not fall
    // by more than the timing spread. Sign test: every seed must agree.
    bool pass = true;
    std::string detail;
    for (std::size_t k = 0; k + 1 < depths.size(); ++k) {
        int err_agree = 0, time_agree = 0;
        double mean_lo = 0, mean_hi = 0, t_lo = 0, t_hi = 0;
        for (std::uint64_t seed : seeds) {
            const SweepRun& lo = runs[{depths[k], seed}];
            const SweepRun& hi = runs[{depths[k + 1], seed}];
            const std::size_t n = lo.per_net.size();
            double mean = 0, sq = 0;
            for (std::size_t i = 0; i < n; ++i) mean += hi.per_net[i] - lo.per_net[i];
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double dlt = hi.per_net[i] - lo.per_net[i] - mean;
                sq += dlt * dlt;
            }
            const double se = std::sqrt(sq / static_cast<double>(n - 1) / static_cast<double>(n));
            err_agree += hi.error <= lo.error + se;
            time_agree += hi.seconds >= lo.seconds - std::max(lo.noise, hi.noise);
            mean_lo += lo.error / 3;
            mean_hi += hi.error / 3;
            t_lo += lo.seconds / 3;
            t_hi += hi.seconds / 3;
        }
        pass = pass && err_agree == 3 && time_agree == 3;
        detail += fmt("%sL%d->L%d error %.3f%%->%.3f%% (%d/3 seeds non-increasing), runtime %.3f s->%.3f s (%d/3 "
                      "non-decreasing)",
                      k ? "; " : "", depths[k], depths[k + 1], mean_lo, mean_hi, err_agree, t_lo, t_hi, time_agree);
    }
    return {pass, detail};
}

std::set<int> parse_only(const std::string& s) {
    std::set<int> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.insert(std::stoi(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    fs::path cache;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) {
            only = parse_only(argv[++i]);
        } else if (a == "--cache" && i + 1 < argc) {
            cache = argv[++i];
            fs::create_directories(cache);
        } else {
            std::cerr << "usage: acceptance [--only 1,2,...] [--cache DIR]\n";
            return 2;
        }
    }
    auto wanted = [&](int k) { return only.empty() || only.count(k) > 0; };

    ThreadPool pool(0);
    t::TempDir dir("accept");
    int failed = 0, ran = 0;
    auto report = [&](int k, const Outcome& o, double s) {
        std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail
                  << fmt(" [%.1f s]", s) << std::endl;
        ++ran;
        failed += !o.pass;
    };
    auto timed = [&](int k, auto&& fn) {
        if (!wanted(k)) return;
        const auto start = Clock::now();
        const Outcome o = fn();
        report(k, o, seconds_since(start));
    };

    timed(1, [] { return criterion1(); });
    timed(2, [&] { return criterion2(pool); });
    timed(3, [&] { return criterion3(pool); });
    timed(4, [&] { return criterion4(pool); });
    timed(5, [] { return criterion5(); });

    if (wanted(6) || wanted(7) || wanted(8) || wanted(9) || wanted(10)) {
        const auto data_start = Clock::now();
        const Corpus corpus = distillation_corpus(cache, pool);
        const double data_seconds = seconds_since(data_start);
        std::cerr << "  corpus ready: " << corpus.train.size() << " train, " << corpus.test.size() << " test, "
                  << data_seconds << " s\n";

        std::optional<Distilled> distilled;
        if (wanted(6) || wanted(7) || wanted(8) || wanted(9)) {
            const auto start = Clock::now();
            distilled = distill(corpus, dir.path(), cache, pool);
            const double train_seconds = seconds_since(start);
            timed(6, [&] { return criterion6(corpus, *distilled, data_seconds, pool); });
            if (wanted(6)) std::cerr << "  (training " << train_seconds << " s)\n";
        }
        timed(7, [&] { return criterion7(*distilled, cache, pool); });
        timed(8, [&] { return criterion8(corpus, *distilled, dir.path(), pool); });
        timed(9, [&] { return criterion9(corpus, *distilled, pool); });
        timed(10, [&] { return criterion10(corpus, pool); });
    }

    std::cout << ran - failed << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
