#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "steinerwl/dataset.hpp"
#include "tempdir.hpp"

using namespace steinerwl;
namespace t = steinerwl::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

nlohmann::json manifest(const fs::path& p) { return nlohmann::json::parse(t::slurp(p)); }

}  // namespace

TEST_CASE("usage errors exit with 2") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {},
             {"frobnicate"},
             {"gen-data", "--count", "many"},
             {"gen-data", "--distribution", "gaussian"},
             {"gen-data", "--degrees", "9:3"},
             {"train"},
             {"eval", "--nets", "x.jsonl", "--bogus"},
             {"--threads", "-3", "report", "--input", "x"},
         }) {
        const Outcome o = run(args);
        CHECK(o.code == 2);
        CHECK(o.err.starts_with("usage error: "));
        CHECK(o.out.empty());
    }
}

TEST_CASE("help lists defaults") {
    const Outcome o = run({"train", "--help"});
    CHECK(o.code == 0);
    CHECK(o.out.find("--lr") != std::string::npos);
    CHECK(o.out.find("0.0001") != std::string::npos);
    CHECK(o.out.find("--lr-schedule") != std::string::npos);
    CHECK(o.out.find("constant") != std::string::npos);
    const Outcome top = run({"--help"});
    CHECK(top.code == 0);
    for (const char* cmd : {"gen-data", "label", "train", "fine-tune", "predict", "eval", "bench", "report"}) {
        CHECK_MESSAGE(top.out.find(cmd) != std::string::npos, cmd);
    }
    CHECK(top.out.find("--seed") != std::string::npos);
    CHECK(top.out.find("--threads") != std::string::npos);
    CHECK(top.out.find("--config") != std::string::npos);
    CHECK(top.out.find("--out") != std::string::npos);
}

TEST_CASE("failures exit with 1 and a one-line prefixed error") {
    t::TempDir dir("fail");
    const std::string missing = (dir / "missing.jsonl").string();
    Outcome o = run({"--out", (dir / "m.ckpt").string(), "train", "--data", missing, "--steps", "1"});
    CHECK(o.code == 1);
    CHECK(o.err.starts_with("error: data: "));
    CHECK(count_lines(o.err) == 1);

    t::spit(dir / "bad.ckpt", "definitely not a model");
    t::spit(dir / "n.jsonl", R"({"id":"a","pins":[[0,0],[4,4],[9,1]]})" "\n");
    o = run({"predict", "--checkpoint", (dir / "bad.ckpt").string(), "--nets", (dir / "n.jsonl").string()});
    CHECK(o.code == 1);
    CHECK(first_line(o.err).starts_with("error: checkpoint: "));
    CHECK(count_lines(o.err) == 1);

    t::spit(dir / "broken.jsonl", dataset_header() + "\n{oops\n");
    o = run({"--out", (dir / "x.ckpt").string(), "train", "--data", (dir / "broken.jsonl").string()});
    CHECK(o.code == 1);
    CHECK(o.err.starts_with("error: data: "));
    CHECK(o.err.find("broken.jsonl:2") != std::string::npos);

    o = run({"eval", "--nets", (dir / "n.jsonl").string(), "--methods", "mst,model"});
    CHECK(o.code == 2);
}

TEST_CASE("gen-data writes a dataset and a manifest") {
    t::TempDir dir("gen");
    const fs::path out = dir / "d.jsonl";
    Outcome o = run({"--seed", "4", "--out", out.string(), "gen-data", "--count", "12", "--degrees", "4:6"});
    REQUIRE(o.code == 0);
    const auto records = read_dataset(out);
    CHECK(records.size() == 12);
    for (const auto& r : records) {
        CHECK(r.pins.size() >= 4);
        CHECK(r.pins.size() <= 6);
    }
    const auto m = manifest(fs::path(out.string() + ".manifest.json"));
    CHECK(m.at("command") == "gen-data");
    CHECK(m.at("seed") == 4);
    CHECK(m.at("options").at("count") == "12");
    CHECK(m.at("options").at("degrees") == "4:6");
    CHECK(m.at("outputs").size() >= 1);
    CHECK(m.contains("config_hash"));
    CHECK(m.contains("versions"));
    CHECK(m.at("argv").size() == 9);

    const fs::path again = dir / "e.jsonl";
    REQUIRE(run({"--seed", "4", "--threads", "2", "--out", again.string(), "gen-data", "--count", "12", "--degrees", "4:6"}).code == 0);
    CHECK(t::slurp(out) == t::slurp(again));
}

TEST_CASE("config files supply defaults, the command line wins") {
    t::TempDir dir("cfg");
    t::spit(dir / "run.cfg", "# defaults\ncount = 3\ndegrees = 5:5\n\nseed = 8\n");
    const fs::path a = dir / "a.jsonl";
    REQUIRE(run({"--config", (dir / "run.cfg").string(), "--out", a.string(), "gen-data"}).code == 0);
    const auto ra = read_dataset(a);
    CHECK(ra.size() == 3);
    for (const auto& r : ra) CHECK(r.pins.size() == 5);

    const fs::path b = dir / "b.jsonl";
    REQUIRE(run({"--config", (dir / "run.cfg").string(), "--out", b.string(), "gen-data", "--count", "5"}).code == 0);
    CHECK(read_dataset(b).size() == 5);
    const auto m = manifest(fs::path(b.string() + ".manifest.json"));
    CHECK(m.at("seed") == 8);
    CHECK(m.at("config_file").get<std::string>().find("run.cfg") != std::string::npos);

    t::spit(dir / "bad.cfg", "colour = blue\n");
    const Outcome o = run({"--config", (dir / "bad.cfg").string(), "--out", (dir / "c.jsonl").string(), "gen-data"});
    CHECK(o.code == 2);
    CHECK(o.err.starts_with("usage error: "));
    CHECK(run({"--config", (dir / "none.cfg").string(), "gen-data"}).code != 0);
}

TEST_CASE("end-to-end pipeline") {
    t::TempDir dir("e2e");
    const std::string data = (dir / "train.jsonl").string();
    REQUIRE(run({"--seed", "1", "--out", data, "gen-data", "--count", "40", "--degrees", "4:7"}).code == 0);

    const std::string model = (dir / "m.ckpt").string();
    Outcome o = run({"--seed", "2", "--out", model, "train", "--data", data, "--steps", "6", "--layers", "2",
                     "--hidden", "8", "--mlp-hidden", "8", "--val-every", "3", "--lr", "1e-3",
                     "--lr-schedule", "cosine", "--lr-floor", "0.1"});
    REQUIRE_MESSAGE(o.code == 0, o.err);
    CHECK(fs::exists(model));
    const std::string metrics = t::slurp(model + ".metrics.csv");
    CHECK(metrics.starts_with("step,loss,val_precision,val_recall,val_wl_error_pct,wallclock_ms\n"));
    CHECK(count_lines(metrics) == 1 + 7);
    CHECK(manifest(model + ".manifest.json").at("options").at("lr-schedule") == "cosine");

    o = run({"--out", (dir / "ft.ckpt").string(), "fine-tune", "--checkpoint", model, "--data", data, "--steps", "2",
             "--layers", "2"});
    CHECK_MESSAGE(o.code == 0, o.err);
    o = run({"--out", (dir / "ft2.ckpt").string(), "fine-tune", "--checkpoint", model, "--data", data, "--steps",
             "2", "--layers", "4"});
    CHECK(o.code == 1);
    CHECK(o.err.starts_with("error: checkpoint: "));

    const std::string nets = (dir / "nets.jsonl").string();
    t::spit(nets,
            R"({"id":"a","pins":[[0,0],[4,4],[9,1]]})" "\n"
            R"({"id":"b","pins":[[0,0],[10,0],[5,5],[5,9]]})" "\n"
            R"({"id":"c","pins":[[1,1],[1,1]]})" "\n");
    o = run({"predict", "--checkpoint", model, "--nets", nets});
    REQUIRE_MESSAGE(o.code == 0, o.err);
    std::istringstream lines(o.out);
    std::string header, l1, l2, extra;
    std::getline(lines, header);
    std::getline(lines, l1);
    std::getline(lines, l2);
    CHECK(header == "netlist,net,degree,wl,steiner_points");
    CHECK(l1.starts_with("nets,a,3,"));
    CHECK(l2.starts_with("nets,b,4,"));
    CHECK(!std::getline(lines, extra));
    CHECK(fs::exists("steinerwl-predict.manifest.json"));
    fs::remove("steinerwl-predict.manifest.json");

    const std::string report = (dir / "report.csv").string();
    o = run({"--out", report, "eval", "--nets", data, "--methods", "mst,i1s,exact,model", "--checkpoint", model});
    REQUIRE_MESSAGE(o.code == 0, o.err);
    CHECK(fs::exists(report));
    CHECK(fs::exists(dir / "report.summary.csv"));
    CHECK(fs::exists(dir / "report.runtime.csv"));
    CHECK(count_lines(t::slurp(report)) == 41);

    o = run({"--out", (dir / "agg.txt").string(), "report", "--input", report});
    CHECK_MESSAGE(o.code == 0, o.err);
    CHECK(o.out.find("overall") != std::string::npos);

    const std::string sweep = (dir / "sweep.csv").string();
    o = run({"--out", sweep, "bench", "--checkpoints", model, "--thresholds", "0.3,0.5", "--batch-sizes", "1,4",
             "--count", "10", "--repeats", "1"});
    REQUIRE_MESSAGE(o.code == 0, o.err);
    CHECK(count_lines(t::slurp(sweep)) == 1 + 4);
}
