#include "steinerwl/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "steinerwl/parallel.hpp"
#include "steinerwl/random.hpp"

namespace steinerwl {

using json = nlohmann::ordered_json;

DegreeRange parse_degree_range(const std::string& text) {
    DegreeRange r;
    try {
        const auto colon = text.find(':');
        if (colon == std::string::npos) {
            r.lo = r.hi = std::stoi(text);
        } else {
            r.lo = std::stoi(text.substr(0, colon));
            r.hi = std::stoi(text.substr(colon + 1));
        }
    } catch (const std::logic_error&) {
        throw DataError("bad degree range '" + text + "' (expected lo:hi)");
    }
    if (r.lo > r.hi) throw DataError("bad degree range '" + text + "': lo > hi");
    return r;
}

PinDistribution distribution_from_string(const std::string& s) {
    if (s == "uniform") return PinDistribution::uniform;
    if (s == "clustered") return PinDistribution::clustered;
    throw DataError("unknown pin distribution '" + s + "'");
}

const char* to_string(PinDistribution d) {
    return d == PinDistribution::uniform ? "uniform" : "clustered";
}

Net sample_synthetic_net(std::uint64_t seed, const SyntheticOptions& o, const std::string& id) {
    if (o.degrees.lo < 3 || o.degrees.hi > 64 || o.degrees.lo > o.degrees.hi) {
        throw DataError("synthetic degree range must lie within [3, 64]");
    }
    if (o.extent < 8) throw DataError("synthetic extent too small");
    Rng rng(seed);
    const auto degree = static_cast<std::size_t>(rng.between(o.degrees.lo, o.degrees.hi));

    std::vector<Point> centres;
    double spread = 0;
    if (o.distribution == PinDistribution::clustered) {
        const auto k = static_cast<std::size_t>(rng.between(1, 3));
        for (std::size_t i = 0; i < k; ++i) {
            centres.push_back({rng.between(0, o.extent - 1), rng.between(0, o.extent - 1)});
        }
        spread = 0.05 * static_cast<double>(o.extent);
    }

    std::vector<Point> pins;
    std::set<Point> seen;
    while (pins.size() < degree) {
        Point p;
        if (centres.empty()) {
            p = {rng.between(0, o.extent - 1), rng.between(0, o.extent - 1)};
        } else {
            const Point& c = centres[rng.below(centres.size())];
            auto draw = [&](Coord centre) {
                const auto v = static_cast<Coord>(std::llround(static_cast<double>(centre) + spread * rng.normal()));
                return std::clamp<Coord>(v, 0, o.extent - 1);
            };
            p.x = draw(c.x);
            p.y = draw(c.y);
        }
        if (seen.insert(p).second) pins.push_back(p);
    }
    return Net(id, pins);
}

DatasetRecord make_record(const LabeledSample& s, std::uint64_t seed) {
    DatasetRecord r;
    r.id = s.net.id;
    r.seed = seed;
    r.pins = s.net.pins;
    r.candidates.assign(s.graph.nodes.begin() + static_cast<std::ptrdiff_t>(s.graph.n_pins),
                        s.graph.nodes.end());
    r.labels = s.labels.labels;
    r.wl_opt = s.labels.wl_opt;
    r.provenance = s.labels.provenance;
    return r;
}

namespace {

json points_to_json(const std::vector<Point>& pts) {
    json arr = json::array();
    for (const Point& p : pts) arr.push_back(json::array({p.x, p.y}));
    return arr;
}

std::vector<Point> points_from_json(const json& arr) {
    std::vector<Point> pts;
    pts.reserve(arr.size());
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2) throw DataError("point must be [x, y]");
        pts.push_back({p[0].get<Coord>(), p[1].get<Coord>()});
    }
    return pts;
}

}  // namespace

std::string record_to_json(const DatasetRecord& r) {
    json j;
    j["schema"] = kDatasetSchema;
    j["id"] = r.id;
    j["seed"] = r.seed;
    j["provenance"] = to_string(r.provenance);
    j["wl_opt"] = r.wl_opt;
    j["pins"] = points_to_json(r.pins);
    j["candidates"] = points_to_json(r.candidates);
    j["labels"] = r.labels;
    return j.dump();
}

DatasetRecord record_from_json(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("invalid JSON: ") + e.what());
    }
    try {
        if (j.value("schema", kDatasetSchema) != kDatasetSchema) {
            throw DataError("unsupported schema " + j["schema"].dump());
        }
        DatasetRecord r;
        r.id = j.at("id").get<std::string>();
        r.seed = j.value("seed", std::uint64_t{0});
        r.pins = points_from_json(j.at("pins"));
        if (j.contains("labels")) {
            r.candidates = points_from_json(j.at("candidates"));
            r.labels = j.at("labels").get<std::vector<std::uint8_t>>();
            r.wl_opt = j.at("wl_opt").get<Length>();
            r.provenance = provenance_from_string(j.at("provenance").get<std::string>());
            if (r.labels.size() != r.candidates.size()) {
                throw DataError("labels and candidates differ in length");
            }
        }
        return r;
    } catch (const json::exception& e) {
        throw DataError(std::string("bad record: ") + e.what());
    }
}

std::string dataset_header() {
    return "# steinerwl dataset schema=" + std::to_string(kDatasetSchema);
}

std::vector<DatasetRecord> label_nets(const std::vector<Net>& nets, const ExactBudget& budget,
                                      std::size_t threads) {
    std::vector<DatasetRecord> out(nets.size());
    ThreadPool pool(threads);
    pool.parallel_for(nets.size(), [&](std::size_t i) {
        out[i] = make_record(label_sample(nets[i], budget), 0);
    });
    return out;
}

std::vector<DatasetRecord> generate_records(const GenerateOptions& o) {
    std::vector<DatasetRecord> out(o.count);
    ThreadPool pool(o.threads);
    pool.parallel_for(o.count, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(o.seed, i);
        const Net net = sample_synthetic_net(seed, o.synthetic, o.id_prefix + "-" + std::to_string(i));
        out[i] = make_record(label_sample(net, o.budget), seed);
    });
    return out;
}

void write_dataset(const std::filesystem::path& out, const std::vector<DatasetRecord>& records) {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot open '" + out.string() + "' for writing");
    f << dataset_header() << '\n';
    for (const auto& r : records) f << record_to_json(r) << '\n';
    if (!f) throw DataError("write failed for '" + out.string() + "'");
}

void generate_dataset(const GenerateOptions& options, const std::filesystem::path& out) {
    write_dataset(out, generate_records(options));
}

std::size_t for_each_record(const std::filesystem::path& path,
                            const std::function<void(DatasetRecord&&)>& visit) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open dataset '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0, count = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        try {
            visit(record_from_json(line));
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const DegenerateNetError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        ++count;
    }
    return count;
}

std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path) {
    std::vector<DatasetRecord> out;
    for_each_record(path, [&](DatasetRecord&& r) { out.push_back(std::move(r)); });
    return out;
}

}  // namespace steinerwl
