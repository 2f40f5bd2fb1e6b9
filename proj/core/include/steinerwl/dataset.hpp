#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinerwl/geometry.hpp"
#include "steinerwl/oracle.hpp"

namespace steinerwl {

inline constexpr int kDatasetSchema = 1;

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

struct DegreeRange {
    int lo = 5;
    int hi = 15;
};

// Parses "a:b" (or a single "a").
DegreeRange parse_degree_range(const std::string& text);

enum class PinDistribution { uniform, clustered };

PinDistribution distribution_from_string(const std::string& s);
const char* to_string(PinDistribution d);

struct SyntheticOptions {
    DegreeRange degrees;
    Coord extent = 1000;  // pins lie on the integer grid [0, extent)^2
    PinDistribution distribution = PinDistribution::uniform;
};

// Degree uniform on [lo, hi]; pins i.i.d. on the grid, resampled on collision.
// Clustered nets draw pins around 1-3 Gaussian centres instead.
Net sample_synthetic_net(std::uint64_t seed, const SyntheticOptions& options,
                         const std::string& id = {});

struct DatasetRecord {
    std::string id;
    std::uint64_t seed = 0;
    std::vector<Point> pins;
    std::vector<Point> candidates;
    std::vector<std::uint8_t> labels;
    Length wl_opt = 0;
    LabelProvenance provenance = LabelProvenance::exact;

    Net net() const { return Net(id, pins); }
};

DatasetRecord make_record(const LabeledSample& sample, std::uint64_t seed);

std::string record_to_json(const DatasetRecord& r);
DatasetRecord record_from_json(const std::string& line);

struct GenerateOptions {
    std::size_t count = 0;
    std::uint64_t seed = 0;
    SyntheticOptions synthetic;
    ExactBudget budget;
    std::size_t threads = 1;
    std::string id_prefix = "syn";
};

std::string dataset_header();

// Writes a JSON-lines dataset: a header comment line then one labeled record
// per net. Output is a pure function of `options` (thread count excluded).
void generate_dataset(const GenerateOptions& options, const std::filesystem::path& out);
std::vector<DatasetRecord> generate_records(const GenerateOptions& options);

// Labels existing nets (e.g. parsed from a netlist) in parallel.
std::vector<DatasetRecord> label_nets(const std::vector<Net>& nets, const ExactBudget& budget,
                                      std::size_t threads);

void write_dataset(const std::filesystem::path& out, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path);

// Streams records one at a time; returns the number visited.
std::size_t for_each_record(const std::filesystem::path& path,
                            const std::function<void(DatasetRecord&&)>& visit);

}  // namespace steinerwl
