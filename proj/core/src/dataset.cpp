#include "cornn/dataset.hpp"

#include "cornn/csv.hpp"
#include "cornn/error.hpp"
#include "cornn/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

namespace cornn {

namespace {

constexpr std::uint64_t kSuiteSeed = 0xC0447E5EEDULL;

} // namespace

RawDataset generate(const FunctionSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("generate: need at least 2 samples, got " + std::to_string(n));
    RawDataset raw;
    raw.function_id = spec.id;
    raw.sample_seed = seed;
    raw.points.resize(n);
    raw.targets.resize(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        Point2 p;
        for (std::size_t d = 0; d < 2; ++d) {
            const auto& iv = spec.domain[d];
            // lo + w*u may round past hi for wide domains
            p[d] = std::min(iv.hi, iv.lo + iv.width() * rng.uniform());
        }
        raw.points[i] = p;
        raw.targets[i] = evaluate(spec, p);
    }
    return raw;
}

std::size_t train_count(std::size_t n, double train_fraction) {
    auto k = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n - 1);
}

RegressionDataset split_and_normalize(const RawDataset& raw, double train_fraction,
                                      std::uint64_t split_seed) {
    const std::size_t n = raw.size();
    if (n < 2 || raw.targets.size() != n) {
        throw InvalidArgument("split_and_normalize: malformed raw dataset");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidArgument("split_and_normalize: train_fraction must lie in (0, 1)");
    }
    const FunctionSpec& spec = find_function(raw.function_id);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(split_seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[rng.below(i + 1)]);
    }
    const std::size_t n_train = train_count(n, train_fraction);

    RegressionDataset ds;
    ds.function_id = raw.function_id;
    ds.split_seed = split_seed;
    ds.scaling.input_domain = spec.domain;

    double lo = raw.targets[order[0]];
    double hi = lo;
    for (std::size_t k = 0; k < n_train; ++k) {
        lo = std::min(lo, raw.targets[order[k]]);
        hi = std::max(hi, raw.targets[order[k]]);
    }
    if (!(lo < hi)) {
        throw InvalidArgument("split_and_normalize: training targets of function " +
                              std::to_string(raw.function_id) +
                              " are constant; min-max scaling is degenerate");
    }
    ds.scaling.out_min = lo;
    ds.scaling.out_max = hi;

    auto emit = [&](std::size_t idx, std::vector<double>& inputs, std::vector<double>& targets) {
        const Point2& p = raw.points[idx];
        inputs.push_back(ds.scaling.normalize_input(0, p[0]));
        inputs.push_back(ds.scaling.normalize_input(1, p[1]));
        targets.push_back(ds.scaling.normalize_target(raw.targets[idx]));
    };
    ds.train_inputs.reserve(2 * n_train);
    ds.train_targets.reserve(n_train);
    ds.test_inputs.reserve(2 * (n - n_train));
    ds.test_targets.reserve(n - n_train);
    for (std::size_t k = 0; k < n; ++k) {
        if (k < n_train) {
            emit(order[k], ds.train_inputs, ds.train_targets);
        } else {
            emit(order[k], ds.test_inputs, ds.test_targets);
        }
    }
    return ds;
}

std::uint64_t canonical_dataset_seed(int function_id) noexcept {
    return derive_seed(kSuiteSeed, static_cast<std::uint64_t>(function_id));
}

RegressionDataset make_dataset(const FunctionSpec& spec, std::uint64_t dataset_seed, std::size_t n,
                               double train_fraction) {
    const RawDataset raw = generate(spec, n, derive_seed(dataset_seed, "sample"));
    return split_and_normalize(raw, train_fraction, derive_seed(dataset_seed, "split"));
}

std::filesystem::path scaling_sidecar_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".scaling.json");
    return p;
}

std::string dataset_file_name(const FunctionSpec& spec) {
    return "f" + std::to_string(spec.id) + "_" + file_stem(spec) + ".csv";
}

void export_csv(const RegressionDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("export_csv: cannot open " + path.string() + " for writing");
    out << "x1,x2,target,split\n";
    auto rows = [&out](const std::vector<double>& inputs, const std::vector<double>& targets,
                       const char* tag) {
        for (std::size_t i = 0; i < targets.size(); ++i) {
            out << csv::format_double(inputs[2 * i]) << ',' << csv::format_double(inputs[2 * i + 1])
                << ',' << csv::format_double(targets[i]) << ',' << tag << '\n';
        }
    };
    rows(ds.train_inputs, ds.train_targets, "train");
    rows(ds.test_inputs, ds.test_targets, "test");
    if (!out) throw Error("export_csv: write failed for " + path.string());

    nlohmann::json meta;
    meta["function_id"] = ds.function_id;
    meta["split_seed"] = ds.split_seed;
    meta["x1_lo"] = ds.scaling.input_domain[0].lo;
    meta["x1_hi"] = ds.scaling.input_domain[0].hi;
    meta["x2_lo"] = ds.scaling.input_domain[1].lo;
    meta["x2_hi"] = ds.scaling.input_domain[1].hi;
    meta["out_min"] = ds.scaling.out_min;
    meta["out_max"] = ds.scaling.out_max;
    std::ofstream side(scaling_sidecar_path(path), std::ios::binary);
    if (!side) throw Error("export_csv: cannot write scaling sidecar for " + path.string());
    side << meta.dump(2) << '\n';
}

RegressionDataset import_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("import_csv: cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError("import_csv: empty file " + path.string(), 1, 1);
    {
        const auto header = csv::split(csv::chomp(line));
        static constexpr const char* expected[] = {"x1", "x2", "target", "split"};
        if (header.size() != 4) {
            throw ParseError("import_csv: header must be x1,x2,target,split; found " +
                                 std::to_string(header.size()) + " columns",
                             1, header.size() < 4 ? header.size() + 1 : 5);
        }
        for (std::size_t c = 0; c < 4; ++c) {
            if (header[c] != expected[c]) {
                throw ParseError("import_csv: header column " + std::to_string(c + 1) +
                                     " must be '" + expected[c] + "'",
                                 1, c + 1);
            }
        }
    }

    RegressionDataset ds;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        const auto text = csv::chomp(line);
        if (text.empty()) continue;
        const auto cells = csv::split(text);
        if (cells.size() != 4) {
            throw ParseError("import_csv: expected 4 columns, found " + std::to_string(cells.size()),
                             row, std::min<std::size_t>(cells.size() + 1, 5));
        }
        double values[3];
        for (std::size_t c = 0; c < 3; ++c) {
            const auto v = csv::parse_double(cells[c]);
            if (!v) {
                throw ParseError("import_csv: non-numeric cell '" + std::string(cells[c]) + "'", row,
                                 c + 1);
            }
            values[c] = *v;
        }
        if (cells[3] == "train") {
            ds.train_inputs.push_back(values[0]);
            ds.train_inputs.push_back(values[1]);
            ds.train_targets.push_back(values[2]);
        } else if (cells[3] == "test") {
            ds.test_inputs.push_back(values[0]);
            ds.test_inputs.push_back(values[1]);
            ds.test_targets.push_back(values[2]);
        } else {
            throw ParseError("import_csv: split must be 'train' or 'test', found '" +
                                 std::string(cells[3]) + "'",
                             row, 4);
        }
    }
    if (ds.train_targets.empty()) throw ParseError("import_csv: no training rows in " + path.string());

    const auto side_path = scaling_sidecar_path(path);
    if (std::filesystem::exists(side_path)) {
        std::ifstream side(side_path, std::ios::binary);
        try {
            const auto meta = nlohmann::json::parse(side);
            ds.function_id = meta.at("function_id").get<int>();
            ds.split_seed = meta.at("split_seed").get<std::uint64_t>();
            ds.scaling.input_domain[0] = {meta.at("x1_lo").get<double>(), meta.at("x1_hi").get<double>()};
            ds.scaling.input_domain[1] = {meta.at("x2_lo").get<double>(), meta.at("x2_hi").get<double>()};
            ds.scaling.out_min = meta.at("out_min").get<double>();
            ds.scaling.out_max = meta.at("out_max").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("import_csv: bad scaling sidecar " + side_path.string() + ": " + e.what());
        }
    }
    return ds;
}

} // namespace cornn
