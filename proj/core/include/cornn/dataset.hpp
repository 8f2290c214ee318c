#pragma once

#include "cornn/functions.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cornn {

inline constexpr std::size_t kDefaultSampleCount = 5000;
inline constexpr double kDefaultTrainFraction = 0.75;

/// Uniform samples of a function in its native units, before any scaling.
struct RawDataset {
    int function_id = 0;
    std::vector<Point2> points;
    std::vector<double> targets;
    std::uint64_t sample_seed = 0;

    std::size_t size() const noexcept { return points.size(); }
};

/// Affine maps used to normalize a dataset. Inputs go from the function
/// domain to [-1, 1]; outputs go from [out_min, out_max] of the raw training
/// targets to [0, 1].
struct ScalingParams {
    Domain2 input_domain{Interval{-1.0, 1.0}, Interval{-1.0, 1.0}};
    double out_min = 0.0;
    double out_max = 1.0;

    double normalize_input(std::size_t dim, double x) const noexcept {
        const auto& iv = input_domain[dim];
        return 2.0 * (x - iv.lo) / (iv.hi - iv.lo) - 1.0;
    }
    double normalize_target(double y) const noexcept { return (y - out_min) / (out_max - out_min); }
    double denormalize_target(double t) const noexcept { return t * (out_max - out_min) + out_min; }

    bool operator==(const ScalingParams&) const = default;
};

/// Normalized train/test split. Inputs are stored row-major, two values per
/// sample, so they can be handed to the network as one contiguous block.
struct RegressionDataset {
    int function_id = 0;
    std::vector<double> train_inputs;
    std::vector<double> train_targets;
    std::vector<double> test_inputs;
    std::vector<double> test_targets;
    ScalingParams scaling;
    std::uint64_t split_seed = 0;

    std::size_t train_size() const noexcept { return train_targets.size(); }
    std::size_t test_size() const noexcept { return test_targets.size(); }

    bool operator==(const RegressionDataset&) const = default;
};

/// Draws n points i.i.d. uniform over the domain and evaluates the function.
RawDataset generate(const FunctionSpec& spec, std::size_t n, std::uint64_t seed);

/// Random partition plus min-max scaling anchored on the training targets.
/// Test targets use the same map and are not clipped.
RegressionDataset split_and_normalize(const RawDataset& raw, double train_fraction,
                                      std::uint64_t split_seed);

/// Number of training samples for n samples at the given fraction.
std::size_t train_count(std::size_t n, double train_fraction);

/// Seed of the dataset shipped for a catalog or custom function.
std::uint64_t canonical_dataset_seed(int function_id) noexcept;

/// generate + split_and_normalize with purpose-separated child seeds.
RegressionDataset make_dataset(const FunctionSpec& spec, std::uint64_t dataset_seed,
                               std::size_t n = kDefaultSampleCount,
                               double train_fraction = kDefaultTrainFraction);

/// Writes `x1,x2,target,split` rows (train rows first, stored order) with 17
/// significant digits, plus a `<stem>.scaling.json` sidecar holding the
/// scaling parameters, function id and split seed.
void export_csv(const RegressionDataset& ds, const std::filesystem::path& path);

/// Reads a dataset written by export_csv. Without a sidecar the scaling is
/// the identity (data taken as already normalized). Throws ParseError with
/// row/column on schema violations.
RegressionDataset import_csv(const std::filesystem::path& path);

/// Sidecar path used by export_csv/import_csv for a CSV path.
std::filesystem::path scaling_sidecar_path(const std::filesystem::path& csv_path);

/// Canonical file name `f<ID>_<name>.csv`.
std::string dataset_file_name(const FunctionSpec& spec);

} // namespace cornn
