#pragma once

// Helpers shared by the unit tests.

#include "cornn/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <unistd.h>

namespace cornn::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("cornn-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Test MSE of a synthetic run at checkpoint `fe`.
using SyntheticValue =
    std::function<double(std::size_t instance, std::size_t algorithm, std::size_t rep, std::size_t fe)>;

/// Store whose runs hold checkpoints at every FE of the plan's schedule,
/// with test MSEs taken from `value`. No optimizer is run.
inline ResultStore synthetic_store(std::vector<std::string> instances,
                                   std::vector<Algorithm> algorithms, std::size_t reps,
                                   const SyntheticValue& value, std::size_t budget = 20,
                                   std::size_t stride = 10) {
    ResultStore store;
    store.plan.instances = std::move(instances);
    for (Algorithm a : algorithms) store.plan.algorithms.push_back(OptimizerConfig::defaults(a));
    store.plan.repetitions = reps;
    store.plan.budget = budget;
    store.plan.checkpoint_stride = stride;
    store.plan.master_seed = 1;
    const auto schedule = store.plan.checkpoint_schedule();
    for (std::size_t i = 0; i < store.plan.instances.size(); ++i) {
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            for (std::size_t r = 0; r < reps; ++r) {
                RunRecord rec;
                rec.instance_label = store.plan.instances[i];
                rec.algorithm = algorithms[a];
                rec.seed = r;
                rec.budget = budget;
                rec.fe_consumed = budget;
                for (std::size_t fe : schedule) {
                    const double v = value(i, a, r, fe);
                    rec.checkpoints.push_back({fe, v, v});
                }
                store.runs.emplace_back(std::move(rec));
            }
        }
    }
    return store;
}

/// Relative error with an absolute floor, for gradient comparisons.
inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

} // namespace cornn::test
