#pragma once

#include "cornn/optimizers.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cornn {

inline constexpr std::size_t kDefaultRepetitions = 30;
inline constexpr std::size_t kDefaultCheckpointStride = 10;

/// Grid of instances x algorithms x repetitions.
struct ExperimentPlan {
    std::vector<std::string> instances;
    /// One config per algorithm; the per-run seed is derived, so the seed
    /// field here is ignored.
    std::vector<OptimizerConfig> algorithms;
    std::size_t repetitions = kDefaultRepetitions;
    std::size_t budget = kDefaultBudget;
    std::size_t checkpoint_stride = kDefaultCheckpointStride;
    std::uint64_t master_seed = 0;

    /// Throws InvalidArgument / LookupError.
    void validate() const;

    /// FE indices at which every run stores a checkpoint: 1, each multiple
    /// of the stride, and the budget itself.
    std::vector<std::size_t> checkpoint_schedule() const;

    std::size_t algorithm_index(Algorithm a) const;
    bool has_algorithm(Algorithm a) const;
};

/// Expands instance selectors: a label (`f20/Tanh1`), `all`, `*/<Topology>`
/// or `f<ID>/*`. Result keeps first-seen order without duplicates.
std::vector<std::string> expand_instance_selectors(const std::vector<std::string>& selectors);

/// YAML plan file. Keys: instances, algorithms, repetitions, budget, stride,
/// master_seed, and optional per-algorithm blocks (pso, de, cmaes, adam,
/// random_search). Unknown keys are rejected.
ExperimentPlan parse_plan(std::string_view yaml_text);
ExperimentPlan load_plan(const std::filesystem::path& path);
std::string plan_to_yaml(const ExperimentPlan& plan);

} // namespace cornn
