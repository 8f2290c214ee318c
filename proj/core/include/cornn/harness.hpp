#pragma once

#include "cornn/optimizers.hpp"
#include "cornn/plan.hpp"
#include "cornn/stats.hpp"
#include "cornn/version.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cornn {

/// Seed of one grid cell, derived from the master seed and the cell key.
std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& instance, Algorithm algorithm,
                        std::size_t repetition);

struct CellFailure {
    std::string instance;
    Algorithm algorithm = Algorithm::RandomSearch;
    std::size_t repetition = 0;
    std::string message;

    bool operator==(const CellFailure&) const = default;
};

/// Completed runs of a plan. `runs` is indexed in grid order
/// (instance-major, then algorithm in plan order, then repetition); a cell
/// that failed holds nullopt and has an entry in `failures`.
struct ResultStore {
    ExperimentPlan plan;
    std::vector<std::optional<RunRecord>> runs;
    std::vector<CellFailure> failures;
    std::string version = kVersion;

    bool complete() const;
    std::size_t cell_index(std::size_t instance, std::size_t algorithm, std::size_t rep) const;
    /// nullptr when the cell failed. Throws LookupError for unknown keys.
    const RunRecord* find(const std::string& instance, Algorithm algorithm, std::size_t rep) const;

    bool operator==(const ResultStore& other) const;
};

struct ExecutionOptions {
    /// Worker threads; results do not depend on this.
    std::size_t parallelism = 1;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

ResultStore run_experiment(const ExperimentPlan& plan, const ExecutionOptions& options = {});

/// Directory layout: plan.yaml, store.json, runs/<cell>.csv + runs/<cell>.json.
void save_store(const ResultStore& store, const std::filesystem::path& dir);
/// Missing or unreadable cells are recorded as failures.
ResultStore load_store(const std::filesystem::path& dir);

/// File stem of a cell, e.g. `f20_Tanh1__PSO__r03`.
std::string cell_stem(const std::string& instance, Algorithm algorithm, std::size_t rep);

struct ScoringOptions {
    double alpha = 0.05;
    UTestMethod method = UTestMethod::NormalApproxTieCorrected;
    /// Score stores that contain failed cells.
    bool force = false;
};

struct AlgorithmScore {
    Algorithm algorithm = Algorithm::RandomSearch;
    int points = 0;
    double normalized = 0.0;
};

/// Pairwise 3/1/0 points on the test MSE at one checkpoint, normalized by
/// 3(n - 1). Order follows the plan. Aborted runs are left out of the
/// samples with a warning on stderr.
std::vector<AlgorithmScore> score_checkpoint(const ResultStore& store, const std::string& instance,
                                             std::size_t fe, const ScoringOptions& options = {});

struct ScoreRow {
    std::string instance;
    std::string topology;
    std::size_t fe = 0;
    Algorithm algorithm = Algorithm::RandomSearch;
    int points = 0;
    double normalized = 0.0;
};

/// Scores for every instance and every checkpoint of the plan's schedule.
std::vector<ScoreRow> score_all(const ResultStore& store, const ScoringOptions& options = {});
void write_scores_csv(const std::vector<ScoreRow>& rows, std::ostream& out);

struct TrajectoryPoint {
    std::size_t fe = 0;
    Algorithm algorithm = Algorithm::RandomSearch;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t instances = 0;
};

/// Mean and population standard deviation over the topology's instances
/// of the normalized score, per checkpoint and algorithm.
std::vector<TrajectoryPoint> aggregate_mean_scores(const ResultStore& store, Topology topology,
                                                   const ScoringOptions& options = {});
void write_trajectory_csv(Topology topology, const std::vector<TrajectoryPoint>& points,
                          std::ostream& out);

struct SummaryRow {
    std::string instance;
    std::string topology;
    Algorithm algorithm = Algorithm::RandomSearch;
    double mean_final_test_mse = 0.0;
    std::size_t runs = 0;
    bool is_best = false;
};

/// Mean final test MSE per (instance, algorithm). The best algorithm per
/// instance is the lowest mean, ties going to the earlier plan entry.
/// std::nullopt summarizes every topology in the plan.
std::vector<SummaryRow> per_instance_summary(const ResultStore& store,
                                             std::optional<Topology> topology = std::nullopt,
                                             const ScoringOptions& options = {});
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

struct BaselineEntry {
    std::string instance;
    std::string topology;
    Algorithm best_population = Algorithm::PSO;
    std::vector<double> population_samples;
    std::vector<double> adam_samples;
    double median_population = 0.0;
    double median_adam = 0.0;
    /// median_population - median_adam
    double median_difference = 0.0;
};

/// Best population algorithm (lowest median final test MSE, then plan
/// order) against Adam, sorted ascending by median difference.
std::vector<BaselineEntry> baseline_comparison(const ResultStore& store,
                                               std::optional<Topology> topology = std::nullopt,
                                               const ScoringOptions& options = {});
void write_baseline_csv(const std::vector<BaselineEntry>& entries, std::ostream& out);

double median(std::vector<double> values);

} // namespace cornn
