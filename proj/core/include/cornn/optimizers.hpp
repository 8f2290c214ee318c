#pragma once

#include "cornn/instance.hpp"
#include "cornn/network.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cornn {

enum class Algorithm { RandomSearch, PSO, DE, CMAES, Adam };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::RandomSearch, Algorithm::PSO,
                                               Algorithm::DE, Algorithm::CMAES, Algorithm::Adam};

std::string to_string(Algorithm a);
/// Throws LookupError.
Algorithm parse_algorithm(std::string_view name);
bool is_population_based(Algorithm a) noexcept;

struct RandomSearchParams {
    InitScheme proposal = InitScheme::NormalUnit;
};

/// Global-best PSO. Defaults are the Clerc constriction-equivalent values.
struct PsoParams {
    std::size_t swarm_size = 40;
    double inertia = 0.7213;
    double cognitive = 1.1931;
    double social = 1.1931;
};

/// DE/rand/1 with two-point crossover.
struct DeParams {
    std::size_t population = 30;
    double scale_factor = 0.8;
};

/// (mu/mu_w, lambda)-CMA-ES. population == 0 selects 4 + floor(3 ln D).
struct CmaesParams {
    std::size_t population = 0;
    double sigma0 = 1.0;
};

/// Full-batch Adam with the usual defaults.
struct AdamParams {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    InitScheme init = InitScheme::FanInUniform;
    /// Overrides the seeded initialization when set.
    std::optional<ParameterVector> initial_point;
};

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::RandomSearch;
    std::uint64_t seed = 0;
    RandomSearchParams random_search;
    PsoParams pso;
    DeParams de;
    CmaesParams cmaes;
    AdamParams adam;

    static OptimizerConfig defaults(Algorithm a, std::uint64_t seed = 0);

    /// Throws InvalidArgument for illegal hyperparameters.
    void validate() const;

    /// Flat key -> value description of the parameters actually used.
    std::map<std::string, std::string> describe() const;
};

struct Checkpoint {
    std::size_t fe = 0;
    double best_train_mse = 0.0;
    double test_mse = 0.0;

    bool operator==(const Checkpoint&) const = default;
};

enum class RunStatus { Completed, Aborted };

/// One optimizer run: best-so-far trajectory plus the final best parameters.
struct RunRecord {
    std::string instance_label;
    Algorithm algorithm = Algorithm::RandomSearch;
    std::uint64_t seed = 0;
    std::vector<Checkpoint> checkpoints;
    ParameterVector final_params;
    std::size_t fe_consumed = 0;
    std::size_t budget = 0;
    RunStatus status = RunStatus::Completed;
    std::string diagnostic;
    std::size_t covariance_resets = 0;
    std::map<std::string, std::string> hyperparameters;

    const Checkpoint* checkpoint_at(std::size_t fe) const;
    double final_test_mse() const;

    bool operator==(const RunRecord&) const = default;
};

/// Per-iteration view handed to an observer. `member_values` holds the
/// personal bests (PSO), the population fitness (DE) or the fitness of the
/// evaluated candidates (CMA-ES), in index order.
struct IterationInfo {
    std::size_t iteration = 0;
    std::size_t fe = 0;
    std::span<const double> member_values;
    double best_value = 0.0;
};

struct RunOptions {
    /// Checkpoints are taken at FE 1, every multiple of the stride, and at
    /// the final FE.
    std::size_t checkpoint_stride = 10;
    std::function<void(const IterationInfo&)> observer;
};

RunRecord run_random_search(const Problem& problem, BudgetMeter& meter,
                            const OptimizerConfig& config, const RunOptions& options = {});
RunRecord run_pso(const Problem& problem, BudgetMeter& meter, const OptimizerConfig& config,
                  const RunOptions& options = {});
RunRecord run_de(const Problem& problem, BudgetMeter& meter, const OptimizerConfig& config,
                 const RunOptions& options = {});
RunRecord run_cmaes(const Problem& problem, BudgetMeter& meter, const OptimizerConfig& config,
                    const RunOptions& options = {});
RunRecord run_adam(const Problem& problem, BudgetMeter& meter, const OptimizerConfig& config,
                   const RunOptions& options = {});

/// Dispatches on config.algorithm.
RunRecord run_optimizer(const Problem& problem, BudgetMeter& meter, const OptimizerConfig& config,
                        const RunOptions& options = {});

/// Copies mutant[cut_lo, cut_hi) into a copy of parent.
ParameterVector two_point_crossover(std::span<const double> parent, std::span<const double> mutant,
                                    std::size_t cut_lo, std::size_t cut_hi);

/// Starting point drawn for a problem. Network instances use init_weights;
/// other problems treat the whole vector as one layer with fan_in = D.
ParameterVector initial_point(const Problem& problem, std::uint64_t seed, InitScheme scheme);

/// Ask/tell CMA-ES state. Exposed so its internals can be inspected.
class Cmaes {
public:
    Cmaes(std::span<const double> mean, double sigma, std::size_t lambda, std::uint64_t seed);
    ~Cmaes();
    Cmaes(Cmaes&&) noexcept;
    Cmaes& operator=(Cmaes&&) noexcept;

    static std::size_t default_lambda(std::size_t dimension);

    std::size_t dimension() const;
    std::size_t lambda() const;
    std::size_t mu() const;
    std::span<const double> weights() const;

    /// Samples lambda candidates from N(mean, sigma^2 C).
    const std::vector<ParameterVector>& ask();

    /// Updates from the fitness of the last ask(). Needs all lambda values.
    void tell(std::span<const double> fitness);

    std::vector<double> mean() const;
    double sigma() const;
    /// Row-major D x D.
    std::vector<double> covariance() const;
    std::size_t generation() const;
    std::size_t covariance_resets() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace cornn
