#pragma once

#include "cornn/dataset.hpp"
#include "cornn/network.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cornn {

inline constexpr std::size_t kDefaultBudget = 5000;

/// Hard cap on train-set evaluations. One FE is one full pass over the
/// training data.
class BudgetMeter {
public:
    explicit BudgetMeter(std::size_t limit = kDefaultBudget) : limit_(limit) {}

    std::size_t used() const noexcept { return used_; }
    std::size_t limit() const noexcept { return limit_; }
    std::size_t remaining() const noexcept { return limit_ - used_; }
    bool exhausted() const noexcept { return used_ >= limit_; }

    /// Throws BudgetExhausted when no evaluations are left.
    void require() const;
    void charge() {
        require();
        ++used_;
    }

private:
    std::size_t used_ = 0;
    std::size_t limit_;
};

/// Objective seen by the optimizers: a train loss that costs budget, a free
/// test loss, and optionally the train-loss gradient.
class Problem {
public:
    virtual ~Problem() = default;

    virtual std::size_t dimension() const = 0;
    virtual std::string label() const = 0;
    virtual double train_loss(std::span<const double> params) const = 0;
    virtual double test_loss(std::span<const double> params) const = 0;
    virtual bool has_gradient() const { return false; }
    virtual double train_loss_and_gradient(std::span<const double> params,
                                           std::span<double> gradient) const;
};

/// Train loss, charged one FE. The meter is only advanced when the
/// evaluation happens.
double eval_train(const Problem& problem, BudgetMeter& meter, std::span<const double> params);

/// Train loss and gradient in one pass; also exactly one FE.
double eval_train_with_gradient(const Problem& problem, BudgetMeter& meter,
                                std::span<const double> params, std::span<double> gradient);

/// Test loss; never touches a meter.
double eval_test(const Problem& problem, std::span<const double> params);

/// One regression dataset paired with one architecture.
class ProblemInstance final : public Problem {
public:
    ProblemInstance(int function_id, Architecture arch,
                    std::shared_ptr<const RegressionDataset> dataset, std::string label);

    int function_id() const noexcept { return function_id_; }
    const Architecture& architecture() const noexcept { return arch_; }
    const RegressionDataset& dataset() const noexcept { return *dataset_; }

    std::size_t dimension() const override { return dimension_; }
    std::string label() const override { return label_; }
    double train_loss(std::span<const double> params) const override;
    double test_loss(std::span<const double> params) const override;
    bool has_gradient() const override { return true; }
    double train_loss_and_gradient(std::span<const double> params,
                                   std::span<double> gradient) const override;

private:
    int function_id_;
    Architecture arch_;
    std::shared_ptr<const RegressionDataset> dataset_;
    std::string label_;
    std::size_t dimension_;
};

/// Problem assembled from callables; used for custom objectives such as a
/// plain sphere. The test loss defaults to the train loss.
class CallableProblem final : public Problem {
public:
    using Loss = std::function<double(std::span<const double>)>;
    using LossAndGradient = std::function<double(std::span<const double>, std::span<double>)>;

    CallableProblem(std::string label, std::size_t dimension, Loss train, Loss test = {},
                    LossAndGradient gradient = {});

    std::size_t dimension() const override { return dimension_; }
    std::string label() const override { return label_; }
    double train_loss(std::span<const double> params) const override { return train_(params); }
    double test_loss(std::span<const double> params) const override {
        return test_ ? test_(params) : train_(params);
    }
    bool has_gradient() const override { return static_cast<bool>(gradient_); }
    double train_loss_and_gradient(std::span<const double> params,
                                   std::span<double> gradient) const override;

private:
    std::string label_;
    std::size_t dimension_;
    Loss train_;
    Loss test_;
    LossAndGradient gradient_;
};

/// `f<ID>/<Topology>`.
std::string instance_label(int function_id, Topology topology);

struct InstanceKey {
    int function_id;
    Topology topology;
};

/// Parses `f<ID>/<Topology>`; throws LookupError on malformed labels.
InstanceKey parse_instance_label(std::string_view label);

ProblemInstance build_instance(int function_id, Topology topology, std::uint64_t dataset_seed);

/// Uses canonical_dataset_seed(function_id).
ProblemInstance build_instance(int function_id, Topology topology);

ProblemInstance build_instance(std::string_view label);

/// Instance over an existing dataset, e.g. one read with import_csv.
ProblemInstance build_instance(int function_id, Topology topology, RegressionDataset dataset);

using DatasetSeedPolicy = std::function<std::uint64_t(int function_id)>;

/// The 54 x 6 canonical instances, function-major. Instances of one
/// function share a single dataset.
std::vector<ProblemInstance> enumerate_suite(const DatasetSeedPolicy& seed_for = canonical_dataset_seed);

/// All 324 labels in enumeration order, without building datasets.
std::vector<std::string> suite_labels();

/// CSV `function_id,name,dataset_seed` for the catalog.
void write_seed_manifest(std::ostream& out);

} // namespace cornn
