#include "cornn/instance.hpp"

#include "cornn/csv.hpp"
#include "cornn/error.hpp"

#include <ostream>

namespace cornn {

namespace {

void check_dimension(const Problem& problem, std::span<const double> params) {
    if (params.size() != problem.dimension()) {
        throw DimensionError(problem.label() + ": parameter vector has " +
                             std::to_string(params.size()) + " entries, expected " +
                             std::to_string(problem.dimension()));
    }
}

} // namespace

void BudgetMeter::require() const {
    if (used_ >= limit_) {
        throw BudgetExhausted("evaluation budget of " + std::to_string(limit_) + " FEs exhausted");
    }
}

double Problem::train_loss_and_gradient(std::span<const double>, std::span<double>) const {
    throw InvalidArgument(label() + ": objective provides no gradient");
}

double eval_train(const Problem& problem, BudgetMeter& meter, std::span<const double> params) {
    meter.require();
    check_dimension(problem, params);
    const double loss = problem.train_loss(params);
    meter.charge();
    return loss;
}

double eval_train_with_gradient(const Problem& problem, BudgetMeter& meter,
                                std::span<const double> params, std::span<double> gradient) {
    meter.require();
    check_dimension(problem, params);
    const double loss = problem.train_loss_and_gradient(params, gradient);
    meter.charge();
    return loss;
}

double eval_test(const Problem& problem, std::span<const double> params) {
    check_dimension(problem, params);
    return problem.test_loss(params);
}

ProblemInstance::ProblemInstance(int function_id, Architecture arch,
                                 std::shared_ptr<const RegressionDataset> dataset, std::string label)
    : function_id_(function_id), arch_(arch), dataset_(std::move(dataset)),
      label_(std::move(label)), dimension_(param_count(arch_)) {
    if (!dataset_) throw InvalidArgument("ProblemInstance: null dataset");
    if (arch_.input_dim != 2) throw InvalidArgument("ProblemInstance: regression inputs are 2-D");
}

double ProblemInstance::train_loss(std::span<const double> params) const {
    return batch_mse(arch_, params, dataset_->train_inputs, dataset_->train_targets);
}

double ProblemInstance::test_loss(std::span<const double> params) const {
    return batch_mse(arch_, params, dataset_->test_inputs, dataset_->test_targets);
}

double ProblemInstance::train_loss_and_gradient(std::span<const double> params,
                                                std::span<double> gradient) const {
    return mse_and_gradient(arch_, params, dataset_->train_inputs, dataset_->train_targets,
                            gradient);
}

CallableProblem::CallableProblem(std::string label, std::size_t dimension, Loss train, Loss test,
                                 LossAndGradient gradient)
    : label_(std::move(label)), dimension_(dimension), train_(std::move(train)),
      test_(std::move(test)), gradient_(std::move(gradient)) {
    if (dimension_ == 0) throw InvalidArgument("CallableProblem: zero dimension");
    if (!train_) throw InvalidArgument("CallableProblem: missing train loss");
}

double CallableProblem::train_loss_and_gradient(std::span<const double> params,
                                                std::span<double> gradient) const {
    if (!gradient_) return Problem::train_loss_and_gradient(params, gradient);
    return gradient_(params, gradient);
}

std::string instance_label(int function_id, Topology topology) {
    return "f" + std::to_string(function_id) + "/" + to_string(topology);
}

InstanceKey parse_instance_label(std::string_view label) {
    const auto slash = label.find('/');
    if (label.size() < 4 || label.front() != 'f' || slash == std::string_view::npos) {
        throw LookupError("malformed instance label '" + std::string(label) +
                          "', expected f<ID>/<Topology>");
    }
    const auto id = csv::parse_int(label.substr(1, slash - 1));
    if (!id) {
        throw LookupError("malformed function id in instance label '" + std::string(label) + "'");
    }
    return {static_cast<int>(*id), parse_topology(label.substr(slash + 1))};
}

ProblemInstance build_instance(int function_id, Topology topology, RegressionDataset dataset) {
    const FunctionSpec& spec = find_function(function_id);
    return ProblemInstance(spec.id, architecture(topology),
                           std::make_shared<const RegressionDataset>(std::move(dataset)),
                           instance_label(spec.id, topology));
}

ProblemInstance build_instance(int function_id, Topology topology, std::uint64_t dataset_seed) {
    const FunctionSpec& spec = find_function(function_id);
    return build_instance(function_id, topology, make_dataset(spec, dataset_seed));
}

ProblemInstance build_instance(int function_id, Topology topology) {
    return build_instance(function_id, topology, canonical_dataset_seed(function_id));
}

ProblemInstance build_instance(std::string_view label) {
    const auto key = parse_instance_label(label);
    return build_instance(key.function_id, key.topology);
}

std::vector<ProblemInstance> enumerate_suite(const DatasetSeedPolicy& seed_for) {
    std::vector<ProblemInstance> out;
    out.reserve(static_cast<std::size_t>(kCatalogSize) * std::size(kAllTopologies));
    for (const auto& spec : catalog()) {
        auto ds = std::make_shared<const RegressionDataset>(make_dataset(spec, seed_for(spec.id)));
        for (Topology t : kAllTopologies) {
            out.emplace_back(spec.id, architecture(t), ds, instance_label(spec.id, t));
        }
    }
    return out;
}

std::vector<std::string> suite_labels() {
    std::vector<std::string> out;
    for (const auto& spec : catalog()) {
        for (Topology t : kAllTopologies) out.push_back(instance_label(spec.id, t));
    }
    return out;
}

void write_seed_manifest(std::ostream& out) {
    out << "function_id,name,dataset_seed\n";
    for (const auto& spec : catalog()) {
        out << spec.id << ',' << spec.name << ',' << canonical_dataset_seed(spec.id) << '\n';
    }
}

} // namespace cornn
