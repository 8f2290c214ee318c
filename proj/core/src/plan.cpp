#include "cornn/plan.hpp"

#include "cornn/csv.hpp"
#include "cornn/error.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace cornn {

namespace {

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw InvalidArgument("plan: bad value for '" + key + "'");
    }
}

void reject_unknown(const YAML::Node& node, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw InvalidArgument("plan: unknown key '" + key + "' in " + where);
    }
}

void apply_overrides(const YAML::Node& root, OptimizerConfig& c) {
    switch (c.algorithm) {
    case Algorithm::RandomSearch:
        if (auto n = root["random_search"]) {
            reject_unknown(n, {"proposal"}, "random_search");
            if (n["proposal"]) {
                const auto v = scalar<std::string>(n["proposal"], "random_search.proposal");
                if (v == "normal_unit") c.random_search.proposal = InitScheme::NormalUnit;
                else if (v == "fan_in_uniform") c.random_search.proposal = InitScheme::FanInUniform;
                else throw InvalidArgument("plan: unknown proposal '" + v + "'");
            }
        }
        break;
    case Algorithm::PSO:
        if (auto n = root["pso"]) {
            reject_unknown(n, {"swarm_size", "inertia", "cognitive", "social"}, "pso");
            if (n["swarm_size"]) c.pso.swarm_size = scalar<std::size_t>(n["swarm_size"], "pso.swarm_size");
            if (n["inertia"]) c.pso.inertia = scalar<double>(n["inertia"], "pso.inertia");
            if (n["cognitive"]) c.pso.cognitive = scalar<double>(n["cognitive"], "pso.cognitive");
            if (n["social"]) c.pso.social = scalar<double>(n["social"], "pso.social");
        }
        break;
    case Algorithm::DE:
        if (auto n = root["de"]) {
            reject_unknown(n, {"population", "scale_factor"}, "de");
            if (n["population"]) c.de.population = scalar<std::size_t>(n["population"], "de.population");
            if (n["scale_factor"]) c.de.scale_factor = scalar<double>(n["scale_factor"], "de.scale_factor");
        }
        break;
    case Algorithm::CMAES:
        if (auto n = root["cmaes"]) {
            reject_unknown(n, {"population", "sigma0"}, "cmaes");
            if (n["population"]) c.cmaes.population = scalar<std::size_t>(n["population"], "cmaes.population");
            if (n["sigma0"]) c.cmaes.sigma0 = scalar<double>(n["sigma0"], "cmaes.sigma0");
        }
        break;
    case Algorithm::Adam:
        if (auto n = root["adam"]) {
            reject_unknown(n, {"learning_rate", "beta1", "beta2", "epsilon", "init"}, "adam");
            if (n["learning_rate"]) c.adam.learning_rate = scalar<double>(n["learning_rate"], "adam.learning_rate");
            if (n["beta1"]) c.adam.beta1 = scalar<double>(n["beta1"], "adam.beta1");
            if (n["beta2"]) c.adam.beta2 = scalar<double>(n["beta2"], "adam.beta2");
            if (n["epsilon"]) c.adam.epsilon = scalar<double>(n["epsilon"], "adam.epsilon");
            if (n["init"]) {
                const auto v = scalar<std::string>(n["init"], "adam.init");
                if (v == "normal_unit") c.adam.init = InitScheme::NormalUnit;
                else if (v == "fan_in_uniform") c.adam.init = InitScheme::FanInUniform;
                else throw InvalidArgument("plan: unknown init '" + v + "'");
            }
        }
        break;
    }
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& key) {
    std::vector<std::string> out;
    if (!node) return out;
    if (node.IsScalar()) {
        out.push_back(node.as<std::string>());
    } else if (node.IsSequence()) {
        for (const auto& item : node) out.push_back(scalar<std::string>(item, key));
    } else {
        throw InvalidArgument("plan: '" + key + "' must be a list");
    }
    return out;
}

} // namespace

void ExperimentPlan::validate() const {
    if (instances.empty()) throw InvalidArgument("plan: no instances");
    if (algorithms.empty()) throw InvalidArgument("plan: no algorithms");
    if (repetitions < 2) throw InvalidArgument("plan: repetitions must be at least 2");
    if (budget == 0) throw InvalidArgument("plan: budget must be positive");
    if (checkpoint_stride == 0) throw InvalidArgument("plan: stride must be positive");
    std::set<std::string> seen;
    for (const auto& label : instances) {
        const auto key = parse_instance_label(label);
        find_function(key.function_id);
        if (!seen.insert(label).second) throw InvalidArgument("plan: duplicate instance " + label);
    }
    std::set<Algorithm> algs;
    for (const auto& c : algorithms) {
        c.validate();
        if (!algs.insert(c.algorithm).second) {
            throw InvalidArgument("plan: duplicate algorithm " + to_string(c.algorithm));
        }
    }
}

std::vector<std::size_t> ExperimentPlan::checkpoint_schedule() const {
    std::vector<std::size_t> fes{1};
    for (std::size_t fe = checkpoint_stride; fe <= budget; fe += checkpoint_stride) {
        if (fe != 1) fes.push_back(fe);
    }
    if (fes.back() != budget) fes.push_back(budget);
    return fes;
}

std::size_t ExperimentPlan::algorithm_index(Algorithm a) const {
    for (std::size_t i = 0; i < algorithms.size(); ++i) {
        if (algorithms[i].algorithm == a) return i;
    }
    throw LookupError("plan has no algorithm " + to_string(a));
}

bool ExperimentPlan::has_algorithm(Algorithm a) const {
    return std::any_of(algorithms.begin(), algorithms.end(),
                       [a](const OptimizerConfig& c) { return c.algorithm == a; });
}

std::vector<std::string> expand_instance_selectors(const std::vector<std::string>& selectors) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto push = [&](std::string label) {
        if (seen.insert(label).second) out.push_back(std::move(label));
    };
    for (const auto& sel : selectors) {
        if (sel == "all") {
            for (auto& l : suite_labels()) push(std::move(l));
        } else if (sel.rfind("*/", 0) == 0) {
            const Topology t = parse_topology(std::string_view(sel).substr(2));
            for (const auto& spec : catalog()) push(instance_label(spec.id, t));
        } else if (sel.size() > 2 && sel.compare(sel.size() - 2, 2, "/*") == 0) {
            const auto key = parse_instance_label(sel.substr(0, sel.size() - 1) + "Tanh1");
            find_function(key.function_id);
            for (Topology t : kAllTopologies) push(instance_label(key.function_id, t));
        } else {
            const auto key = parse_instance_label(sel);
            find_function(key.function_id);
            push(instance_label(key.function_id, key.topology));
        }
    }
    return out;
}

ExperimentPlan parse_plan(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw InvalidArgument(std::string("plan: YAML syntax error: ") + e.what());
    }
    if (!root.IsMap()) throw InvalidArgument("plan: top level must be a mapping");
    reject_unknown(root,
                   {"instances", "algorithms", "repetitions", "budget", "stride", "master_seed",
                    "random_search", "pso", "de", "cmaes", "adam"},
                   "plan");

    ExperimentPlan plan;
    plan.instances = expand_instance_selectors(string_list(root["instances"], "instances"));
    for (const auto& name : string_list(root["algorithms"], "algorithms")) {
        auto c = OptimizerConfig::defaults(parse_algorithm(name));
        apply_overrides(root, c);
        plan.algorithms.push_back(c);
    }
    if (root["repetitions"]) plan.repetitions = scalar<std::size_t>(root["repetitions"], "repetitions");
    if (root["budget"]) plan.budget = scalar<std::size_t>(root["budget"], "budget");
    if (root["stride"]) plan.checkpoint_stride = scalar<std::size_t>(root["stride"], "stride");
    if (root["master_seed"]) plan.master_seed = scalar<std::uint64_t>(root["master_seed"], "master_seed");
    plan.validate();
    return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open plan file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_plan(text.str());
}

std::string plan_to_yaml(const ExperimentPlan& plan) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "instances" << YAML::Value << YAML::Flow << plan.instances;
    out << YAML::Key << "algorithms" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& c : plan.algorithms) out << to_string(c.algorithm);
    out << YAML::EndSeq;
    out << YAML::Key << "repetitions" << YAML::Value << plan.repetitions;
    out << YAML::Key << "budget" << YAML::Value << plan.budget;
    out << YAML::Key << "stride" << YAML::Value << plan.checkpoint_stride;
    out << YAML::Key << "master_seed" << YAML::Value << plan.master_seed;
    for (const auto& c : plan.algorithms) {
        auto as_double = [](double v) { return csv::format_double(v); };
        switch (c.algorithm) {
        case Algorithm::RandomSearch:
            out << YAML::Key << "random_search" << YAML::Value << YAML::BeginMap
                << YAML::Key << "proposal" << YAML::Value << to_string(c.random_search.proposal)
                << YAML::EndMap;
            break;
        case Algorithm::PSO:
            out << YAML::Key << "pso" << YAML::Value << YAML::BeginMap
                << YAML::Key << "swarm_size" << YAML::Value << c.pso.swarm_size
                << YAML::Key << "inertia" << YAML::Value << as_double(c.pso.inertia)
                << YAML::Key << "cognitive" << YAML::Value << as_double(c.pso.cognitive)
                << YAML::Key << "social" << YAML::Value << as_double(c.pso.social) << YAML::EndMap;
            break;
        case Algorithm::DE:
            out << YAML::Key << "de" << YAML::Value << YAML::BeginMap
                << YAML::Key << "population" << YAML::Value << c.de.population
                << YAML::Key << "scale_factor" << YAML::Value << as_double(c.de.scale_factor)
                << YAML::EndMap;
            break;
        case Algorithm::CMAES:
            out << YAML::Key << "cmaes" << YAML::Value << YAML::BeginMap
                << YAML::Key << "population" << YAML::Value << c.cmaes.population
                << YAML::Key << "sigma0" << YAML::Value << as_double(c.cmaes.sigma0) << YAML::EndMap;
            break;
        case Algorithm::Adam:
            out << YAML::Key << "adam" << YAML::Value << YAML::BeginMap
                << YAML::Key << "learning_rate" << YAML::Value << as_double(c.adam.learning_rate)
                << YAML::Key << "beta1" << YAML::Value << as_double(c.adam.beta1)
                << YAML::Key << "beta2" << YAML::Value << as_double(c.adam.beta2)
                << YAML::Key << "epsilon" << YAML::Value << as_double(c.adam.epsilon)
                << YAML::Key << "init" << YAML::Value << to_string(c.adam.init) << YAML::EndMap;
            break;
        }
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace cornn
