// cornn: command-line front end for the CORNN suite.
//
//   cornn list --functions | --topologies | --instances | --seeds
//   cornn gen-data --function ID [--seed S] [--samples N] [--out DIR]
//   cornn run --plan FILE [--out DIR] [--parallel N]
//   cornn score --store DIR [--out FILE] [--trajectory-dir DIR] [--force]
//   cornn summarize --store DIR [--out FILE] [--topology T] [--force]
//   cornn baseline --store DIR [--out FILE] [--topology T] [--force]
//
// Exit codes: 0 success, 1 usage or invalid input, 2 runtime failure.
// CORNN_OUT_DIR overrides the default output directory of gen-data and run.

#include "cornn/dataset.hpp"
#include "cornn/error.hpp"
#include "cornn/functions.hpp"
#include "cornn/harness.hpp"
#include "cornn/instance.hpp"
#include "cornn/plan.hpp"
#include "cornn/version.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

/// Input the user can fix: bad ids, bad plans, bad flags.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path default_out_dir(const char* fallback) {
    if (const char* env = std::getenv("CORNN_OUT_DIR"); env && *env) return env;
    return fallback;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cornn::Error("cannot open " + path.string() + " for writing");
    return out;
}

std::optional<cornn::Topology> topology_flag(const std::string& name) {
    if (name.empty()) return std::nullopt;
    try {
        return cornn::parse_topology(name);
    } catch (const cornn::LookupError& e) {
        throw UsageError(e.what());
    }
}

struct ListArgs {
    bool functions = false;
    bool topologies = false;
    bool instances = false;
    bool seeds = false;
};

int cmd_list(const ListArgs& a) {
    const int chosen = int(a.functions) + int(a.topologies) + int(a.instances) + int(a.seeds);
    if (chosen != 1) {
        throw UsageError("list: choose exactly one of --functions, --topologies, --instances, --seeds");
    }
    if (a.functions) {
        cornn::write_catalog_csv(std::cout);
    } else if (a.topologies) {
        std::cout << "topology,activation,hidden_layers,hidden_width,param_count\n";
        for (auto t : cornn::kAllTopologies) {
            const auto arch = cornn::architecture(t);
            std::cout << cornn::to_string(t) << ',' << cornn::to_string(arch.hidden_activation) << ','
                      << arch.hidden_layers << ',' << arch.hidden_width << ','
                      << cornn::param_count(arch) << '\n';
        }
    } else if (a.instances) {
        std::cout << "instance,function_id,function,topology,dimension\n";
        for (const auto& label : cornn::suite_labels()) {
            const auto key = cornn::parse_instance_label(label);
            std::cout << label << ',' << key.function_id << ','
                      << cornn::find_function(key.function_id).name << ','
                      << cornn::to_string(key.topology) << ','
                      << cornn::param_count(cornn::architecture(key.topology)) << '\n';
        }
    } else {
        cornn::write_seed_manifest(std::cout);
    }
    return kExitOk;
}

struct GenDataArgs {
    int function_id = 0;
    std::optional<std::uint64_t> seed;
    std::size_t samples = cornn::kDefaultSampleCount;
    std::string out;
};

int cmd_gen_data(const GenDataArgs& a) {
    const cornn::FunctionSpec* spec = nullptr;
    try {
        spec = &cornn::find_function(a.function_id);
    } catch (const cornn::LookupError& e) {
        throw UsageError(e.what());
    }
    if (a.samples < 2) throw UsageError("gen-data: --samples must be at least 2");
    const fs::path dir = a.out.empty() ? default_out_dir("data") : fs::path(a.out);
    fs::create_directories(dir);
    const auto seed = a.seed.value_or(cornn::canonical_dataset_seed(spec->id));
    const auto ds = cornn::make_dataset(*spec, seed, a.samples);
    const auto path = dir / cornn::dataset_file_name(*spec);
    cornn::export_csv(ds, path);
    std::cout << "wrote " << path.string() << " (" << ds.train_size() << " train, "
              << ds.test_size() << " test, seed " << seed << ")\n";
    return kExitOk;
}

struct RunArgs {
    std::string plan;
    std::string out;
    std::size_t parallel = 1;
};

int cmd_run(const RunArgs& a) {
    cornn::ExperimentPlan plan;
    try {
        plan = cornn::load_plan(a.plan);
    } catch (const cornn::InvalidArgument& e) {
        throw UsageError(e.what());
    } catch (const cornn::LookupError& e) {
        throw UsageError(e.what());
    }
    if (a.parallel == 0) throw UsageError("run: --parallel must be at least 1");
    const fs::path dir = a.out.empty() ? default_out_dir("cornn-out") : fs::path(a.out);

    cornn::ExecutionOptions exec;
    exec.parallelism = a.parallel;
    const std::size_t total = plan.instances.size() * plan.algorithms.size() * plan.repetitions;
    const std::size_t every = std::max<std::size_t>(1, total / 20);
    exec.progress = [every](std::size_t done, std::size_t n) {
        if (done % every == 0 || done == n) std::cerr << "[" << done << "/" << n << "] runs\n";
    };
    const auto store = cornn::run_experiment(plan, exec);
    cornn::save_store(store, dir);
    if (!store.complete()) {
        for (const auto& f : store.failures) {
            std::cerr << "failed: " << f.instance << ' ' << cornn::to_string(f.algorithm) << " rep "
                      << f.repetition << ": " << f.message << '\n';
        }
        std::cout << "store " << dir.string() << " incomplete: " << store.failures.size() << " of "
                  << total << " runs failed\n";
        return kExitRuntime;
    }
    std::cout << "store " << dir.string() << ": " << total << " runs\n";
    return kExitOk;
}

struct StoreArgs {
    std::string store;
    std::string out;
    std::string topology;
    std::string trajectory_dir;
    bool force = false;
    double alpha = 0.05;
};

cornn::ScoringOptions scoring(const StoreArgs& a) {
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    cornn::ScoringOptions o;
    o.alpha = a.alpha;
    o.force = a.force;
    return o;
}

int cmd_score(const StoreArgs& a) {
    const auto opts = scoring(a);
    const auto store = cornn::load_store(a.store);
    const auto rows = cornn::score_all(store, opts);
    const fs::path out_path = a.out.empty() ? fs::path(a.store) / "scores.csv" : fs::path(a.out);
    auto out = open_output(out_path);
    cornn::write_scores_csv(rows, out);
    if (!a.trajectory_dir.empty()) {
        std::set<cornn::Topology> topologies;
        for (const auto& label : store.plan.instances) {
            topologies.insert(cornn::parse_instance_label(label).topology);
        }
        for (auto t : topologies) {
            auto tout = open_output(fs::path(a.trajectory_dir) / ("trajectory_" + cornn::to_string(t) + ".csv"));
            cornn::write_trajectory_csv(t, cornn::aggregate_mean_scores(store, t, opts), tout);
        }
    }
    std::cout << "wrote " << out_path.string() << " (" << rows.size() << " rows)\n";
    return kExitOk;
}

int cmd_summarize(const StoreArgs& a) {
    const auto opts = scoring(a);
    const auto topo = topology_flag(a.topology);
    const auto store = cornn::load_store(a.store);
    const auto rows = cornn::per_instance_summary(store, topo, opts);
    const fs::path out_path = a.out.empty() ? fs::path(a.store) / "summary.csv" : fs::path(a.out);
    auto out = open_output(out_path);
    cornn::write_summary_csv(rows, out);
    std::cout << "wrote " << out_path.string() << " (" << rows.size() << " rows)\n";
    return kExitOk;
}

int cmd_baseline(const StoreArgs& a) {
    const auto opts = scoring(a);
    const auto topo = topology_flag(a.topology);
    const auto store = cornn::load_store(a.store);
    const auto entries = cornn::baseline_comparison(store, topo, opts);
    const fs::path out_path = a.out.empty() ? fs::path(a.store) / "baseline.csv" : fs::path(a.out);
    auto out = open_output(out_path);
    cornn::write_baseline_csv(entries, out);
    std::cout << "wrote " << out_path.string() << " (" << entries.size() << " instances)\n";
    return kExitOk;
}

void add_store_options(CLI::App* cmd, StoreArgs& a, bool with_topology) {
    cmd->add_option("--store", a.store, "Result store directory")->required();
    cmd->add_option("--out", a.out, "Output CSV (default: inside the store)");
    cmd->add_option("--alpha", a.alpha, "Significance level")->capture_default_str();
    cmd->add_flag("--force", a.force, "Score stores with failed cells");
    if (with_topology) cmd->add_option("--topology", a.topology, "Restrict to one topology");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CORNN: neural-network regression tasks as black-box optimization benchmarks"};
    app.set_version_flag("--version", std::string(cornn::kVersion));
    app.require_subcommand(1);

    ListArgs list_args;
    auto* list = app.add_subcommand("list", "Print the function, topology, instance or seed tables");
    list->add_flag("--functions", list_args.functions, "Function catalog");
    list->add_flag("--topologies", list_args.topologies, "Network topologies");
    list->add_flag("--instances", list_args.instances, "All 324 problem instances");
    list->add_flag("--seeds", list_args.seeds, "Canonical dataset seeds");

    GenDataArgs gen_args;
    auto* gen = app.add_subcommand("gen-data", "Write the normalized dataset of one function as CSV");
    gen->add_option("--function", gen_args.function_id, "Function id")->required();
    gen->add_option("--seed", gen_args.seed, "Dataset seed (default: canonical seed)");
    gen->add_option("--samples", gen_args.samples, "Number of samples")->capture_default_str();
    gen->add_option("--out", gen_args.out, "Output directory");

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute an experiment plan into a result store");
    run->add_option("--plan", run_args.plan, "YAML plan file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_args.out, "Result store directory");
    run->add_option("--parallel", run_args.parallel, "Worker threads")->capture_default_str();

    StoreArgs score_args, summary_args, baseline_args;
    auto* score = app.add_subcommand("score", "Pairwise win/draw/loss scores at every checkpoint");
    add_store_options(score, score_args, false);
    score->add_option("--trajectory-dir", score_args.trajectory_dir,
                      "Also write mean score trajectories per topology here");
    auto* summarize = app.add_subcommand("summarize", "Mean final test MSE per instance and algorithm");
    add_store_options(summarize, summary_args, true);
    auto* baseline = app.add_subcommand("baseline", "Best population-based algorithm against Adam");
    add_store_options(baseline, baseline_args, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*list) return cmd_list(list_args);
        if (*gen) return cmd_gen_data(gen_args);
        if (*run) return cmd_run(run_args);
        if (*score) return cmd_score(score_args);
        if (*summarize) return cmd_summarize(summary_args);
        if (*baseline) return cmd_baseline(baseline_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
