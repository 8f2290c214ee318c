#include "cornn/harness.hpp"

#include "cornn/csv.hpp"
#include "cornn/error.hpp"
#include "cornn/rng.hpp"
#include "cornn/run_record.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

namespace cornn {

namespace {

std::size_t instance_index(const ExperimentPlan& plan, const std::string& instance) {
    const auto it = std::find(plan.instances.begin(), plan.instances.end(), instance);
    if (it == plan.instances.end()) throw LookupError("instance " + instance + " is not in the plan");
    return static_cast<std::size_t>(it - plan.instances.begin());
}

std::string topology_of(const std::string& instance) {
    return to_string(parse_instance_label(instance).topology);
}

void require_complete(const ResultStore& store, const ScoringOptions& options) {
    if (store.complete() || options.force) return;
    std::string msg = "result store is incomplete: " + std::to_string(store.failures.size()) +
                      " failed cell(s)";
    if (!store.failures.empty()) {
        const auto& f = store.failures.front();
        msg += ", first " + f.instance + " " + to_string(f.algorithm) + " rep " +
               std::to_string(f.repetition) + ": " + f.message;
    }
    throw InvalidArgument(msg);
}

/// Runs usable for scoring, per algorithm in plan order.
std::vector<std::vector<const RunRecord*>> usable_runs(const ResultStore& store, std::size_t inst,
                                                       bool warn) {
    const auto& plan = store.plan;
    std::vector<std::vector<const RunRecord*>> out(plan.algorithms.size());
    for (std::size_t a = 0; a < plan.algorithms.size(); ++a) {
        for (std::size_t r = 0; r < plan.repetitions; ++r) {
            const auto& cell = store.runs[store.cell_index(inst, a, r)];
            if (!cell) continue;
            if (cell->status == RunStatus::Aborted) {
                if (warn) {
                    std::cerr << "warning: excluding aborted run " << cell->instance_label << ' '
                              << to_string(cell->algorithm) << " rep " << r << ": "
                              << cell->diagnostic << '\n';
                }
                continue;
            }
            out[a].push_back(&*cell);
        }
    }
    return out;
}

std::vector<AlgorithmScore> score_runs(const ResultStore& store, const std::string& instance,
                                       const std::vector<std::vector<const RunRecord*>>& runs,
                                       std::size_t fe, const ScoringOptions& options) {
    const auto& plan = store.plan;
    const std::size_t n = plan.algorithms.size();
    if (n < 2) throw InvalidArgument("scoring needs at least two algorithms");
    std::vector<std::vector<double>> samples(n);
    for (std::size_t a = 0; a < n; ++a) {
        if (runs[a].empty()) {
            throw InvalidArgument("no usable runs of " + to_string(plan.algorithms[a].algorithm) +
                                  " on " + instance);
        }
        for (const RunRecord* run : runs[a]) {
            const Checkpoint* cp = run->checkpoint_at(fe);
            if (!cp) {
                throw LookupError("no checkpoint at FE " + std::to_string(fe) + " for " + instance +
                                  " " + to_string(run->algorithm) + " (seed " +
                                  std::to_string(run->seed) + ")");
            }
            samples[a].push_back(cp->test_mse);
        }
    }
    std::vector<AlgorithmScore> scores(n);
    for (std::size_t a = 0; a < n; ++a) scores[a].algorithm = plan.algorithms[a].algorithm;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            switch (compare(samples[i], samples[j], options.alpha, options.method)) {
            case Outcome::AWins: scores[i].points += 3; break;
            case Outcome::BWins: scores[j].points += 3; break;
            case Outcome::Draw:
                scores[i].points += 1;
                scores[j].points += 1;
                break;
            }
        }
    }
    const double max_points = 3.0 * static_cast<double>(n - 1);
    for (auto& s : scores) s.normalized = static_cast<double>(s.points) / max_points;
    return scores;
}

std::vector<std::size_t> instances_of(const ExperimentPlan& plan, std::optional<Topology> topology) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < plan.instances.size(); ++i) {
        if (!topology || parse_instance_label(plan.instances[i]).topology == *topology) out.push_back(i);
    }
    return out;
}

std::vector<double> final_test_mses(const std::vector<const RunRecord*>& runs) {
    std::vector<double> out;
    out.reserve(runs.size());
    for (const RunRecord* r : runs) out.push_back(r->final_test_mse());
    return out;
}

} // namespace

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& instance, Algorithm algorithm,
                        std::size_t repetition) {
    std::uint64_t s = derive_seed(master_seed, instance);
    s = derive_seed(s, to_string(algorithm));
    return derive_seed(s, static_cast<std::uint64_t>(repetition));
}

bool ResultStore::complete() const {
    return failures.empty() &&
           std::all_of(runs.begin(), runs.end(), [](const auto& r) { return r.has_value(); });
}

std::size_t ResultStore::cell_index(std::size_t instance, std::size_t algorithm, std::size_t rep) const {
    return (instance * plan.algorithms.size() + algorithm) * plan.repetitions + rep;
}

const RunRecord* ResultStore::find(const std::string& instance, Algorithm algorithm,
                                   std::size_t rep) const {
    if (rep >= plan.repetitions) throw LookupError("repetition " + std::to_string(rep) + " out of range");
    const auto& cell = runs[cell_index(instance_index(plan, instance), plan.algorithm_index(algorithm), rep)];
    return cell ? &*cell : nullptr;
}

bool ResultStore::operator==(const ResultStore& other) const {
    return plan_to_yaml(plan) == plan_to_yaml(other.plan) && runs == other.runs &&
           failures == other.failures && version == other.version;
}

ResultStore run_experiment(const ExperimentPlan& plan, const ExecutionOptions& options) {
    plan.validate();
    std::map<int, std::shared_ptr<const RegressionDataset>> datasets;
    std::vector<ProblemInstance> instances;
    instances.reserve(plan.instances.size());
    for (const auto& label : plan.instances) {
        const auto key = parse_instance_label(label);
        auto& ds = datasets[key.function_id];
        if (!ds) {
            ds = std::make_shared<const RegressionDataset>(
                make_dataset(find_function(key.function_id), canonical_dataset_seed(key.function_id)));
        }
        instances.emplace_back(key.function_id, architecture(key.topology), ds, label);
    }

    const std::size_t n_alg = plan.algorithms.size();
    const std::size_t total = plan.instances.size() * n_alg * plan.repetitions;
    ResultStore store;
    store.plan = plan;
    store.runs.resize(total);
    std::vector<std::string> errors(total);

    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex progress_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total) break;
            const std::size_t inst = k / (n_alg * plan.repetitions);
            const std::size_t alg = (k / plan.repetitions) % n_alg;
            const std::size_t rep = k % plan.repetitions;
            OptimizerConfig config = plan.algorithms[alg];
            config.seed = cell_seed(plan.master_seed, plan.instances[inst], config.algorithm, rep);
            try {
                BudgetMeter meter(plan.budget);
                RunOptions ro;
                ro.checkpoint_stride = plan.checkpoint_stride;
                store.runs[k] = run_optimizer(instances[inst], meter, config, ro);
            } catch (const std::exception& e) {
                errors[k] = e.what();
                if (errors[k].empty()) errors[k] = "unknown error";
            }
            if (options.progress) {
                std::lock_guard lock(progress_mutex);
                options.progress(++done, total);
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(options.parallelism, total));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    for (std::size_t k = 0; k < total; ++k) {
        if (errors[k].empty()) continue;
        store.runs[k].reset();
        const std::size_t inst = k / (n_alg * plan.repetitions);
        const std::size_t alg = (k / plan.repetitions) % n_alg;
        store.failures.push_back(
            {plan.instances[inst], plan.algorithms[alg].algorithm, k % plan.repetitions, errors[k]});
    }
    return store;
}

std::string cell_stem(const std::string& instance, Algorithm algorithm, std::size_t rep) {
    std::string label = instance;
    std::replace(label.begin(), label.end(), '/', '_');
    char buf[16];
    std::snprintf(buf, sizeof buf, "r%02zu", rep);
    return label + "__" + to_string(algorithm) + "__" + buf;
}

void save_store(const ResultStore& store, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "runs");
    {
        std::ofstream out(dir / "plan.yaml", std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / "plan.yaml").string());
        out << plan_to_yaml(store.plan);
    }
    nlohmann::ordered_json j;
    j["version"] = store.version;
    j["cells"] = store.runs.size();
    j["complete"] = store.complete();
    auto failures = nlohmann::json::array();
    for (const auto& f : store.failures) {
        failures.push_back({{"instance", f.instance},
                            {"algorithm", to_string(f.algorithm)},
                            {"repetition", f.repetition},
                            {"message", f.message}});
    }
    j["failures"] = std::move(failures);
    {
        std::ofstream out(dir / "store.json", std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / "store.json").string());
        out << j.dump(2) << '\n';
    }
    const auto& plan = store.plan;
    for (std::size_t i = 0; i < plan.instances.size(); ++i) {
        for (std::size_t a = 0; a < plan.algorithms.size(); ++a) {
            for (std::size_t r = 0; r < plan.repetitions; ++r) {
                const auto& cell = store.runs[store.cell_index(i, a, r)];
                if (cell) {
                    save_run(*cell, dir / "runs" /
                                        cell_stem(plan.instances[i], plan.algorithms[a].algorithm, r));
                }
            }
        }
    }
}

ResultStore load_store(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("result store " + dir.string() + " does not exist");
    ResultStore store;
    store.plan = load_plan(dir / "plan.yaml");
    const auto& plan = store.plan;

    std::set<std::tuple<std::string, Algorithm, std::size_t>> failed;
    {
        std::ifstream in(dir / "store.json", std::ios::binary);
        if (!in) throw Error("missing " + (dir / "store.json").string());
        try {
            const auto j = nlohmann::json::parse(in);
            store.version = j.at("version").get<std::string>();
            for (const auto& f : j.at("failures")) {
                CellFailure cf{f.at("instance").get<std::string>(),
                               parse_algorithm(f.at("algorithm").get<std::string>()),
                               f.at("repetition").get<std::size_t>(),
                               f.at("message").get<std::string>()};
                failed.insert({cf.instance, cf.algorithm, cf.repetition});
                store.failures.push_back(std::move(cf));
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("bad store.json: " + std::string(e.what()));
        }
    }

    store.runs.resize(plan.instances.size() * plan.algorithms.size() * plan.repetitions);
    for (std::size_t i = 0; i < plan.instances.size(); ++i) {
        for (std::size_t a = 0; a < plan.algorithms.size(); ++a) {
            const Algorithm alg = plan.algorithms[a].algorithm;
            for (std::size_t r = 0; r < plan.repetitions; ++r) {
                if (failed.count({plan.instances[i], alg, r})) continue;
                const auto stem = dir / "runs" / cell_stem(plan.instances[i], alg, r);
                try {
                    store.runs[store.cell_index(i, a, r)] = load_run(stem);
                } catch (const std::exception& e) {
                    store.failures.push_back({plan.instances[i], alg, r, e.what()});
                }
            }
        }
    }
    return store;
}

std::vector<AlgorithmScore> score_checkpoint(const ResultStore& store, const std::string& instance,
                                             std::size_t fe, const ScoringOptions& options) {
    require_complete(store, options);
    const std::size_t inst = instance_index(store.plan, instance);
    return score_runs(store, instance, usable_runs(store, inst, true), fe, options);
}

std::vector<ScoreRow> score_all(const ResultStore& store, const ScoringOptions& options) {
    require_complete(store, options);
    const auto schedule = store.plan.checkpoint_schedule();
    std::vector<ScoreRow> rows;
    for (std::size_t i = 0; i < store.plan.instances.size(); ++i) {
        const auto& label = store.plan.instances[i];
        const auto runs = usable_runs(store, i, true);
        const auto topo = topology_of(label);
        for (std::size_t fe : schedule) {
            for (const auto& s : score_runs(store, label, runs, fe, options)) {
                rows.push_back({label, topo, fe, s.algorithm, s.points, s.normalized});
            }
        }
    }
    return rows;
}

void write_scores_csv(const std::vector<ScoreRow>& rows, std::ostream& out) {
    out << "instance,topology,fe,algorithm,points,normalized\n";
    for (const auto& r : rows) {
        out << r.instance << ',' << r.topology << ',' << r.fe << ',' << to_string(r.algorithm) << ','
            << r.points << ',' << csv::format_double(r.normalized) << '\n';
    }
}

std::vector<TrajectoryPoint> aggregate_mean_scores(const ResultStore& store, Topology topology,
                                                   const ScoringOptions& options) {
    require_complete(store, options);
    const auto& plan = store.plan;
    const auto selected = instances_of(plan, topology);
    if (selected.empty()) {
        throw InvalidArgument("plan has no instances with topology " + to_string(topology));
    }
    std::vector<std::vector<std::vector<const RunRecord*>>> runs;
    for (std::size_t i : selected) runs.push_back(usable_runs(store, i, true));

    const std::size_t n_alg = plan.algorithms.size();
    std::vector<TrajectoryPoint> out;
    for (std::size_t fe : plan.checkpoint_schedule()) {
        std::vector<std::vector<double>> values(n_alg);
        for (std::size_t k = 0; k < selected.size(); ++k) {
            const auto scores = score_runs(store, plan.instances[selected[k]], runs[k], fe, options);
            for (std::size_t a = 0; a < n_alg; ++a) values[a].push_back(scores[a].normalized);
        }
        for (std::size_t a = 0; a < n_alg; ++a) {
            const auto& v = values[a];
            const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            var /= static_cast<double>(v.size());
            out.push_back({fe, plan.algorithms[a].algorithm, mean, std::sqrt(var), v.size()});
        }
    }
    return out;
}

void write_trajectory_csv(Topology topology, const std::vector<TrajectoryPoint>& points,
                          std::ostream& out) {
    out << "topology,fe,algorithm,mean,stddev,instances\n";
    for (const auto& p : points) {
        out << to_string(topology) << ',' << p.fe << ',' << to_string(p.algorithm) << ','
            << csv::format_double(p.mean) << ',' << csv::format_double(p.stddev) << ','
            << p.instances << '\n';
    }
}

std::vector<SummaryRow> per_instance_summary(const ResultStore& store, std::optional<Topology> topology,
                                             const ScoringOptions& options) {
    require_complete(store, options);
    const auto& plan = store.plan;
    std::vector<SummaryRow> rows;
    for (std::size_t i : instances_of(plan, topology)) {
        const auto runs = usable_runs(store, i, false);
        const std::size_t first = rows.size();
        std::size_t best = first;
        for (std::size_t a = 0; a < plan.algorithms.size(); ++a) {
            const auto v = final_test_mses(runs[a]);
            SummaryRow row;
            row.instance = plan.instances[i];
            row.topology = topology_of(row.instance);
            row.algorithm = plan.algorithms[a].algorithm;
            row.runs = v.size();
            row.mean_final_test_mse = v.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                : std::accumulate(v.begin(), v.end(), 0.0) /
                                                      static_cast<double>(v.size());
            rows.push_back(row);
            const double cand = rows.back().mean_final_test_mse;
            const double inc = rows[best].mean_final_test_mse;
            if (!std::isnan(cand) && (std::isnan(inc) || cand < inc)) best = rows.size() - 1;
        }
        if (rows.size() > first) rows[best].is_best = true;
    }
    return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
    out << "instance,topology,algorithm,mean_final_test_mse,runs,is_best\n";
    for (const auto& r : rows) {
        out << r.instance << ',' << r.topology << ',' << to_string(r.algorithm) << ','
            << csv::format_double(r.mean_final_test_mse) << ',' << r.runs << ','
            << (r.is_best ? 1 : 0) << '\n';
    }
}

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<BaselineEntry> baseline_comparison(const ResultStore& store, std::optional<Topology> topology,
                                               const ScoringOptions& options) {
    require_complete(store, options);
    const auto& plan = store.plan;
    if (!plan.has_algorithm(Algorithm::Adam)) throw LookupError("result store has no Adam runs");
    const std::size_t adam = plan.algorithm_index(Algorithm::Adam);
    std::vector<std::size_t> population;
    for (std::size_t a = 0; a < plan.algorithms.size(); ++a) {
        if (is_population_based(plan.algorithms[a].algorithm)) population.push_back(a);
    }
    if (population.empty()) throw LookupError("result store has no population-based algorithm");

    std::vector<BaselineEntry> out;
    for (std::size_t i : instances_of(plan, topology)) {
        const auto runs = usable_runs(store, i, false);
        BaselineEntry e;
        e.instance = plan.instances[i];
        e.topology = topology_of(e.instance);
        e.adam_samples = final_test_mses(runs[adam]);
        if (e.adam_samples.empty()) throw LookupError("no usable Adam runs on " + e.instance);
        e.median_adam = median(e.adam_samples);
        bool have = false;
        for (std::size_t a : population) {
            auto v = final_test_mses(runs[a]);
            if (v.empty()) continue;
            const double m = median(v);
            if (!have || m < e.median_population) {
                have = true;
                e.best_population = plan.algorithms[a].algorithm;
                e.median_population = m;
                e.population_samples = std::move(v);
            }
        }
        if (!have) throw LookupError("no usable population-based runs on " + e.instance);
        e.median_difference = e.median_population - e.median_adam;
        out.push_back(std::move(e));
    }
    std::stable_sort(out.begin(), out.end(), [](const BaselineEntry& a, const BaselineEntry& b) {
        return a.median_difference < b.median_difference;
    });
    return out;
}

void write_baseline_csv(const std::vector<BaselineEntry>& entries, std::ostream& out) {
    out << "order,instance,topology,best_population,median_population,median_adam,"
           "median_difference,approach,repetition,test_mse\n";
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& e = entries[k];
        auto emit = [&](const char* approach, const std::vector<double>& samples) {
            for (std::size_t r = 0; r < samples.size(); ++r) {
                out << k + 1 << ',' << e.instance << ',' << e.topology << ','
                    << to_string(e.best_population) << ',' << csv::format_double(e.median_population)
                    << ',' << csv::format_double(e.median_adam) << ','
                    << csv::format_double(e.median_difference) << ',' << approach << ',' << r << ','
                    << csv::format_double(samples[r]) << '\n';
            }
        };
        emit("population", e.population_samples);
        emit("adam", e.adam_samples);
    }
}

} // namespace cornn
