#include "doctest.h"
#include "support.hpp"

#include "cornn/error.hpp"
#include "cornn/optimizers.hpp"
#include "cornn/rng.hpp"
#include "cornn/run_record.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

using namespace cornn;

namespace {

const FunctionSpec& sphere_spec() {
    static const FunctionSpec& spec =
        register_custom("sphere", {Interval{-1e3, 1e3}, Interval{-1e3, 1e3}},
                        [](const Point2& x) { return x[0] * x[0] + x[1] * x[1]; });
    return spec;
}

CallableProblem sphere_problem() {
    const FunctionSpec& spec = sphere_spec();
    return CallableProblem("sphere", 2, [&spec](std::span<const double> x) {
        return evaluate(spec, {x[0], x[1]});
    });
}

const ProblemInstance& easom_tanh1() {
    static const ProblemInstance inst = build_instance(20, Topology::Tanh1);
    return inst;
}

RunRecord run(Algorithm a, const Problem& p, std::size_t budget, std::uint64_t seed,
              const RunOptions& options = {}) {
    BudgetMeter meter(budget);
    auto rec = run_optimizer(p, meter, OptimizerConfig::defaults(a, seed), options);
    CHECK(meter.used() == rec.fe_consumed);
    return rec;
}

int sphere_successes(Algorithm a, std::size_t budget, double threshold) {
    const auto sphere = sphere_problem();
    int ok = 0;
    for (std::uint64_t s = 0; s < 30; ++s) {
        if (run(a, sphere, budget, derive_seed(2024, s)).checkpoints.back().best_train_mse < threshold) ++ok;
    }
    return ok;
}

// Cholesky succeeds exactly when a symmetric matrix is positive definite.
bool positive_definite(const std::vector<double>& c, std::size_t n) {
    std::vector<double> l(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double d = c[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
        if (!(d > 0.0)) return false;
        l[j * n + j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = c[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            l[i * n + j] = s / l[j * n + j];
        }
    }
    return true;
}

} // namespace

TEST_CASE("algorithm names and config validation") {
    for (Algorithm a : kAllAlgorithms) CHECK(parse_algorithm(to_string(a)) == a);
    CHECK_THROWS_AS(parse_algorithm("NelderMead"), LookupError);
    CHECK(is_population_based(Algorithm::PSO));
    CHECK(!is_population_based(Algorithm::Adam));
    CHECK(!is_population_based(Algorithm::RandomSearch));

    auto pso = OptimizerConfig::defaults(Algorithm::PSO);
    pso.pso.swarm_size = 1;
    CHECK_THROWS_AS(pso.validate(), InvalidArgument);
    auto de = OptimizerConfig::defaults(Algorithm::DE);
    de.de.population = 3;
    CHECK_THROWS_AS(de.validate(), InvalidArgument);
    auto adam = OptimizerConfig::defaults(Algorithm::Adam);
    adam.adam.beta1 = 1.0;
    CHECK_THROWS_AS(adam.validate(), InvalidArgument);
    CHECK(OptimizerConfig::defaults(Algorithm::CMAES).describe().at("sigma0") == "1");
}

TEST_CASE("runs need a fresh meter and a matching config") {
    BudgetMeter used(10);
    used.charge();
    CHECK_THROWS_AS(run_pso(easom_tanh1(), used, OptimizerConfig::defaults(Algorithm::PSO)),
                    InvalidArgument);
    BudgetMeter fresh(10);
    CHECK_THROWS_AS(run_pso(easom_tanh1(), fresh, OptimizerConfig::defaults(Algorithm::DE)),
                    InvalidArgument);
}

TEST_CASE("random search with a budget of one") {
    auto seen = std::make_shared<std::vector<std::vector<double>>>();
    CallableProblem probe("probe", 4, [seen](std::span<const double> x) {
        seen->emplace_back(x.begin(), x.end());
        return std::accumulate(x.begin(), x.end(), 0.0);
    }, [](std::span<const double>) { return 0.0; });
    const auto rec = run(Algorithm::RandomSearch, probe, 1, 77);
    REQUIRE(seen->size() == 1);
    CHECK(rec.fe_consumed == 1);
    REQUIRE(rec.checkpoints.size() == 1);
    CHECK(rec.checkpoints[0].fe == 1);
    CHECK(rec.final_params == seen->front());
}

TEST_CASE("every algorithm spends the budget exactly and is monotone") {
    for (Algorithm a : kAllAlgorithms) {
        CAPTURE(to_string(a));
        const auto rec = run(a, easom_tanh1(), 237, 5);
        CHECK(rec.fe_consumed == 237);
        CHECK(rec.status == RunStatus::Completed);
        REQUIRE(!rec.checkpoints.empty());
        CHECK(rec.checkpoints.front().fe == 1);
        CHECK(rec.checkpoints.back().fe == 237);
        CHECK(rec.checkpoints.size() == 1 + 23 + 1);
        for (std::size_t i = 1; i < rec.checkpoints.size(); ++i) {
            CHECK(rec.checkpoints[i].fe > rec.checkpoints[i - 1].fe);
            CHECK(rec.checkpoints[i].best_train_mse <= rec.checkpoints[i - 1].best_train_mse);
        }
        BudgetMeter check(1);
        CHECK(eval_train(easom_tanh1(), check, rec.final_params) == rec.checkpoints.back().best_train_mse);
        CHECK(eval_test(easom_tanh1(), rec.final_params) == rec.final_test_mse());
    }
}

TEST_CASE("seed determinism") {
    for (Algorithm a : kAllAlgorithms) {
        CAPTURE(to_string(a));
        const auto x = run(a, easom_tanh1(), 120, 9);
        const auto y = run(a, easom_tanh1(), 120, 9);
        const auto z = run(a, easom_tanh1(), 120, 10);
        CHECK(x == y);
        CHECK(x.final_params != z.final_params);
    }
}

TEST_CASE("PSO personal and global bests") {
    std::vector<std::vector<double>> history;
    std::vector<double> global;
    RunOptions opt;
    opt.observer = [&](const IterationInfo& info) {
        history.emplace_back(info.member_values.begin(), info.member_values.end());
        global.push_back(info.best_value);
    };
    run(Algorithm::PSO, easom_tanh1(), 400, 3, opt);
    REQUIRE(history.size() >= 2);
    for (std::size_t t = 0; t < history.size(); ++t) {
        REQUIRE(history[t].size() == 40);
        for (std::size_t i = 0; i < 40; ++i) {
            CHECK(global[t] <= history[t][i]);
            if (t > 0) CHECK(history[t][i] <= history[t - 1][i]);
        }
    }
}

TEST_CASE("two-point crossover") {
    const std::vector<double> parent = {0, 1, 2, 3, 4, 5};
    const std::vector<double> mutant = {10, 11, 12, 13, 14, 15};
    CHECK(two_point_crossover(parent, mutant, 2, 5) == std::vector<double>{0, 1, 12, 13, 14, 5});
    CHECK(two_point_crossover(parent, mutant, 0, 6) == mutant);
    CHECK(two_point_crossover(parent, mutant, 3, 3) == parent);
    CHECK_THROWS_AS(two_point_crossover(parent, mutant, 4, 2), InvalidArgument);
    CHECK_THROWS_AS(two_point_crossover(parent, mutant, 0, 7), InvalidArgument);
}

TEST_CASE("DE population best never worsens") {
    std::vector<double> best;
    RunOptions opt;
    opt.observer = [&](const IterationInfo& info) {
        CHECK(info.member_values.size() == 30);
        best.push_back(*std::min_element(info.member_values.begin(), info.member_values.end()));
    };
    run(Algorithm::DE, easom_tanh1(), 400, 4, opt);
    REQUIRE(best.size() >= 2);
    for (std::size_t i = 1; i < best.size(); ++i) CHECK(best[i] <= best[i - 1]);
}

TEST_CASE("CMA-ES covariance stays positive definite and the mean recombines") {
    const auto& inst = easom_tanh1();
    const std::size_t n = inst.dimension();
    Cmaes es(std::vector<double>(n, 0.0), 1.0, Cmaes::default_lambda(n), 31);
    CHECK(es.lambda() == 15);
    const auto w = es.weights();
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    std::size_t fe = 0;
    while (fe + es.lambda() <= 500) {
        const auto candidates = es.ask();
        std::vector<double> f;
        for (const auto& x : candidates) f.push_back(inst.train_loss(x));
        fe += candidates.size();
        es.tell(f);

        std::vector<std::size_t> order(f.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
        std::vector<double> expected(n, 0.0);
        for (std::size_t i = 0; i < es.mu(); ++i) {
            for (std::size_t d = 0; d < n; ++d) expected[d] += w[i] * candidates[order[i]][d];
        }
        const auto mean = es.mean();
        for (std::size_t d = 0; d < n; ++d) REQUIRE(mean[d] == doctest::Approx(expected[d]).epsilon(1e-12));

        const auto c = es.covariance();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) REQUIRE(c[i * n + j] == c[j * n + i]);
        }
        REQUIRE(positive_definite(c, n));
    }
    CHECK(es.generation() == 33);
    CHECK(es.covariance_resets() == 0);
}

TEST_CASE("CMA-ES with equal fitness keeps the mean inside the samples' hull") {
    Cmaes es(std::vector<double>{0.0, 0.0}, 1.0, 8, 5);
    const auto candidates = es.ask();
    es.tell(std::vector<double>(8, 1.0));
    const auto mean = es.mean();
    for (std::size_t d = 0; d < 2; ++d) {
        double lo = 1e300, hi = -1e300;
        for (const auto& x : candidates) {
            lo = std::min(lo, x[d]);
            hi = std::max(hi, x[d]);
        }
        CHECK(mean[d] >= lo);
        CHECK(mean[d] <= hi);
    }
}

TEST_CASE("sphere reference runs") {
    CHECK(sphere_successes(Algorithm::PSO, 2000, 1e-3) >= 28);
    CHECK(sphere_successes(Algorithm::DE, 2000, 1e-3) >= 28);
    CHECK(sphere_successes(Algorithm::CMAES, 1500, 1e-6) >= 28);
}

TEST_CASE("search is unbounded") {
    // Optimum far outside the initialization scale.
    CallableProblem shifted("shifted", 2, [](std::span<const double> x) {
        return (x[0] - 50.0) * (x[0] - 50.0) + (x[1] + 80.0) * (x[1] + 80.0);
    });
    for (Algorithm a : {Algorithm::PSO, Algorithm::CMAES}) {
        const auto rec = run(a, shifted, 3000, 2);
        CHECK(rec.final_params[0] == doctest::Approx(50.0).epsilon(1e-2));
        CHECK(rec.final_params[1] == doctest::Approx(-80.0).epsilon(1e-2));
    }
}

TEST_CASE("random search beats the zero vector over a full budget") {
    const auto& inst = easom_tanh1();
    BudgetMeter m(1);
    const double zero = eval_train(inst, m, std::vector<double>(41, 0.0));
    int better = 0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        if (run(Algorithm::RandomSearch, inst, 5000, s).checkpoints.back().best_train_mse <= zero) ++better;
    }
    CHECK(better == 5);
}

TEST_CASE("Adam is deterministic") {
    CHECK(run(Algorithm::Adam, easom_tanh1(), 200, 8) == run(Algorithm::Adam, easom_tanh1(), 200, 8));
}

TEST_CASE("Adam first step is bounded by the step size") {
    auto seen = std::make_shared<std::vector<std::vector<double>>>();
    Rng rng(12);
    std::vector<double> scale(6);
    for (double& s : scale) s = std::exp(4.0 * rng.normal());
    CallableProblem quad(
        "quad", 6,
        [scale](std::span<const double> x) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += scale[i] * x[i] * x[i];
            return s;
        },
        {},
        [seen, scale](std::span<const double> x, std::span<double> g) {
            seen->emplace_back(x.begin(), x.end());
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                g[i] = 2.0 * scale[i] * x[i];
                s += scale[i] * x[i] * x[i];
            }
            return s;
        });
    auto cfg = OptimizerConfig::defaults(Algorithm::Adam, 3);
    BudgetMeter meter(2);
    run_adam(quad, meter, cfg);
    REQUIRE(seen->size() == 2);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(std::abs((*seen)[1][i] - (*seen)[0][i]) <= cfg.adam.learning_rate * (1.0 + 1e-12));
    }
}

TEST_CASE("Adam on a scalar quadratic matches a reference implementation") {
    CallableProblem quad(
        "quad", 1, [](std::span<const double> x) { return (x[0] - 3.0) * (x[0] - 3.0); }, {},
        [](std::span<const double> x, std::span<double> g) {
            g[0] = 2.0 * (x[0] - 3.0);
            return (x[0] - 3.0) * (x[0] - 3.0);
        });
    auto cfg = OptimizerConfig::defaults(Algorithm::Adam);
    cfg.adam.initial_point = std::vector<double>{0.0};
    BudgetMeter meter(5000);
    const auto rec = run_adam(quad, meter, cfg);

    double theta = 0.0, m = 0.0, v = 0.0, best = 1e300, best_theta = 0.0;
    for (int t = 1; t <= 5000; ++t) {
        const double loss = (theta - 3.0) * (theta - 3.0);
        if (loss < best) {
            best = loss;
            best_theta = theta;
        }
        const double g = 2.0 * (theta - 3.0);
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double mh = m / (1.0 - std::pow(0.9, t));
        const double vh = v / (1.0 - std::pow(0.999, t));
        theta -= 0.001 * mh / (std::sqrt(vh) + 1e-8);
    }
    CHECK(std::abs(rec.final_params[0] - 3.0) < 0.1);
    CHECK(rec.final_params[0] == doctest::Approx(best_theta).epsilon(1e-9));
}

TEST_CASE("Adam aborts on a non-finite gradient") {
    auto calls = std::make_shared<int>(0);
    CallableProblem bad(
        "bad", 2, [](std::span<const double>) { return 1.0; }, {},
        [calls](std::span<const double>, std::span<double> g) {
            ++*calls;
            g[0] = *calls < 5 ? 1.0 : std::nan("");
            g[1] = 1.0;
            return 1.0;
        });
    BudgetMeter meter(100);
    const auto rec = run_adam(bad, meter, OptimizerConfig::defaults(Algorithm::Adam));
    CHECK(rec.status == RunStatus::Aborted);
    CHECK(!rec.diagnostic.empty());
    CHECK(rec.fe_consumed == 5);
    CHECK(rec.checkpoints.back().fe == 5);
}

TEST_CASE("run records survive a save/load round trip") {
    test::TempDir dir("runs");
    for (Algorithm a : kAllAlgorithms) {
        const auto rec = run(a, easom_tanh1(), 60, 1);
        save_run(rec, dir / to_string(a));
        CHECK(load_run(dir / to_string(a)) == rec);
    }
    RunRecord aborted;
    aborted.instance_label = "f20/Tanh1";
    aborted.algorithm = Algorithm::Adam;
    aborted.status = RunStatus::Aborted;
    aborted.diagnostic = "non-finite loss";
    aborted.checkpoints = {{1, 0.5, 0.25}, {2, 0.5, 0.25}};
    aborted.final_params = {1.0, -2.0};
    aborted.fe_consumed = 2;
    aborted.budget = 10;
    save_run(aborted, dir / "aborted");
    CHECK(load_run(dir / "aborted") == aborted);
}
