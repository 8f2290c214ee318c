#include "cornn/optimizers.hpp"

#include "cornn/csv.hpp"
#include "cornn/error.hpp"
#include "cornn/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cornn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Best-so-far bookkeeping shared by all optimizers. The test loss of the
/// incumbent is computed lazily, only when a checkpoint needs it.
class Tracker {
public:
    Tracker(const Problem& problem, const BudgetMeter& meter, RunRecord& record, std::size_t stride)
        : problem_(problem), meter_(meter), record_(record), stride_(stride) {}

    void observe(std::span<const double> params, double loss) {
        const bool better = !has_best_ || loss < best_ || (std::isnan(best_) && !std::isnan(loss));
        if (better) {
            has_best_ = true;
            best_ = loss;
            record_.final_params.assign(params.begin(), params.end());
            test_stale_ = true;
        }
        const std::size_t fe = meter_.used();
        if (fe == 1 || fe % stride_ == 0 || fe == meter_.limit()) checkpoint(fe);
    }

    void finish() {
        const std::size_t fe = meter_.used();
        record_.fe_consumed = fe;
        if (fe > 0 && (record_.checkpoints.empty() || record_.checkpoints.back().fe != fe)) {
            checkpoint(fe);
        }
    }

    double best() const { return has_best_ ? best_ : kInf; }

private:
    void checkpoint(std::size_t fe) {
        if (test_stale_) {
            best_test_ = problem_.test_loss(record_.final_params);
            test_stale_ = false;
        }
        record_.checkpoints.push_back({fe, best_, best_test_});
    }

    const Problem& problem_;
    const BudgetMeter& meter_;
    RunRecord& record_;
    std::size_t stride_;
    bool has_best_ = false;
    double best_ = kInf;
    double best_test_ = kInf;
    bool test_stale_ = false;
};

RunRecord begin_run(const Problem& problem, const BudgetMeter& meter, const OptimizerConfig& config,
                    Algorithm expected, const RunOptions& options) {
    if (config.algorithm != expected) {
        throw InvalidArgument("config is for " + to_string(config.algorithm) + ", not " +
                              to_string(expected));
    }
    config.validate();
    if (meter.used() != 0) throw InvalidArgument("optimizer runs need a fresh budget meter");
    if (options.checkpoint_stride == 0) throw InvalidArgument("checkpoint stride must be positive");
    RunRecord rec;
    rec.instance_label = problem.label();
    rec.algorithm = expected;
    rec.seed = config.seed;
    rec.budget = meter.limit();
    rec.hyperparameters = config.describe();
    return rec;
}

void notify(const RunOptions& options, std::size_t iteration, const BudgetMeter& meter,
            std::span<const double> values, double best) {
    if (options.observer) options.observer(IterationInfo{iteration, meter.used(), values, best});
}

std::string describe_double(double v) { return csv::format_double(v); }

} // namespace

std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::RandomSearch: return "RandomSearch";
    case Algorithm::PSO: return "PSO";
    case Algorithm::DE: return "DE";
    case Algorithm::CMAES: return "CMAES";
    case Algorithm::Adam: return "Adam";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    for (Algorithm a : kAllAlgorithms) {
        if (to_string(a) == name) return a;
    }
    throw LookupError("unknown algorithm '" + std::string(name) + "'");
}

bool is_population_based(Algorithm a) noexcept {
    return a == Algorithm::PSO || a == Algorithm::DE || a == Algorithm::CMAES;
}

OptimizerConfig OptimizerConfig::defaults(Algorithm a, std::uint64_t seed) {
    OptimizerConfig c;
    c.algorithm = a;
    c.seed = seed;
    return c;
}

void OptimizerConfig::validate() const {
    auto fail = [this](const std::string& msg) {
        throw InvalidArgument(to_string(algorithm) + ": " + msg);
    };
    switch (algorithm) {
    case Algorithm::RandomSearch:
        break;
    case Algorithm::PSO:
        if (pso.swarm_size < 2) fail("swarm size must be at least 2");
        if (!(pso.inertia >= 0.0 && pso.inertia < 1.0)) fail("inertia must lie in [0, 1)");
        if (!(pso.cognitive >= 0.0) || !(pso.social >= 0.0)) fail("coefficients must be >= 0");
        break;
    case Algorithm::DE:
        if (de.population < 4) fail("population must be at least 4");
        if (!(de.scale_factor > 0.0 && de.scale_factor <= 2.0)) fail("F must lie in (0, 2]");
        break;
    case Algorithm::CMAES:
        if (cmaes.population == 1) fail("population must be at least 2");
        if (!(cmaes.sigma0 > 0.0) || !std::isfinite(cmaes.sigma0)) fail("sigma0 must be positive");
        break;
    case Algorithm::Adam:
        if (!(adam.learning_rate > 0.0)) fail("learning rate must be positive");
        if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
        if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
        if (!(adam.epsilon > 0.0)) fail("epsilon must be positive");
        break;
    }
}

std::map<std::string, std::string> OptimizerConfig::describe() const {
    std::map<std::string, std::string> h;
    switch (algorithm) {
    case Algorithm::RandomSearch:
        h["proposal"] = to_string(random_search.proposal);
        h["fe_accounting"] = "1 FE per candidate";
        break;
    case Algorithm::PSO:
        h["swarm_size"] = std::to_string(pso.swarm_size);
        h["inertia"] = describe_double(pso.inertia);
        h["cognitive"] = describe_double(pso.cognitive);
        h["social"] = describe_double(pso.social);
        h["init"] = "normal_unit";
        h["fe_accounting"] = "1 FE per particle evaluation";
        break;
    case Algorithm::DE:
        h["population"] = std::to_string(de.population);
        h["scale_factor"] = describe_double(de.scale_factor);
        h["crossover"] = "two_point";
        h["init"] = "normal_unit";
        h["fe_accounting"] = "1 FE per trial vector";
        break;
    case Algorithm::CMAES:
        h["population"] = cmaes.population == 0 ? "default" : std::to_string(cmaes.population);
        h["sigma0"] = describe_double(cmaes.sigma0);
        h["mean0"] = "zero";
        h["fe_accounting"] = "1 FE per sampled candidate";
        break;
    case Algorithm::Adam:
        h["learning_rate"] = describe_double(adam.learning_rate);
        h["beta1"] = describe_double(adam.beta1);
        h["beta2"] = describe_double(adam.beta2);
        h["epsilon"] = describe_double(adam.epsilon);
        h["init"] = adam.initial_point ? "explicit" : to_string(adam.init);
        h["fe_accounting"] = "1 FE per full-batch step (forward and backward)";
        break;
    }
    return h;
}

const Checkpoint* RunRecord::checkpoint_at(std::size_t fe) const {
    auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), fe,
                               [](const Checkpoint& c, std::size_t v) { return c.fe < v; });
    return (it != checkpoints.end() && it->fe == fe) ? &*it : nullptr;
}

double RunRecord::final_test_mse() const {
    if (checkpoints.empty()) throw InvalidArgument(instance_label + ": run has no checkpoints");
    return checkpoints.back().test_mse;
}

ParameterVector initial_point(const Problem& problem, std::uint64_t seed, InitScheme scheme) {
    if (const auto* inst = dynamic_cast<const ProblemInstance*>(&problem)) {
        return init_weights(inst->architecture(), seed, scheme);
    }
    ParameterVector p(problem.dimension());
    Rng rng(seed);
    if (scheme == InitScheme::NormalUnit) {
        for (double& v : p) v = rng.normal();
    } else {
        const double bound = 1.0 / std::sqrt(static_cast<double>(p.size()));
        for (double& v : p) v = rng.uniform(-bound, bound);
    }
    return p;
}

ParameterVector two_point_crossover(std::span<const double> parent, std::span<const double> mutant,
                                    std::size_t cut_lo, std::size_t cut_hi) {
    if (parent.size() != mutant.size()) throw DimensionError("crossover: length mismatch");
    if (cut_lo > cut_hi || cut_hi > parent.size()) throw InvalidArgument("crossover: bad cuts");
    ParameterVector trial(parent.begin(), parent.end());
    std::copy(mutant.begin() + static_cast<std::ptrdiff_t>(cut_lo),
              mutant.begin() + static_cast<std::ptrdiff_t>(cut_hi),
              trial.begin() + static_cast<std::ptrdiff_t>(cut_lo));
    return trial;
}

// ---------------------------------------------------------------------------
// Random search

RunRecord run_random_search(const Problem& problem, BudgetMeter& meter,
                            const OptimizerConfig& config, const RunOptions& options) {
    RunRecord rec = begin_run(problem, meter, config, Algorithm::RandomSearch, options);
    Tracker tracker(problem, meter, rec, options.checkpoint_stride);
    Rng rng(config.seed);
    while (!meter.exhausted()) {
        const auto x = initial_point(problem, rng.next_u64(), config.random_search.proposal);
        tracker.observe(x, eval_train(problem, meter, x));
    }
    tracker.finish();
    return rec;
}

// ---------------------------------------------------------------------------
// PSO

RunRecord run_pso(const Problem& problem, BudgetMeter& meter, const OptimizerConfig& config,
                  const RunOptions& options) {
    RunRecord rec = begin_run(problem, meter, config, Algorithm::PSO, options);
    Tracker tracker(problem, meter, rec, options.checkpoint_stride);
    const auto& hp = config.pso;
    const std::size_t dim = problem.dimension();
    const std::size_t n = hp.swarm_size;
    Rng rng(config.seed);

    std::vector<ParameterVector> x(n), v(n, ParameterVector(dim, 0.0)), pbest(n);
    std::vector<double> pbest_value(n, kInf);
    ParameterVector gbest;
    double gbest_value = kInf;

    // Particles are evaluated in index order; the global best is refreshed
    // after every evaluation so the run can stop exactly at the budget.
    auto evaluate = [&](std::size_t i) {
        const double f = eval_train(problem, meter, x[i]);
        tracker.observe(x[i], f);
        if (f < pbest_value[i] || pbest[i].empty()) {
            pbest_value[i] = f;
            pbest[i] = x[i];
        }
        if (f < gbest_value || gbest.empty()) {
            gbest_value = f;
            gbest = x[i];
        }
    };

    for (std::size_t i = 0; i < n && !meter.exhausted(); ++i) {
        x[i].resize(dim);
        for (double& c : x[i]) c = rng.normal();
        evaluate(i);
    }
    std::size_t iteration = 0;
    notify(options, iteration, meter, pbest_value, gbest_value);
    while (!meter.exhausted()) {
        ++iteration;
        for (std::size_t i = 0; i < n && !meter.exhausted(); ++i) {
            for (std::size_t d = 0; d < dim; ++d) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                v[i][d] = hp.inertia * v[i][d] + hp.cognitive * r1 * (pbest[i][d] - x[i][d]) +
                          hp.social * r2 * (gbest[d] - x[i][d]);
                x[i][d] += v[i][d];
            }
            evaluate(i);
        }
        notify(options, iteration, meter, pbest_value, gbest_value);
    }
    tracker.finish();
    return rec;
}

// ---------------------------------------------------------------------------
// DE

RunRecord run_de(const Problem& problem, BudgetMeter& meter, const OptimizerConfig& config,
                 const RunOptions& options) {
    RunRecord rec = begin_run(problem, meter, config, Algorithm::DE, options);
    Tracker tracker(problem, meter, rec, options.checkpoint_stride);
    const auto& hp = config.de;
    const std::size_t dim = problem.dimension();
    const std::size_t n = hp.population;
    Rng rng(config.seed);

    std::vector<ParameterVector> pop(n, ParameterVector(dim));
    std::vector<double> fitness(n, kInf);
    for (std::size_t i = 0; i < n && !meter.exhausted(); ++i) {
        for (double& c : pop[i]) c = rng.normal();
        fitness[i] = eval_train(problem, meter, pop[i]);
        tracker.observe(pop[i], fitness[i]);
    }
    std::size_t generation = 0;
    notify(options, generation, meter, fitness, tracker.best());

    ParameterVector mutant(dim);
    while (!meter.exhausted()) {
        ++generation;
        for (std::size_t i = 0; i < n && !meter.exhausted(); ++i) {
            std::size_t a, b, c;
            do { a = rng.below(n); } while (a == i);
            do { b = rng.below(n); } while (b == i || b == a);
            do { c = rng.below(n); } while (c == i || c == a || c == b);
            for (std::size_t d = 0; d < dim; ++d) {
                mutant[d] = pop[a][d] + hp.scale_factor * (pop[b][d] - pop[c][d]);
            }
            // Two distinct cut points in {0..dim}; the segment between them
            // comes from the mutant, so at least one coordinate changes.
            std::size_t lo = rng.below(dim + 1);
            std::size_t hi = rng.below(dim);
            if (hi >= lo) ++hi;
            if (lo > hi) std::swap(lo, hi);
            auto trial = two_point_crossover(pop[i], mutant, lo, hi);
            const double f = eval_train(problem, meter, trial);
            tracker.observe(trial, f);
            if (f <= fitness[i]) {
                pop[i] = std::move(trial);
                fitness[i] = f;
            }
        }
        notify(options, generation, meter, fitness,
               *std::min_element(fitness.begin(), fitness.end()));
    }
    tracker.finish();
    return rec;
}

// ---------------------------------------------------------------------------
// CMA-ES

struct Cmaes::Impl {
    using Vec = Eigen::VectorXd;
    using Mat = Eigen::MatrixXd;

    std::size_t n;
    std::size_t lambda;
    std::size_t mu;
    Vec weights;
    double mueff, cc, cs, c1, cmu, damps, chi_n;

    Vec mean;
    double sigma;
    double sigma0;
    Mat C, B;
    Vec D; // square roots of the eigenvalues
    Vec pc, ps;
    std::size_t generation = 0;
    std::size_t eigen_generation = 0;
    std::size_t resets = 0;

    Rng rng;
    std::vector<ParameterVector> candidates;
    std::vector<Vec> steps; // (x - mean) / sigma per candidate

    Impl(std::span<const double> m0, double s0, std::size_t lam, std::uint64_t seed)
        : n(m0.size()), lambda(lam), mu(lam / 2), sigma(s0), sigma0(s0), rng(seed) {
        if (n == 0) throw InvalidArgument("CMA-ES: zero dimension");
        if (lambda < 2) throw InvalidArgument("CMA-ES: lambda must be at least 2");
        weights.resize(static_cast<Eigen::Index>(mu));
        for (std::size_t i = 0; i < mu; ++i) {
            weights[static_cast<Eigen::Index>(i)] =
                std::log(static_cast<double>(mu) + 0.5) - std::log(static_cast<double>(i + 1));
        }
        weights /= weights.sum();
        mueff = 1.0 / weights.squaredNorm();
        const double N = static_cast<double>(n);
        cc = (4.0 + mueff / N) / (N + 4.0 + 2.0 * mueff / N);
        cs = (mueff + 2.0) / (N + mueff + 5.0);
        c1 = 2.0 / ((N + 1.3) * (N + 1.3) + mueff);
        cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((N + 2.0) * (N + 2.0) + mueff));
        damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (N + 1.0)) - 1.0) + cs;
        chi_n = std::sqrt(N) * (1.0 - 1.0 / (4.0 * N) + 1.0 / (21.0 * N * N));

        mean = Eigen::Map<const Vec>(m0.data(), static_cast<Eigen::Index>(n));
        reset_covariance();
        pc = Vec::Zero(static_cast<Eigen::Index>(n));
        ps = Vec::Zero(static_cast<Eigen::Index>(n));
    }

    void reset_covariance() {
        const auto N = static_cast<Eigen::Index>(n);
        C = Mat::Identity(N, N);
        B = Mat::Identity(N, N);
        D = Vec::Ones(N);
    }

    void degenerate() {
        ++resets;
        reset_covariance();
        pc.setZero();
        ps.setZero();
        if (!(std::isfinite(sigma) && sigma > 0.0)) sigma = sigma0;
    }

    void decompose() {
        C = C.triangularView<Eigen::Upper>().toDenseMatrix().selfadjointView<Eigen::Upper>();
        if (!C.allFinite()) {
            degenerate();
            return;
        }
        Eigen::SelfAdjointEigenSolver<Mat> solver(C);
        if (solver.info() != Eigen::Success) {
            degenerate();
            return;
        }
        const Vec& ev = solver.eigenvalues();
        const double lo = ev.minCoeff();
        const double hi = ev.maxCoeff();
        if (!(lo > 0.0) || !std::isfinite(hi) || hi / lo > 1e14) {
            degenerate();
            return;
        }
        B = solver.eigenvectors();
        D = ev.cwiseSqrt();
    }

    const std::vector<ParameterVector>& ask() {
        const auto N = static_cast<Eigen::Index>(n);
        candidates.assign(lambda, ParameterVector(n));
        steps.assign(lambda, Vec(N));
        Vec z(N);
        for (std::size_t k = 0; k < lambda; ++k) {
            for (Eigen::Index d = 0; d < N; ++d) z[d] = rng.normal();
            steps[k] = B * D.cwiseProduct(z);
            Eigen::Map<Vec>(candidates[k].data(), N) = mean + sigma * steps[k];
        }
        return candidates;
    }

    void tell(std::span<const double> fitness) {
        if (fitness.size() != lambda || candidates.size() != lambda) {
            throw InvalidArgument("CMA-ES: tell() needs one fitness per candidate of the last ask()");
        }
        const auto N = static_cast<Eigen::Index>(n);
        std::vector<std::size_t> order(lambda);
        std::iota(order.begin(), order.end(), std::size_t{0});
        // NaN sorts last.
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double fa = fitness[a], fb = fitness[b];
            if (std::isnan(fa)) return false;
            if (std::isnan(fb)) return true;
            return fa < fb;
        });

        Vec y_w = Vec::Zero(N);
        for (std::size_t i = 0; i < mu; ++i) y_w += weights[static_cast<Eigen::Index>(i)] * steps[order[i]];
        mean += sigma * y_w;
        ++generation;

        // C^{-1/2} y_w = B D^{-1} B^T y_w
        const Vec inv_sqrt_y = B * (B.transpose() * y_w).cwiseQuotient(D);
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * inv_sqrt_y;
        const double ps_norm = ps.norm();
        const double hsig_lhs =
            ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * static_cast<double>(generation))) / chi_n;
        const bool hsig = hsig_lhs < 1.4 + 2.0 / (static_cast<double>(n) + 1.0);
        pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

        Mat rank_mu = Mat::Zero(N, N);
        for (std::size_t i = 0; i < mu; ++i) {
            const Vec& y = steps[order[i]];
            rank_mu.selfadjointView<Eigen::Upper>().rankUpdate(y, weights[static_cast<Eigen::Index>(i)]);
        }
        const double delta_h = hsig ? 0.0 : cc * (2.0 - cc);
        C *= (1.0 - c1 - cmu + c1 * delta_h);
        C.selfadjointView<Eigen::Upper>().rankUpdate(pc, c1);
        C.triangularView<Eigen::Upper>() += cmu * rank_mu;

        sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));
        if (!std::isfinite(sigma) || sigma <= 0.0 || !mean.allFinite()) {
            if (!mean.allFinite()) mean.setZero();
            degenerate();
            return;
        }

        const double gap = static_cast<double>(lambda) / (c1 + cmu) / static_cast<double>(n) / 10.0;
        if (static_cast<double>(generation - eigen_generation) > gap) {
            eigen_generation = generation;
            decompose();
        } else {
            // keep the lower triangle in sync for covariance()
            C.triangularView<Eigen::StrictlyLower>() = C.transpose();
        }
    }
};

Cmaes::Cmaes(std::span<const double> mean, double sigma, std::size_t lambda, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(mean, sigma, lambda, seed)) {}
Cmaes::~Cmaes() = default;
Cmaes::Cmaes(Cmaes&&) noexcept = default;
Cmaes& Cmaes::operator=(Cmaes&&) noexcept = default;

std::size_t Cmaes::default_lambda(std::size_t dimension) {
    return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(dimension))));
}

std::size_t Cmaes::dimension() const { return impl_->n; }
std::size_t Cmaes::lambda() const { return impl_->lambda; }
std::size_t Cmaes::mu() const { return impl_->mu; }
std::span<const double> Cmaes::weights() const {
    return {impl_->weights.data(), static_cast<std::size_t>(impl_->weights.size())};
}
const std::vector<ParameterVector>& Cmaes::ask() { return impl_->ask(); }
void Cmaes::tell(std::span<const double> fitness) { impl_->tell(fitness); }
std::vector<double> Cmaes::mean() const {
    return {impl_->mean.data(), impl_->mean.data() + impl_->mean.size()};
}
double Cmaes::sigma() const { return impl_->sigma; }
std::vector<double> Cmaes::covariance() const {
    std::vector<double> out(impl_->n * impl_->n);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        out.data(), static_cast<Eigen::Index>(impl_->n), static_cast<Eigen::Index>(impl_->n)) =
        impl_->C.selfadjointView<Eigen::Upper>();
    return out;
}
std::size_t Cmaes::generation() const { return impl_->generation; }
std::size_t Cmaes::covariance_resets() const { return impl_->resets; }

RunRecord run_cmaes(const Problem& problem, BudgetMeter& meter, const OptimizerConfig& config,
                    const RunOptions& options) {
    RunRecord rec = begin_run(problem, meter, config, Algorithm::CMAES, options);
    Tracker tracker(problem, meter, rec, options.checkpoint_stride);
    const std::size_t dim = problem.dimension();
    const std::size_t lambda =
        config.cmaes.population == 0 ? Cmaes::default_lambda(dim) : config.cmaes.population;
    rec.hyperparameters["population"] = std::to_string(lambda);

    const ParameterVector mean0(dim, 0.0);
    Cmaes es(mean0, config.cmaes.sigma0, lambda, config.seed);
    std::vector<double> fitness(lambda);
    while (!meter.exhausted()) {
        const auto& candidates = es.ask();
        std::size_t evaluated = 0;
        for (; evaluated < lambda && !meter.exhausted(); ++evaluated) {
            fitness[evaluated] = eval_train(problem, meter, candidates[evaluated]);
            tracker.observe(candidates[evaluated], fitness[evaluated]);
        }
        // A generation cut short by the budget is never told: no further
        // evaluations could use the update.
        if (evaluated < lambda) break;
        es.tell(fitness);
        notify(options, es.generation(), meter, fitness, tracker.best());
    }
    rec.covariance_resets = es.covariance_resets();
    tracker.finish();
    return rec;
}

// ---------------------------------------------------------------------------
// Adam

RunRecord run_adam(const Problem& problem, BudgetMeter& meter, const OptimizerConfig& config,
                   const RunOptions& options) {
    RunRecord rec = begin_run(problem, meter, config, Algorithm::Adam, options);
    if (!problem.has_gradient()) throw InvalidArgument(problem.label() + ": Adam needs gradients");
    Tracker tracker(problem, meter, rec, options.checkpoint_stride);
    const auto& hp = config.adam;
    const std::size_t dim = problem.dimension();

    ParameterVector theta =
        hp.initial_point ? *hp.initial_point : initial_point(problem, config.seed, hp.init);
    if (theta.size() != dim) throw DimensionError("Adam: initial point has wrong length");
    ParameterVector grad(dim), m(dim, 0.0), v(dim, 0.0);
    double beta1_t = 1.0, beta2_t = 1.0;
    std::size_t step = 0;
    while (!meter.exhausted()) {
        const double loss = eval_train_with_gradient(problem, meter, theta, grad);
        tracker.observe(theta, loss);
        ++step;
        const bool finite = std::isfinite(loss) &&
                            std::all_of(grad.begin(), grad.end(), [](double g) { return std::isfinite(g); });
        if (!finite) {
            rec.status = RunStatus::Aborted;
            rec.diagnostic = "non-finite loss or gradient at step " + std::to_string(step);
            break;
        }
        beta1_t *= hp.beta1;
        beta2_t *= hp.beta2;
        const double bc1 = 1.0 - beta1_t;
        const double bc2 = 1.0 - beta2_t;
        for (std::size_t d = 0; d < dim; ++d) {
            m[d] = hp.beta1 * m[d] + (1.0 - hp.beta1) * grad[d];
            v[d] = hp.beta2 * v[d] + (1.0 - hp.beta2) * grad[d] * grad[d];
            theta[d] -= hp.learning_rate * (m[d] / bc1) / (std::sqrt(v[d] / bc2) + hp.epsilon);
        }
        if (options.observer) {
            const double l[1] = {loss};
            notify(options, step, meter, l, tracker.best());
        }
    }
    tracker.finish();
    return rec;
}

RunRecord run_optimizer(const Problem& problem, BudgetMeter& meter, const OptimizerConfig& config,
                        const RunOptions& options) {
    switch (config.algorithm) {
    case Algorithm::RandomSearch: return run_random_search(problem, meter, config, options);
    case Algorithm::PSO: return run_pso(problem, meter, config, options);
    case Algorithm::DE: return run_de(problem, meter, config, options);
    case Algorithm::CMAES: return run_cmaes(problem, meter, config, options);
    case Algorithm::Adam: return run_adam(problem, meter, config, options);
    }
    throw InvalidArgument("unknown algorithm");
}

} // namespace cornn
