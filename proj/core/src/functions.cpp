#include "cornn/functions.hpp"

#include "cornn/csv.hpp"
#include "cornn/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <ostream>

namespace cornn {
namespace {

using std::abs;
using std::cos;
using std::exp;
using std::sin;
using std::sqrt;

constexpr double pi = std::numbers::pi;

double sq(double v) { return v * v; }

Domain2 square(double lo, double hi) { return {Interval{lo, hi}, Interval{lo, hi}}; }
Domain2 box(double lo1, double hi1, double lo2, double hi2) {
    return {Interval{lo1, hi1}, Interval{lo2, hi2}};
}

std::vector<FunctionSpec> build_catalog() {
    std::vector<FunctionSpec> c;
    c.reserve(kCatalogSize);
    auto add = [&c](std::string name, Domain2 domain, Evaluator f) {
        c.push_back(FunctionSpec{static_cast<int>(c.size()) + 1, std::move(name), domain, std::move(f)});
    };

    add("Ackley", square(-32.768, 32.768), [](const Point2& x) {
        const double s1 = 0.5 * (sq(x[0]) + sq(x[1]));
        const double s2 = 0.5 * (cos(2 * pi * x[0]) + cos(2 * pi * x[1]));
        return -20.0 * exp(-0.2 * sqrt(s1)) - exp(s2) + 20.0 + std::numbers::e;
    });
    add("Ackley N.2", square(-32.0, 32.0), [](const Point2& x) {
        return -200.0 * exp(-0.2 * sqrt(sq(x[0]) + sq(x[1])));
    });
    add("Ackley N.3", square(-32.0, 32.0), [](const Point2& x) {
        return -200.0 * exp(-0.2 * sqrt(sq(x[0]) + sq(x[1]))) +
               5.0 * exp(cos(3 * x[0]) + sin(3 * x[1]));
    });
    add("Adjiman", box(-1.0, 2.0, -1.0, 1.0), [](const Point2& x) {
        return cos(x[0]) * sin(x[1]) - x[0] / (sq(x[1]) + 1.0);
    });
    add("Alpine N.1", square(-10.0, 10.0), [](const Point2& x) {
        return abs(x[0] * sin(x[0]) + 0.1 * x[0]) + abs(x[1] * sin(x[1]) + 0.1 * x[1]);
    });
    add("Alpine N.2", square(0.0, 10.0), [](const Point2& x) {
        return sqrt(x[0]) * sin(x[0]) * sqrt(x[1]) * sin(x[1]);
    });
    add("Bartels Conn", square(-500.0, 500.0), [](const Point2& x) {
        return abs(sq(x[0]) + sq(x[1]) + x[0] * x[1]) + abs(sin(x[0])) + abs(cos(x[1]));
    });
    add("Beale", square(-4.5, 4.5), [](const Point2& x) {
        return sq(1.5 - x[0] + x[0] * x[1]) + sq(2.25 - x[0] + x[0] * sq(x[1])) +
               sq(2.625 - x[0] + x[0] * x[1] * x[1] * x[1]);
    });
    add("Bird", square(-2 * pi, 2 * pi), [](const Point2& x) {
        return sin(x[0]) * exp(sq(1.0 - cos(x[1]))) + cos(x[1]) * exp(sq(1.0 - sin(x[0]))) +
               sq(x[0] - x[1]);
    });
    add("Bohachevsky N.1", square(-100.0, 100.0), [](const Point2& x) {
        return sq(x[0]) + 2 * sq(x[1]) - 0.3 * cos(3 * pi * x[0]) - 0.4 * cos(4 * pi * x[1]) + 0.7;
    });
    add("Bohachevsky N.2", square(-100.0, 100.0), [](const Point2& x) {
        return sq(x[0]) + 2 * sq(x[1]) - 0.3 * cos(3 * pi * x[0]) * cos(4 * pi * x[1]) + 0.3;
    });
    add("Booth", square(-10.0, 10.0), [](const Point2& x) {
        return sq(x[0] + 2 * x[1] - 7) + sq(2 * x[0] + x[1] - 5);
    });
    add("Branin", box(-5.0, 10.0, 0.0, 15.0), [](const Point2& x) {
        const double b = 5.1 / (4 * pi * pi);
        const double c = 5.0 / pi;
        const double t = 1.0 / (8 * pi);
        return sq(x[1] - b * sq(x[0]) + c * x[0] - 6.0) + 10.0 * (1 - t) * cos(x[0]) + 10.0;
    });
    add("Brent", square(-20.0, 0.0), [](const Point2& x) {
        return sq(x[0] + 10) + sq(x[1] + 10) + exp(-sq(x[0]) - sq(x[1]));
    });
    add("Bukin N.6", box(-15.0, -5.0, -3.0, 3.0), [](const Point2& x) {
        return 100.0 * sqrt(abs(x[1] - 0.01 * sq(x[0]))) + 0.01 * abs(x[0] + 10.0);
    });
    add("Cross-in-Tray", square(-10.0, 10.0), [](const Point2& x) {
        const double r = sqrt(sq(x[0]) + sq(x[1]));
        const double inner = abs(sin(x[0]) * sin(x[1]) * exp(abs(100.0 - r / pi))) + 1.0;
        return -0.0001 * std::pow(inner, 0.1);
    });
    add("Deckkers-Aarts", square(-20.0, 20.0), [](const Point2& x) {
        const double r2 = sq(x[0]) + sq(x[1]);
        return 1e5 * sq(x[0]) + sq(x[1]) - sq(r2) + 1e-5 * std::pow(r2, 4);
    });
    add("Drop-Wave", square(-5.12, 5.12), [](const Point2& x) {
        const double r2 = sq(x[0]) + sq(x[1]);
        return -(1.0 + cos(12.0 * sqrt(r2))) / (0.5 * r2 + 2.0);
    });
    add("Dixon-Price", square(-10.0, 10.0), [](const Point2& x) {
        return sq(x[0] - 1.0) + 2.0 * sq(2.0 * sq(x[1]) - x[0]);
    });
    add("Easom", square(-10.0, 10.0), [](const Point2& x) {
        return -cos(x[0]) * cos(x[1]) * exp(-(sq(x[0] - pi) + sq(x[1] - pi)));
    });
    add("Egg Crate", square(-5.0, 5.0), [](const Point2& x) {
        return sq(x[0]) + sq(x[1]) + 25.0 * (sq(sin(x[0])) + sq(sin(x[1])));
    });
    add("Egg Holder", square(-512.0, 512.0), [](const Point2& x) {
        return -(x[1] + 47.0) * sin(sqrt(abs(x[1] + x[0] / 2.0 + 47.0))) -
               x[0] * sin(sqrt(abs(x[0] - (x[1] + 47.0))));
    });
    add("Goldstein-Price", square(-2.0, 2.0), [](const Point2& x) {
        const double a = 1.0 + sq(x[0] + x[1] + 1.0) *
                                   (19 - 14 * x[0] + 3 * sq(x[0]) - 14 * x[1] + 6 * x[0] * x[1] +
                                    3 * sq(x[1]));
        const double b = 30.0 + sq(2 * x[0] - 3 * x[1]) *
                                    (18 - 32 * x[0] + 12 * sq(x[0]) + 48 * x[1] -
                                     36 * x[0] * x[1] + 27 * sq(x[1]));
        return a * b;
    });
    add("Griewank", square(-600.0, 600.0), [](const Point2& x) {
        return 1.0 + (sq(x[0]) + sq(x[1])) / 4000.0 - cos(x[0]) * cos(x[1] / std::sqrt(2.0));
    });
    add("Holder Table", square(-10.0, 10.0), [](const Point2& x) {
        const double r = sqrt(sq(x[0]) + sq(x[1]));
        return -abs(sin(x[0]) * cos(x[1]) * exp(abs(1.0 - r / pi)));
    });
    add("Himmelblau", square(-5.0, 5.0), [](const Point2& x) {
        return sq(sq(x[0]) + x[1] - 11.0) + sq(x[0] + sq(x[1]) - 7.0);
    });
    add("Hosaki", box(0.0, 5.0, 0.0, 6.0), [](const Point2& x) {
        const double p = 1.0 - 8.0 * x[0] + 7.0 * sq(x[0]) - 7.0 / 3.0 * x[0] * sq(x[0]) +
                         0.25 * sq(sq(x[0]));
        return p * sq(x[1]) * exp(-x[1]);
    });
    add("Leon", square(-1.2, 1.2), [](const Point2& x) {
        return 100.0 * sq(x[1] - x[0] * x[0] * x[0]) + sq(1.0 - x[0]);
    });
    add("Levy", square(-10.0, 10.0), [](const Point2& x) {
        const double w1 = 1.0 + (x[0] - 1.0) / 4.0;
        const double w2 = 1.0 + (x[1] - 1.0) / 4.0;
        return sq(sin(pi * w1)) + sq(w1 - 1.0) * (1.0 + 10.0 * sq(sin(pi * w1 + 1.0))) +
               sq(w2 - 1.0) * (1.0 + sq(sin(2 * pi * w2)));
    });
    add("Levy N.13", square(-10.0, 10.0), [](const Point2& x) {
        return sq(sin(3 * pi * x[0])) + sq(x[0] - 1.0) * (1.0 + sq(sin(3 * pi * x[1]))) +
               sq(x[1] - 1.0) * (1.0 + sq(sin(2 * pi * x[1])));
    });
    add("Matyas", square(-10.0, 10.0), [](const Point2& x) {
        return 0.26 * (sq(x[0]) + sq(x[1])) - 0.48 * x[0] * x[1];
    });
    add("McCormick", box(-1.5, 4.0, -3.0, 4.0), [](const Point2& x) {
        return sin(x[0] + x[1]) + sq(x[0] - x[1]) - 1.5 * x[0] + 2.5 * x[1] + 1.0;
    });
    add("Michalewicz", square(0.0, pi), [](const Point2& x) {
        return -sin(x[0]) * std::pow(sin(sq(x[0]) / pi), 20) -
               sin(x[1]) * std::pow(sin(2.0 * sq(x[1]) / pi), 20);
    });
    add("Periodic", square(-10.0, 10.0), [](const Point2& x) {
        return 1.0 + sq(sin(x[0])) + sq(sin(x[1])) - 0.1 * exp(-sq(x[0]) - sq(x[1]));
    });
    add("Powell Sum", square(-1.0, 1.0), [](const Point2& x) {
        return std::pow(abs(x[0]), 2) + std::pow(abs(x[1]), 3);
    });
    add("Qing", square(-500.0, 500.0), [](const Point2& x) {
        return sq(sq(x[0]) - 1.0) + sq(sq(x[1]) - 2.0);
    });
    add("Quartic", square(-1.28, 1.28), [](const Point2& x) {
        return sq(sq(x[0])) + 2.0 * sq(sq(x[1]));
    });
    add("Rastrigin", square(-5.12, 5.12), [](const Point2& x) {
        return 20.0 + sq(x[0]) - 10.0 * cos(2 * pi * x[0]) + sq(x[1]) - 10.0 * cos(2 * pi * x[1]);
    });
    add("Rosenbrock", square(-5.0, 10.0), [](const Point2& x) {
        return 100.0 * sq(x[1] - sq(x[0])) + sq(1.0 - x[0]);
    });
    add("Salomon", square(-100.0, 100.0), [](const Point2& x) {
        const double r = sqrt(sq(x[0]) + sq(x[1]));
        return 1.0 - cos(2 * pi * r) + 0.1 * r;
    });
    add("Schaffer N.2", square(-100.0, 100.0), [](const Point2& x) {
        const double d = 1.0 + 0.001 * (sq(x[0]) + sq(x[1]));
        return 0.5 + (sq(sin(sq(x[0]) - sq(x[1]))) - 0.5) / sq(d);
    });
    add("Schaffer N.4", square(-100.0, 100.0), [](const Point2& x) {
        const double d = 1.0 + 0.001 * (sq(x[0]) + sq(x[1]));
        return 0.5 + (sq(cos(sin(abs(sq(x[0]) - sq(x[1]))))) - 0.5) / sq(d);
    });
    add("Schwefel 2.22", square(-100.0, 100.0), [](const Point2& x) {
        return abs(x[0]) + abs(x[1]) + abs(x[0]) * abs(x[1]);
    });
    add("Schwefel 2.23", square(-10.0, 10.0), [](const Point2& x) {
        return std::pow(x[0], 10) + std::pow(x[1], 10);
    });
    add("Schwefel 2.26", square(-500.0, 500.0), [](const Point2& x) {
        return 418.9828872724339 * 2.0 - x[0] * sin(sqrt(abs(x[0]))) - x[1] * sin(sqrt(abs(x[1])));
    });
    add("Shubert", square(-10.0, 10.0), [](const Point2& x) {
        double s1 = 0.0, s2 = 0.0;
        for (int j = 1; j <= 5; ++j) {
            s1 += j * cos((j + 1) * x[0] + j);
            s2 += j * cos((j + 1) * x[1] + j);
        }
        return s1 * s2;
    });
    add("Six-Hump Camel", box(-3.0, 3.0, -2.0, 2.0), [](const Point2& x) {
        const double a = sq(x[0]);
        return (4.0 - 2.1 * a + a * a / 3.0) * a + x[0] * x[1] + (-4.0 + 4.0 * sq(x[1])) * sq(x[1]);
    });
    add("Sphere", square(-5.12, 5.12), [](const Point2& x) { return sq(x[0]) + sq(x[1]); });
    add("Styblinski-Tang", square(-5.0, 5.0), [](const Point2& x) {
        auto term = [](double v) { return v * v * v * v - 16.0 * v * v + 5.0 * v; };
        return 0.5 * (term(x[0]) + term(x[1]));
    });
    add("Sum Squares", square(-10.0, 10.0), [](const Point2& x) {
        return sq(x[0]) + 2.0 * sq(x[1]);
    });
    add("Three-Hump Camel", square(-5.0, 5.0), [](const Point2& x) {
        const double a = sq(x[0]);
        return 2.0 * a - 1.05 * a * a + a * a * a / 6.0 + x[0] * x[1] + sq(x[1]);
    });
    add("Trid", square(-4.0, 4.0), [](const Point2& x) {
        return sq(x[0] - 1.0) + sq(x[1] - 1.0) - x[0] * x[1];
    });
    add("Xin-She Yang N.2", square(-2 * pi, 2 * pi), [](const Point2& x) {
        return (abs(x[0]) + abs(x[1])) * exp(-(sin(sq(x[0])) + sin(sq(x[1]))));
    });
    add("Zakharov", square(-5.0, 10.0), [](const Point2& x) {
        const double s = 0.5 * x[0] + x[1];
        return sq(x[0]) + sq(x[1]) + sq(s) + sq(sq(s));
    });
    return c;
}

struct Registry {
    std::deque<FunctionSpec> custom;
};

Registry& registry() {
    static Registry r;
    return r;
}

std::string format_bound(double v) { return csv::format_shortest(v); }

} // namespace

const std::vector<FunctionSpec>& catalog() {
    static const std::vector<FunctionSpec> c = build_catalog();
    return c;
}

double evaluate(const FunctionSpec& spec, const Point2& x) {
    for (std::size_t d = 0; d < 2; ++d) {
        if (!spec.domain[d].contains(x[d])) {
            throw DomainError("evaluate(" + spec.name + "): coordinate x" + std::to_string(d + 1) +
                              " = " + format_bound(x[d]) + " outside [" +
                              format_bound(spec.domain[d].lo) + ", " +
                              format_bound(spec.domain[d].hi) + "]");
        }
    }
    return spec.evaluator(x);
}

const FunctionSpec& register_custom(std::string name, Domain2 domain, Evaluator evaluator) {
    if (name.empty()) throw InvalidArgument("register_custom: empty name");
    for (std::size_t d = 0; d < 2; ++d) {
        const auto& iv = domain[d];
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
            throw InvalidArgument("register_custom(" + name + "): interval for x" +
                                  std::to_string(d + 1) + " must satisfy lo < hi");
        }
    }
    if (!evaluator) throw InvalidArgument("register_custom(" + name + "): empty evaluator");
    for (const auto* spec : registered_functions()) {
        if (spec->name == name) {
            throw InvalidArgument("register_custom: duplicate function name '" + name + "'");
        }
    }
    auto& custom = registry().custom;
    const int id = kFirstCustomId + static_cast<int>(custom.size());
    custom.push_back(FunctionSpec{id, std::move(name), domain, std::move(evaluator)});
    return custom.back();
}

const FunctionSpec& find_function(int id) {
    if (id >= 1 && id <= kCatalogSize) return catalog()[static_cast<std::size_t>(id - 1)];
    const auto& custom = registry().custom;
    if (id >= kFirstCustomId && id - kFirstCustomId < static_cast<int>(custom.size())) {
        return custom[static_cast<std::size_t>(id - kFirstCustomId)];
    }
    throw LookupError("unknown function id " + std::to_string(id));
}

const FunctionSpec& find_function(std::string_view name) {
    for (const auto* spec : registered_functions()) {
        if (spec->name == name) return *spec;
    }
    throw LookupError("unknown function name '" + std::string(name) + "'");
}

std::vector<const FunctionSpec*> registered_functions() {
    std::vector<const FunctionSpec*> out;
    for (const auto& s : catalog()) out.push_back(&s);
    for (const auto& s : registry().custom) out.push_back(&s);
    return out;
}

std::string file_stem(const FunctionSpec& spec) {
    std::string out;
    bool pending_sep = false;
    for (char ch : spec.name) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            if (pending_sep && !out.empty()) out.push_back('_');
            pending_sep = false;
            out.push_back(ch);
        } else {
            pending_sep = true;
        }
    }
    return out;
}

void write_catalog_csv(std::ostream& out) {
    out << "id,name,x1_lo,x1_hi,x2_lo,x2_hi\n";
    for (const auto* spec : registered_functions()) {
        out << spec->id << ',' << spec->name << ',' << format_bound(spec->domain[0].lo) << ','
            << format_bound(spec->domain[0].hi) << ',' << format_bound(spec->domain[1].lo) << ','
            << format_bound(spec->domain[1].hi) << '\n';
    }
}

} // namespace cornn
