#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cornn {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    bool operator==(const Interval&) const = default;
};

using Point2 = std::array<double, 2>;
using Domain2 = std::array<Interval, 2>;
using Evaluator = std::function<double(const Point2&)>;

/// A two-dimensional regression target on a rectangular domain.
///
/// Catalog ids run 1..54. Custom functions receive ids from
/// kFirstCustomId upwards.
struct FunctionSpec {
    int id = 0;
    std::string name;
    Domain2 domain{};
    Evaluator evaluator;

    bool contains(const Point2& x) const noexcept {
        return domain[0].contains(x[0]) && domain[1].contains(x[1]);
    }
};

inline constexpr int kCatalogSize = 54;
inline constexpr int kFirstCustomId = 1001;

/// The 54 built-in functions, ordered by id.
const std::vector<FunctionSpec>& catalog();

/// f(x) in native domain units. Throws DomainError for out-of-domain input.
double evaluate(const FunctionSpec& spec, const Point2& x);

/// Adds a custom function to the process-wide registry. Registration must
/// finish before specs are shared across threads.
const FunctionSpec& register_custom(std::string name, Domain2 domain, Evaluator evaluator);

/// Looks up a catalog or custom function. Throws LookupError.
const FunctionSpec& find_function(int id);
const FunctionSpec& find_function(std::string_view name);

/// Catalog and custom functions in id order.
std::vector<const FunctionSpec*> registered_functions();

/// Name made safe for file names: "Schwefel 2.22" -> "Schwefel_2_22".
std::string file_stem(const FunctionSpec& spec);

/// CSV manifest with header id,name,x1_lo,x1_hi,x2_lo,x2_hi.
void write_catalog_csv(std::ostream& out);

} // namespace cornn
