#include "cornn/network.hpp"

#include "cornn/error.hpp"
#include "cornn/rng.hpp"

#include <algorithm>
#include <cmath>

namespace cornn {

namespace {

struct LayerShape {
    std::size_t fan_in;
    std::size_t fan_out;
};

std::vector<LayerShape> layer_shapes(const Architecture& arch) {
    std::vector<LayerShape> shapes;
    shapes.reserve(arch.hidden_layers + 1);
    std::size_t prev = arch.input_dim;
    for (std::size_t l = 0; l < arch.hidden_layers; ++l) {
        shapes.push_back({prev, arch.hidden_width});
        prev = arch.hidden_width;
    }
    shapes.push_back({prev, arch.output_dim});
    return shapes;
}

void validate(const Architecture& arch) {
    if (arch.input_dim == 0 || arch.hidden_layers == 0 || arch.hidden_width == 0 ||
        arch.output_dim == 0) {
        throw InvalidArgument("architecture dimensions must be positive");
    }
}

void check_params(const Architecture& arch, std::span<const double> params) {
    const std::size_t expected = param_count(arch);
    if (params.size() != expected) {
        throw DimensionError("parameter vector has " + std::to_string(params.size()) +
                             " entries, architecture needs " + std::to_string(expected));
    }
}

std::size_t check_batch(const Architecture& arch, std::span<const double> params,
                        std::span<const double> inputs, std::span<const double> targets) {
    check_params(arch, params);
    if (arch.output_dim != 1) throw InvalidArgument("batch_mse supports a single output");
    const std::size_t m = targets.size();
    if (m == 0) throw InvalidArgument("batch_mse: empty batch");
    if (inputs.size() != m * arch.input_dim) {
        throw DimensionError("batch has " + std::to_string(inputs.size()) + " input values for " +
                             std::to_string(m) + " targets of dimension " +
                             std::to_string(arch.input_dim));
    }
    return m;
}

inline double activate(Activation a, double z) {
    return a == Activation::Tanh ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

// Derivative expressed through the activation value.
inline double activate_grad(Activation a, double act) {
    return a == Activation::Tanh ? 1.0 - act * act : (act > 0.0 ? 1.0 : 0.0);
}

/// Forward pass keeping every layer's activations. acts[0] is the input,
/// acts[l + 1] the output of hidden layer l.
class Evaluator {
public:
    explicit Evaluator(const Architecture& arch) : arch_(arch), shapes_(layer_shapes(arch)) {
        acts_.resize(arch.hidden_layers + 1);
        acts_[0].resize(arch.input_dim);
        for (std::size_t l = 1; l <= arch.hidden_layers; ++l) acts_[l].resize(arch.hidden_width);
        std::size_t off = 0;
        for (const auto& s : shapes_) {
            offsets_.push_back(off);
            off += s.fan_out * (s.fan_in + 1);
        }
    }

    double run(std::span<const double> params, const double* input) {
        std::copy(input, input + arch_.input_dim, acts_[0].begin());
        const double* w = params.data();
        for (std::size_t l = 0; l < arch_.hidden_layers; ++l) {
            const auto [fan_in, fan_out] = shapes_[l];
            const double* src = acts_[l].data();
            double* dst = acts_[l + 1].data();
            for (std::size_t j = 0; j < fan_out; ++j) {
                double z = w[fan_in];
                for (std::size_t i = 0; i < fan_in; ++i) z += w[i] * src[i];
                dst[j] = activate(arch_.hidden_activation, z);
                w += fan_in + 1;
            }
        }
        const std::size_t fan_in = shapes_.back().fan_in;
        const double* src = acts_[arch_.hidden_layers].data();
        double y = w[fan_in];
        for (std::size_t i = 0; i < fan_in; ++i) y += w[i] * src[i];
        return y;
    }

    // Accumulates d(loss)/d(params) given d(loss)/d(output) for the last run().
    void backward(std::span<const double> params, double d_out, double* grad) {
        const std::size_t n_layers = shapes_.size();
        delta_.assign(1, d_out);
        for (std::size_t l = n_layers; l-- > 0;) {
            const auto [fan_in, fan_out] = shapes_[l];
            const double* w = params.data() + offsets_[l];
            double* g = grad + offsets_[l];
            const std::vector<double>& src = acts_[l];
            next_delta_.assign(fan_in, 0.0);
            for (std::size_t j = 0; j < fan_out; ++j) {
                const double d = delta_[j];
                if (d == 0.0) continue;
                double* gj = g + j * (fan_in + 1);
                const double* wj = w + j * (fan_in + 1);
                for (std::size_t i = 0; i < fan_in; ++i) {
                    gj[i] += d * src[i];
                    next_delta_[i] += d * wj[i];
                }
                gj[fan_in] += d;
            }
            if (l == 0) break;
            for (std::size_t i = 0; i < fan_in; ++i) {
                next_delta_[i] *= activate_grad(arch_.hidden_activation, src[i]);
            }
            delta_.swap(next_delta_);
        }
    }

private:
    const Architecture& arch_;
    std::vector<LayerShape> shapes_;
    std::vector<std::vector<double>> acts_;
    std::vector<std::size_t> offsets_;
    std::vector<double> delta_;
    std::vector<double> next_delta_;
};

} // namespace

Architecture architecture(Topology t) {
    Architecture a;
    switch (t) {
    case Topology::Tanh1: a.hidden_layers = 1; a.hidden_activation = Activation::Tanh; break;
    case Topology::Tanh3: a.hidden_layers = 3; a.hidden_activation = Activation::Tanh; break;
    case Topology::Tanh5: a.hidden_layers = 5; a.hidden_activation = Activation::Tanh; break;
    case Topology::ReLU1: a.hidden_layers = 1; a.hidden_activation = Activation::ReLU; break;
    case Topology::ReLU3: a.hidden_layers = 3; a.hidden_activation = Activation::ReLU; break;
    case Topology::ReLU5: a.hidden_layers = 5; a.hidden_activation = Activation::ReLU; break;
    }
    return a;
}

std::string to_string(Topology t) {
    switch (t) {
    case Topology::Tanh1: return "Tanh1";
    case Topology::Tanh3: return "Tanh3";
    case Topology::Tanh5: return "Tanh5";
    case Topology::ReLU1: return "ReLU1";
    case Topology::ReLU3: return "ReLU3";
    case Topology::ReLU5: return "ReLU5";
    }
    return "?";
}

std::string to_string(Activation a) { return a == Activation::Tanh ? "Tanh" : "ReLU"; }

std::string to_string(InitScheme s) {
    return s == InitScheme::NormalUnit ? "normal_unit" : "fan_in_uniform";
}

Topology parse_topology(std::string_view name) {
    for (Topology t : kAllTopologies) {
        if (to_string(t) == name) return t;
    }
    throw LookupError("unknown topology '" + std::string(name) + "'");
}

std::size_t param_count(const Architecture& arch) {
    validate(arch);
    const std::size_t w = arch.hidden_width;
    return (arch.input_dim + 1) * w + (arch.hidden_layers - 1) * (w + 1) * w +
           (w + 1) * arch.output_dim;
}

std::size_t param_offset(const Architecture& arch, std::size_t layer, std::size_t neuron) {
    validate(arch);
    const auto shapes = layer_shapes(arch);
    if (layer >= shapes.size() || neuron >= shapes[layer].fan_out) {
        throw DimensionError("param_offset: no neuron " + std::to_string(neuron) + " in layer " +
                             std::to_string(layer));
    }
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) off += shapes[l].fan_out * (shapes[l].fan_in + 1);
    return off + neuron * (shapes[layer].fan_in + 1);
}

double forward(const Architecture& arch, std::span<const double> params,
               std::span<const double> input) {
    check_params(arch, params);
    if (arch.output_dim != 1) throw InvalidArgument("forward supports a single output");
    if (input.size() != arch.input_dim) {
        throw DimensionError("input has " + std::to_string(input.size()) + " values, expected " +
                             std::to_string(arch.input_dim));
    }
    Evaluator ev(arch);
    return ev.run(params, input.data());
}

double batch_mse(const Architecture& arch, std::span<const double> params,
                 std::span<const double> inputs, std::span<const double> targets) {
    const std::size_t m = check_batch(arch, params, inputs, targets);
    Evaluator ev(arch);
    double sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
        const double r = ev.run(params, inputs.data() + s * arch.input_dim) - targets[s];
        sum += r * r;
    }
    return sum / static_cast<double>(m);
}

double mse_and_gradient(const Architecture& arch, std::span<const double> params,
                        std::span<const double> inputs, std::span<const double> targets,
                        std::span<double> gradient) {
    const std::size_t m = check_batch(arch, params, inputs, targets);
    if (gradient.size() != params.size()) {
        throw DimensionError("gradient buffer has " + std::to_string(gradient.size()) +
                             " entries, expected " + std::to_string(params.size()));
    }
    std::fill(gradient.begin(), gradient.end(), 0.0);
    Evaluator ev(arch);
    const double scale = 2.0 / static_cast<double>(m);
    double sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
        const double r = ev.run(params, inputs.data() + s * arch.input_dim) - targets[s];
        sum += r * r;
        ev.backward(params, scale * r, gradient.data());
    }
    return sum / static_cast<double>(m);
}

ParameterVector mse_gradient(const Architecture& arch, std::span<const double> params,
                             std::span<const double> inputs, std::span<const double> targets) {
    ParameterVector g(params.size());
    mse_and_gradient(arch, params, inputs, targets, g);
    return g;
}

ParameterVector init_weights(const Architecture& arch, std::uint64_t seed, InitScheme scheme) {
    ParameterVector p(param_count(arch));
    Rng rng(seed);
    if (scheme == InitScheme::NormalUnit) {
        for (double& v : p) v = rng.normal();
        return p;
    }
    auto it = p.begin();
    for (const auto& shape : layer_shapes(arch)) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(shape.fan_in));
        const std::size_t n = shape.fan_out * (shape.fan_in + 1);
        for (std::size_t k = 0; k < n; ++k) *it++ = rng.uniform(-bound, bound);
    }
    return p;
}

} // namespace cornn
