#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cornn {

enum class Activation { Tanh, ReLU };

/// Fully connected feed-forward net with a linear output layer.
struct Architecture {
    std::size_t input_dim = 2;
    std::size_t hidden_layers = 1;
    std::size_t hidden_width = 10;
    Activation hidden_activation = Activation::Tanh;
    std::size_t output_dim = 1;

    bool operator==(const Architecture&) const = default;
};

/// The six canonical topologies: activation x {1, 3, 5} hidden layers of width 10.
enum class Topology { Tanh1, Tanh3, Tanh5, ReLU1, ReLU3, ReLU5 };

inline constexpr Topology kAllTopologies[] = {Topology::Tanh1, Topology::Tanh3, Topology::Tanh5,
                                              Topology::ReLU1, Topology::ReLU3, Topology::ReLU5};

Architecture architecture(Topology t);
std::string to_string(Topology t);
std::string to_string(Activation a);
/// Throws LookupError for names other than Tanh1 ... ReLU5.
Topology parse_topology(std::string_view name);

/// Flat weight vector. Layout is layer-major: for each layer (hidden layers
/// first, output layer last), for each neuron of that layer, its incoming
/// weights in source-neuron order followed by its bias.
using ParameterVector = std::vector<double>;

std::size_t param_count(const Architecture& arch);

/// Offset of neuron `neuron`'s block within layer `layer` (0-based, the
/// output layer is layer `hidden_layers`). The block holds fan_in weights
/// then the bias.
std::size_t param_offset(const Architecture& arch, std::size_t layer, std::size_t neuron);

/// Single-sample forward pass for output_dim == 1.
double forward(const Architecture& arch, std::span<const double> params,
               std::span<const double> input);

/// Mean squared error over a batch. `inputs` is row-major with
/// arch.input_dim values per sample.
double batch_mse(const Architecture& arch, std::span<const double> params,
                 std::span<const double> inputs, std::span<const double> targets);

/// Batch MSE and its exact gradient in one pass. `gradient` must have
/// param_count(arch) entries and is overwritten. ReLU'(0) is taken as 0.
double mse_and_gradient(const Architecture& arch, std::span<const double> params,
                        std::span<const double> inputs, std::span<const double> targets,
                        std::span<double> gradient);

ParameterVector mse_gradient(const Architecture& arch, std::span<const double> params,
                             std::span<const double> inputs, std::span<const double> targets);

enum class InitScheme { NormalUnit, FanInUniform };

std::string to_string(InitScheme s);

/// NormalUnit: every entry N(0, 1). FanInUniform: U(-1/sqrt(fan_in),
/// 1/sqrt(fan_in)) per layer, biases included.
ParameterVector init_weights(const Architecture& arch, std::uint64_t seed, InitScheme scheme);

} // namespace cornn
