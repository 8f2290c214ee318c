#pragma once

// Finite-difference gradient oracle evaluated in quad precision.
//
// In double, a central difference with h = 1e-6 loses about eps * loss / h
// to cancellation, which swamps gradients near 1e-6. Evaluating the loss in
// __float128 with an independent forward pass removes that floor while
// keeping the same step size.

#include "cornn/network.hpp"

#include <quadmath.h>

#include <span>
#include <vector>

namespace cornn::oracle {

using quad = __float128;

inline quad quad_mse(const Architecture& arch, const std::vector<quad>& p, std::span<const double> x,
                     std::span<const double> y) {
    quad total = 0;
    std::vector<quad> act, next;
    for (std::size_t s = 0; s < y.size(); ++s) {
        act.assign({static_cast<quad>(x[2 * s]), static_cast<quad>(x[2 * s + 1])});
        std::size_t k = 0;
        for (std::size_t layer = 0; layer <= arch.hidden_layers; ++layer) {
            const bool output = layer == arch.hidden_layers;
            const std::size_t width = output ? 1 : arch.hidden_width;
            next.assign(width, 0);
            for (std::size_t j = 0; j < width; ++j) {
                quad z = 0;
                for (quad a : act) z += p[k++] * a;
                z += p[k++];
                if (output) next[j] = z;
                else if (arch.hidden_activation == Activation::Tanh) next[j] = tanhq(z);
                else next[j] = z > 0 ? z : 0;
            }
            act.swap(next);
        }
        const quad e = act[0] - static_cast<quad>(y[s]);
        total += e * e;
    }
    return total / static_cast<quad>(y.size());
}

/// Central difference of the MSE with respect to parameter k.
inline double central_difference(const Architecture& arch, std::span<const double> params,
                                 std::span<const double> x, std::span<const double> y, std::size_t k,
                                 double h) {
    std::vector<quad> p(params.begin(), params.end());
    p[k] = static_cast<quad>(params[k]) + h;
    const quad up = quad_mse(arch, p, x, y);
    p[k] = static_cast<quad>(params[k]) - h;
    const quad down = quad_mse(arch, p, x, y);
    return static_cast<double>((up - down) / (2 * static_cast<quad>(h)));
}

} // namespace cornn::oracle
