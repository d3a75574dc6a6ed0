#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace momdens {

// Horner evaluation of sum_k c[k] x^k.
inline double poly_eval(std::span<const double> coeffs, double x) {
    double v = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;)
        v = v * x + coeffs[i];
    return v;
}

// Coefficients of p((x - shift)/scale) expanded in powers of x.
inline std::vector<double> poly_affine_compose(std::span<const double> coeffs,
                                               double shift, double scale) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    std::vector<std::vector<double>> binom(n + 1);
    for (int i = 0; i <= n; ++i) {
        binom[i].assign(i + 1, 1.0);
        for (int j = 1; j < i; ++j)
            binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
    }
    std::vector<double> out(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        const double ck = coeffs[k] / std::pow(scale, k);
        // (x - shift)^k = sum_j C(k,j) x^j (-shift)^{k-j}
        for (int j = 0; j <= k; ++j)
            out[j] += ck * binom[k][j] * std::pow(-shift, k - j);
    }
    return out;
}

}  // namespace momdens
