#include "momdens/moments.hpp"

#include <algorithm>
#include <cmath>

namespace momdens {

namespace {

class KahanSum {
  public:
    void add(double v) {
        const double term = v - carry_;
        const double next = sum_ + term;
        carry_ = (next - sum_) - term;
        sum_ = next;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

void validate_order(int order) {
    if (order < 2 || order % 2 != 0)
        throw InvalidInput("moment order must be even and >= 2");
}

// Pascal triangle up to row n.
std::vector<std::vector<double>> binomial_table(int n) {
    std::vector<std::vector<double>> c(n + 1);
    for (int i = 0; i <= n; ++i) {
        c[i].assign(i + 1, 1.0);
        for (int j = 1; j < i; ++j)
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
    }
    return c;
}

}  // namespace

MomentSequence compute_sample_moments(std::span<const double> samples,
                                      int order) {
    validate_order(order);
    const long m = static_cast<long>(samples.size());
    if (m < 2)
        throw InvalidInput("need at least two samples");
    for (double x : samples)
        if (!std::isfinite(x))
            throw NonFiniteValue("sample is not finite");

    std::vector<KahanSum> acc(order + 1);
    for (double x : samples) {
        double power = 1.0;
        for (int k = 0; k <= order; ++k) {
            acc[k].add(power);
            power *= x;
        }
    }

    MomentSequence ms;
    ms.order = order;
    ms.sample_count = m;
    ms.values.resize(order + 1);
    ms.values[0] = 1.0;
    for (int k = 1; k <= order; ++k)
        ms.values[k] = acc[k].value() / static_cast<double>(m);
    return ms;
}

Standardization fit_standardization(std::span<const double> samples) {
    if (samples.size() < 2)
        throw InvalidInput("need at least two samples");
    KahanSum mean_acc;
    for (double x : samples)
        mean_acc.add(x);
    const double mean = mean_acc.value() / static_cast<double>(samples.size());

    KahanSum var_acc;
    for (double x : samples)
        var_acc.add((x - mean) * (x - mean));
    const double var = var_acc.value() / static_cast<double>(samples.size());
    if (!(var > 0.0))
        throw DegenerateSamples("samples have zero spread");
    return Standardization{mean, std::sqrt(var)};
}

std::vector<double> apply_standardization(const Standardization& st,
                                          std::span<const double> samples) {
    std::vector<double> z(samples.size());
    std::transform(samples.begin(), samples.end(), z.begin(),
                   [&](double x) { return (x - st.shift) / st.scale; });
    return z;
}

MomentSequence transform_moments(const MomentSequence& moments, double shift,
                                 double scale) {
    if (!(scale > 0.0))
        throw InvalidInput("transform_moments: scale must be positive");
    const int order = moments.order;
    const auto binom = binomial_table(order);

    MomentSequence out;
    out.order = order;
    out.sample_count = moments.sample_count;
    out.values.assign(order + 1, 0.0);
    out.values[0] = 1.0;

    // E z^k = scale^{-k} sum_j C(k,j) (-shift)^{k-j} E x^j
    for (int k = 1; k <= order; ++k) {
        KahanSum sum;
        for (int j = 0; j <= k; ++j)
            sum.add(binom[k][j] * std::pow(-shift, k - j) * moments.values[j]);
        out.values[k] = sum.value() / std::pow(scale, k);
    }
    return out;
}

HankelMatrix build_hankel(const MomentSequence& moments) {
    validate_order(moments.order);
    if (static_cast<int>(moments.values.size()) != moments.order + 1)
        throw InvalidInput("moment sequence length does not match order");
    const int n = moments.order / 2;
    HankelMatrix h;
    h.entries.resize(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            h.entries(i, j) = moments.values[i + j];
    return h;
}

PdCertificate certify_positive_definite(const HankelMatrix& h, double tol) {
    if (!(tol > 0.0))
        throw InvalidInput("PD tolerance must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.entries,
                                                          Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    return PdCertificate{min_eig > tol, min_eig};
}

double default_pd_tolerance(const HankelMatrix& h) {
    return 1e-12 * h.entries.diagonal().maxCoeff();
}

void require_positive_definite(const MomentSequence& moments) {
    const HankelMatrix h = build_hankel(moments);
    const PdCertificate cert =
        certify_positive_definite(h, default_pd_tolerance(h));
    if (!cert.is_pd)
        throw DegenerateSamples(
            "sample Hankel matrix is not positive definite (min eigenvalue " +
            std::to_string(cert.min_eigenvalue) + ")");
}

}  // namespace momdens
