#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "meshrecon/core.hpp"
#include "meshrecon/rng.hpp"

namespace meshrecon {

/// Diagonal-covariance Gaussian mixture over deformation vectors.
struct GaussianMixture {
    std::size_t dim = 0;
    std::vector<double> weights;               // k
    std::vector<std::vector<double>> means;     // k x dim
    std::vector<std::vector<double>> variances; // k x dim, > 0

    std::size_t components() const { return weights.size(); }
};

/// Normal prior over a single linear-combination weight.
struct AlphaPrior {
    double mean = 0.0;
    double stddev = 1.0;
};

inline constexpr double kGmmVarianceFloor = 1e-6;

namespace detail {

inline double log_diag_gaussian(const std::vector<double>& x, const std::vector<double>& mean,
                                const std::vector<double>& var) {
    constexpr double log_two_pi = 1.8378770664093454836;
    double acc = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        double diff = x[d] - mean[d];
        acc += log_two_pi + std::log(var[d]) + diff * diff / var[d];
    }
    return -0.5 * acc;
}

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) acc += (a[d] - b[d]) * (a[d] - b[d]);
    return acc;
}

}  // namespace detail

inline double gmm_log_likelihood(const GaussianMixture& gmm,
                                 const std::vector<std::vector<double>>& samples) {
    double total = 0.0;
    for (const auto& x : samples) {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> lp(gmm.components());
        for (std::size_t j = 0; j < gmm.components(); ++j) {
            lp[j] = std::log(gmm.weights[j]) +
                    detail::log_diag_gaussian(x, gmm.means[j], gmm.variances[j]);
            best = std::max(best, lp[j]);
        }
        double sum = 0.0;
        for (double v : lp) sum += std::exp(v - best);
        total += best + std::log(sum);
    }
    return total;
}

/// EM fit with k-means++ mean initialization, diagonal covariances, and a
/// variance floor. The per-iteration log likelihood is recorded (it is
/// non-decreasing) and stored nowhere; call gmm_log_likelihood to audit.
inline GaussianMixture fit_gmm(const std::vector<std::vector<double>>& samples, std::size_t k,
                               std::size_t iters, std::uint64_t seed,
                               std::vector<double>* log_likelihoods = nullptr) {
    if (samples.empty()) throw Error("fit_gmm: no samples");
    if (k < 1) throw Error("fit_gmm: k must be >= 1");
    if (samples.size() < k) throw Error("fit_gmm: fewer samples than components");
    std::size_t dim = samples[0].size();
    for (const auto& s : samples)
        if (s.size() != dim) throw Error("fit_gmm: inconsistent sample dimensions");

    Rng rng(seed);
    GaussianMixture gmm;
    gmm.dim = dim;
    gmm.weights.assign(k, 1.0 / static_cast<double>(k));
    gmm.means.reserve(k);

    // k-means++ seeding
    gmm.means.push_back(samples[rng.uniform_index(samples.size())]);
    std::vector<double> d2(samples.size());
    while (gmm.means.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& m : gmm.means)
                best = std::min(best, detail::squared_distance(samples[i], m));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            gmm.means.push_back(samples[rng.uniform_index(samples.size())]);
            continue;
        }
        double target = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = samples.size() - 1;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            acc += d2[i];
            if (acc >= target) {
                pick = i;
                break;
            }
        }
        gmm.means.push_back(samples[pick]);
    }

    // initial variances: global per-dimension variance
    std::vector<double> global_mean(dim, 0.0), global_var(dim, 0.0);
    for (const auto& s : samples)
        for (std::size_t d = 0; d < dim; ++d) global_mean[d] += s[d];
    for (std::size_t d = 0; d < dim; ++d) global_mean[d] /= static_cast<double>(samples.size());
    for (const auto& s : samples)
        for (std::size_t d = 0; d < dim; ++d) {
            double diff = s[d] - global_mean[d];
            global_var[d] += diff * diff;
        }
    for (std::size_t d = 0; d < dim; ++d)
        global_var[d] = std::max(global_var[d] / static_cast<double>(samples.size()),
                                 kGmmVarianceFloor);
    gmm.variances.assign(k, global_var);

    std::vector<std::vector<double>> resp(samples.size(), std::vector<double>(k));
    for (std::size_t it = 0; it < iters; ++it) {
        // E-step (log domain), accumulating the data log likelihood
        double ll = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                resp[i][j] = std::log(gmm.weights[j]) +
                             detail::log_diag_gaussian(samples[i], gmm.means[j],
                                                       gmm.variances[j]);
                best = std::max(best, resp[i][j]);
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) sum += std::exp(resp[i][j] - best);
            double log_norm = best + std::log(sum);
            ll += log_norm;
            for (std::size_t j = 0; j < k; ++j) resp[i][j] = std::exp(resp[i][j] - log_norm);
        }
        if (log_likelihoods) log_likelihoods->push_back(ll);

        // M-step
        for (std::size_t j = 0; j < k; ++j) {
            double nj = 0.0;
            for (std::size_t i = 0; i < samples.size(); ++i) nj += resp[i][j];
            if (nj <= 0.0) continue;  // dead component keeps its parameters
            gmm.weights[j] = nj / static_cast<double>(samples.size());
            std::vector<double> mean(dim, 0.0);
            for (std::size_t i = 0; i < samples.size(); ++i)
                for (std::size_t d = 0; d < dim; ++d) mean[d] += resp[i][j] * samples[i][d];
            for (std::size_t d = 0; d < dim; ++d) mean[d] /= nj;
            std::vector<double> var(dim, 0.0);
            for (std::size_t i = 0; i < samples.size(); ++i)
                for (std::size_t d = 0; d < dim; ++d) {
                    double diff = samples[i][d] - mean[d];
                    var[d] += resp[i][j] * diff * diff;
                }
            for (std::size_t d = 0; d < dim; ++d)
                var[d] = std::max(var[d] / nj, kGmmVarianceFloor);
            gmm.means[j] = std::move(mean);
            gmm.variances[j] = std::move(var);
        }
        double wsum = 0.0;
        for (double w : gmm.weights) wsum += w;
        for (double& w : gmm.weights) w /= wsum;
    }
    return gmm;
}

/// One draw: component by weight, then an independent normal per dimension.
inline std::vector<double> sample_gmm(const GaussianMixture& gmm, std::uint64_t seed) {
    if (gmm.components() == 0) throw Error("sample_gmm: empty mixture");
    Rng rng(seed);
    double target = rng.uniform();
    double acc = 0.0;
    std::size_t j = gmm.components() - 1;
    for (std::size_t i = 0; i < gmm.components(); ++i) {
        acc += gmm.weights[i];
        if (target < acc) {
            j = i;
            break;
        }
    }
    std::vector<double> out(gmm.dim);
    for (std::size_t d = 0; d < gmm.dim; ++d)
        out[d] = rng.normal(gmm.means[j][d], std::sqrt(gmm.variances[j][d]));
    return out;
}

/// Draw linear-combination weights: the center weight always comes from the
/// prior; each subgraph member is kept with probability (1 - sparsity) and
/// drawn from the prior, else left at zero. Ids outside the subgraph stay 0.
inline std::vector<double> sample_alpha(const AlphaPrior& prior, std::size_t c,
                                        const std::vector<std::size_t>& omega, double sparsity,
                                        std::size_t node_count, std::uint64_t seed) {
    if (prior.stddev <= 0.0) throw Error("sample_alpha: prior stddev must be > 0");
    if (sparsity < 0.0 || sparsity > 1.0) throw Error("sample_alpha: sparsity must be in [0,1]");
    if (c >= node_count) throw Error("sample_alpha: center id out of range");
    Rng rng(seed);
    std::vector<double> alpha(node_count, 0.0);
    alpha[c] = rng.normal(prior.mean, prior.stddev);
    for (std::size_t i : omega) {
        if (i >= node_count) throw Error("sample_alpha: subgraph id out of range");
        bool keep = rng.uniform() >= sparsity;
        if (keep) alpha[i] = rng.normal(prior.mean, prior.stddev);
    }
    return alpha;
}

}  // namespace meshrecon
