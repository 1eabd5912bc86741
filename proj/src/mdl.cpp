#include "covercx/mdl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "covercx/errors.hpp"

namespace covercx::mdl {

PatchFeatures::PatchFeatures(std::size_t level, std::size_t rows, std::size_t dims,
                             std::vector<double> values)
    : level_(level), rows_(rows), dims_(dims), values_(std::move(values)) {
    if (values_.size() != rows_ * dims_) throw InvalidDimensions("feature matrix size mismatch");
}

std::size_t PatchFeatures::distinct_rows() const {
    if (rows_ == 0) return 0;
    std::vector<std::size_t> order(rows_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [this](std::size_t a, std::size_t b) {
        const auto ra = row(a);
        const auto rb = row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < order.size(); ++i) {
        const auto prev = row(order[i - 1]);
        const auto cur = row(order[i]);
        if (!std::equal(prev.begin(), prev.end(), cur.begin())) ++distinct;
    }
    return distinct;
}

PatchFeatures patch_features(const RGBImage& img, std::size_t p, bool grayscale) {
    if (p == 0 || img.width() % p != 0 || img.height() % p != 0) {
        throw InvalidPatchSize("patch size " + std::to_string(p) + " does not divide " +
                               std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
    const std::size_t channels = grayscale ? 1 : 3;
    const std::size_t dims = 2 * channels;
    const std::size_t cols = img.width() / p;
    const std::size_t rows = img.height() / p;
    const std::size_t n = cols * rows;
    const double count = static_cast<double>(p * p);

    auto sample = [&](std::size_t x, std::size_t y, std::size_t c) -> double {
        const Rgb& px = img.at(x, y);
        if (grayscale) {
            return static_cast<double>((299u * px.r + 587u * px.g + 114u * px.b + 500u) / 1000u);
        }
        return c == 0 ? px.r : c == 1 ? px.g : px.b;
    };

    std::vector<double> values(n * dims);
    for (std::size_t py = 0; py < rows; ++py) {
        for (std::size_t px = 0; px < cols; ++px) {
            double* out = &values[(py * cols + px) * dims];
            for (std::size_t c = 0; c < channels; ++c) {
                double sum = 0.0;
                for (std::size_t y = py * p; y < (py + 1) * p; ++y)
                    for (std::size_t x = px * p; x < (px + 1) * p; ++x) sum += sample(x, y, c);
                const double mean = sum / count;
                double ss = 0.0;
                for (std::size_t y = py * p; y < (py + 1) * p; ++y)
                    for (std::size_t x = px * p; x < (px + 1) * p; ++x) {
                        const double dv = sample(x, y, c) - mean;
                        ss += dv * dv;
                    }
                out[c] = mean;
                out[channels + c] = std::sqrt(ss / count);
            }
        }
    }

    // Standardise each column within the level.
    for (std::size_t j = 0; j < dims; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += values[i * dims + j];
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dv = values[i * dims + j] - mean;
            ss += dv * dv;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        const bool constant = sd <= 1e-9 * std::max(1.0, std::abs(mean));
        for (std::size_t i = 0; i < n; ++i) {
            double& v = values[i * dims + j];
            v = constant ? 0.0 : (v - mean) / sd;
        }
    }
    return PatchFeatures(p, n, dims, std::move(values));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// std::uniform_real_distribution is implementation-defined; this is not.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double squared_distance(std::span<const double> a, const double* b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double dv = a[j] - b[j];
        s += dv * dv;
    }
    return s;
}

std::vector<double> kmeanspp_init(const PatchFeatures& f, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = f.rows();
    const std::size_t d = f.dims();
    std::vector<double> centroids;
    centroids.reserve(k * d);
    const auto first = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    const auto r0 = f.row(std::min(first, n - 1));
    centroids.insert(centroids.end(), r0.begin(), r0.end());

    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(f.row(i), centroids.data());

    while (centroids.size() < k * d) {
        const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
        if (total <= 0.0) break;  // every row already coincides with a centre
        const double target = uniform01(rng) * total;
        double acc = 0.0;
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (nearest[i] <= 0.0) continue;
            acc += nearest[i];
            pick = i;
            if (acc > target) break;
        }
        const auto r = f.row(pick);
        const std::size_t offset = centroids.size();
        centroids.insert(centroids.end(), r.begin(), r.end());
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(f.row(i), centroids.data() + offset));
        }
    }
    return centroids;
}

std::size_t nearest_centroid(std::span<const double> x, const std::vector<double>& centroids,
                             std::size_t k, double& dist) {
    std::size_t best = 0;
    dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        const double dc = squared_distance(x, centroids.data() + c * x.size());
        if (dc < dist) {
            dist = dc;
            best = c;
        }
    }
    return best;
}

KMeansFit lloyd(const PatchFeatures& f, std::vector<double> centroids, std::size_t max_iterations) {
    const std::size_t n = f.rows();
    const std::size_t d = f.dims();
    const std::size_t k = centroids.size() / d;
    std::vector<std::size_t> labels(n);
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) labels[i] = nearest_centroid(f.row(i), centroids, k, dist);

    std::vector<std::size_t> sizes(k);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        std::vector<double> sums(k * d, 0.0);
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = f.row(i);
            ++sizes[labels[i]];
            for (std::size_t j = 0; j < d; ++j) sums[labels[i] * d + j] += r[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;  // keeps its previous position
            for (std::size_t j = 0; j < d; ++j) {
                centroids[c * d + j] = sums[c * d + j] / static_cast<double>(sizes[c]);
            }
        }
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t z = nearest_centroid(f.row(i), centroids, k, dist);
            if (z != labels[i]) {
                labels[i] = z;
                changed = true;
            }
        }
        if (!changed) break;
    }

    // Drop empty clusters and relabel densely, then refresh the means.
    std::fill(sizes.begin(), sizes.end(), 0);
    for (auto z : labels) ++sizes[z];
    std::vector<std::size_t> remap(k, k);
    KMeansFit fit;
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) continue;
        remap[c] = fit.k++;
        fit.sizes.push_back(sizes[c]);
    }
    fit.labels.resize(n);
    fit.centroids.assign(fit.k * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t z = remap[labels[i]];
        fit.labels[i] = z;
        const auto r = f.row(i);
        for (std::size_t j = 0; j < d; ++j) fit.centroids[z * d + j] += r[j];
    }
    for (std::size_t c = 0; c < fit.k; ++c) {
        for (std::size_t j = 0; j < d; ++j) fit.centroids[c * d + j] /= static_cast<double>(fit.sizes[c]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        fit.inertia += squared_distance(f.row(i), fit.centroids.data() + fit.labels[i] * d);
    }
    return fit;
}

std::uint64_t fit_seed(std::uint64_t seed, std::size_t level, std::size_t k) {
    return splitmix64(splitmix64(seed ^ (std::uint64_t{level} << 32)) + k);
}

}  // namespace

KMeansFit kmeans(const PatchFeatures& f, std::size_t k, std::size_t restarts, std::uint64_t seed,
                 std::size_t max_iterations) {
    if (k == 0 || k > f.rows()) {
        throw InvalidDimensions("k must be in [1, " + std::to_string(f.rows()) + "], got " +
                                std::to_string(k));
    }
    KMeansFit best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        std::mt19937_64 rng(splitmix64(seed + 0x632be59bd9b4e019ULL * (r + 1)));
        auto fit = lloyd(f, kmeanspp_init(f, k, rng), max_iterations);
        if (fit.inertia < best.inertia) best = std::move(fit);
    }
    return best;
}

double model_cost(std::size_t k, std::size_t dims, std::size_t rows) {
    const double params = static_cast<double>(k * dims + k - 1);
    return 0.5 * params * std::log2(static_cast<double>(rows));
}

DescriptionLength description_length(const PatchFeatures& f, std::size_t k, const MdlParams& params,
                                     DegeneratePolicy policy) {
    const std::size_t n = f.rows();
    const std::size_t d = f.dims();
    if (k == 0 || k > n) {
        throw InvalidDimensions("k must be in [1, " + std::to_string(n) + "], got " + std::to_string(k));
    }
    DescriptionLength dl;
    dl.k_requested = k;
    const std::size_t distinct = f.distinct_rows();
    std::size_t k_fit = k;
    if (k > distinct) {
        if (policy == DegeneratePolicy::Throw) {
            throw DegenerateClustering("k = " + std::to_string(k) + " exceeds the " +
                                       std::to_string(distinct) + " distinct feature rows");
        }
        k_fit = distinct;
    }

    const auto fit = kmeans(f, k_fit, params.restarts, fit_seed(params.seed, f.level(), k_fit),
                            params.max_iterations);
    dl.k = fit.k;
    dl.model_bits = model_cost(fit.k, d, n);

    const double nd = static_cast<double>(n);
    for (auto size : fit.sizes) {
        const double s = static_cast<double>(size);
        dl.assignment_bits -= s * std::log2(s / nd);
    }

    std::vector<double> sse(fit.k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        sse[fit.labels[i]] += squared_distance(f.row(i), fit.centroids.data() + fit.labels[i] * d);
    }
    const double log2_delta = std::log2(params.delta);
    const double inv_ln2 = 1.0 / std::log(2.0);
    const double sqrt_2pi = std::sqrt(2.0 * std::acos(-1.0));
    std::vector<double> sigma(fit.k);
    for (std::size_t c = 0; c < fit.k; ++c) {
        const double var = sse[c] / (static_cast<double>(fit.sizes[c]) * static_cast<double>(d));
        sigma[c] = std::max(params.sigma_min, std::sqrt(var));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t z = fit.labels[i];
        const double s = sigma[z];
        const double log2_norm = std::log2(s * sqrt_2pi);
        const auto r = f.row(i);
        const double* mu = fit.centroids.data() + z * d;
        for (std::size_t j = 0; j < d; ++j) {
            const double dv = r[j] - mu[j];
            const double bits = dv * dv / (2.0 * s * s) * inv_ln2 + log2_norm - log2_delta;
            if (bits > 0.0) dl.residual_bits += bits;
        }
    }
    return dl;
}

LevelResult best_level(const RGBImage& img, std::size_t patch_size, const MdlParams& params) {
    const auto features = patch_features(img, patch_size, params.grayscale);
    LevelResult best;
    best.patch_size = patch_size;
    best.bits = std::numeric_limits<double>::infinity();
    const std::size_t k_max = std::min(params.k_max, features.rows());
    for (std::size_t k = 1; k <= k_max; ++k) {
        const auto dl = description_length(features, k, params, DegeneratePolicy::Fallback);
        if (dl.total() < best.bits) {
            best.bits = dl.total();
            best.k = dl.k;
        }
    }
    return best;
}

MDLcScore mdlc(const RGBImage& img, const MdlParams& params) {
    if (params.k_max == 0) throw ConfigError("k_max must be at least 1");
    const auto scaled = resize(img, params.side, params.side);
    MDLcScore score;
    for (auto p : params.patch_sizes) {
        auto level = best_level(scaled, p, params);
        score.bits += level.bits;
        score.per_level.push_back(level);
    }
    return score;
}

}  // namespace covercx::mdl
