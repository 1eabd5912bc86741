#include <doctest.h>

#include <cmath>
#include <numeric>

#include "covercx/errors.hpp"
#include "covercx/hash.hpp"
#include "covercx/mdl.hpp"
#include "support.hpp"

using namespace covercx;
using namespace covercx::mdl;

namespace {

RGBImage halves(Rgb left, Rgb right, std::size_t side = 224) {
    RGBImage img(side, side);
    for (std::size_t y = 0; y < side; ++y)
        for (std::size_t x = 0; x < side; ++x) img.at(x, y) = x < side / 2 ? left : right;
    return img;
}

RGBImage checkerboard16() {
    RGBImage img(224, 224);
    for (std::size_t y = 0; y < 224; ++y)
        for (std::size_t x = 0; x < 224; ++x)
            img.at(x, y) = ((x / 16 + y / 16) % 2) ? Rgb{255, 255, 255} : Rgb{0, 0, 0};
    return img;
}

double column_mean(const PatchFeatures& f, std::size_t j) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.rows(); ++i) s += f.row(i)[j];
    return s / static_cast<double>(f.rows());
}

}  // namespace

TEST_SUITE("mdl") {

TEST_CASE("patch features of a constant image are all zero") {
    const auto f = patch_features(RGBImage(224, 224, {9, 99, 199}), 16);
    CHECK(f.rows() == 196);
    CHECK(f.dims() == 6);
    for (double v : f.values()) CHECK(v == 0.0);
    CHECK(f.distinct_rows() == 1);
}

TEST_CASE("patch features of two halves have two distinct rows") {
    const auto f = patch_features(halves({0, 0, 0}, {255, 255, 255}), 16);
    CHECK(f.rows() == 196);
    CHECK(f.distinct_rows() == 2);
    // means are +-1 after standardisation with 98 patches on each side
    CHECK(std::abs(f.row(0)[0]) == doctest::Approx(1.0));
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(column_mean(f, j)) < 1e-9);
}

TEST_CASE("row count per level and invalid patch sizes") {
    std::mt19937_64 rng(1);
    const auto img = testsupport::random_rgb(rng, 224, 224);
    for (std::size_t p : {4, 7, 8, 16, 32}) {
        const auto f = patch_features(img, p);
        CHECK(f.rows() == (224 / p) * (224 / p));
        for (std::size_t j = 0; j < f.dims(); ++j) CHECK(std::abs(column_mean(f, j)) < 1e-9);
    }
    CHECK_THROWS_AS(patch_features(img, 9), InvalidPatchSize);
    CHECK_THROWS_AS(patch_features(img, 0), InvalidPatchSize);
    CHECK(patch_features(img, 16, true).dims() == 2);
}

TEST_CASE("closed-form description length of zero features") {
    const PatchFeatures f(16, 196, 6, std::vector<double>(196 * 6, 0.0));
    const MdlParams params;
    const auto dl = description_length(f, 1, params);
    const double per_coord =
        std::max(0.0, -std::log2(params.delta / (std::sqrt(2.0 * M_PI) * params.sigma_min)));
    CHECK(dl.assignment_bits == 0.0);
    CHECK(dl.residual_bits == doctest::Approx(196 * 6 * per_coord));
    CHECK(dl.model_bits == doctest::Approx(3.0 * std::log2(196.0)));
    CHECK(dl.total() == doctest::Approx(22.844129532345626));
}

TEST_CASE("single cluster has free assignments") {
    std::mt19937_64 rng(2);
    const auto f = patch_features(testsupport::random_rgb(rng, 224, 224), 8);
    const auto dl = description_length(f, 1, MdlParams{});
    CHECK(dl.assignment_bits == 0.0);
    CHECK(dl.residual_bits > 0.0);
}

TEST_CASE("two balanced clusters cost one bit per assignment") {
    const auto f = patch_features(halves({10, 20, 30}, {200, 100, 50}), 16);
    const auto dl = description_length(f, 2, MdlParams{});
    CHECK(dl.k == 2);
    CHECK(dl.assignment_bits == doctest::Approx(196.0));
}

TEST_CASE("model cost") {
    CHECK(model_cost(1, 6, 196) == doctest::Approx(3.0 * std::log2(196.0)));
    CHECK(model_cost(3, 6, 3136) == doctest::Approx(((3 * 6 + 2) / 2.0) * std::log2(3136.0)));
}

TEST_CASE("too many clusters falls back or throws") {
    const auto f = patch_features(halves({0, 0, 0}, {255, 255, 255}), 16);
    const auto dl = description_length(f, 4, MdlParams{});
    CHECK(dl.k_requested == 4);
    CHECK(dl.k == 2);
    CHECK(dl.total() == doctest::Approx(description_length(f, 2, MdlParams{}).total()));
    CHECK_THROWS_AS(description_length(f, 4, MdlParams{}, DegeneratePolicy::Throw), DegenerateClustering);
}

TEST_CASE("k-means fit") {
    const auto f = patch_features(halves({0, 0, 0}, {255, 255, 255}), 8);
    const auto fit = kmeans(f, 2, 5, 42);
    CHECK(fit.k == 2);
    CHECK(fit.sizes[0] + fit.sizes[1] == f.rows());
    CHECK(fit.sizes[0] == fit.sizes[1]);
    CHECK(fit.inertia == doctest::Approx(0.0).epsilon(1e-12));
    const auto again = kmeans(f, 2, 5, 42);
    CHECK(again.labels == fit.labels);
    CHECK(again.centroids == fit.centroids);
}

TEST_CASE("checkerboard selects two clusters at level 16") {
    const auto level = best_level(checkerboard16(), 16, MdlParams{});
    CHECK(level.k == 2);
    CHECK(level.bits >= model_cost(1, 6, 196));
}

TEST_CASE("score structure and determinism") {
    std::mt19937_64 rng(8);
    const auto img = testsupport::synthetic_cover(rng, 300, 200);
    const MdlParams params;
    const auto a = mdlc(img, params);
    const auto b = mdlc(img, params);
    CHECK(a.bits == b.bits);
    REQUIRE(a.per_level.size() == 3);
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& l = a.per_level[i];
        CHECK(l.patch_size == params.patch_sizes[i]);
        CHECK(l.k >= 1);
        CHECK(l.k <= params.k_max);
        CHECK(l.bits == b.per_level[i].bits);
        const std::size_t n = (224 / l.patch_size) * (224 / l.patch_size);
        CHECK(l.bits >= model_cost(1, 6, n));
        sum += l.bits;
    }
    CHECK(a.bits == doctest::Approx(sum).epsilon(1e-15));
    CHECK(a.bits >= 0.0);
}

TEST_CASE("fixture ordering: constant < two-region < natural photo") {
    const auto photo = decode_image(read_file_bytes(testsupport::kData / "natural_photo.png"));
    const double c = mdlc(RGBImage(224, 224, {128, 128, 128})).bits;
    const double two = mdlc(halves({20, 40, 160}, {230, 200, 20})).bits;
    const double nat = mdlc(photo).bits;
    CHECK(c < two);
    CHECK(two < nat);
}

}
