#include "eitfuse/errors.hpp"
#include "eitfuse/segment.hpp"

#include <doctest.h>

#include <random>

using namespace eitfuse;

namespace {

// Exhaustive Otsu: for every edge k/bins, class sizes and sums straight from
// the pixels, variance compared exactly as (S0 N1 - S1 N0)^2 / (N0 N1).
double brute_force_otsu(const ConductivityImage& img, int bins) {
    using i128 = __int128;
    std::vector<int> bin(img.values.size());
    for (std::size_t p = 0; p < bin.size(); ++p) bin[p] = histogram_bin(img.values[p], bins);
    i128 best_num = -1, best_den = 1;
    int best = -1;
    for (int k = 1; k < bins; ++k) {
        i128 n0 = 0, n1 = 0, s0 = 0, s1 = 0;
        for (int b : bin) {
            if (b < k) {
                n0 += 1;
                s0 += b;
            } else {
                n1 += 1;
                s1 += b;
            }
        }
        if (n0 == 0 || n1 == 0) continue;
        const i128 d = s0 * n1 - s1 * n0;
        const i128 num = d * d, den = n0 * n1;
        if (best < 0 || num * best_den > best_num * den) {
            best_num = num;
            best_den = den;
            best = k;
        }
    }
    return static_cast<double>(best) / bins;
}

BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
    std::bernoulli_distribution on(density);
    BinaryMask m(w, h);
    for (auto& b : m.bits) b = on(rng);
    return m;
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
    for (std::size_t i = 0; i < a.bits.size(); ++i)
        if (a.bits[i] && !b.bits[i]) return false;
    return true;
}

ConductivityImage make_image(int w, int h, std::vector<double> v) {
    ConductivityImage img(PixelGrid{w, h, 10.0});
    img.values = std::move(v);
    return img;
}

} // namespace

TEST_SUITE("segment") {

TEST_CASE("normalize") {
    const auto n = normalize(make_image(3, 1, {2, 4, 6}));
    CHECK_FALSE(n.degenerate);
    CHECK(n.image.values == std::vector<double>{0, 0.5, 1});
    const auto c = normalize(make_image(3, 1, {5, 5, 5}));
    CHECK(c.degenerate);
    CHECK(c.image.values == std::vector<double>{0, 0, 0});
    const auto same = normalize(make_image(3, 1, {0, 0.25, 1}));
    CHECK(same.image.values == std::vector<double>{0, 0.25, 1});
}

TEST_CASE("histogram bins") {
    CHECK(histogram_bin(0.0, 256) == 0);
    CHECK(histogram_bin(1.0, 256) == 255);
    CHECK(histogram_bin(0.5, 256) == 128);
    CHECK(histogram_bin(-0.1, 256) == 0);
    CHECK(histogram_bin(255.0 / 256.0, 256) == 255);
}

TEST_CASE("bimodal image splits between the modes") {
    std::vector<double> v(64 * 64);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i < v.size() / 2 ? 0.1 : 0.9;
    const auto img = make_image(64, 64, v);
    const double t = otsu_threshold(img);
    CHECK(t > 0.1);
    CHECK(t <= 0.9);
    const BinaryMask m = binarize(img, t);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(m.bits[i] == (v[i] == 0.9));
    // Ties toward the lower edge: every edge in (0.1, 0.9] scores the same.
    CHECK(t == doctest::Approx(static_cast<double>(histogram_bin(0.1, 256) + 1) / 256));
}

TEST_CASE("Otsu matches exhaustive search on random images") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<double> v(64 * 64);
        if (trial % 3 == 0) {
            std::uniform_real_distribution<double> u(0, 1);
            for (double& x : v) x = u(rng);
        } else if (trial % 3 == 1) {
            std::uniform_int_distribution<int> lv(0, 5);  // few levels, many ties
            for (double& x : v) x = lv(rng) / 5.0;
        } else {
            std::normal_distribution<double> a(0.25, 0.08), b(0.7, 0.1);
            std::bernoulli_distribution which(0.3);
            for (double& x : v) x = std::clamp(which(rng) ? b(rng) : a(rng), 0.0, 1.0);
        }
        const auto img = make_image(64, 64, v);
        CHECK(otsu_threshold(img) == brute_force_otsu(img, 256));
    }
}

TEST_CASE("single-valued image has no threshold") {
    CHECK_THROWS_AS(otsu_threshold(make_image(4, 4, std::vector<double>(16, 0.3))), SegmentationError);
}

TEST_CASE("binarize edges") {
    const auto img = make_image(3, 1, {0, 0.5, 1});
    CHECK(binarize(img, 0.0).count() == 3);
    CHECK(binarize(img, 1.01).count() == 0);
    CHECK(binarize(img, 0.5).count() == 2);
}

TEST_CASE("structuring element") {
    const auto d = StructuringElement::disk(2);
    CHECK(d.offsets.size() == 13);
    CHECK(StructuringElement::disk(1).offsets.size() == 5);
    CHECK_THROWS_AS(StructuringElement::disk(0), ConfigError);
}

TEST_CASE("opening removes an isolated pixel, closing fills a hole") {
    const auto se = StructuringElement::disk(2);
    BinaryMask dot(16, 16);
    dot.set(7, 7, true);
    CHECK(morph_open(dot, se).empty());

    BinaryMask square(20, 20);
    for (int r = 3; r < 17; ++r)
        for (int c = 3; c < 17; ++c) square.set(c, r, true);
    BinaryMask holed = square;
    holed.set(10, 10, false);
    CHECK(morph_close(holed, se) == square);
}

TEST_CASE("refine keeps a blob and drops a speck") {
    const auto se = StructuringElement::disk(2);
    CHECK(refine_mask(BinaryMask(10, 10), se).empty());
    BinaryMask m(32, 32);
    for (int r = 5; r < 15; ++r)
        for (int c = 5; c < 15; ++c) m.set(c, r, true);
    const BinaryMask blob = m;
    m.set(25, 25, true);
    CHECK(refine_mask(m, se) == refine_mask(blob, se));
    CHECK(refine_mask(m, se).at(10, 10));
    CHECK_FALSE(refine_mask(m, se).at(25, 25));
}

TEST_CASE("morphology properties on random masks") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        const auto se = StructuringElement::disk(1 + trial % 3);
        const BinaryMask a = random_mask(rng, 40, 36, 0.3 + 0.4 * (trial % 5) / 4.0);
        const BinaryMask o = morph_open(a, se);
        const BinaryMask c = morph_close(a, se);
        CHECK(morph_open(o, se) == o);
        CHECK(morph_close(c, se) == c);
        CHECK(subset(o, a));
        CHECK(subset(a, c));
        const BinaryMask r = refine_mask(a, se);
        CHECK(refine_mask(r, se) == r);
        // Duality away from the border.
        const BinaryMask dual = morph_open(a.complement(), se).complement();
        const int margin = 2 * se.radius;
        for (int row = margin; row < a.height - margin; ++row)
            for (int col = margin; col < a.width - margin; ++col) CHECK(dual.at(col, row) == c.at(col, row));
    }
}

TEST_CASE("labeling") {
    BinaryMask m(10, 10);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            m.set(c, r, true);
            m.set(c + 5, r + 5, true);
        }
    CHECK(label_components(m, 8).size() == 2);

    BinaryMask diag(6, 6);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            diag.set(c, r, true);
            diag.set(c + 2, r + 2, true);
        }
    CHECK(label_components(diag, 8).size() == 1);
    CHECK(label_components(diag, 4).size() == 2);
    CHECK(label_components(BinaryMask(5, 5), 8).empty());
    CHECK_THROWS_AS(label_components(m, 6), ConfigError);
}

TEST_CASE("labels partition the mask, largest first") {
    std::mt19937_64 rng(8);
    const BinaryMask m = random_mask(rng, 30, 30, 0.45);
    const auto rois = label_components(m, 4);
    BinaryMask uni(30, 30);
    for (std::size_t i = 0; i < rois.size(); ++i) {
        CHECK(rois[i].id == static_cast<int>(i) + 1);
        if (i) CHECK(rois[i - 1].pixel_count >= rois[i].pixel_count);
        CHECK(rois[i].mask.count() == rois[i].pixel_count);
        for (std::size_t p = 0; p < uni.bits.size(); ++p) {
            if (rois[i].mask.bits[p]) {
                CHECK_FALSE(uni.bits[p]);
                uni.bits[p] = 1;
            }
        }
    }
    CHECK(uni == m);
}

TEST_CASE("intensity sums and centroids") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    ConductivityImage img(PixelGrid{16, 16, 10.0});
    for (double& v : img.values) v = u(rng);

    BinaryMask all(16, 16, true);
    auto whole = label_components(all, 8);
    roi_intensity_sums(img, whole);
    CHECK(whole[0].intensity_sum == doctest::Approx(img.sum()).epsilon(1e-14));

    const BinaryMask m = random_mask(rng, 16, 16, 0.4);
    auto rois = label_components(m, 4);
    roi_intensity_sums(img, rois);
    double total = 0.0, expected = 0.0;
    for (const auto& r : rois) total += r.intensity_sum;
    for (std::size_t p = 0; p < m.bits.size(); ++p)
        if (m.bits[p]) expected += img.values[p];
    CHECK(total == doctest::Approx(expected).epsilon(1e-13));

    // Uniform square: centroid at its geometric center.
    ConductivityImage flat(PixelGrid{16, 16, 10.0}, 0.0);
    BinaryMask sq(16, 16);
    for (int r = 4; r < 8; ++r)
        for (int c = 2; c < 6; ++c) {
            sq.set(c, r, true);
            flat.at(c, r) = 0.7;
        }
    auto one = label_components(sq, 8);
    roi_intensity_sums(flat, one);
    const Point expect{(flat.grid.center(2, 0).x + flat.grid.center(5, 0).x) / 2,
                       (flat.grid.center(0, 4).y + flat.grid.center(0, 7).y) / 2};
    CHECK(one[0].centroid.x == doctest::Approx(expect.x));
    CHECK(one[0].centroid.y == doctest::Approx(expect.y));

    // Zero intensity falls back to the plain centroid.
    ConductivityImage zero(PixelGrid{16, 16, 10.0}, 0.0);
    auto fallback = label_components(sq, 8);
    roi_intensity_sums(zero, fallback);
    CHECK(fallback[0].intensity_sum == 0.0);
    CHECK(fallback[0].centroid.x == doctest::Approx(expect.x));
}

} // TEST_SUITE
