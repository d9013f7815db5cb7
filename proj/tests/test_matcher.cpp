#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "asiftseg/matcher.hpp"
#include "asiftseg/model.hpp"
#include "fixtures.hpp"

using namespace asiftseg;

namespace {

Descriptor unit_axis(size_t axis) {
    Descriptor d;
    d.values[axis] = 1.0;
    return d;
}

// Unit vector at the given angle from e_a toward e_b; its distance to e_a
// is 2*sin(angle/2).
Descriptor rotated_unit(size_t a, size_t b, double angle) {
    Descriptor d;
    d.values[a] = std::cos(angle);
    d.values[b] = std::sin(angle);
    return d;
}

Descriptor random_unit(std::mt19937& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Descriptor d;
    double norm = 0.0;
    for (auto& v : d.values) {
        v = g(rng);
        norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : d.values) v = std::abs(v) / norm;
    return d;
}

}  // namespace

TEST_CASE("self-matching two distinct unit vectors") {
    const std::vector<Descriptor> set = {unit_axis(0), unit_axis(1)};
    const auto matches = match_descriptors(set, set, 0.8);
    REQUIRE(matches.size() == 2);
    for (const auto& m : matches) {
        REQUIRE(m.query_index == m.train_index);
        REQUIRE(m.distance == 0.0);
        REQUIRE(m.ratio == 0.0);
    }
}

TEST_CASE("the ratio test rejects 0.9 and keeps 0.5") {
    const std::vector<Descriptor> query = {unit_axis(0)};
    const double d2 = 1.0;
    const double beta = 2.0 * std::asin(d2 / 2.0);

    {
        const double alpha = 2.0 * std::asin(0.45);  // d1 = 0.9 = 0.9 * d2
        const std::vector<Descriptor> train = {rotated_unit(0, 1, alpha),
                                               rotated_unit(0, 2, beta)};
        REQUIRE(match_descriptors(query, train, 0.8).empty());
    }
    {
        const double alpha = 2.0 * std::asin(0.25);  // d1 = 0.5 = 0.5 * d2
        const std::vector<Descriptor> train = {rotated_unit(0, 1, alpha),
                                               rotated_unit(0, 2, beta)};
        const auto matches = match_descriptors(query, train, 0.8);
        REQUIRE(matches.size() == 1);
        REQUIRE(matches[0].train_index == 0);
        REQUIRE(matches[0].distance == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(matches[0].ratio == Catch::Approx(0.5).margin(1e-12));
    }
}

TEST_CASE("a single train descriptor never matches") {
    const std::vector<Descriptor> query = {unit_axis(0), unit_axis(3)};
    const std::vector<Descriptor> train = {unit_axis(0)};
    REQUIRE(match_descriptors(query, train, 0.8).empty());
    REQUIRE(match_descriptors(query, {}, 0.8).empty());
    REQUIRE(match_descriptors({}, query, 0.8).empty());
}

TEST_CASE("descriptor distance is symmetric") {
    std::mt19937 rng(51);
    for (int i = 0; i < 20; ++i) {
        const Descriptor a = random_unit(rng), b = random_unit(rng);
        REQUIRE(descriptor_distance(a, b) == descriptor_distance(b, a));
    }
}

TEST_CASE("matches agree exactly with a brute-force oracle") {
    std::mt19937 rng(53);
    std::uniform_int_distribution<int> size(2, 50);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Descriptor> query, train;
        const int nq = size(rng), nt = size(rng);
        for (int i = 0; i < nq; ++i) query.push_back(random_unit(rng));
        for (int i = 0; i < nt; ++i) train.push_back(random_unit(rng));

        const auto got = match_descriptors(query, train, 0.8);

        // oracle: independent double loop, same tie and zero-distance rules
        std::vector<Match> expected;
        for (int qi = 0; qi < nq; ++qi) {
            double best = 1e300, second = 1e300;
            int best_idx = -1;
            for (int ti = 0; ti < nt; ++ti) {
                double s = 0.0;
                for (size_t k = 0; k < 128; ++k) {
                    const double d = query[qi].values[k] - train[ti].values[k];
                    s += d * d;
                }
                if (s < best) {
                    second = best;
                    best = s;
                    best_idx = ti;
                } else if (s < second) {
                    second = s;
                }
            }
            const double d1 = std::sqrt(best), d2 = std::sqrt(second);
            const double ratio = (d2 == 0.0) ? 0.0 : d1 / d2;
            if (ratio < 0.8) expected.push_back({qi, best_idx, d1, ratio});
        }

        REQUIRE(got.size() == expected.size());
        for (size_t i = 0; i < got.size(); ++i) {
            REQUIRE(got[i].query_index == expected[i].query_index);
            REQUIRE(got[i].train_index == expected[i].train_index);
            REQUIRE(got[i].distance == expected[i].distance);
            REQUIRE(got[i].ratio == expected[i].ratio);
        }

        // widening the threshold only adds matches
        const auto narrow = match_descriptors(query, train, 0.6);
        std::set<std::pair<int, int>> wide_set;
        for (const auto& m : got) wide_set.insert({m.query_index, m.train_index});
        for (const auto& m : narrow) {
            REQUIRE(wide_set.count({m.query_index, m.train_index}) == 1);
        }

        std::set<int> queries;
        for (const auto& m : got) {
            REQUIRE(m.ratio < 0.8);
            REQUIRE(queries.insert(m.query_index).second);  // one match per query
        }
    }
}

namespace {

AsiftParams small_params() {
    AsiftParams p;
    p.max_tilt_exponent = 1;  // keep the unit tests quick
    return p;
}

}  // namespace

TEST_CASE("training on a constant image reports no keypoints") {
    const std::vector<ColorImage> images = {ColorImage(64, 64, 120, 120, 120)};
    REQUIRE_THROWS_AS(train_model(images, "flat", small_params()), NoResult);
}

TEST_CASE("training unions descriptors across images") {
    const ColorImage img = fixtures::colorize(fixtures::textured_raster(64, 64, 61));
    const AsiftParams p = small_params();
    const size_t single = detect_asift(to_grayscale(img), p).size();
    REQUIRE(single > 0);

    const ObjectModel model = train_model({img, img}, "twice", p);
    REQUIRE(model.descriptors.size() == 2 * single);
    REQUIRE(model.source_count == 2);
    REQUIRE(model.name == "twice");
    for (const auto& d : model.descriptors) {
        REQUIRE(d.l2_norm() == Catch::Approx(1.0).margin(1e-5));
    }
}

TEST_CASE("consensus filtering on identical images keeps mutual duplicates") {
    const ColorImage img = fixtures::colorize(fixtures::textured_raster(64, 64, 63));
    TrainOptions opt;
    opt.consensus_filter = true;
    const ObjectModel model = train_model({img, img}, "dup", small_params(), opt);
    REQUIRE_FALSE(model.descriptors.empty());
    for (size_t i = 0; i < model.descriptors.size(); ++i) {
        double best = 1e300;
        for (size_t j = 0; j < model.descriptors.size(); ++j) {
            if (j == i) continue;
            best = std::min(best, descriptor_distance(model.descriptors[i],
                                                      model.descriptors[j]));
        }
        REQUIRE(best <= 1e-12);
    }
}

TEST_CASE("model files round trip and reject foreign content") {
    const ColorImage img = fixtures::colorize(fixtures::textured_raster(64, 64, 65));
    const AsiftParams p = small_params();
    const ObjectModel model = train_model({img}, "roundtrip", p);

    save_model("model_test.asfm", model);
    const ObjectModel back = load_model("model_test.asfm");
    REQUIRE(back.name == model.name);
    REQUIRE(back.source_count == model.source_count);
    REQUIRE(back.params_fingerprint == model.params_fingerprint);
    REQUIRE(back.params_fingerprint == params_fingerprint(p));
    REQUIRE(back.descriptors.size() == model.descriptors.size());
    for (size_t i = 0; i < back.descriptors.size(); ++i) {
        for (size_t k = 0; k < 128; ++k) {
            // float32 storage
            REQUIRE(back.descriptors[i].values[k] ==
                    static_cast<double>(static_cast<float>(model.descriptors[i].values[k])));
        }
    }

    // saving the loaded model reproduces the bytes
    save_model("model_test2.asfm", back);
    std::ifstream f1("model_test.asfm", std::ios::binary), f2("model_test2.asfm", std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), {});
    const std::string b2((std::istreambuf_iterator<char>(f2)), {});
    REQUIRE(b1 == b2);

    {
        std::ofstream bad("model_bad.asfm", std::ios::binary);
        bad << "NOPE" << std::string(64, '\0');
    }
    REQUIRE_THROWS_AS(load_model("model_bad.asfm"), IoError);

    {
        // correct magic, unsupported version
        std::ofstream bad("model_badver.asfm", std::ios::binary);
        bad << "ASFM";
        const unsigned char ver[4] = {9, 0, 0, 0};
        bad.write(reinterpret_cast<const char*>(ver), 4);
    }
    REQUIRE_THROWS_AS(load_model("model_badver.asfm"), IoError);

    std::remove("model_test.asfm");
    std::remove("model_test2.asfm");
    std::remove("model_bad.asfm");
    std::remove("model_badver.asfm");
}

TEST_CASE("locate finds a trained image in itself and nothing in a flat one") {
    const ColorImage img = fixtures::colorize(fixtures::textured_raster(96, 96, 67));
    const AsiftParams p = small_params();
    const ObjectModel model = train_model({img}, "self", p);

    long detected = 0, matched = 0;
    {
        const Raster gray = to_grayscale(img);
        const auto features = detect_asift(gray, p);
        std::vector<Descriptor> query;
        for (const auto& f : features) query.push_back(f.descriptor);
        detected = static_cast<long>(features.size());
        matched = static_cast<long>(match_descriptors(query, model.descriptors, 0.8).size());
    }
    REQUIRE(detected > 0);
    REQUIRE(matched * 2 >= detected);  // at least half match back

    const auto points = locate_keypoints(img, model, p, 0.8, false);
    REQUIRE_FALSE(points.empty());
    for (const auto& pt : points) {
        REQUIRE(pt.x >= 0.0);
        REQUIRE(pt.x < 96.0);
        REQUIRE(pt.y >= 0.0);
        REQUIRE(pt.y < 96.0);
    }

    const auto none = locate_keypoints(ColorImage(64, 64, 80, 80, 80), model, p, 0.8, false);
    REQUIRE(none.empty());
}
