#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "asiftseg/asift.hpp"
#include "fixtures.hpp"

using namespace asiftseg;

TEST_CASE("generate_views samples the tilt/longitude grid") {
    AsiftParams p;
    p.max_tilt_exponent = 0;
    const auto single = generate_views(p);
    REQUIRE(single.size() == 1);
    REQUIRE(single[0].t == 1.0);
    REQUIRE(single[0].phi_deg == 0.0);
    REQUIRE(single[0].antialias_sigma == 0.0);

    p.max_tilt_exponent = 5;
    const auto views = generate_views(p);
    const double expected_tilts[6] = {1.0, 1.414, 2.0, 2.828, 4.0, 5.657};
    std::vector<double> tilts;
    for (const auto& v : views) {
        if (tilts.empty() || std::abs(tilts.back() - v.t) > 1e-9) tilts.push_back(v.t);
    }
    REQUIRE(tilts.size() == 6);
    for (int i = 0; i < 6; ++i) {
        REQUIRE(tilts[i] == Catch::Approx(expected_tilts[i]).margin(1e-3));
    }

    // t = 2: step 36, longitudes 0..144
    std::vector<double> phis;
    for (const auto& v : views) {
        if (std::abs(v.t - 2.0) < 1e-9) phis.push_back(v.phi_deg);
    }
    REQUIRE(phis == std::vector<double>{0.0, 36.0, 72.0, 108.0, 144.0});

    // total count matches direct enumeration of the rule
    size_t expected_count = 1;
    for (int k = 1; k <= 5; ++k) {
        const double t = std::pow(2.0, 0.5 * k);
        const double step = 72.0 / t;
        size_t n = 0;
        for (double phi = 0.0; phi < 180.0 - 1e-9; phi += step) ++n;
        expected_count += n;
    }
    REQUIRE(views.size() == expected_count);

    // ordering: by tilt exponent, then longitude
    for (size_t i = 1; i < views.size(); ++i) {
        REQUIRE((views[i].t > views[i - 1].t - 1e-12 ||
                 (views[i].t == views[i - 1].t && views[i].phi_deg > views[i - 1].phi_deg)));
    }
}

TEST_CASE("simulate_view compresses the vertical axis and blurs first") {
    const Raster img(64, 64, 0.37);

    ViewSpec identity{1.0, 0.0, 0.0};
    const SimulatedView same = simulate_view(img, identity);
    REQUIRE(same.image.data == img.data);

    ViewSpec tilt2{2.0, 0.0, antialias_sigma_for_tilt(2.0)};
    REQUIRE(tilt2.antialias_sigma == Catch::Approx(0.8 * std::sqrt(3.0)).margin(1e-9));
    REQUIRE(tilt2.antialias_sigma == Catch::Approx(1.386).margin(1e-3));
    const SimulatedView half = simulate_view(img, tilt2);
    REQUIRE(half.image.width == 64);
    REQUIRE(half.image.height == 32);
    for (double v : half.image.data) REQUIRE(v == Catch::Approx(0.37).margin(1e-6));
}

TEST_CASE("a single identity view reproduces detect_sift bit for bit") {
    const Raster x = fixtures::textured_raster(64, 64, 33);
    AsiftParams p;
    p.max_tilt_exponent = 0;
    const auto a = detect_asift(x, p);
    const auto s = detect_sift(x, p.sift);
    REQUIRE(a.size() == s.size());
    for (size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].keypoint.x == s[i].keypoint.x);
        REQUIRE(a[i].keypoint.y == s[i].keypoint.y);
        REQUIRE(a[i].keypoint.sigma == s[i].keypoint.sigma);
        REQUIRE(a[i].keypoint.orientation == s[i].keypoint.orientation);
        REQUIRE(a[i].descriptor.values == s[i].descriptor.values);
        REQUIRE(a[i].view == 0);
    }
}

TEST_CASE("asift keypoints stay inside the original frame and outnumber sift") {
    const Raster x = fixtures::textured_raster(128, 128, 35);
    AsiftParams p;
    const auto feats = detect_asift(x, p);
    const auto plain = detect_sift(x, p.sift);
    REQUIRE(feats.size() > plain.size());
    for (const auto& f : feats) {
        REQUIRE(f.keypoint.x >= 0.0);
        REQUIRE(f.keypoint.x < 128.0);
        REQUIRE(f.keypoint.y >= 0.0);
        REQUIRE(f.keypoint.y < 128.0);
    }
    // deterministic ordering by (view, sift order)
    for (size_t i = 1; i < feats.size(); ++i) {
        REQUIRE(feats[i].view >= feats[i - 1].view);
    }
}

TEST_CASE("back-projected keypoints forward-map onto the simulated view detections") {
    const Raster x = fixtures::textured_raster(96, 96, 37);
    AsiftParams p;
    p.max_tilt_exponent = 2;
    const auto views = generate_views(p);
    const auto feats = detect_asift(x, p);

    for (size_t vi = 0; vi < views.size(); ++vi) {
        const SimulatedView sim = simulate_view(x, views[vi]);
        if (std::min(sim.image.width, sim.image.height) < p.sift.min_octave_dim) continue;
        const auto view_feats = detect_sift(sim.image, p.sift);
        for (const auto& f : feats) {
            if (f.view != static_cast<int>(vi)) continue;
            double fx, fy;
            sim.map.apply_pixel(f.keypoint.x, f.keypoint.y, fx, fy);
            double best = 1e9;
            for (const auto& vf : view_feats) {
                const double dx = vf.keypoint.x - fx, dy = vf.keypoint.y - fy;
                best = std::min(best, std::sqrt(dx * dx + dy * dy));
            }
            REQUIRE(best <= 0.5);
        }
    }
}

TEST_CASE("views below the sift minimum are skipped, not fatal") {
    const Raster tiny = fixtures::textured_raster(20, 20, 39);
    AsiftParams p;  // tilts up to 5.66 shrink 20 px below the minimum of 16
    const auto feats = detect_asift(tiny, p);
    for (const auto& f : feats) {
        REQUIRE(f.keypoint.x >= 0.0);
        REQUIRE(f.keypoint.x < 20.0);
    }
    REQUIRE_THROWS_AS(detect_asift(Raster(8, 8, 0.5), p), InvalidInput);
}
