#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "midas/fingerprint.hpp"
#include "midas/preprocess.hpp"
#include "midas/simulate.hpp"

using namespace midas;
using namespace midas::fp;

namespace {

GrayFrame constant_gray(int w, int h, std::uint32_t idx, std::uint8_t v) {
    return GrayFrame(w, h, idx, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, v));
}

} // namespace

TEST_CASE("hot area counting") {
    CHECK(hot_area(constant_gray(4, 4, 0, 0), 1) == 0);
    CHECK(hot_area(constant_gray(6, 4, 0, 255), 200) == 24);

    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::uint8_t> px(10 * 10);
        for (auto& p : px)
            p = static_cast<std::uint8_t>(gen());
        GrayFrame f(10, 10, 0, px);
        const std::uint8_t threshold = 1 + static_cast<std::uint8_t>(gen() % 255);
        std::size_t naive = 0;
        for (std::uint8_t v : px)
            if (v >= threshold)
                ++naive;
        CHECK(hot_area(f, threshold) == naive);
    }
}

TEST_CASE("reduction area follows the ratio formula") {
    CHECK(reduction_area(100, 100) == 0.0);
    CHECK(reduction_area(100, 0) == 1.0);
    CHECK(reduction_area(200, 50) == 0.75);
    CHECK(reduction_area(100, 150) == 0.0); // clamp a_t to a_i
    CHECK_THROWS_AS(reduction_area(0, 5), DomainError);
}

TEST_CASE("extract_vector on constructed sequences") {
    FingerprintConfig cfg;
    cfg.intensity_threshold = 100;
    cfg.vector_len = 4;

    SUBCASE("fully hot sequence stays at 1") {
        std::vector<GrayFrame> frames;
        for (std::uint32_t i = 0; i < 4; ++i)
            frames.push_back(constant_gray(3, 3, i, 255));
        const DissipationVector v = extract_vector(frames, cfg, 8000);
        CHECK(v.values() == std::vector<double>{1.0, 1.0, 1.0, 1.0});
    }
    SUBCASE("single hot frame then cold pads with zeros") {
        std::vector<GrayFrame> frames = {constant_gray(3, 3, 0, 255),
                                         constant_gray(3, 3, 1, 0)};
        const DissipationVector v = extract_vector(frames, cfg, 8000);
        CHECK(v.values() == std::vector<double>{1.0, 0.0, 0.0, 0.0});
    }
    SUBCASE("over-long sequences are truncated to L") {
        std::vector<GrayFrame> frames;
        for (std::uint32_t i = 0; i < 10; ++i)
            frames.push_back(constant_gray(3, 3, i, 255));
        CHECK(extract_vector(frames, cfg, 8000).length() == 4);
    }
    SUBCASE("cold first frame is a no-fingerprint error") {
        std::vector<GrayFrame> frames = {constant_gray(3, 3, 0, 0)};
        CHECK_THROWS_AS(extract_vector(frames, cfg, 8000), DomainError);
    }
    SUBCASE("vector equals 1 - RA elementwise") {
        std::mt19937_64 gen(31);
        std::vector<GrayFrame> frames;
        for (std::uint32_t i = 0; i < 4; ++i) {
            std::vector<std::uint8_t> px(25);
            for (auto& p : px)
                p = static_cast<std::uint8_t>(gen());
            frames.emplace_back(5, 5, i, std::move(px));
        }
        if (hot_area(frames[0], cfg.intensity_threshold) > 0) {
            const DissipationVector v = extract_vector(frames, cfg, 8000);
            const std::size_t a_i = hot_area(frames[0], cfg.intensity_threshold);
            bool gone = false;
            for (std::size_t t = 0; t < frames.size(); ++t) {
                const double expect =
                    gone ? 0.0
                         : 1.0 - reduction_area(a_i, hot_area(frames[t], cfg.intensity_threshold));
                CHECK(v.values()[t] == expect);
                if (expect == 0.0)
                    gone = true;
            }
        }
    }
}

TEST_CASE("simulator vector tracks the closed-form area oracle") {
    sim::SceneSpec spec;
    spec.width = 64;
    spec.height = 64;
    spec.fps_millihz = 4000;
    spec.duration_s = 30.0;
    spec.ambient_c = 23.0;
    sim::SceneObject obj;
    obj.profile.tau_s = 12.0;
    obj.profile.spot_sigma_px = 5.0;
    obj.center_x = 32;
    obj.center_y = 32;
    obj.initial_excess_c = 14.0;
    spec.objects.push_back(obj);
    const FrameSequence seq = sim::render_scene(spec);

    const pre::PreprocessConfig pcfg = pre::default_config(seq.ambient_centikelvin());
    FingerprintConfig cfg;
    cfg.intensity_threshold =
        intensity_for_excess(2.0, pcfg.norm_floor_centikelvin, pcfg.norm_ceil_centikelvin);
    cfg.vector_len = seq.frames().size();

    std::vector<GrayFrame> gray;
    for (const RawFrame& f : seq.frames())
        gray.push_back(pre::normalize(f, pcfg.norm_floor_centikelvin, pcfg.norm_ceil_centikelvin));
    const DissipationVector v = extract_vector(gray, cfg, spec.fps_millihz);

    const double theta = effective_threshold_excess_c(
        cfg.intensity_threshold, pcfg.norm_floor_centikelvin, pcfg.norm_ceil_centikelvin);
    const double a_i = sim::analytic_hot_area_px(obj.profile, obj.initial_excess_c, theta);
    for (std::size_t t = 0; t < v.length(); ++t) {
        const double peak = obj.initial_excess_c * std::exp(-(t / 4.0) / obj.profile.tau_s);
        const double a_t = sim::analytic_hot_area_px(obj.profile, peak, theta);
        const double perimeter = 2.0 * M_PI * std::sqrt(std::max(a_t / M_PI, 1.0));
        CHECK(std::abs(v.values()[t] * a_i - a_t) <= 2.0 * perimeter + 2.0);
    }

    SUBCASE("noise-free vectors are non-increasing") {
        for (std::size_t t = 1; t < v.length(); ++t)
            CHECK(v.values()[t] <= v.values()[t - 1]);
    }
}

TEST_CASE("dissipation time") {
    SUBCASE("first sub-epsilon index over fps") {
        DissipationVector v({1.0, 0.0, 0.0}, 8000);
        const DissipationTime dt = dissipation_time(v, 0.05);
        CHECK(dt.seconds == doctest::Approx(0.125));
        CHECK_FALSE(dt.still_dissipating);
    }
    SUBCASE("all-ones vector is still dissipating") {
        DissipationVector v({1.0, 1.0, 1.0}, 8000);
        const DissipationTime dt = dissipation_time(v, 0.05);
        CHECK(dt.still_dissipating);
        CHECK(dt.seconds == doctest::Approx(3.0 / 8.0));
    }
    SUBCASE("matches the analytic oracle on a simulator scene") {
        // tau = 30 s and initial/threshold = e^2 puts the crossing at 60 s
        sim::SceneSpec spec;
        spec.width = 32;
        spec.height = 32;
        spec.fps_millihz = 4000;
        spec.duration_s = 70.0;
        spec.ambient_c = 23.0;
        sim::SceneObject obj;
        obj.profile.tau_s = 30.0;
        obj.profile.spot_sigma_px = 3.0;
        obj.center_x = 16;
        obj.center_y = 16;
        spec.objects.push_back(obj);

        const pre::PreprocessConfig pcfg =
            pre::default_config(celsius_to_centikelvin(spec.ambient_c));
        FingerprintConfig cfg;
        cfg.intensity_threshold = 26;
        const double theta = effective_threshold_excess_c(
            cfg.intensity_threshold, pcfg.norm_floor_centikelvin, pcfg.norm_ceil_centikelvin);
        spec.objects[0].initial_excess_c = theta * std::exp(2.0);

        const FrameSequence seq = sim::render_scene(spec);
        cfg.vector_len = seq.frames().size();
        std::vector<GrayFrame> gray;
        for (const RawFrame& f : seq.frames())
            gray.push_back(
                pre::normalize(f, pcfg.norm_floor_centikelvin, pcfg.norm_ceil_centikelvin));
        const DissipationVector v = extract_vector(gray, cfg, spec.fps_millihz);
        const DissipationTime dt = dissipation_time(v, 1e-6);
        const double analytic = sim::analytic_dissipation_time(
            spec.objects[0].profile, spec.objects[0].initial_excess_c, theta);
        CHECK(analytic == doctest::Approx(60.0).epsilon(1e-9));
        CHECK(std::abs(dt.seconds - analytic) <= seq.frame_period_s());
    }
}

TEST_CASE("dissipation time is monotone in initial excess") {
    const pre::PreprocessConfig pcfg = pre::default_config(celsius_to_centikelvin(23.0));
    FingerprintConfig cfg;
    cfg.intensity_threshold = 26;
    double prev = 0.0;
    for (double excess : {13.0, 14.0, 15.0, 16.0}) {
        sim::SceneSpec spec;
        spec.width = 32;
        spec.height = 32;
        spec.fps_millihz = 8000;
        spec.duration_s = 40.0;
        spec.ambient_c = 23.0;
        sim::SceneObject obj;
        obj.profile.tau_s = 15.0;
        obj.profile.spot_sigma_px = 3.0;
        obj.center_x = 16;
        obj.center_y = 16;
        obj.initial_excess_c = excess;
        spec.objects.push_back(obj);
        const FrameSequence seq = sim::render_scene(spec);
        cfg.vector_len = seq.frames().size();
        std::vector<GrayFrame> gray;
        for (const RawFrame& f : seq.frames())
            gray.push_back(
                pre::normalize(f, pcfg.norm_floor_centikelvin, pcfg.norm_ceil_centikelvin));
        const double t =
            dissipation_time(extract_vector(gray, cfg, spec.fps_millihz), 1e-6).seconds;
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("spearman correlation") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(spearman({1, 2}, {1, 2}), DomainError);
    CHECK_THROWS_AS(spearman({1, 2, 3}, {1, 2}), DomainError);

    SUBCASE("ties match a rank-then-Pearson oracle") {
        const std::vector<double> xs = {1.0, 2.0, 2.0, 3.0, 5.0, 5.0, 5.0};
        const std::vector<double> ys = {2.0, 1.0, 4.0, 4.0, 6.0, 8.0, 8.0};
        // average ranks computed by hand
        const std::vector<double> rx = {1.0, 2.5, 2.5, 4.0, 6.0, 6.0, 6.0};
        const std::vector<double> ry = {2.0, 1.0, 3.5, 3.5, 5.0, 6.5, 6.5};
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < rx.size(); ++i) {
            mx += rx[i];
            my += ry[i];
        }
        mx /= rx.size();
        my /= ry.size();
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < rx.size(); ++i) {
            sxy += (rx[i] - mx) * (ry[i] - my);
            sxx += (rx[i] - mx) * (rx[i] - mx);
            syy += (ry[i] - my) * (ry[i] - my);
        }
        const double pearson_on_ranks = sxy / std::sqrt(sxx * syy);
        CHECK(spearman(xs, ys) == doctest::Approx(pearson_on_ranks).epsilon(1e-12));
    }
}

TEST_CASE("MDV1 text format round-trips") {
    DissipationVector v({1.0, 0.75, 0.33333333, 0.0, 0.0}, 8000);
    std::stringstream ss;
    write_vector(v, ss);
    CHECK(ss.str().starts_with("MDV1 5 8000\n"));
    CHECK(read_vector(ss) == v);

    std::istringstream bad("MDVX 2 1000\n1.0\n0.5\n");
    CHECK_THROWS_AS(read_vector(bad), FormatError);
    std::istringstream truncated("MDV1 3 1000\n1.0\n0.5\n");
    CHECK_THROWS_AS(read_vector(truncated), FormatError);
}
