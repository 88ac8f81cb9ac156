#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "midas/simulate.hpp"

using namespace midas;
using namespace midas::sim;

namespace {

SceneSpec one_object_scene(double tau_s, double excess_c, double sigma_px = 3.0) {
    SceneSpec spec;
    spec.width = 32;
    spec.height = 24;
    spec.fps_millihz = 8000;
    spec.duration_s = 2.0;
    spec.ambient_c = 23.0;
    spec.noise_sigma_c = 0.0;
    SceneObject obj;
    obj.profile.name = "m";
    obj.profile.tau_s = tau_s;
    obj.profile.spot_sigma_px = sigma_px;
    obj.center_x = 16;
    obj.center_y = 12;
    obj.initial_excess_c = excess_c;
    spec.objects.push_back(obj);
    return spec;
}

// scalar re-evaluation of the rendering formula, independent of render_scene
double expected_temp_c(const SceneSpec& spec, int x, int y, double t_s) {
    double temp = spec.ambient_c;
    for (const SceneObject& o : spec.objects) {
        const double dx = x - o.center_x;
        const double dy = y - o.center_y;
        const double excess =
            o.initial_excess_c * std::exp(-o.profile.resistance_k_per_mm * o.cover_thickness_mm);
        temp += excess * std::exp(-t_s / o.profile.tau_s) *
                std::exp(-(dx * dx + dy * dy) /
                         (2.0 * o.profile.spot_sigma_px * o.profile.spot_sigma_px));
    }
    return temp;
}

} // namespace

TEST_CASE("center pixel at t=0 equals ambient plus initial excess") {
    const SceneSpec spec = one_object_scene(60.0, 13.0);
    const FrameSequence seq = render_scene(spec);
    const double temp = centikelvin_to_celsius(seq.frames()[0].at(16, 12));
    CHECK(temp == doctest::Approx(23.0 + 13.0).epsilon(1e-3));
}

TEST_CASE("one time constant drops the center excess to 1/e") {
    SceneSpec spec = one_object_scene(60.0, 13.0);
    spec.duration_s = 61.0;
    const FrameSequence seq = render_scene(spec);
    const std::size_t idx = 60 * 8; // t = 60 s at 8 Hz
    const double excess = centikelvin_to_celsius(seq.frames()[idx].at(16, 12)) - 23.0;
    CHECK(excess == doctest::Approx(13.0 / std::exp(1.0)).epsilon(2e-3));
}

TEST_CASE("full frames match per-pixel brute-force evaluation") {
    SceneSpec spec = one_object_scene(45.0, 12.0);
    SceneObject second;
    second.profile.name = "m2";
    second.profile.tau_s = 90.0;
    second.profile.spot_sigma_px = 2.0;
    second.profile.resistance_k_per_mm = 0.4;
    second.center_x = 8;
    second.center_y = 6;
    second.initial_excess_c = 9.0;
    second.cover_thickness_mm = 1.5;
    spec.objects.push_back(second);
    const FrameSequence seq = render_scene(spec);
    const double fps_hz = spec.fps_millihz / 1000.0;
    for (const RawFrame& f : seq.frames()) {
        for (int y = 0; y < f.height(); ++y) {
            for (int x = 0; x < f.width(); ++x) {
                const double expect = expected_temp_c(spec, x, y, f.index() / fps_hz);
                const double got_ck = f.at(x, y);
                CHECK(std::abs(got_ck - (expect + 273.15) * 100.0) <= 0.5);
            }
        }
    }
}

TEST_CASE("identical spec renders bit-identical sequences") {
    SceneSpec spec = one_object_scene(60.0, 13.0);
    spec.noise_sigma_c = 0.4;
    spec.rng_seed = 1234;
    CHECK(render_scene(spec) == render_scene(spec));
    spec.rng_seed = 1235;
    CHECK(!(render_scene(spec) == render_scene(one_object_scene(60.0, 13.0))));
}

TEST_CASE("noise-free peak cools monotonically") {
    SceneSpec spec = one_object_scene(20.0, 14.0);
    spec.duration_s = 10.0;
    const FrameSequence seq = render_scene(spec);
    std::uint16_t prev = 65535;
    for (const RawFrame& f : seq.frames()) {
        const std::uint16_t peak = f.at(16, 12);
        CHECK(peak <= prev);
        prev = peak;
    }
}

TEST_CASE("zero objects is rejected") {
    SceneSpec spec = one_object_scene(60.0, 13.0);
    spec.objects.clear();
    CHECK_THROWS_WITH_AS(render_scene(spec), "scene must contain >= 1 object", DomainError);
}

TEST_CASE("analytic dissipation time") {
    MaterialProfile m;
    m.tau_s = 60.0;
    CHECK(analytic_dissipation_time(m, 5.0, 5.0) == 0.0);
    CHECK(analytic_dissipation_time(m, std::exp(1.0) * 2.0, 2.0) == doctest::Approx(60.0));
    CHECK_THROWS_AS(analytic_dissipation_time(m, -1.0, 2.0), DomainError);
    CHECK_THROWS_AS(analytic_dissipation_time(m, 1.0, 0.0), DomainError);
}

TEST_CASE("attenuated excess") {
    MaterialProfile m;
    m.resistance_k_per_mm = 0.5;
    CHECK(attenuated_excess(10.0, m, 0.0) == 10.0);
    MaterialProfile zero_k;
    zero_k.resistance_k_per_mm = 0.0;
    CHECK(attenuated_excess(10.0, zero_k, 7.3) == 10.0);
    // the 4-layer plastic stack from the thickness ladder
    CHECK(attenuated_excess(1.0, m, 1.95) == doctest::Approx(std::exp(-0.975)).epsilon(1e-12));
    CHECK_THROWS_AS(attenuated_excess(10.0, m, -0.1), DomainError);
}

TEST_CASE("camera resampling") {
    SceneSpec spec = one_object_scene(60.0, 13.0);
    spec.duration_s = 0.5;
    const FrameSequence seq = render_scene(spec);

    SUBCASE("identity dims keep pixels") {
        const FrameSequence same = resample_camera(seq, seq.width(), seq.height());
        CHECK(same.frames()[0].pixels() == seq.frames()[0].pixels());
    }
    SUBCASE("2x2 constant block averages to itself") {
        FrameSequence tiny({RawFrame(2, 2, 0, {100, 100, 100, 100})}, 8000, 0);
        const FrameSequence out = resample_camera(tiny, 1, 1);
        CHECK(out.frames()[0].pixels() == std::vector<std::uint16_t>{100});
    }
    SUBCASE("upsampling is rejected") {
        CHECK_THROWS_AS(resample_camera(seq, seq.width() + 1, seq.height()), DomainError);
    }
    SUBCASE("matches brute-force block mean") {
        const int ow = 8, oh = 6;
        const FrameSequence out = resample_camera(seq, ow, oh);
        const RawFrame& in = seq.frames()[0];
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                const int x0 = ox * in.width() / ow, x1 = (ox + 1) * in.width() / ow;
                const int y0 = oy * in.height() / oh, y1 = (oy + 1) * in.height() / oh;
                double sum = 0.0;
                int count = 0;
                for (int y = y0; y < y1; ++y)
                    for (int x = x0; x < x1; ++x) {
                        sum += in.at(x, y);
                        ++count;
                    }
                const auto expect = static_cast<std::uint16_t>(std::floor(sum / count + 0.5));
                CHECK(out.frames()[0].at(ox, oy) == expect);
            }
        }
    }
}

TEST_CASE("cooling fit recovers synthetic parameters") {
    MaterialProfile m;
    m.tau_s = 120.0;
    std::vector<double> excesses = {8.0, 10.0, 12.0, 14.0};
    std::vector<double> times;
    for (double e : excesses)
        times.push_back(analytic_dissipation_time(m, e, 2.5));
    const CoolingFit fit = fit_cooling(times, excesses);
    CHECK(fit.tau_s == doctest::Approx(120.0).epsilon(0.02));
    CHECK(fit.theta_c == doctest::Approx(2.5).epsilon(0.02));
    for (double r : fit.residuals_s)
        CHECK(std::abs(r) < 1.0);
}

TEST_CASE("scene spec document round-trips through the parser") {
    std::istringstream doc(R"(# demo scene
width 40
height 30
fps_millihz 8000
duration_s 12.5
ambient_c 23
noise_sigma_c 0.3
seed 99
object
  material plastic
  tau_s 60
  emissivity 0.9
  spot_sigma_px 3
  resistance_k_per_mm 0.5
  center_x 20
  center_y 15
  initial_excess_c 13
  cover_thickness_mm 0.44
end
)");
    const SceneSpec spec = parse_scene_spec(doc);
    CHECK(spec.width == 40);
    CHECK(spec.height == 30);
    CHECK(spec.duration_s == 12.5);
    CHECK(spec.rng_seed == 99);
    REQUIRE(spec.objects.size() == 1);
    CHECK(spec.objects[0].profile.name == "plastic");
    CHECK(spec.objects[0].profile.tau_s == 60.0);
    CHECK(spec.objects[0].cover_thickness_mm == 0.44);
}

TEST_CASE("scene spec parser rejects malformed documents") {
    std::istringstream bad_key("width 10\nheight 10\nbogus 1\n");
    CHECK_THROWS_AS(parse_scene_spec(bad_key), FormatError);
    std::istringstream unterminated("width 10\nheight 10\nobject\n tau_s 5\n");
    CHECK_THROWS_AS(parse_scene_spec(unterminated), FormatError);
}

TEST_CASE("material sweep maps emissivity onto tau affinely and monotonically") {
    const auto sweep = make_material_sweep(10, 20.0, 100.0);
    REQUIRE(sweep.size() == 10);
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        CHECK(sweep[i].emissivity > sweep[i - 1].emissivity);
        CHECK(sweep[i].tau_s > sweep[i - 1].tau_s);
        CHECK(sweep[i].tau_s ==
              doctest::Approx(20.0 + 100.0 * sweep[i].emissivity).epsilon(1e-12));
    }
}
