#include "midas/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "midas/fingerprint.hpp"
#include "midas/learn.hpp"
#include "midas/preprocess.hpp"
#include "midas/segment.hpp"
#include "midas/simulate.hpp"

namespace midas::bench {

int object_count(ArrangementGroup g) { return static_cast<int>(g) + 1; }

char arrangement_letter(ArrangementGroup g) {
    return static_cast<char>('A' + static_cast<int>(g));
}

namespace {

constexpr double kAmbientC = 23.0;
constexpr double kSpotSigmaPx = 2.5;

sim::MaterialProfile bench_material(int index) {
    sim::MaterialProfile m;
    m.name = "bench_material_" + std::to_string(index);
    m.tau_s = 15.0 + 12.0 * index;
    m.emissivity = 0.5 + 0.1 * index;
    m.spot_sigma_px = kSpotSigmaPx;
    return m;
}

sim::SceneSpec bench_scene(const BenchConfig& cfg, ArrangementGroup g, bool agglomerated,
                           double length_s, std::uint64_t seed) {
    sim::SceneSpec spec;
    spec.width = cfg.width;
    spec.height = cfg.height;
    spec.fps_millihz = cfg.fps_millihz;
    spec.duration_s = length_s;
    spec.ambient_c = kAmbientC;
    spec.noise_sigma_c = 0.0;
    spec.rng_seed = seed;

    const int n = object_count(g);
    const double spacing = agglomerated ? 2.0 * kSpotSigmaPx : 6.0 * kSpotSigmaPx;
    const double cx0 = cfg.width / 2.0 - spacing * (n - 1) / 2.0;
    for (int i = 0; i < n; ++i) {
        sim::SceneObject obj;
        obj.profile = bench_material(i);
        obj.center_x = cx0 + spacing * i;
        obj.center_y = cfg.height / 2.0;
        obj.initial_excess_c = 13.0;
        spec.objects.push_back(obj);
    }
    return spec;
}

double percentile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double pos = p * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - lo;
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    cfg.validate();

    const double fps_hz = cfg.fps_millihz / 1000.0;
    const double max_len = *std::max_element(cfg.video_lengths_s.begin(),
                                             cfg.video_lengths_s.end());
    fp::FingerprintConfig fcfg;
    fcfg.vector_len = std::max<std::size_t>(2, static_cast<std::size_t>(max_len * fps_hz + 0.5));
    pre::PreprocessConfig pcfg = pre::default_config(celsius_to_centikelvin(kAmbientC));

    // Training corpus: noise-free single-object scenes per material, small
    // excess jitter for within-class variation. Not part of any timed cell.
    const int max_objects = object_count(*std::max_element(cfg.arrangements.begin(),
                                                           cfg.arrangements.end()));
    learn::Dataset train;
    for (int m = 0; m < max_objects; ++m) {
        for (int rep = 0; rep < 3; ++rep) {
            sim::SceneSpec s;
            s.width = cfg.width;
            s.height = cfg.height;
            s.fps_millihz = cfg.fps_millihz;
            s.duration_s = max_len;
            s.ambient_c = kAmbientC;
            s.rng_seed = cfg.rng_seed;
            sim::SceneObject obj;
            obj.profile = bench_material(m);
            obj.center_x = cfg.width / 2.0;
            obj.center_y = cfg.height / 2.0;
            obj.initial_excess_c = 12.0 + rep;
            s.objects.push_back(obj);
            const FrameSequence seq = sim::render_scene(s);
            std::vector<GrayFrame> gray;
            for (const RawFrame& f : seq.frames())
                gray.push_back(pre::normalize(f, pcfg.norm_floor_centikelvin,
                                              pcfg.norm_ceil_centikelvin));
            train.push_back({fp::extract_vector(gray, fcfg, cfg.fps_millihz), std::nullopt,
                             std::nullopt, obj.profile.name});
        }
    }
    learn::ForestParams fparams;
    fparams.n_trees = 10;
    fparams.seed = cfg.rng_seed;
    const learn::ForestModel model = learn::train_forest(train, {}, fparams);

    std::vector<BenchRow> rows;
    for (double length : cfg.video_lengths_s) {
        for (ArrangementGroup g : cfg.arrangements) {
            for (int mode = 0; mode < (cfg.include_agglomerated ? 2 : 1); ++mode) {
                const bool agglomerated = mode == 1;
                if (agglomerated && object_count(g) < 2)
                    continue; // one object cannot touch anything
                const sim::SceneSpec spec =
                    bench_scene(cfg, g, agglomerated, length, cfg.rng_seed);
                const FrameSequence seq = sim::render_scene(spec);

                std::vector<double> times_ms;
                std::size_t roi_count = 0;
                for (int rep = 0; rep <= cfg.repetitions; ++rep) {
                    const auto t0 = std::chrono::steady_clock::now();

                    std::vector<GrayFrame> gray;
                    gray.reserve(seq.frames().size());
                    for (const RawFrame& f : seq.frames())
                        gray.push_back(pre::denoise(
                            pre::normalize(f, pcfg.norm_floor_centikelvin,
                                           pcfg.norm_ceil_centikelvin),
                            pcfg.denoise_window));
                    gray = pre::background_filter(gray, pcfg.dissimilarity_threshold,
                                                  fcfg.intensity_threshold)
                               .kept;
                    const seg::MultiResult multi =
                        seg::extract_multi(gray, fcfg, {}, cfg.fps_millihz);
                    for (const seg::TrackedObject& obj : multi.objects) {
                        learn::LabeledSample s{obj.vector, std::nullopt, std::nullopt, "?"};
                        (void)learn::predict(model, learn::encode_features(s, {}));
                    }

                    const auto t1 = std::chrono::steady_clock::now();
                    roi_count = multi.objects.size();
                    if (rep > 0) // warmup discarded
                        times_ms.push_back(
                            std::chrono::duration<double, std::milli>(t1 - t0).count());
                }

                BenchRow row;
                row.length_s = length;
                row.arrangement = g;
                row.agglomerated = agglomerated;
                row.frames = seq.frames().size();
                row.median_ms = percentile(times_ms, 0.5);
                row.p10_ms = percentile(times_ms, 0.1);
                row.p90_ms = percentile(times_ms, 0.9);
                row.roi_count = roi_count;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_table(const std::vector<BenchRow>& rows, std::ostream& os) {
    os << "length_s\tarrangement\tmode\tframes\tmedian_ms\tp10_ms\tp90_ms\troi_count\n";
    char buf[160];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%g\t%c\t%s\t%zu\t%.3f\t%.3f\t%.3f\t%zu\n", r.length_s,
                      arrangement_letter(r.arrangement),
                      r.agglomerated ? "agglomerated" : "dispersed", r.frames, r.median_ms,
                      r.p10_ms, r.p90_ms, r.roi_count);
        os << buf;
    }
}

} // namespace midas::bench
