#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "midas/core.hpp"

namespace midas::sim {

struct MaterialProfile {
    std::string name;
    double tau_s = 60.0;              // cooling time constant
    double emissivity = 0.9;          // in (0, 1]
    double spot_sigma_px = 4.0;       // Gaussian spot std dev
    double resistance_k_per_mm = 0.0; // attenuation per mm of cover

    void validate() const;
};

struct SceneObject {
    MaterialProfile profile;
    double center_x = 0.0;
    double center_y = 0.0;
    double initial_excess_c = 13.0;
    double cover_thickness_mm = 0.0;
};

struct SceneSpec {
    int width = 80;
    int height = 60;
    std::uint32_t fps_millihz = 8000;
    double duration_s = 60.0;
    double ambient_c = 23.0;
    std::vector<SceneObject> objects;
    double noise_sigma_c = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

// Peak excess seen through a cover: initial_excess * exp(-k * thickness).
double attenuated_excess(double initial_excess_c, const MaterialProfile& profile,
                         double thickness_mm);

// Time for the noise-free spot peak to fall from initial_excess to
// threshold_excess: tau * ln(initial/threshold), 0 if already below.
double analytic_dissipation_time(const MaterialProfile& profile, double initial_excess_c,
                                 double threshold_excess_c);

// Hot-spot radius^2 above excess threshold at peak excess p: 2*sigma^2*ln(p/theta).
// Returns 0 when the peak is at or below the threshold.
double analytic_hot_area_px(const MaterialProfile& profile, double peak_excess_c,
                            double threshold_excess_c);

FrameSequence render_scene(const SceneSpec& spec);

// Block-average downsampling; out dims must not exceed input dims.
FrameSequence resample_camera(const FrameSequence& seq, int out_width, int out_height);

// Least-squares fit of (tau, theta) to measured dissipation times at known
// initial excesses under t = tau * ln(excess/theta). Grid search + refinement.
struct CoolingFit {
    double tau_s = 0.0;
    double theta_c = 0.0;
    std::vector<double> fitted_times_s;
    std::vector<double> residuals_s;
};
CoolingFit fit_cooling(const std::vector<double>& times_s,
                       const std::vector<double>& excesses_c);

// Plain-text scene document: one "key value" pair per line, '#' comments,
// objects as "object" ... "end" blocks (see README for the key list).
SceneSpec parse_scene_spec(std::istream& in);
SceneSpec parse_scene_spec_file(const std::string& path);

// Demo material set with emissivity mapped affinely onto tau
// (higher emissivity -> slower dissipation).
std::vector<MaterialProfile> make_material_sweep(int count, double tau_base_s,
                                                 double tau_span_s);

} // namespace midas::sim
