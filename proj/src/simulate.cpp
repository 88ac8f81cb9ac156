#include "midas/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace midas::sim {

namespace {

// Deterministic Gaussian deviates (Box-Muller over mt19937_64 uniforms);
// std::normal_distribution output is implementation-defined.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    double uniform() {
        return (gen_() >> 11) * (1.0 / 9007199254740992.0); // 53-bit mantissa
    }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace

void MaterialProfile::validate() const {
    if (tau_s <= 0.0)
        throw DomainError("tau_s must be > 0");
    if (emissivity <= 0.0 || emissivity > 1.0)
        throw DomainError("emissivity must lie in (0, 1]");
    if (spot_sigma_px <= 0.0)
        throw DomainError("spot_sigma_px must be > 0");
    if (resistance_k_per_mm < 0.0)
        throw DomainError("resistance_k_per_mm must be >= 0");
}

void SceneSpec::validate() const {
    if (width < 1 || height < 1)
        throw DomainError("scene dimensions must be >= 1");
    if (fps_millihz == 0)
        throw DomainError("fps_millihz must be > 0");
    if (duration_s <= 0.0)
        throw DomainError("duration_s must be > 0");
    if (noise_sigma_c < 0.0)
        throw DomainError("noise_sigma_c must be >= 0");
    if (objects.empty())
        throw DomainError("scene must contain >= 1 object");
    for (const SceneObject& o : objects) {
        o.profile.validate();
        if (o.center_x < 0.0 || o.center_x >= width || o.center_y < 0.0 || o.center_y >= height)
            throw DomainError("object center outside frame bounds");
        if (o.initial_excess_c <= 0.0)
            throw DomainError("initial_excess_c must be > 0");
        if (o.cover_thickness_mm < 0.0)
            throw DomainError("cover_thickness_mm must be >= 0");
    }
}

double attenuated_excess(double initial_excess_c, const MaterialProfile& profile,
                         double thickness_mm) {
    if (thickness_mm < 0.0)
        throw DomainError("thickness_mm must be >= 0");
    return initial_excess_c * std::exp(-profile.resistance_k_per_mm * thickness_mm);
}

double analytic_dissipation_time(const MaterialProfile& profile, double initial_excess_c,
                                 double threshold_excess_c) {
    if (initial_excess_c <= 0.0 || threshold_excess_c <= 0.0)
        throw DomainError("excess and threshold must be > 0");
    if (initial_excess_c <= threshold_excess_c)
        return 0.0;
    return profile.tau_s * std::log(initial_excess_c / threshold_excess_c);
}

double analytic_hot_area_px(const MaterialProfile& profile, double peak_excess_c,
                            double threshold_excess_c) {
    if (threshold_excess_c <= 0.0)
        throw DomainError("threshold must be > 0");
    if (peak_excess_c <= threshold_excess_c)
        return 0.0;
    const double r2 = 2.0 * profile.spot_sigma_px * profile.spot_sigma_px *
                      std::log(peak_excess_c / threshold_excess_c);
    return M_PI * r2;
}

FrameSequence render_scene(const SceneSpec& spec) {
    spec.validate();

    const double fps_hz = spec.fps_millihz / 1000.0;
    const auto n_frames =
        std::max<std::uint32_t>(1, static_cast<std::uint32_t>(spec.duration_s * fps_hz + 0.5));
    const std::size_t n_pixels = static_cast<std::size_t>(spec.width) * spec.height;

    struct ObjState {
        double cx, cy, inv_two_sigma2, attenuated;
        double tau_s;
    };
    std::vector<ObjState> objs;
    objs.reserve(spec.objects.size());
    for (const SceneObject& o : spec.objects) {
        objs.push_back({o.center_x, o.center_y,
                        1.0 / (2.0 * o.profile.spot_sigma_px * o.profile.spot_sigma_px),
                        attenuated_excess(o.initial_excess_c, o.profile, o.cover_thickness_mm),
                        o.profile.tau_s});
    }

    std::vector<RawFrame> frames;
    frames.reserve(n_frames);
    for (std::uint32_t t = 0; t < n_frames; ++t) {
        const double t_s = t / fps_hz;
        GaussianStream noise(spec.rng_seed ^ static_cast<std::uint64_t>(t));
        std::vector<std::uint16_t> pixels(n_pixels);
        std::size_t idx = 0;
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x, ++idx) {
                double temp_c = spec.ambient_c;
                for (const ObjState& o : objs) {
                    const double dx = x - o.cx;
                    const double dy = y - o.cy;
                    temp_c += o.attenuated * std::exp(-t_s / o.tau_s) *
                              std::exp(-(dx * dx + dy * dy) * o.inv_two_sigma2);
                }
                if (spec.noise_sigma_c > 0.0)
                    temp_c += spec.noise_sigma_c * noise.next();
                pixels[idx] = celsius_to_centikelvin(temp_c);
            }
        }
        frames.emplace_back(spec.width, spec.height, t, std::move(pixels));
    }
    return FrameSequence(std::move(frames), spec.fps_millihz,
                         celsius_to_centikelvin(spec.ambient_c));
}

FrameSequence resample_camera(const FrameSequence& seq, int out_width, int out_height) {
    if (out_width < 1 || out_height < 1)
        throw DomainError("output dimensions must be >= 1");
    if (out_width > seq.width() || out_height > seq.height())
        throw DomainError("upsampling not supported; output dims must not exceed input");

    const int in_w = seq.width();
    const int in_h = seq.height();
    std::vector<RawFrame> out_frames;
    out_frames.reserve(seq.frames().size());
    for (const RawFrame& f : seq.frames()) {
        std::vector<std::uint16_t> pixels(static_cast<std::size_t>(out_width) * out_height);
        for (int oy = 0; oy < out_height; ++oy) {
            const int y0 = oy * in_h / out_height;
            const int y1 = (oy + 1) * in_h / out_height;
            for (int ox = 0; ox < out_width; ++ox) {
                const int x0 = ox * in_w / out_width;
                const int x1 = (ox + 1) * in_w / out_width;
                std::uint64_t sum = 0;
                for (int y = y0; y < y1; ++y)
                    for (int x = x0; x < x1; ++x)
                        sum += f.at(x, y);
                const std::uint64_t count = static_cast<std::uint64_t>(y1 - y0) * (x1 - x0);
                pixels[static_cast<std::size_t>(oy) * out_width + ox] =
                    static_cast<std::uint16_t>((sum + count / 2) / count);
            }
        }
        out_frames.emplace_back(out_width, out_height, f.index(), std::move(pixels));
    }
    return FrameSequence(std::move(out_frames), seq.fps_millihz(), seq.ambient_centikelvin(),
                         seq.label());
}

CoolingFit fit_cooling(const std::vector<double>& times_s, const std::vector<double>& excesses_c) {
    if (times_s.size() != excesses_c.size() || times_s.size() < 2)
        throw DomainError("need >= 2 matched (time, excess) pairs");
    for (std::size_t i = 0; i < times_s.size(); ++i)
        if (times_s[i] <= 0.0 || excesses_c[i] <= 0.0)
            throw DomainError("times and excesses must be > 0");

    const double min_excess = *std::min_element(excesses_c.begin(), excesses_c.end());

    auto sse = [&](double tau, double theta) {
        double s = 0.0;
        for (std::size_t i = 0; i < times_s.size(); ++i) {
            const double fitted =
                excesses_c[i] > theta ? tau * std::log(excesses_c[i] / theta) : 0.0;
            const double r = fitted - times_s[i];
            s += r * r;
        }
        return s;
    };

    // Coarse grid, then two shrink-and-refine passes around the best cell.
    double best_tau = 0.0, best_theta = 0.0;
    double best = std::numeric_limits<double>::infinity();
    double tau_lo = 10.0, tau_hi = 2000.0;
    double theta_lo = 0.01, theta_hi = min_excess * 0.999;
    for (int pass = 0; pass < 3; ++pass) {
        const int steps = 200;
        for (int i = 0; i <= steps; ++i) {
            const double tau = tau_lo + (tau_hi - tau_lo) * i / steps;
            for (int j = 0; j <= steps; ++j) {
                const double theta = theta_lo + (theta_hi - theta_lo) * j / steps;
                const double s = sse(tau, theta);
                if (s < best) {
                    best = s;
                    best_tau = tau;
                    best_theta = theta;
                }
            }
        }
        const double tau_step = (tau_hi - tau_lo) / steps;
        const double theta_step = (theta_hi - theta_lo) / steps;
        tau_lo = std::max(1e-6, best_tau - 2.0 * tau_step);
        tau_hi = best_tau + 2.0 * tau_step;
        theta_lo = std::max(1e-9, best_theta - 2.0 * theta_step);
        theta_hi = std::min(min_excess * 0.999, best_theta + 2.0 * theta_step);
    }

    CoolingFit fit;
    fit.tau_s = best_tau;
    fit.theta_c = best_theta;
    for (std::size_t i = 0; i < times_s.size(); ++i) {
        const double fitted =
            excesses_c[i] > best_theta ? best_tau * std::log(excesses_c[i] / best_theta) : 0.0;
        fit.fitted_times_s.push_back(fitted);
        fit.residuals_s.push_back(fitted - times_s[i]);
    }
    return fit;
}

namespace {

double parse_num(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw FormatError("scene spec: bad numeric value for '" + key + "': " + value);
    }
}

} // namespace

SceneSpec parse_scene_spec(std::istream& in) {
    SceneSpec spec;
    spec.objects.clear();
    SceneObject obj;
    bool in_object = false;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key))
            continue;
        std::string value;
        std::getline(ls, value);
        const auto first = value.find_first_not_of(" \t");
        value = first == std::string::npos ? "" : value.substr(first);
        const auto last = value.find_last_not_of(" \t\r");
        if (last != std::string::npos)
            value.erase(last + 1);

        if (key == "object") {
            if (in_object)
                throw FormatError("scene spec line " + std::to_string(line_no) +
                                  ": nested object block");
            in_object = true;
            obj = SceneObject{};
            continue;
        }
        if (key == "end") {
            if (!in_object)
                throw FormatError("scene spec line " + std::to_string(line_no) +
                                  ": 'end' outside object block");
            in_object = false;
            spec.objects.push_back(obj);
            continue;
        }

        if (in_object) {
            if (key == "material") obj.profile.name = value;
            else if (key == "tau_s") obj.profile.tau_s = parse_num(key, value);
            else if (key == "emissivity") obj.profile.emissivity = parse_num(key, value);
            else if (key == "spot_sigma_px") obj.profile.spot_sigma_px = parse_num(key, value);
            else if (key == "resistance_k_per_mm")
                obj.profile.resistance_k_per_mm = parse_num(key, value);
            else if (key == "center_x") obj.center_x = parse_num(key, value);
            else if (key == "center_y") obj.center_y = parse_num(key, value);
            else if (key == "initial_excess_c") obj.initial_excess_c = parse_num(key, value);
            else if (key == "cover_thickness_mm") obj.cover_thickness_mm = parse_num(key, value);
            else
                throw FormatError("scene spec line " + std::to_string(line_no) +
                                  ": unknown object key '" + key + "'");
        } else {
            if (key == "width") spec.width = static_cast<int>(parse_num(key, value));
            else if (key == "height") spec.height = static_cast<int>(parse_num(key, value));
            else if (key == "fps_millihz")
                spec.fps_millihz = static_cast<std::uint32_t>(parse_num(key, value));
            else if (key == "duration_s") spec.duration_s = parse_num(key, value);
            else if (key == "ambient_c") spec.ambient_c = parse_num(key, value);
            else if (key == "noise_sigma_c") spec.noise_sigma_c = parse_num(key, value);
            else if (key == "seed")
                spec.rng_seed = static_cast<std::uint64_t>(parse_num(key, value));
            else
                throw FormatError("scene spec line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
        }
    }
    if (in_object)
        throw FormatError("scene spec: unterminated object block");
    spec.validate();
    return spec;
}

SceneSpec parse_scene_spec_file(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open scene spec: " + path);
    return parse_scene_spec(is);
}

std::vector<MaterialProfile> make_material_sweep(int count, double tau_base_s,
                                                 double tau_span_s) {
    if (count < 1)
        throw DomainError("material count must be >= 1");
    std::vector<MaterialProfile> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        MaterialProfile m;
        const double frac = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        m.emissivity = 0.10 + 0.88 * frac;
        m.tau_s = tau_base_s + tau_span_s * m.emissivity;
        m.name = "material_" + std::to_string(i);
        m.spot_sigma_px = 4.0;
        out.push_back(m);
    }
    return out;
}

} // namespace midas::sim
