#include "midas/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace midas::fp {

std::uint8_t intensity_for_excess(double excess_c, std::uint16_t floor_ck, std::uint16_t ceil_ck) {
    if (floor_ck >= ceil_ck)
        throw DomainError("normalization floor must be below ceiling");
    const double span = ceil_ck - floor_ck;
    const double f = std::clamp(excess_c * 100.0 / span, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * f));
}

double effective_threshold_excess_c(std::uint8_t intensity, std::uint16_t floor_ck,
                                    std::uint16_t ceil_ck) {
    if (floor_ck >= ceil_ck)
        throw DomainError("normalization floor must be below ceiling");
    if (intensity < 1)
        throw DomainError("intensity must lie in [1, 255]");
    const double span = ceil_ck - floor_ck;
    // gray >= g  <=>  ck >= ceil(floor + (g - 0.5) * span / 255)
    const double min_ck = std::ceil(floor_ck + (intensity - 0.5) * span / 255.0);
    // ck = round(T * 100)  <=>  T * 100 >= min_ck - 0.5
    return (min_ck - 0.5 - floor_ck) / 100.0;
}

std::size_t hot_area(const GrayFrame& frame, std::uint8_t threshold) {
    if (threshold < 1)
        throw DomainError("threshold must lie in [1, 255]");
    return static_cast<std::size_t>(
        std::count_if(frame.pixels().begin(), frame.pixels().end(),
                      [threshold](std::uint8_t v) { return v >= threshold; }));
}

double reduction_area(std::size_t a_i, std::size_t a_t) {
    if (a_i == 0)
        throw DomainError("undefined fingerprint: initial area is zero");
    if (a_t > a_i)
        a_t = a_i;
    return static_cast<double>(a_i - a_t) / static_cast<double>(a_i);
}

DissipationVector extract_vector(const std::vector<GrayFrame>& frames,
                                 const FingerprintConfig& cfg, std::uint32_t fps_millihz) {
    cfg.validate();
    if (fps_millihz == 0)
        throw DomainError("fps_millihz must be > 0");
    if (frames.empty())
        throw DomainError("no frames");
    const std::size_t a_i = hot_area(frames[0], cfg.intensity_threshold);
    if (a_i == 0)
        throw DomainError("no fingerprint: initial hot area is zero");

    std::vector<double> values(cfg.vector_len, 0.0);
    const std::size_t n = std::min(frames.size(), cfg.vector_len);
    bool gone = false;
    for (std::size_t t = 0; t < n && !gone; ++t) {
        const std::size_t a_t = hot_area(frames[t], cfg.intensity_threshold);
        values[t] = 1.0 - reduction_area(a_i, a_t); // remaining fraction, clamped to [0,1]
        if (values[t] == 0.0)
            gone = true; // dissipated: remainder stays zero-padded
    }
    return DissipationVector(std::move(values), fps_millihz);
}

DissipationTime dissipation_time(const DissipationVector& v, double epsilon) {
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw DomainError("epsilon must lie in (0, 1)");
    const double fps_hz = v.fps_millihz() / 1000.0;
    for (std::size_t i = 0; i < v.length(); ++i) {
        if (v.values()[i] < epsilon)
            return {static_cast<double>(i) / fps_hz, false};
    }
    return {static_cast<double>(v.length()) / fps_hz, true};
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&xs](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]])
            ++j;
        const double avg = (i + j) / 2.0 + 1.0; // 1-based average rank over the tie run
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw DomainError("spearman: length mismatch");
    if (xs.size() < 3)
        throw DomainError("spearman: need >= 3 points");
    const std::vector<double> rx = average_ranks(xs);
    const std::vector<double> ry = average_ranks(ys);
    const double n = static_cast<double>(xs.size());
    const double mean = (n + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DomainError("spearman: undefined for constant input");
    return sxy / std::sqrt(sxx * syy);
}

void write_vector(const DissipationVector& v, std::ostream& sink) {
    sink << "MDV1 " << v.length() << ' ' << v.fps_millihz() << '\n';
    char buf[64];
    for (double x : v.values()) {
        std::snprintf(buf, sizeof buf, "%.12g", x);
        sink << buf << '\n';
    }
    if (!sink)
        throw IoError("vector write failure");
}

DissipationVector read_vector(std::istream& source) {
    std::string magic;
    std::size_t len = 0;
    std::uint32_t fps = 0;
    if (!(source >> magic >> len >> fps))
        throw FormatError("bad MDV header");
    if (magic != "MDV1")
        throw FormatError("bad MDV magic: " + magic);
    std::vector<double> values(len);
    for (std::size_t i = 0; i < len; ++i) {
        if (!(source >> values[i]))
            throw FormatError("MDV truncated at element " + std::to_string(i));
    }
    return DissipationVector(std::move(values), fps);
}

void write_vector_file(const DissipationVector& v, const std::string& path) {
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open for writing: " + path);
    write_vector(v, os);
}

DissipationVector read_vector_file(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open for reading: " + path);
    return read_vector(is);
}

} // namespace midas::fp
