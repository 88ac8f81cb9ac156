#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "midas/core.hpp"

namespace midas::fp {

struct FingerprintConfig {
    std::uint8_t intensity_threshold = 26; // "hot" pixel cutoff, [1, 255]
    std::size_t vector_len = 480;          // 60 s at 8 Hz
    double dissipated_epsilon = 0.02;      // remaining fraction counted as gone

    void validate() const {
        if (intensity_threshold < 1)
            throw DomainError("intensity threshold must lie in [1, 255]");
        if (vector_len < 2)
            throw DomainError("vector_len must be >= 2");
        if (dissipated_epsilon <= 0.0 || dissipated_epsilon >= 1.0)
            throw DomainError("dissipated_epsilon must lie in (0, 1)");
    }
};

// Gray intensity a temperature excess (deg C above the normalization floor)
// maps to under normalize()'s rounding.
std::uint8_t intensity_for_excess(double excess_c, std::uint16_t floor_ck, std::uint16_t ceil_ck);

// Smallest true temperature excess (deg C) that still lands at or above the
// given intensity after centikelvin and gray quantization. Ties the pipeline
// threshold to the simulator's analytic oracle.
double effective_threshold_excess_c(std::uint8_t intensity, std::uint16_t floor_ck,
                                    std::uint16_t ceil_ck);

std::size_t hot_area(const GrayFrame& frame, std::uint8_t threshold);

// Eq-style fractional shrinkage (a_i - a_t) / a_i; a_t clamped to a_i.
double reduction_area(std::size_t a_i, std::size_t a_t);

DissipationVector extract_vector(const std::vector<GrayFrame>& frames,
                                 const FingerprintConfig& cfg, std::uint32_t fps_millihz);

struct DissipationTime {
    double seconds = 0.0;
    bool still_dissipating = false;
};

DissipationTime dissipation_time(const DissipationVector& v, double epsilon);

// Spearman rank correlation with average-rank tie handling.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// MDV1 text format: header "MDV1 <L> <fps_millihz>", then L fractions,
// one per line.
void write_vector(const DissipationVector& v, std::ostream& sink);
DissipationVector read_vector(std::istream& source);
void write_vector_file(const DissipationVector& v, const std::string& path);
DissipationVector read_vector_file(const std::string& path);

} // namespace midas::fp
