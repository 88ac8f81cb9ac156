#pragma once

#include <cstdint>
#include <vector>

#include "midas/core.hpp"

namespace midas::pre {

struct PreprocessConfig {
    double dissimilarity_threshold = 0.2; // fraction of full scale
    int denoise_window = 3;               // odd
    std::uint16_t norm_floor_centikelvin = 0;
    std::uint16_t norm_ceil_centikelvin = 0;

    void validate() const {
        if (norm_floor_centikelvin >= norm_ceil_centikelvin)
            throw DomainError("normalization floor must be below ceiling");
        if (denoise_window < 1 || denoise_window % 2 == 0)
            throw DomainError("denoise window must be odd and >= 1");
        if (dissimilarity_threshold < 0.0 || dissimilarity_threshold > 1.0)
            throw DomainError("dissimilarity threshold must lie in [0, 1]");
    }
};

// Default bounds: floor at ambient, ceiling 20 C above (2000 centikelvin).
PreprocessConfig default_config(std::uint16_t ambient_centikelvin);

GrayFrame normalize(const RawFrame& frame, std::uint16_t floor_ck, std::uint16_t ceil_ck);

struct FilterResult {
    std::vector<GrayFrame> kept;
    std::vector<std::size_t> rejected;
};

// Rejects frame i when the mean absolute difference to frame i-1 over the
// shared background (both pixels below hot_threshold) exceeds
// threshold * 255. Frame 0 is always kept.
FilterResult background_filter(const std::vector<GrayFrame>& frames, double threshold,
                               std::uint8_t hot_threshold);

// Median filter with border replication.
GrayFrame denoise(const GrayFrame& frame, int window);

// normalize + denoise over a whole sequence, then background filtering.
std::vector<GrayFrame> run(const FrameSequence& seq, const PreprocessConfig& cfg,
                           std::uint8_t hot_threshold);

} // namespace midas::pre
