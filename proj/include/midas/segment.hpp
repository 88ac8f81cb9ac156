#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "midas/core.hpp"
#include "midas/fingerprint.hpp"

namespace midas::seg {

struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
};

struct Roi {
    int id = 0;
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0; // inclusive bbox
    double centroid_x = 0.0, centroid_y = 0.0;
    std::vector<Point> mask; // member pixels
    std::uint8_t peak_intensity = 0;
};

enum class Arrangement { dispersed, agglomerated };

struct SegmentConfig {
    std::uint8_t prominence = 10;       // min intensity drop separating maxima
    std::optional<int> expected_k;      // keep the k most prominent maxima
};

// 8-connected components of pixels >= threshold, ids ordered by (min_y, min_x).
std::vector<Roi> find_rois(const GrayFrame& frame, std::uint8_t threshold);

struct SplitResult {
    std::vector<Roi> rois;
    bool under_segmented = false; // expected_k exceeded the maxima found
};

// Splits one ROI at its plateau-merged local intensity maxima (8-neighborhood,
// persistence-style prominence gate); pixels go to the nearest surviving
// maximum, ties to the lower maximum id.
SplitResult split_agglomerated(const GrayFrame& frame, const Roi& roi, const SegmentConfig& cfg);

// Agglomerated when any two masks touch under 8-connectivity.
Arrangement classify_arrangement(const std::vector<Roi>& rois);

struct TrackedObject {
    Roi roi;
    DissipationVector vector;
};

struct MultiResult {
    std::vector<TrackedObject> objects;
    Arrangement arrangement = Arrangement::dispersed;
    bool under_segmented = false;
};

// Frame-0 segmentation (components + maxima splitting), masks frozen with
// 1-px dilation, then one dissipation vector per ROI across the sequence.
MultiResult extract_multi(const std::vector<GrayFrame>& frames, const fp::FingerprintConfig& cfg,
                          const SegmentConfig& seg_cfg, std::uint32_t fps_millihz);

} // namespace midas::seg
