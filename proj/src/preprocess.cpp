#include "midas/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace midas::pre {

PreprocessConfig default_config(std::uint16_t ambient_centikelvin) {
    PreprocessConfig cfg;
    cfg.norm_floor_centikelvin = ambient_centikelvin;
    cfg.norm_ceil_centikelvin =
        static_cast<std::uint16_t>(std::min(65535, ambient_centikelvin + 2000));
    return cfg;
}

GrayFrame normalize(const RawFrame& frame, std::uint16_t floor_ck, std::uint16_t ceil_ck) {
    if (floor_ck >= ceil_ck)
        throw DomainError("normalization floor must be below ceiling");
    const double span = ceil_ck - floor_ck;
    std::vector<std::uint8_t> out(frame.pixels().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double f = (frame.pixels()[i] - static_cast<double>(floor_ck)) / span;
        f = std::clamp(f, 0.0, 1.0);
        out[i] = static_cast<std::uint8_t>(std::lround(255.0 * f));
    }
    return GrayFrame(frame.width(), frame.height(), frame.index(), std::move(out));
}

FilterResult background_filter(const std::vector<GrayFrame>& frames, double threshold,
                               std::uint8_t hot_threshold) {
    if (frames.size() < 2)
        throw DomainError("background filter needs >= 2 frames");

    FilterResult result;
    result.kept.push_back(frames[0]);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        // Compare against the last retained frame so an isolated corrupted
        // frame does not drag its successor down with it.
        const GrayFrame& prev = result.kept.back();
        const GrayFrame& cur = frames[i];
        std::uint64_t sum = 0;
        std::uint64_t count = 0;
        for (std::size_t p = 0; p < cur.pixels().size(); ++p) {
            const std::uint8_t a = prev.pixels()[p];
            const std::uint8_t b = cur.pixels()[p];
            if (a < hot_threshold && b < hot_threshold) {
                sum += a > b ? a - b : b - a;
                ++count;
            }
        }
        // No shared background: nothing to judge the frame by, keep it.
        const double mean = count == 0 ? 0.0 : static_cast<double>(sum) / count;
        if (mean > threshold * 255.0)
            result.rejected.push_back(i);
        else
            result.kept.push_back(cur);
    }
    return result;
}

GrayFrame denoise(const GrayFrame& frame, int window) {
    if (window < 1 || window % 2 == 0)
        throw DomainError("denoise window must be odd and >= 1");
    if (window > std::min(frame.width(), frame.height()))
        throw DomainError("denoise window exceeds frame dimensions");
    if (window == 1)
        return frame;

    const int w = frame.width();
    const int h = frame.height();
    const int half = window / 2;
    std::vector<std::uint8_t> out(frame.pixels().size());
    std::vector<std::uint8_t> neigh(static_cast<std::size_t>(window) * window);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t n = 0;
            for (int dy = -half; dy <= half; ++dy) {
                const int yy = std::clamp(y + dy, 0, h - 1);
                for (int dx = -half; dx <= half; ++dx) {
                    const int xx = std::clamp(x + dx, 0, w - 1);
                    neigh[n++] = frame.at(xx, yy);
                }
            }
            auto mid = neigh.begin() + n / 2;
            std::nth_element(neigh.begin(), mid, neigh.begin() + n);
            out[static_cast<std::size_t>(y) * w + x] = *mid;
        }
    }
    return GrayFrame(w, h, frame.index(), std::move(out));
}

std::vector<GrayFrame> run(const FrameSequence& seq, const PreprocessConfig& cfg,
                           std::uint8_t hot_threshold) {
    cfg.validate();
    std::vector<GrayFrame> gray;
    gray.reserve(seq.frames().size());
    for (const RawFrame& f : seq.frames())
        gray.push_back(denoise(normalize(f, cfg.norm_floor_centikelvin, cfg.norm_ceil_centikelvin),
                               cfg.denoise_window));
    if (gray.size() < 2)
        return gray;
    return background_filter(gray, cfg.dissimilarity_threshold, hot_threshold).kept;
}

} // namespace midas::pre
