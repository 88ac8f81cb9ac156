#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace midas {

// Domain-rule violation (bad parameter, invalid input data).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or truncated container / serialized artifact.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::uint16_t celsius_to_centikelvin(double celsius) {
    double ck = (celsius + 273.15) * 100.0;
    if (ck < 0.0) ck = 0.0;
    if (ck > 65535.0) ck = 65535.0;
    return static_cast<std::uint16_t>(ck + 0.5);
}

inline double centikelvin_to_celsius(std::uint16_t ck) {
    return ck / 100.0 - 273.15;
}

// Absolute-temperature frame, row-major, centikelvin per pixel.
class RawFrame {
public:
    RawFrame(int width, int height, std::uint32_t index, std::vector<std::uint16_t> pixels)
        : width_(width), height_(height), index_(index), pixels_(std::move(pixels)) {
        if (width_ < 1 || height_ < 1)
            throw DomainError("frame dimensions must be >= 1");
        if (pixels_.size() != static_cast<std::size_t>(width_) * height_)
            throw DomainError("pixel count does not match width*height");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::uint32_t index() const { return index_; }
    const std::vector<std::uint16_t>& pixels() const { return pixels_; }
    std::uint16_t at(int x, int y) const {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }

    bool operator==(const RawFrame&) const = default;

private:
    int width_;
    int height_;
    std::uint32_t index_;
    std::vector<std::uint16_t> pixels_;
};

// Normalized 8-bit intensity frame.
class GrayFrame {
public:
    GrayFrame(int width, int height, std::uint32_t index, std::vector<std::uint8_t> pixels)
        : width_(width), height_(height), index_(index), pixels_(std::move(pixels)) {
        if (width_ < 1 || height_ < 1)
            throw DomainError("frame dimensions must be >= 1");
        if (pixels_.size() != static_cast<std::size_t>(width_) * height_)
            throw DomainError("pixel count does not match width*height");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::uint32_t index() const { return index_; }
    const std::vector<std::uint8_t>& pixels() const { return pixels_; }
    std::uint8_t at(int x, int y) const {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }

    bool operator==(const GrayFrame&) const = default;

private:
    int width_;
    int height_;
    std::uint32_t index_;
    std::vector<std::uint8_t> pixels_;
};

// Ordered capture of same-sized frames plus acquisition metadata.
class FrameSequence {
public:
    FrameSequence(std::vector<RawFrame> frames, std::uint32_t fps_millihz,
                  std::uint16_t ambient_centikelvin,
                  std::optional<std::string> label = std::nullopt)
        : frames_(std::move(frames)), fps_millihz_(fps_millihz),
          ambient_centikelvin_(ambient_centikelvin), label_(std::move(label)) {
        if (frames_.empty())
            throw DomainError("frame_count must be >= 1");
        if (fps_millihz_ == 0)
            throw DomainError("fps_millihz must be > 0");
        for (std::size_t i = 0; i < frames_.size(); ++i) {
            if (frames_[i].width() != frames_[0].width() ||
                frames_[i].height() != frames_[0].height())
                throw DomainError("all frames must share dimensions");
            if (frames_[i].index() != i)
                throw DomainError("frame indices must increase from 0");
        }
    }

    const std::vector<RawFrame>& frames() const { return frames_; }
    int width() const { return frames_[0].width(); }
    int height() const { return frames_[0].height(); }
    std::uint32_t fps_millihz() const { return fps_millihz_; }
    std::uint16_t ambient_centikelvin() const { return ambient_centikelvin_; }
    const std::optional<std::string>& label() const { return label_; }
    double frame_period_s() const { return 1000.0 / fps_millihz_; }

    bool operator==(const FrameSequence&) const = default;

private:
    std::vector<RawFrame> frames_;
    std::uint32_t fps_millihz_;
    std::uint16_t ambient_centikelvin_;
    std::optional<std::string> label_;
};

// Remaining-area trajectory A_t/A_i in [0,1]; zero-padded after dissipation.
class DissipationVector {
public:
    DissipationVector(std::vector<double> values, std::uint32_t fps_millihz)
        : values_(std::move(values)), fps_millihz_(fps_millihz) {
        if (values_.size() < 2)
            throw DomainError("vector length must be >= 2");
        if (fps_millihz_ == 0)
            throw DomainError("fps_millihz must be > 0");
        bool tail = false;
        for (double v : values_) {
            if (v < 0.0 || v > 1.0)
                throw DomainError("vector elements must lie in [0, 1]");
            if (tail && v != 0.0)
                throw DomainError("nonzero element after zero tail began");
            if (v == 0.0) tail = true;
        }
    }

    const std::vector<double>& values() const { return values_; }
    std::size_t length() const { return values_.size(); }
    std::uint32_t fps_millihz() const { return fps_millihz_; }
    double frame_period_s() const { return 1000.0 / fps_millihz_; }

    bool operator==(const DissipationVector&) const = default;

private:
    std::vector<double> values_;
    std::uint32_t fps_millihz_;
};

} // namespace midas
