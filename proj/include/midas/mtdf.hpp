#pragma once

#include <iosfwd>
#include <string>

#include "midas/core.hpp"

namespace midas::mtdf {

// MTDF container v1, little-endian.
// Header (20 bytes): magic "MTDF", version u8=1, width u16, height u16,
// frame_count u32 (>=1), fps_millihz u32 (>0), ambient_centikelvin u16,
// pixel_format u8 (0 = u16 centikelvin). Then frame_count frames of
// width*height u16 pixels, row-major, capture order.

inline constexpr std::size_t kHeaderSize = 20;

std::size_t write_sequence(const FrameSequence& seq, std::ostream& sink);
FrameSequence read_sequence(std::istream& source);

std::size_t write_sequence_file(const FrameSequence& seq, const std::string& path);
FrameSequence read_sequence_file(const std::string& path);

} // namespace midas::mtdf
