#include "midas/mtdf.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace midas::mtdf {

namespace {

constexpr std::array<char, 4> kMagic = {'M', 'T', 'D', 'F'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kPixelFormatCentikelvin16 = 0;

void put_u16(std::ostream& os, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    os.write(b, 2);
}

void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
    os.write(b, 4);
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

} // namespace

std::size_t write_sequence(const FrameSequence& seq, std::ostream& sink) {
    sink.write(kMagic.data(), kMagic.size());
    sink.put(static_cast<char>(kVersion));
    put_u16(sink, static_cast<std::uint16_t>(seq.width()));
    put_u16(sink, static_cast<std::uint16_t>(seq.height()));
    put_u32(sink, static_cast<std::uint32_t>(seq.frames().size()));
    put_u32(sink, seq.fps_millihz());
    put_u16(sink, seq.ambient_centikelvin());
    sink.put(static_cast<char>(kPixelFormatCentikelvin16));

    std::size_t written = kHeaderSize;
    for (const RawFrame& f : seq.frames()) {
        for (std::uint16_t px : f.pixels()) {
            put_u16(sink, px);
            written += 2;
        }
        if (!sink)
            throw IoError("write failure at byte " + std::to_string(written));
    }
    if (!sink)
        throw IoError("write failure at byte " + std::to_string(written));
    return written;
}

FrameSequence read_sequence(std::istream& source) {
    unsigned char header[kHeaderSize];
    source.read(reinterpret_cast<char*>(header), kHeaderSize);
    if (static_cast<std::size_t>(source.gcount()) != kHeaderSize)
        throw FormatError("truncated header: expected " + std::to_string(kHeaderSize) +
                          " bytes, got " + std::to_string(source.gcount()));
    if (std::memcmp(header, kMagic.data(), kMagic.size()) != 0)
        throw FormatError("bad magic: expected \"MTDF\"");
    if (header[4] != kVersion)
        throw FormatError("unsupported version " + std::to_string(header[4]));

    const std::uint16_t width = get_u16(header + 5);
    const std::uint16_t height = get_u16(header + 7);
    const std::uint32_t frame_count = get_u32(header + 9);
    const std::uint32_t fps_millihz = get_u32(header + 13);
    const std::uint16_t ambient_ck = get_u16(header + 17);
    const std::uint8_t pixel_format = header[19];

    if (width < 1 || height < 1)
        throw FormatError("frame dimensions must be >= 1");
    if (frame_count < 1)
        throw FormatError("frame_count must be >= 1");
    if (fps_millihz == 0)
        throw FormatError("fps_millihz must be > 0");
    if (pixel_format != kPixelFormatCentikelvin16)
        throw FormatError("unknown pixel format " + std::to_string(pixel_format));

    const std::size_t pixels_per_frame = static_cast<std::size_t>(width) * height;
    std::vector<RawFrame> frames;
    frames.reserve(frame_count);
    std::vector<unsigned char> buf(pixels_per_frame * 2);
    std::size_t offset = kHeaderSize;
    for (std::uint32_t i = 0; i < frame_count; ++i) {
        source.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        const std::size_t got = static_cast<std::size_t>(source.gcount());
        if (got != buf.size())
            throw FormatError("truncated payload: expected " +
                              std::to_string(offset + buf.size()) + " bytes, file ends at " +
                              std::to_string(offset + got));
        std::vector<std::uint16_t> pixels(pixels_per_frame);
        for (std::size_t p = 0; p < pixels_per_frame; ++p)
            pixels[p] = get_u16(buf.data() + p * 2);
        frames.emplace_back(width, height, i, std::move(pixels));
        offset += buf.size();
    }
    return FrameSequence(std::move(frames), fps_millihz, ambient_ck);
}

std::size_t write_sequence_file(const FrameSequence& seq, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open for writing: " + path);
    return write_sequence(seq, os);
}

FrameSequence read_sequence_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open for reading: " + path);
    return read_sequence(is);
}

} // namespace midas::mtdf
