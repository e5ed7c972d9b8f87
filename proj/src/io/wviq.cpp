#include "wakeradar/io/wviq.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <string>

#include "wakeradar/errors.hpp"

namespace wakeradar::io {

namespace {

template <typename T>
void put_le(std::string& buf, T value) {
    using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const unsigned char* p) {
    using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(static_cast<U>(p[i]) << (8 * i));
    return std::bit_cast<T>(bits);
}

std::string encode_header(const WviqHeader& h) {
    std::string buf(kWviqMagic, 4);
    put_le(buf, h.version);
    put_le(buf, h.carrier_frequency);
    put_le(buf, h.prf);
    put_le(buf, h.range_resolution);
    put_le(buf, h.n_pulses);
    put_le(buf, h.n_bins);
    put_le(buf, h.n_frames);
    return buf;
}

std::string encode_frame(const CpiFrame& frame) {
    std::string buf;
    buf.reserve(frame.iq.size() * 8);
    for (const auto& s : frame.iq) {
        put_le(buf, s.real());
        put_le(buf, s.imag());
    }
    return buf;
}

void check_frame(const CpiFrame& frame, const WviqHeader& h) {
    if (frame.n_bins != h.n_bins || frame.n_pulses != h.n_pulses ||
        frame.iq.size() != std::size_t{h.n_bins} * h.n_pulses) {
        throw DimensionError("frame is " + std::to_string(frame.n_bins) + "x" + std::to_string(frame.n_pulses) +
                             ", file expects " + std::to_string(h.n_bins) + "x" + std::to_string(h.n_pulses));
    }
}

WviqHeader parse_header(std::istream& in, std::uint64_t file_size) {
    std::array<unsigned char, kWviqHeaderBytes> raw{};
    in.read(reinterpret_cast<char*>(raw.data()), raw.size());
    const auto got = static_cast<std::uint64_t>(in.gcount());
    if (got < 4 || std::memcmp(raw.data(), kWviqMagic, 4) != 0) {
        throw FormatError("bad magic: expected \"WVIQ\"", 0);
    }
    if (got < kWviqHeaderBytes) {
        throw FormatError("truncated header: expected " + std::to_string(kWviqHeaderBytes) + " bytes, got " +
                              std::to_string(got),
                          got);
    }
    WviqHeader h;
    h.version = get_le<std::uint16_t>(raw.data() + 4);
    if (h.version != kWviqVersion) {
        throw FormatError("unsupported format_version " + std::to_string(h.version), 4);
    }
    h.carrier_frequency = get_le<double>(raw.data() + 6);
    h.prf = get_le<double>(raw.data() + 14);
    h.range_resolution = get_le<double>(raw.data() + 22);
    h.n_pulses = get_le<std::uint32_t>(raw.data() + 30);
    h.n_bins = get_le<std::uint32_t>(raw.data() + 34);
    h.n_frames = get_le<std::uint32_t>(raw.data() + 38);
    if (!(h.carrier_frequency > 0.0)) throw FormatError("carrier_hz must be positive", 6);
    if (!(h.prf > 0.0)) throw FormatError("prf_hz must be positive", 14);
    if (!(h.range_resolution > 0.0)) throw FormatError("range_res_m must be positive", 22);
    if (h.n_pulses == 0) throw FormatError("n_pulses must be positive", 30);
    if (h.n_bins == 0) throw FormatError("n_bins must be positive", 34);

    const std::uint64_t expected = kWviqHeaderBytes + h.payload_bytes();
    if (file_size != expected) {
        const std::uint64_t offset = std::min(file_size, expected);
        throw FormatError("payload length mismatch: expected " + std::to_string(expected) + " bytes in total, got " +
                              std::to_string(file_size),
                          offset);
    }
    return h;
}

CpiFrame decode_frame(const std::string& buf, const WviqHeader& h) {
    CpiFrame frame(h.n_bins, h.n_pulses);
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    for (std::size_t i = 0; i < frame.iq.size(); ++i) {
        frame.iq[i] = {get_le<float>(p + 8 * i), get_le<float>(p + 8 * i + 4)};
    }
    return frame;
}

}  // namespace

RadarConfig WviqHeader::radar() const {
    RadarConfig config;
    config.carrier_frequency = carrier_frequency;
    config.prf = prf;
    config.n_pulses = n_pulses;
    config.n_range_bins = n_bins;
    config.bandwidth = kSpeedOfLight / (2.0 * range_resolution);
    return config;
}

WviqHeader make_header(const RadarConfig& config, std::uint32_t n_frames) {
    validate(config);
    WviqHeader h;
    h.carrier_frequency = config.carrier_frequency;
    h.prf = config.prf;
    h.range_resolution = range_resolution(config.bandwidth);
    h.n_pulses = config.n_pulses;
    h.n_bins = config.n_range_bins;
    h.n_frames = n_frames;
    return h;
}

void write_wviq(const std::vector<CpiFrame>& frames, const RadarConfig& config, const std::filesystem::path& path) {
    WviqWriter writer(path, config, static_cast<std::uint32_t>(frames.size()));
    for (const auto& frame : frames) writer.write(frame);
    writer.close();
}

WviqData read_wviq(const std::filesystem::path& path) {
    WviqReader reader(path);
    WviqData data;
    data.header = reader.header();
    data.frames.reserve(data.header.n_frames);
    for (std::uint32_t k = 0; k < data.header.n_frames; ++k) data.frames.push_back(reader.read(k));
    return data;
}

WviqWriter::WviqWriter(const std::filesystem::path& path, const RadarConfig& config, std::uint32_t n_frames)
    : header_(make_header(config, n_frames)) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    const std::string h = encode_header(header_);
    out_.write(h.data(), static_cast<std::streamsize>(h.size()));
}

void WviqWriter::write(const CpiFrame& frame) {
    if (closed_) throw Error("write after close");
    if (written_ >= header_.n_frames) throw DimensionError("more frames than announced in the header");
    check_frame(frame, header_);
    const std::string buf = encode_frame(frame);
    out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out_) throw Error("write failed");
    ++written_;
}

void WviqWriter::close() {
    if (closed_) return;
    closed_ = true;
    out_.close();
    if (written_ != header_.n_frames) {
        throw FormatError("wrote " + std::to_string(written_) + " of " + std::to_string(header_.n_frames) + " frames",
                          kWviqHeaderBytes + written_ * header_.frame_bytes());
    }
}

WviqWriter::~WviqWriter() {
    if (!closed_) out_.close();
}

WviqReader::WviqReader(const std::filesystem::path& path) {
    in_.open(path, std::ios::binary);
    if (!in_) throw Error("cannot open " + path.string());
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw Error("cannot stat " + path.string());
    header_ = parse_header(in_, size);
}

CpiFrame WviqReader::read(std::uint32_t frame_index) {
    if (frame_index >= header_.n_frames) {
        throw DimensionError("frame " + std::to_string(frame_index) + " out of range (" +
                             std::to_string(header_.n_frames) + " frames)");
    }
    const std::uint64_t offset = kWviqHeaderBytes + frame_index * header_.frame_bytes();
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(offset));
    std::string buf(header_.frame_bytes(), '\0');
    in_.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::uint64_t>(in_.gcount()) != buf.size()) {
        throw FormatError("short read: expected " + std::to_string(buf.size()) + " bytes, got " +
                              std::to_string(in_.gcount()),
                          offset + static_cast<std::uint64_t>(in_.gcount()));
    }
    CpiFrame frame = decode_frame(buf, header_);
    frame.frame_index = frame_index;
    return frame;
}

}  // namespace wakeradar::io
