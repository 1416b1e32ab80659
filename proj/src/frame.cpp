#include "btbd/frame.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace btbd {

int padded_dim(int dim) { return ((dim + kCtuSize - 1) / kCtuSize) * kCtuSize; }

DepthFrame pad_frame(const uint8_t* data, int width, int height) {
    const int pw = padded_dim(width);
    const int ph = padded_dim(height);
    DepthFrame f(pw, ph);
    for (int r = 0; r < ph; ++r) {
        const int sr = r < height ? r : height - 1;
        for (int c = 0; c < pw; ++c) {
            const int sc = c < width ? c : width - 1;
            f.at(r, c) = data[static_cast<size_t>(sr) * width + sc];
        }
    }
    return f;
}

static std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Sequence load_raw(const std::string& path, int width, int height, int frame_count) {
    if (width < 1 || height < 1 || width > kMaxDim || height > kMaxDim)
        throw InputError("invalid raw dimensions");
    const auto data = read_file(path);
    const size_t frame_bytes = static_cast<size_t>(width) * height;
    if (frame_count == 0) {
        if (data.empty() || data.size() % frame_bytes != 0)
            throw InputError("raw file size is not a multiple of the frame size");
        frame_count = static_cast<int>(data.size() / frame_bytes);
    }
    if (data.size() < frame_bytes * static_cast<size_t>(frame_count))
        throw InputError("raw file shorter than width*height*frames");
    Sequence seq;
    seq.original_width = width;
    seq.original_height = height;
    for (int t = 0; t < frame_count; ++t)
        seq.frames.push_back(pad_frame(data.data() + frame_bytes * t, width, height));
    return seq;
}

namespace {

// Skips PGM whitespace and '#' comment lines; returns false on end of data.
bool next_token(const std::vector<uint8_t>& d, size_t& pos, std::string& tok) {
    while (pos < d.size()) {
        const char ch = static_cast<char>(d[pos]);
        if (ch == '#') {
            while (pos < d.size() && d[pos] != '\n') ++pos;
        } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= d.size()) return false;
    tok.clear();
    while (pos < d.size()) {
        const char ch = static_cast<char>(d[pos]);
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n' || ch == '#') break;
        tok.push_back(ch);
        ++pos;
    }
    return true;
}

}  // namespace

Sequence load_pgm(const std::string& path) {
    const auto data = read_file(path);
    Sequence seq;
    size_t pos = 0;
    std::string tok;
    while (pos < data.size()) {
        if (!next_token(data, pos, tok)) break;
        if (tok != "P5") throw InputError(path + ": expected binary PGM (P5)");
        std::string ws, hs, ms;
        if (!next_token(data, pos, ws) || !next_token(data, pos, hs) || !next_token(data, pos, ms))
            throw InputError(path + ": truncated PGM header");
        const int w = std::stoi(ws), h = std::stoi(hs), maxval = std::stoi(ms);
        if (w < 1 || h < 1 || w > kMaxDim || h > kMaxDim || maxval < 1 || maxval > 255)
            throw InputError(path + ": unsupported PGM geometry or maxval");
        ++pos;  // single whitespace byte after maxval
        const size_t need = static_cast<size_t>(w) * h;
        if (pos + need > data.size()) throw InputError(path + ": truncated PGM raster");
        if (seq.frames.empty()) {
            seq.original_width = w;
            seq.original_height = h;
        } else if (w != seq.original_width || h != seq.original_height) {
            throw InputError(path + ": PGM frames disagree on dimensions");
        }
        seq.frames.push_back(pad_frame(data.data() + pos, w, h));
        pos += need;
    }
    if (seq.frames.empty()) throw InputError(path + ": no PGM images found");
    return seq;
}

static void write_region(std::ofstream& out, const Sequence& seq, const DepthFrame& f) {
    for (int r = 0; r < seq.original_height; ++r)
        out.write(reinterpret_cast<const char*>(f.samples.data() +
                                                static_cast<size_t>(r) * f.width),
                  seq.original_width);
}

void store_raw(const Sequence& seq, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    for (const auto& f : seq.frames) write_region(out, seq, f);
}

void store_pgm(const Sequence& seq, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    for (const auto& f : seq.frames) {
        char header[64];
        const int n = std::snprintf(header, sizeof header, "P5\n%d %d\n255\n",
                                    seq.original_width, seq.original_height);
        out.write(header, n);
        write_region(out, seq, f);
    }
}

double psnr(const DepthFrame& a, const DepthFrame& b, int region_w, int region_h) {
    if (a.width != b.width || a.height != b.height) throw InputError("psnr: dimension mismatch");
    const int w = region_w < 0 ? a.width : region_w;
    const int h = region_h < 0 ? a.height : region_h;
    if (w > a.width || h > a.height || w < 1 || h < 1) throw InputError("psnr: bad region");
    uint64_t sse = 0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const int d = static_cast<int>(a.at(r, c)) - static_cast<int>(b.at(r, c));
            sse += static_cast<uint64_t>(d) * d;
        }
    if (sse == 0) return std::numeric_limits<double>::infinity();
    const double mse = static_cast<double>(sse) / (static_cast<double>(w) * h);
    return 20.0 * std::log10(255.0 / std::sqrt(mse));
}

double sequence_psnr(const Sequence& a, const Sequence& b) {
    if (a.frames.size() != b.frames.size() || a.frames.empty())
        throw InputError("sequence_psnr: frame count mismatch");
    const int w = a.original_width, h = a.original_height;
    uint64_t sse = 0;
    for (size_t t = 0; t < a.frames.size(); ++t) {
        const auto& fa = a.frames[t];
        const auto& fb = b.frames[t];
        if (fa.width != fb.width || fa.height != fb.height)
            throw InputError("sequence_psnr: dimension mismatch");
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const int d = static_cast<int>(fa.at(r, c)) - static_cast<int>(fb.at(r, c));
                sse += static_cast<uint64_t>(d) * d;
            }
    }
    if (sse == 0) return std::numeric_limits<double>::infinity();
    const double mse = static_cast<double>(sse) / (static_cast<double>(w) * h * a.frames.size());
    return 20.0 * std::log10(255.0 / std::sqrt(mse));
}

}  // namespace btbd
