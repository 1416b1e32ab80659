#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "btbd/analysis.hpp"
#include "btbd/frame.hpp"
#include "btbd/stream.hpp"
#include "btbd/synthgen.hpp"

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw btbd::InputError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw btbd::InputError("cannot open " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw btbd::InputError("write failed: " + path);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

btbd::Sequence load_frames(const std::string& path, const std::string& format, int width,
                           int height, int frames) {
    const bool pgm = format == "pgm" || (format.empty() && has_suffix(path, ".pgm"));
    if (pgm) return btbd::load_pgm(path);
    if (width < 1 || height < 1)
        throw btbd::InputError("raw input needs --width and --height");
    return btbd::load_raw(path, width, height, frames);
}

void store_frames(const btbd::Sequence& seq, const std::string& path, const std::string& format) {
    const bool pgm = format == "pgm" || (format.empty() && has_suffix(path, ".pgm"));
    if (pgm)
        btbd::store_pgm(seq, path);
    else
        btbd::store_raw(seq, path);
}

int run(int argc, char** argv) {
    CLI::App app{"depth-map sequence codec"};
    app.require_subcommand(1);
    int threads = 1;  // reserved; encoding is defined to be order-exact
    app.add_option("--threads", threads, "worker threads (reserved, output-invariant)")
        ->check(CLI::PositiveNumber);

    // ---- encode ----
    auto* enc = app.add_subcommand("encode", "compress raw/pgm frames into a stream");
    std::string enc_in, enc_out, enc_format;
    int enc_w = 0, enc_h = 0, enc_frames = 0, enc_q = 1, enc_sw = 32, enc_gop = 8;
    enc->add_option("--in", enc_in, "input frames (raw or pgm)")->required();
    enc->add_option("--out", enc_out, "output stream path")->required();
    enc->add_option("--format", enc_format, "input format: raw|pgm (default: by extension)")
        ->check(CLI::IsMember({"raw", "pgm"}));
    enc->add_option("--width", enc_w, "frame width (raw input)");
    enc->add_option("--height", enc_h, "frame height (raw input)");
    enc->add_option("--frames", enc_frames, "frame count (raw input; 0 = derive from size)");
    enc->add_option("--q", enc_q, "odd quantisation step in 1..15")->required();
    enc->add_option("--search-width", enc_sw, "motion search width (default 32)");
    enc->add_option("--gop", enc_gop, "intra period (default 8)");

    // ---- decode ----
    auto* dec = app.add_subcommand("decode", "decompress a stream");
    std::string dec_in, dec_out, dec_format, dec_ref;
    bool dec_report = false;
    dec->add_option("--in", dec_in, "input stream")->required();
    dec->add_option("--out", dec_out, "output frames (raw or pgm)")->required();
    dec->add_option("--format", dec_format, "output format: raw|pgm (default: by extension)")
        ->check(CLI::IsMember({"raw", "pgm"}));
    dec->add_option("--reference", dec_ref, "original frames for --report PSNR (raw, header dims)");
    dec->add_flag("--report", dec_report, "print per-frame bits/bpp (and PSNR with --reference)");

    // ---- stats ----
    auto* st = app.add_subcommand("stats", "rate/distortion statistics of a decode");
    std::string st_orig, st_dec, st_stream, st_format;
    int st_w = 0, st_h = 0, st_frames = 0;
    uint64_t st_bits = 0;
    st->add_option("--original", st_orig, "original frames")->required();
    st->add_option("--decoded", st_dec, "decoded frames")->required();
    st->add_option("--bits", st_bits, "coded size in bits")->required();
    st->add_option("--stream", st_stream, "coded stream (enables the zero-proportion column)");
    st->add_option("--format", st_format, "frame format: raw|pgm (default: by extension)")
        ->check(CLI::IsMember({"raw", "pgm"}));
    st->add_option("--width", st_w, "frame width (raw input)");
    st->add_option("--height", st_h, "frame height (raw input)");
    st->add_option("--frames", st_frames, "frame count (raw input; 0 = derive)");

    // ---- bd ----
    auto* bd = app.add_subcommand("bd", "Bjontegaard deltas between two R-D curves");
    std::string bd_a, bd_b;
    bd->add_option("--curve-a", bd_a, "reference curve CSV (bpp,psnr)")->required();
    bd->add_option("--curve-b", bd_b, "test curve CSV (bpp,psnr)")->required();

    // ---- synth ----
    auto* sy = app.add_subcommand("synth", "generate a synthetic depth sequence");
    std::string sy_spec, sy_out, sy_format;
    sy->add_option("--spec", sy_spec, "scene description file")->required();
    sy->add_option("--out", sy_out, "output frames (raw or pgm)")->required();
    sy->add_option("--format", sy_format, "output format: raw|pgm (default: by extension)")
        ->check(CLI::IsMember({"raw", "pgm"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (enc->parsed()) {
        if (enc_q < 1 || enc_q > 15 || enc_q % 2 == 0) {
            std::cerr << "usage error: q must be odd and in 1..15\n";
            return 1;
        }
        if (enc_sw < 1 || enc_sw > 64) {
            std::cerr << "usage error: search width must lie in 1..64\n";
            return 1;
        }
        if (enc_gop < 1) {
            std::cerr << "usage error: gop must be at least 1\n";
            return 1;
        }
        const auto seq = load_frames(enc_in, enc_format, enc_w, enc_h, enc_frames);
        const auto result = btbd::encode_sequence(seq, enc_q, enc_sw, enc_gop);
        write_file(enc_out, result.bytes);
        const double pixels = static_cast<double>(result.header.original_width) *
                              result.header.original_height * result.header.frame_count;
        std::printf("frames=%u bytes=%zu bits=%zu bpp=%.6f\n", result.header.frame_count,
                    result.bytes.size(), result.bytes.size() * size_t{8},
                    static_cast<double>(result.bytes.size()) * 8.0 / pixels);
        return 0;
    }

    if (dec->parsed()) {
        const auto bytes = read_file(dec_in);
        if (dec_report) {
            btbd::BitSource src(bytes);
            const auto header = btbd::read_header(src);
            btbd::Sequence ref_frames;
            if (!dec_ref.empty())
                ref_frames = load_frames(dec_ref, "", header.original_width,
                                         header.original_height,
                                         static_cast<int>(header.frame_count));
            btbd::Sequence seq;
            seq.original_width = header.original_width;
            seq.original_height = header.original_height;
            const double pixels = static_cast<double>(header.original_width) *
                                  header.original_height;
            for (uint32_t i = 0; i < header.frame_count; ++i) {
                const uint64_t start = src.position_bits();
                const btbd::DepthFrame* prev = i == 0 ? nullptr : &seq.frames.back();
                auto fr = btbd::decode_frame(src, header, prev);
                const uint64_t bits = src.position_bits() - start;
                std::printf("frame=%u type=%c bits=%llu bpp=%.6f", i, fr.intra ? 'I' : 'P',
                            static_cast<unsigned long long>(bits),
                            static_cast<double>(bits) / pixels);
                if (!ref_frames.frames.empty())
                    std::printf(" psnr=%.4f",
                                btbd::psnr(ref_frames.frames[i], fr.frame,
                                           header.original_width, header.original_height));
                std::printf("\n");
                seq.frames.push_back(std::move(fr.frame));
            }
            store_frames(seq, dec_out, dec_format);
        } else {
            store_frames(btbd::decode_sequence(bytes), dec_out, dec_format);
        }
        return 0;
    }

    if (st->parsed()) {
        const auto original = load_frames(st_orig, st_format, st_w, st_h, st_frames);
        const auto decoded = load_frames(st_dec, st_format, st_w, st_h, st_frames);
        uint64_t zero_cells = 0, total_cells = 0;
        if (!st_stream.empty()) {
            const auto detailed = btbd::decode_sequence_detailed(read_file(st_stream));
            zero_cells = detailed.zero_rank_cells;
            total_cells = detailed.coded_rank_cells;
            const uint64_t stream_bits = read_file(st_stream).size() * 8ull;
            if (stream_bits != st_bits)
                throw btbd::InputError("--bits disagrees with the stream size (" +
                                       std::to_string(stream_bits) + " bits)");
        }
        const auto s = btbd::sequence_stats(original, decoded, st_bits, zero_cells, total_cells);
        std::printf("bpp=%.6f\ncr=%.4f\npsnr=%.4f\n", s.bpp, s.compression_ratio, s.psnr);
        if (s.zero_proportion >= 0.0)
            std::printf("p=%.6f\n", s.zero_proportion);
        else
            std::printf("p=n/a\n");
        return 0;
    }

    if (bd->parsed()) {
        const auto result = btbd::bd_metrics(btbd::read_rd_csv(bd_a), btbd::read_rd_csv(bd_b));
        std::printf("bd_rate_percent=%.4f\nbd_psnr_db=%.4f\n", result.bd_rate_percent,
                    result.bd_psnr_db);
        return 0;
    }

    if (sy->parsed()) {
        const auto seq = btbd::generate(btbd::load_scene_spec(sy_spec));
        store_frames(seq, sy_out, sy_format);
        std::printf("frames=%zu width=%d height=%d\n", seq.frames.size(), seq.original_width,
                    seq.original_height);
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const btbd::CodecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
