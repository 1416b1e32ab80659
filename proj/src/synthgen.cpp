#include "btbd/synthgen.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace btbd {

namespace {

[[noreturn]] void bad_line(int line_no, const std::string& why) {
    throw InputError("scene spec line " + std::to_string(line_no) + ": " + why);
}

void validate(const SceneSpec& spec) {
    if (spec.width < 1 || spec.height < 1 || spec.width > kMaxDim || spec.height > kMaxDim)
        throw InputError("scene dimensions outside [1,4096]");
    if (spec.frames < 1 || spec.frames > (1 << 20)) throw InputError("frame count outside [1,2^20]");
    if (spec.background < 0 || spec.background > 255)
        throw InputError("background depth outside [0,255]");
    if (spec.noise_amplitude < 0 || spec.noise_amplitude > 255)
        throw InputError("noise amplitude outside [0,255]");
    if (spec.noise_density < 0.0 || spec.noise_density > 1.0)
        throw InputError("noise density outside [0,1]");
    for (const auto& obj : spec.objects) {
        if (obj.depth < 0 || obj.depth > 255) throw InputError("object depth outside [0,255]");
        if (obj.extent_y < 1 || obj.extent_x < 1) throw InputError("object extents must be positive");
    }
}

void draw_object(DepthFrame& frame, const SceneObject& obj, int frame_index) {
    const int row = obj.row + frame_index * obj.step_row;
    const int col = obj.col + frame_index * obj.step_col;
    if (obj.shape == SceneObject::Shape::Rect) {
        const int r0 = std::max(row, 0), r1 = std::min(row + obj.extent_y, frame.height);
        const int c0 = std::max(col, 0), c1 = std::min(col + obj.extent_x, frame.width);
        for (int r = r0; r < r1; ++r)
            for (int c = c0; c < c1; ++c) frame.at(r, c) = static_cast<uint8_t>(obj.depth);
        return;
    }
    const int64_t ry = obj.extent_y, rx = obj.extent_x;
    const int r0 = std::max(row - obj.extent_y, 0), r1 = std::min(row + obj.extent_y + 1, frame.height);
    const int c0 = std::max(col - obj.extent_x, 0), c1 = std::min(col + obj.extent_x + 1, frame.width);
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) {
            const int64_t dy = r - row, dx = c - col;
            if (dy * dy * rx * rx + dx * dx * ry * ry <= rx * rx * ry * ry)
                frame.at(r, c) = static_cast<uint8_t>(obj.depth);
        }
}

}  // namespace

SceneSpec parse_scene_spec(const std::string& text) {
    SceneSpec spec;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        auto read_int = [&](int& dst) {
            if (!(ss >> dst)) bad_line(line_no, "expected an integer after '" + key + "'");
        };
        if (key == "width") read_int(spec.width);
        else if (key == "height") read_int(spec.height);
        else if (key == "frames") read_int(spec.frames);
        else if (key == "background") read_int(spec.background);
        else if (key == "seed") {
            if (!(ss >> spec.seed)) bad_line(line_no, "expected an integer after 'seed'");
        } else if (key == "noise_amplitude") read_int(spec.noise_amplitude);
        else if (key == "noise_density") {
            if (!(ss >> spec.noise_density)) bad_line(line_no, "expected a number after 'noise_density'");
        } else if (key == "object") {
            SceneObject obj;
            std::string shape;
            if (!(ss >> shape)) bad_line(line_no, "missing object shape");
            if (shape == "rect") obj.shape = SceneObject::Shape::Rect;
            else if (shape == "ellipse") obj.shape = SceneObject::Shape::Ellipse;
            else bad_line(line_no, "unknown shape '" + shape + "'");
            if (!(ss >> obj.row >> obj.col >> obj.extent_y >> obj.extent_x >> obj.depth >>
                  obj.step_row >> obj.step_col))
                bad_line(line_no, "object needs 7 integers after the shape");
            spec.objects.push_back(obj);
        } else {
            bad_line(line_no, "unknown key '" + key + "'");
        }
        std::string extra;
        if (ss >> extra) bad_line(line_no, "trailing token '" + extra + "'");
    }
    validate(spec);
    return spec;
}

SceneSpec load_scene_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scene_spec(buf.str());
}

Sequence generate(const SceneSpec& spec) {
    validate(spec);
    std::mt19937 rng(spec.seed);
    // Raw engine draws keep the output identical across standard libraries.
    const uint32_t density_cut =
        static_cast<uint32_t>(spec.noise_density * 4294967295.0);
    Sequence seq;
    seq.original_width = spec.width;
    seq.original_height = spec.height;
    for (int t = 0; t < spec.frames; ++t) {
        DepthFrame flat(spec.width, spec.height, static_cast<uint8_t>(spec.background));
        for (const auto& obj : spec.objects) draw_object(flat, obj, t);
        if (spec.noise_amplitude > 0 && spec.noise_density > 0.0) {
            const uint32_t span = 2u * spec.noise_amplitude + 1u;
            for (auto& sample : flat.samples) {
                if (rng() <= density_cut) {
                    const int delta = static_cast<int>(rng() % span) - spec.noise_amplitude;
                    sample = static_cast<uint8_t>(clamp_sample(sample + delta));
                }
            }
        }
        seq.frames.push_back(pad_frame(flat.samples.data(), spec.width, spec.height));
    }
    return seq;
}

}  // namespace btbd
