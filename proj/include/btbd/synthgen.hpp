#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "btbd/frame.hpp"

namespace btbd {

/** A rigid piecewise-constant object translating by an integer step per frame. */
struct SceneObject {
    enum class Shape : uint8_t { Rect, Ellipse } shape = Shape::Rect;
    int row = 0, col = 0;            // rect: top-left; ellipse: centre
    int extent_y = 1, extent_x = 1;  // rect: height/width; ellipse: radii
    int depth = 0;
    int step_row = 0, step_col = 0;  // translation per frame
};

/**
 * Key-value scene description:
 *   width/height/frames/background/seed/noise_amplitude/noise_density <value>
 *   object rect    <row> <col> <height> <width>  <depth> <step_row> <step_col>
 *   object ellipse <row> <col> <ry>     <rx>     <depth> <step_row> <step_col>
 * '#' starts a comment; unknown keys are errors.
 */
struct SceneSpec {
    int width = 64;
    int height = 64;
    int frames = 1;
    int background = 128;
    uint32_t seed = 0;
    int noise_amplitude = 0;     // sparse impulse noise in [-a, a]
    double noise_density = 0.0;  // per-pixel probability of an impulse
    std::vector<SceneObject> objects;
};

SceneSpec parse_scene_spec(const std::string& text);
SceneSpec load_scene_spec(const std::string& path);

/** Renders the scene; identical seeds give byte-identical sequences. */
Sequence generate(const SceneSpec& spec);

}  // namespace btbd
