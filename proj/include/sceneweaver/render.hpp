#pragma once

#include <string>

#include "sceneweaver/scene.hpp"

namespace sceneweaver {

struct RenderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Annotated top-down view of a scene: one box polygon, front arrow and
/// label per object, plus a coordinate-axes group with 1 m ticks.
struct RenderedView {
    Scene scene;       // source of the projection, kept for rasterization
    std::string svg;   // complete SVG document
    double scale = 0;  // pixels per meter
    double width_px = 0;
    double height_px = 0;
};

RenderedView render_topdown(const Scene& s, double scale = 100.0);

/// PNG bytes of the view, long edge resized to long_edge pixels.
std::string rasterize_for_prompt(const RenderedView& view, int long_edge = 1024);

}  // namespace sceneweaver
