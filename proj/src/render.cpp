#include "sceneweaver/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <vector>

#include <zlib.h>

#include "sceneweaver/geometry.hpp"

namespace sceneweaver {

namespace {

constexpr double kMargin = 50.0;

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Rgb {
    uint8_t r, g, b;
};

Rgb category_color(const std::string& category) {
    static const Rgb palette[] = {
        {166, 206, 227}, {178, 223, 138}, {251, 154, 153}, {253, 191, 111},
        {202, 178, 214}, {255, 255, 153}, {141, 211, 199}, {217, 217, 217},
    };
    uint32_t h = 2166136261u;
    for (char c : category) h = (h ^ static_cast<uint8_t>(c)) * 16777619u;
    return palette[h % 8];
}

struct Raster {
    int w, h;
    std::vector<uint8_t> px;  // rgb

    Raster(int w_, int h_) : w(w_), h(h_), px(static_cast<size_t>(w_) * h_ * 3, 255) {}

    void set(int x, int y, Rgb c) {
        if (x < 0 || y < 0 || x >= w || y >= h) return;
        size_t i = (static_cast<size_t>(y) * w + x) * 3;
        px[i] = c.r;
        px[i + 1] = c.g;
        px[i + 2] = c.b;
    }

    void line(double x0, double y0, double x1, double y1, Rgb c) {
        int steps = static_cast<int>(std::max(std::abs(x1 - x0), std::abs(y1 - y0))) + 1;
        for (int i = 0; i <= steps; ++i) {
            double t = static_cast<double>(i) / steps;
            set(static_cast<int>(std::lround(x0 + (x1 - x0) * t)),
                static_cast<int>(std::lround(y0 + (y1 - y0) * t)), c);
        }
    }

    void fill_polygon(const std::vector<std::pair<double, double>>& pts, Rgb c) {
        double ymin = 1e18, ymax = -1e18;
        for (auto& [x, y] : pts) {
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        for (int y = std::max(0, static_cast<int>(std::ceil(ymin)));
             y <= std::min(h - 1, static_cast<int>(std::floor(ymax))); ++y) {
            std::vector<double> xs;
            size_t n = pts.size();
            for (size_t i = 0; i < n; ++i) {
                auto [x0, y0] = pts[i];
                auto [x1, y1] = pts[(i + 1) % n];
                if ((y0 <= y && y1 > y) || (y1 <= y && y0 > y)) {
                    xs.push_back(x0 + (x1 - x0) * (y - y0) / (y1 - y0));
                }
            }
            std::sort(xs.begin(), xs.end());
            for (size_t i = 0; i + 1 < xs.size(); i += 2) {
                for (int x = std::max(0, static_cast<int>(std::ceil(xs[i])));
                     x <= std::min(w - 1, static_cast<int>(std::floor(xs[i + 1]))); ++x)
                    set(x, y, c);
            }
        }
    }
};

void append_be32(std::string& out, uint32_t v) {
    out += static_cast<char>((v >> 24) & 0xff);
    out += static_cast<char>((v >> 16) & 0xff);
    out += static_cast<char>((v >> 8) & 0xff);
    out += static_cast<char>(v & 0xff);
}

void append_chunk(std::string& out, const char* type, const std::string& data) {
    append_be32(out, static_cast<uint32_t>(data.size()));
    std::string body = std::string(type, 4) + data;
    out += body;
    uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(body.data()),
                static_cast<uInt>(body.size()));
    append_be32(out, crc);
}

std::string encode_png(const Raster& r) {
    std::string raw;
    raw.reserve(static_cast<size_t>(r.h) * (r.w * 3 + 1));
    for (int y = 0; y < r.h; ++y) {
        raw += '\0';  // filter none
        raw.append(reinterpret_cast<const char*>(&r.px[static_cast<size_t>(y) * r.w * 3]),
                   static_cast<size_t>(r.w) * 3);
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                  9) != Z_OK)
        throw RenderError("png compression failed");
    compressed.resize(bound);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    append_be32(ihdr, static_cast<uint32_t>(r.w));
    append_be32(ihdr, static_cast<uint32_t>(r.h));
    ihdr += '\x08';  // bit depth
    ihdr += '\x02';  // truecolor
    ihdr += '\0';
    ihdr += '\0';
    ihdr += '\0';
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", compressed);
    append_chunk(out, "IEND", "");
    return out;
}

}  // namespace

RenderedView render_topdown(const Scene& s, double scale) {
    RenderedView view;
    view.scene = s;
    view.scale = scale;
    view.width_px = 2 * kMargin + s.room.width * scale;
    view.height_px = 2 * kMargin + s.room.depth * scale;

    auto px = [&](double x) { return kMargin + x * scale; };
    auto py = [&](double y) { return kMargin + (s.room.depth - y) * scale; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(view.width_px) +
           "\" height=\"" + fmt2(view.height_px) + "\" viewBox=\"0 0 " + fmt2(view.width_px) +
           " " + fmt2(view.height_px) + "\">\n";
    svg += "<rect class=\"room\" x=\"" + fmt2(px(0)) + "\" y=\"" + fmt2(py(s.room.depth)) +
           "\" width=\"" + fmt2(s.room.width * scale) + "\" height=\"" +
           fmt2(s.room.depth * scale) + "\" fill=\"none\" stroke=\"#333333\" "
           "stroke-width=\"2\"/>\n";

    svg += "<g class=\"axes\" stroke=\"#888888\" stroke-width=\"1\" font-size=\"10\" "
           "fill=\"#555555\">\n";
    svg += "<path class=\"axis-x\" d=\"M " + fmt2(px(0)) + " " + fmt2(py(0)) + " L " +
           fmt2(px(s.room.width) + 20) + " " + fmt2(py(0)) + "\"/>\n";
    svg += "<path class=\"axis-y\" d=\"M " + fmt2(px(0)) + " " + fmt2(py(0)) + " L " +
           fmt2(px(0)) + " " + fmt2(py(s.room.depth) - 20) + "\"/>\n";
    svg += "<text x=\"" + fmt2(px(s.room.width) + 24) + "\" y=\"" + fmt2(py(0) + 4) +
           "\">x</text>\n";
    svg += "<text x=\"" + fmt2(px(0) - 4) + "\" y=\"" + fmt2(py(s.room.depth) - 24) +
           "\">y</text>\n";
    for (int i = 0; i <= static_cast<int>(std::floor(s.room.width + 1e-9)); ++i) {
        svg += "<path class=\"tick\" d=\"M " + fmt2(px(i)) + " " + fmt2(py(0)) + " L " +
               fmt2(px(i)) + " " + fmt2(py(0) + 6) + "\"/>\n";
        svg += "<text x=\"" + fmt2(px(i) - 3) + "\" y=\"" + fmt2(py(0) + 18) + "\">" +
               std::to_string(i) + "</text>\n";
    }
    for (int i = 0; i <= static_cast<int>(std::floor(s.room.depth + 1e-9)); ++i) {
        svg += "<path class=\"tick\" d=\"M " + fmt2(px(0)) + " " + fmt2(py(i)) + " L " +
               fmt2(px(0) - 6) + " " + fmt2(py(i)) + "\"/>\n";
        svg += "<text x=\"" + fmt2(px(0) - 22) + "\" y=\"" + fmt2(py(i) + 4) + "\">" +
               std::to_string(i) + "</text>\n";
    }
    svg += "</g>\n";

    std::vector<const SceneObject*> order;
    for (const auto& o : s.objects) order.push_back(&o);
    std::sort(order.begin(), order.end(),
              [](const SceneObject* a, const SceneObject* b) { return a->id < b->id; });

    for (const SceneObject* o : order) {
        OrientedBox b = box_of(*o);
        auto corners = b.footprint();
        Rgb c = category_color(o->category);
        char fill[16];
        std::snprintf(fill, sizeof(fill), "#%02x%02x%02x", c.r, c.g, c.b);
        svg += "<g class=\"object\" id=\"obj_" + xml_escape(o->id) + "\">\n";
        svg += "<polygon class=\"box\" points=\"";
        for (size_t i = 0; i < corners.size(); ++i) {
            if (i) svg += ' ';
            svg += fmt2(px(corners[i].x)) + "," + fmt2(py(corners[i].y));
        }
        svg += std::string("\" fill=\"") + fill + "\" fill-opacity=\"0.6\" "
               "stroke=\"#222222\" stroke-width=\"1\"/>\n";

        Vec2 f = front_dir(o->rotation);
        double len = std::min(o->size.y / 2.0, 0.4);
        Vec2 tip{b.center.x + f.x * len, b.center.y + f.y * len};
        Vec2 left = rotate_deg({-0.06, -0.1}, o->rotation);
        Vec2 right = rotate_deg({0.06, -0.1}, o->rotation);
        svg += "<path class=\"arrow\" stroke=\"#000000\" stroke-width=\"1.5\" fill=\"none\" "
               "d=\"M " + fmt2(px(b.center.x)) + " " + fmt2(py(b.center.y)) + " L " +
               fmt2(px(tip.x)) + " " + fmt2(py(tip.y)) + " M " + fmt2(px(tip.x + left.x)) +
               " " + fmt2(py(tip.y + left.y)) + " L " + fmt2(px(tip.x)) + " " +
               fmt2(py(tip.y)) + " L " + fmt2(px(tip.x + right.x)) + " " +
               fmt2(py(tip.y + right.y)) + "\"/>\n";

        svg += "<text class=\"label\" x=\"" + fmt2(px(b.center.x)) + "\" y=\"" +
               fmt2(py(b.center.y) - 4) + "\" font-size=\"11\" text-anchor=\"middle\" "
               "fill=\"#111111\">" + xml_escape(o->category) + " (z=" +
               fmt_g(o->location.z) + ")</text>\n";
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    view.svg = std::move(svg);
    return view;
}

std::string rasterize_for_prompt(const RenderedView& view, int long_edge) {
    if (view.width_px <= 0 || view.height_px <= 0)
        throw RenderError("degenerate view dimensions");
    double sf = long_edge / std::max(view.width_px, view.height_px);
    int w = std::max(1, static_cast<int>(std::lround(view.width_px * sf)));
    int h = std::max(1, static_cast<int>(std::lround(view.height_px * sf)));
    Raster r(w, h);

    const Scene& s = view.scene;
    double scale = view.scale * sf;
    double margin = kMargin * sf;
    auto px = [&](double x) { return margin + x * scale; };
    auto py = [&](double y) { return margin + (s.room.depth - y) * scale; };

    Rgb dark{40, 40, 40};
    r.line(px(0), py(0), px(s.room.width), py(0), dark);
    r.line(px(s.room.width), py(0), px(s.room.width), py(s.room.depth), dark);
    r.line(px(s.room.width), py(s.room.depth), px(0), py(s.room.depth), dark);
    r.line(px(0), py(s.room.depth), px(0), py(0), dark);

    std::vector<const SceneObject*> order;
    for (const auto& o : s.objects) order.push_back(&o);
    std::sort(order.begin(), order.end(),
              [](const SceneObject* a, const SceneObject* b) { return a->id < b->id; });
    for (const SceneObject* o : order) {
        OrientedBox b = box_of(*o);
        auto corners = b.footprint();
        std::vector<std::pair<double, double>> pts;
        for (const auto& c : corners) pts.emplace_back(px(c.x), py(c.y));
        r.fill_polygon(pts, category_color(o->category));
        for (size_t i = 0; i < pts.size(); ++i) {
            auto [x0, y0] = pts[i];
            auto [x1, y1] = pts[(i + 1) % pts.size()];
            r.line(x0, y0, x1, y1, dark);
        }
        Vec2 f = front_dir(o->rotation);
        double len = std::min(o->size.y / 2.0, 0.4);
        r.line(px(b.center.x), py(b.center.y), px(b.center.x + f.x * len),
               py(b.center.y + f.y * len), Rgb{0, 0, 0});
    }
    return encode_png(r);
}

}  // namespace sceneweaver
