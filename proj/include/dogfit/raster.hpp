#pragma once

// Minimal triangle rasterizer: silhouette coverage and z-buffer depth.
// Serves the metrics and the synthetic harness only; losses never rasterize.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dogfit/camera.hpp"
#include "dogfit/image.hpp"
#include "dogfit/model.hpp"

namespace dogfit {

namespace detail {

// Rasterizes one triangle into the z-buffer (camera-frame z, meters).
// Pixel (x, y) samples the image plane at continuous coordinates (x, y).
inline void raster_triangle(const Projected<double>& a, const Projected<double>& b,
                            const Projected<double>& c, Image<float>& zbuf) {
    if (!a.valid || !b.valid || !c.valid) return;  // conservative near-plane cull
    const double ax = a.pixel.x, ay = a.pixel.y;
    const double bx = b.pixel.x, by = b.pixel.y;
    const double cx = c.pixel.x, cy = c.pixel.y;

    const double area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if (area == 0.0) return;

    const int x0 = std::max(0, static_cast<int>(std::ceil(std::min({ax, bx, cx}))));
    const int x1 = std::min(zbuf.width - 1, static_cast<int>(std::floor(std::max({ax, bx, cx}))));
    const int y0 = std::max(0, static_cast<int>(std::ceil(std::min({ay, by, cy}))));
    const int y1 = std::min(zbuf.height - 1, static_cast<int>(std::floor(std::max({ay, by, cy}))));

    const double inv_area = 1.0 / area;
    const double iza = 1.0 / a.depth, izb = 1.0 / b.depth, izc = 1.0 / c.depth;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double w0 = ((bx - x) * (cy - y) - (by - y) * (cx - x)) * inv_area;
            const double w1 = ((cx - x) * (ay - y) - (cy - y) * (ax - x)) * inv_area;
            const double w2 = 1.0 - w0 - w1;
            if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
            // perspective-correct depth: 1/z interpolates linearly in screen space
            const double z = 1.0 / (w0 * iza + w1 * izb + w2 * izc);
            float& slot = zbuf.at(x, y);
            if (slot == 0.0f || z < slot) slot = static_cast<float>(z);
        }
}

}  // namespace detail

// Nearest-surface camera depth per covered pixel, 0 elsewhere (meters).
inline Image<float> render_zbuffer(const PosedMesh<double>& mesh, const Camera& cam) {
    Image<float> zbuf(cam.width, cam.height, 0.0f);
    std::vector<Projected<double>> proj = project(cam, mesh.vertices);
    for (const auto& tri : *mesh.faces)
        detail::raster_triangle(proj[static_cast<std::size_t>(tri[0])],
                                proj[static_cast<std::size_t>(tri[1])],
                                proj[static_cast<std::size_t>(tri[2])], zbuf);
    return zbuf;
}

inline DepthImage render_depth(const PosedMesh<double>& mesh, const Camera& cam) {
    const Image<float> zbuf = render_zbuffer(mesh, cam);
    DepthImage out(cam.width, cam.height, 0);
    for (std::size_t i = 0; i < zbuf.data.size(); ++i) {
        const double z = zbuf.data[i];
        if (z <= 0.0) continue;
        const double q = std::round(z / cam.depth_unit);
        out.data[i] = static_cast<std::uint16_t>(std::clamp(q, 1.0, 65535.0));
    }
    return out;
}

inline MaskImage rasterize_silhouette(const PosedMesh<double>& mesh, const Camera& cam) {
    const Image<float> zbuf = render_zbuffer(mesh, cam);
    MaskImage out(cam.width, cam.height, 0);
    for (std::size_t i = 0; i < zbuf.data.size(); ++i)
        if (zbuf.data[i] > 0.0f) out.data[i] = 255;
    return out;
}

}  // namespace dogfit
