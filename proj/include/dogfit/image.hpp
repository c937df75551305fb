#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dogfit {

template <class T>
struct Image {
    int width = 0, height = 0;
    std::vector<T> data;  // row-major

    Image() = default;
    Image(int w, int h, T fill = T{})
        : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    T& at(int x, int y) { return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
    const T& at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
    bool inside(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool same_size(int w, int h) const { return width == w && height == h; }
};

using MaskImage = Image<std::uint8_t>;    // 0 background, 255 foreground
using DepthImage = Image<std::uint16_t>;  // depth_unit meters per unit, 0 missing

}  // namespace dogfit
