#pragma once

// Grayscale PNG read/write via libpng: 8-bit masks, 16-bit depth images.

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include "dogfit/image.hpp"

namespace dogfit {

struct PngError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace detail

inline void write_png_gray8(const MaskImage& img, const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw PngError("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw PngError("libpng failure writing " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(&img.data[static_cast<std::size_t>(y) *
                                                           static_cast<std::size_t>(img.width)]));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline void write_png_gray16(const DepthImage& img, const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw PngError("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw PngError("libpng failure writing " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 2);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::uint16_t v = img.at(x, y);  // big-endian per PNG spec
            row[static_cast<std::size_t>(2 * x)] = static_cast<std::uint8_t>(v >> 8);
            row[static_cast<std::size_t>(2 * x + 1)] = static_cast<std::uint8_t>(v & 0xff);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

namespace detail {

inline void read_png_gray(const std::string& path, int expect_depth, int& width, int& height,
                          std::vector<std::uint8_t>& bytes) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw PngError("cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw PngError("libpng failure reading " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY ||
        png_get_bit_depth(png, info) != expect_depth) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw PngError(path + ": expected " + std::to_string(expect_depth) + "-bit grayscale");
    }
    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const std::size_t stride = png_get_rowbytes(png, info);
    bytes.resize(stride * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        png_read_row(png, &bytes[static_cast<std::size_t>(y) * stride], nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
}

}  // namespace detail

inline MaskImage read_png_gray8(const std::string& path) {
    int w = 0, h = 0;
    std::vector<std::uint8_t> bytes;
    detail::read_png_gray(path, 8, w, h, bytes);
    MaskImage img(w, h);
    img.data = std::move(bytes);
    return img;
}

inline DepthImage read_png_gray16(const std::string& path) {
    int w = 0, h = 0;
    std::vector<std::uint8_t> bytes;
    detail::read_png_gray(path, 16, w, h, bytes);
    DepthImage img(w, h);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
    return img;
}

}  // namespace dogfit
