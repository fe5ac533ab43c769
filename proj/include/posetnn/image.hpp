#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "posetnn/error.hpp"
#include "posetnn/filters.hpp"

namespace posetnn {

/// 8-bit greyscale (P5) or RGB (P6) image, interleaved channels.
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 1;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(std::size_t y, std::size_t x, std::size_t ch) const
    {
        return pixels[(y * width + x) * channels + ch];
    }
};

// ---------------------------------------------------------------------------
// Binary PNM

inline Image parse_pnm(const std::vector<std::uint8_t>& bytes)
{
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n')
                    ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto number = [&]() -> std::size_t {
        skip_space();
        std::size_t start = pos, v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > (std::size_t{1} << 31))
                throw FormatError("PNM header value too large");
            ++pos;
        }
        if (pos == start)
            throw FormatError("malformed PNM header");
        return v;
    };
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
        throw FormatError("not a binary PGM (P5) or PPM (P6) file");
    Image img;
    img.channels = bytes[1] == '5' ? 1 : 3;
    pos = 2;
    img.width = number();
    img.height = number();
    const std::size_t maxval = number();
    if (maxval == 0 || maxval > 255)
        throw FormatError("only 8-bit PNM files are supported (maxval " + std::to_string(maxval) + ")");
    if (pos >= bytes.size() || !std::isspace(bytes[pos]))
        throw FormatError("missing whitespace after PNM header");
    ++pos;
    const std::size_t count = img.width * img.height * img.channels;
    if (img.width == 0 || img.height == 0)
        throw FormatError("empty image");
    if (bytes.size() - pos < count)
        throw FormatError("truncated PNM pixel data");
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                      bytes.begin() + static_cast<std::ptrdiff_t>(pos + count));
    if (maxval != 255)
        for (auto& p : img.pixels)
            p = static_cast<std::uint8_t>(std::lround(p * 255.0 / static_cast<double>(maxval)));
    return img;
}

inline Image read_pnm(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IOError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_pnm(bytes);
}

inline std::vector<std::uint8_t> encode_pnm(const Image& img)
{
    const std::string header = std::string(img.channels == 1 ? "P5" : "P6") + "\n" +
                               std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

inline void write_pnm(const std::string& path, const Image& img)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IOError("cannot write " + path);
    const auto bytes = encode_pnm(img);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IOError("failed writing " + path);
}

// ---------------------------------------------------------------------------
// Planes in [-1, 1]

/// One channel plane of doubles, row-major.
struct Plane {
    std::size_t width = 0, height = 0;
    std::vector<double> v;
};

inline std::vector<Plane> to_planes(const Image& img)
{
    std::vector<Plane> planes(img.channels);
    for (std::size_t ch = 0; ch < img.channels; ++ch) {
        planes[ch] = Plane{img.width, img.height, std::vector<double>(img.width * img.height)};
        for (std::size_t y = 0; y < img.height; ++y)
            for (std::size_t x = 0; x < img.width; ++x)
                planes[ch].v[y * img.width + x] = img.at(y, x, ch) / 127.5 - 1.0;
    }
    return planes;
}

/// Affine rescale onto [-1, 1]; a constant plane becomes 0.
inline void renormalize(Plane& p)
{
    auto [lo, hi] = std::minmax_element(p.v.begin(), p.v.end());
    const double a = *lo, b = *hi;
    for (auto& x : p.v)
        x = b > a ? 2.0 * (x - a) / (b - a) - 1.0 : 0.0;
}

inline Plane pool_plane(const PoolingFilter& f, const Plane& p)
{
    Tensor4 t(1, 1, p.height, p.width);
    t.data = p.v;
    auto r = pool2d(f, t, false);
    return Plane{r.output.w, r.output.h, std::move(r.output.data)};
}

/// Top-left pixel of every 2x2 block.
inline Plane decimate_plane(const Plane& p)
{
    Plane out{(p.width + 1) / 2, (p.height + 1) / 2, {}};
    out.v.resize(out.width * out.height);
    for (std::size_t y = 0; y < out.height; ++y)
        for (std::size_t x = 0; x < out.width; ++x)
            out.v[y * out.width + x] = p.v[(2 * y) * p.width + 2 * x];
    return out;
}

/// Nearest-neighbour upsampling by `factor`, cropped to width x height.
inline Plane upsample_plane(const Plane& p, std::size_t factor, std::size_t width, std::size_t height)
{
    Plane out{width, height, std::vector<double>(width * height)};
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x) {
            const std::size_t sy = std::min(y / factor, p.height - 1);
            const std::size_t sx = std::min(x / factor, p.width - 1);
            out.v[y * width + x] = p.v[sy * p.width + sx];
        }
    return out;
}

// ---------------------------------------------------------------------------
// Metrics on the [0, 255] scale

inline constexpr double kPsnrCap = 99.0;

inline double mse(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size() || a.empty())
        throw ShapeError("mse: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

/// 10 log10(255^2 / mse), capped at 99 dB (also for identical inputs).
inline double psnr_from_mse(double m)
{
    if (m <= 0.0)
        return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / m));
}

namespace detail {

inline std::vector<double> gaussian_kernel(std::size_t size, double sigma)
{
    std::vector<double> k(size);
    const double c = (static_cast<double>(size) - 1.0) / 2.0;
    double s = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double d = static_cast<double>(i) - c;
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        s += k[i];
    }
    for (auto& v : k)
        v /= s;
    return k;
}

/// Separable 'valid' filtering: output (h - n + 1) x (w - n + 1).
inline std::vector<double> filter_valid(const std::vector<double>& img, std::size_t w, std::size_t h,
                                        const std::vector<double>& k)
{
    const std::size_t n = k.size();
    const std::size_t ow = w - n + 1, oh = h - n + 1;
    std::vector<double> tmp(h * ow);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
            double s = 0.0;
            for (std::size_t t = 0; t < n; ++t)
                s += k[t] * img[y * w + x + t];
            tmp[y * ow + x] = s;
        }
    std::vector<double> out(oh * ow);
    for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
            double s = 0.0;
            for (std::size_t t = 0; t < n; ++t)
                s += k[t] * tmp[(y + t) * ow + x];
            out[y * ow + x] = s;
        }
    return out;
}

} // namespace detail

/// Mean SSIM of two planes in [0, 255]: 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, L = 255, over all window positions inside the image.
inline double ssim(const std::vector<double>& a, const std::vector<double>& b, std::size_t w, std::size_t h)
{
    constexpr std::size_t kWin = 11;
    if (a.size() != w * h || b.size() != w * h)
        throw ShapeError("ssim: plane size mismatch");
    if (w < kWin || h < kWin)
        throw ShapeError("ssim needs images of at least 11x11 pixels");
    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    const auto k = detail::gaussian_kernel(kWin, 1.5);
    std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const auto mu_a = detail::filter_valid(a, w, h, k);
    const auto mu_b = detail::filter_valid(b, w, h, k);
    const auto e_aa = detail::filter_valid(aa, w, h, k);
    const auto e_bb = detail::filter_valid(bb, w, h, k);
    const auto e_ab = detail::filter_valid(ab, w, h, k);
    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i] * mu_a[i];
        const double mb = mu_b[i] * mu_b[i];
        const double mab = mu_a[i] * mu_b[i];
        const double va = e_aa[i] - ma;
        const double vb = e_bb[i] - mb;
        const double cov = e_ab[i] - mab;
        total += ((2.0 * mab + c1) * (2.0 * cov + c2)) / ((ma + mb + c1) * (va + vb + c2));
    }
    return total / static_cast<double>(mu_a.size());
}

struct ImageMetrics {
    double ssim = 0.0;
    double psnr = 0.0;
    double mse = 0.0;
};

/// Metrics averaged over channels; planes are given in [-1, 1].
inline ImageMetrics compare_planes(const std::vector<Plane>& ref, const std::vector<Plane>& test)
{
    if (ref.size() != test.size() || ref.empty())
        throw ShapeError("channel count mismatch");
    ImageMetrics m;
    std::vector<double> all_a, all_b;
    for (std::size_t ch = 0; ch < ref.size(); ++ch) {
        std::vector<double> a(ref[ch].v.size()), b(test[ch].v.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            a[i] = (ref[ch].v[i] + 1.0) * 127.5;
        for (std::size_t i = 0; i < b.size(); ++i)
            b[i] = std::clamp((test[ch].v[i] + 1.0) * 127.5, 0.0, 255.0);
        m.ssim += ssim(a, b, ref[ch].width, ref[ch].height);
        all_a.insert(all_a.end(), a.begin(), a.end());
        all_b.insert(all_b.end(), b.begin(), b.end());
    }
    m.ssim /= static_cast<double>(ref.size());
    m.mse = mse(all_a, all_b);
    m.psnr = psnr_from_mse(m.mse);
    return m;
}

inline constexpr std::size_t kPipelineIterations = 3;

/// Applies the filter `iters` times (renormalizing each channel to [-1, 1]
/// after every application), upsamples back by nearest neighbour and
/// compares with the original.
inline ImageMetrics image_pipeline(const Image& img, const PoolingFilter& f,
                                   std::size_t iters = kPipelineIterations)
{
    const auto ref = to_planes(img);
    std::vector<Plane> out;
    for (const auto& p : ref) {
        Plane cur = p;
        for (std::size_t k = 0; k < iters; ++k) {
            cur = pool_plane(f, cur);
            renormalize(cur);
        }
        out.push_back(upsample_plane(cur, std::size_t{1} << iters, img.width, img.height));
    }
    return compare_planes(ref, out);
}

/// Baseline: keep the top-left pixel of each block `iters` times, then upsample.
inline ImageMetrics nearest_baseline(const Image& img, std::size_t iters = kPipelineIterations)
{
    const auto ref = to_planes(img);
    std::vector<Plane> out;
    for (const auto& p : ref) {
        Plane cur = p;
        for (std::size_t k = 0; k < iters; ++k)
            cur = decimate_plane(cur);
        out.push_back(upsample_plane(cur, std::size_t{1} << iters, img.width, img.height));
    }
    return compare_planes(ref, out);
}

struct ComparisonRow {
    std::string name;
    ImageMetrics metrics;
};

/// Filter A, filter B and the nearest-neighbour baseline, in that order.
inline std::vector<ComparisonRow> image_comparison(const Image& img, const PoolingFilter& a,
                                                   const std::string& a_name, const PoolingFilter& b,
                                                   const std::string& b_name)
{
    return {
        {a_name, image_pipeline(img, a)},
        {b_name, image_pipeline(img, b)},
        {"nearest", nearest_baseline(img)},
    };
}

} // namespace posetnn
