#include "sketchiq/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace sketchiq {

namespace {

std::string path_str(const std::filesystem::path& p) { return p.string(); }

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path_str(path));
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for " + path_str(path));
    return bytes;
}

// ---- binary PGM/PPM ----

struct PnmHeader {
    int channels = 1;
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t data_offset = 0;
};

PnmHeader parse_pnm_header(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
    PnmHeader h;
    h.channels = bytes[1] == '5' ? 1 : 3;
    std::size_t pos = 2;
    int fields[3];
    for (int f = 0; f < 3; ++f) {
        // skip whitespace and '#' comments between tokens
        for (;;) {
            while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
            throw FormatError("malformed PNM header in " + path_str(path));
        long v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > 1000000) throw FormatError("implausible PNM header value in " + path_str(path));
            ++pos;
        }
        fields[f] = static_cast<int>(v);
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos]))
        throw FormatError("malformed PNM header in " + path_str(path));
    ++pos;  // single whitespace byte before raster data
    h.width = fields[0];
    h.height = fields[1];
    h.maxval = fields[2];
    h.data_offset = pos;
    if (h.width < 1 || h.height < 1) throw FormatError("empty PNM image " + path_str(path));
    if (h.maxval < 1 || h.maxval > 255)
        throw FormatError("unsupported PNM bit depth (maxval " + std::to_string(h.maxval) + ") in " +
                          path_str(path));
    return h;
}

GrayImage load_pnm(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
    const PnmHeader h = parse_pnm_header(bytes, path);
    const std::size_t need =
        static_cast<std::size_t>(h.width) * h.height * static_cast<std::size_t>(h.channels);
    if (bytes.size() - h.data_offset < need)
        throw FormatError("truncated PNM raster in " + path_str(path));
    const unsigned char* data = bytes.data() + h.data_offset;
    if (h.channels == 1) {
        std::vector<double> px(need);
        for (std::size_t i = 0; i < need; ++i) px[i] = static_cast<double>(data[i]);
        return GrayImage::from_data(h.height, h.width, std::move(px));
    }
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    std::vector<double> r(n), g(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = data[3 * i];
        g[i] = data[3 * i + 1];
        b[i] = data[3 * i + 2];
    }
    return to_gray(GrayImage::from_data(h.height, h.width, std::move(r)),
                   GrayImage::from_data(h.height, h.width, std::move(g)),
                   GrayImage::from_data(h.height, h.width, std::move(b)));
}

// ---- PNG via libpng ----

struct PngReadGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadGuard() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct MemoryReader {
    const unsigned char* data;
    std::size_t size;
    std::size_t pos;
};

extern "C" void png_mem_read(png_structp png, png_bytep out, png_size_t count) {
    auto* r = static_cast<MemoryReader*>(png_get_io_ptr(png));
    if (r->pos + count > r->size) {
        png_error(png, "unexpected end of PNG stream");
        return;
    }
    std::memcpy(out, r->data + r->pos, count);
    r->pos += count;
}

GrayImage load_png_bytes(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
    PngReadGuard guard;
    MemoryReader reader{bytes.data(), bytes.size(), 0};
    // Buffers live before setjmp so the error path unwinds them normally.
    std::vector<unsigned char> raster;
    std::vector<png_bytep> row_ptrs;

    guard.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!guard.png) throw IoError("libpng allocation failed");
    guard.info = png_create_info_struct(guard.png);
    if (!guard.info) throw IoError("libpng allocation failed");

    if (setjmp(png_jmpbuf(guard.png)))
        throw FormatError("corrupt or unreadable PNG " + path_str(path));

    png_set_read_fn(guard.png, &reader, png_mem_read);
    png_read_info(guard.png, guard.info);

    const int bit_depth = png_get_bit_depth(guard.png, guard.info);
    if (bit_depth != 8)
        throw FormatError("unsupported PNG bit depth " + std::to_string(bit_depth) + " in " +
                          path_str(path) + " (only 8-bit images are accepted)");
    const int color_type = png_get_color_type(guard.png, guard.info);
    switch (color_type) {
        case PNG_COLOR_TYPE_GRAY:
        case PNG_COLOR_TYPE_RGB:
            break;
        case PNG_COLOR_TYPE_PALETTE:
            png_set_palette_to_rgb(guard.png);
            break;
        case PNG_COLOR_TYPE_GRAY_ALPHA:
        case PNG_COLOR_TYPE_RGB_ALPHA:
            png_set_strip_alpha(guard.png);
            break;
        default:
            throw FormatError("unsupported PNG color type in " + path_str(path));
    }
    if (png_get_valid(guard.png, guard.info, PNG_INFO_tRNS)) png_set_strip_alpha(guard.png);
    png_read_update_info(guard.png, guard.info);

    const int width = static_cast<int>(png_get_image_width(guard.png, guard.info));
    const int height = static_cast<int>(png_get_image_height(guard.png, guard.info));
    const int channels = png_get_channels(guard.png, guard.info);
    if (width < 1 || height < 1) throw FormatError("empty PNG image " + path_str(path));
    if (channels != 1 && channels != 3)
        throw FormatError("unsupported PNG channel count in " + path_str(path));

    const std::size_t rowbytes = png_get_rowbytes(guard.png, guard.info);
    raster.resize(rowbytes * static_cast<std::size_t>(height));
    row_ptrs.resize(static_cast<std::size_t>(height));
    for (int r = 0; r < height; ++r) row_ptrs[r] = raster.data() + rowbytes * r;
    png_read_image(guard.png, row_ptrs.data());
    png_read_end(guard.png, nullptr);

    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (channels == 1) {
        std::vector<double> px(n);
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c)
                px[static_cast<std::size_t>(r) * width + c] = row_ptrs[r][c];
        return GrayImage::from_data(height, width, std::move(px));
    }
    std::vector<double> red(n), green(n), blue(n);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * width + c;
            red[i] = row_ptrs[r][3 * c];
            green[i] = row_ptrs[r][3 * c + 1];
            blue[i] = row_ptrs[r][3 * c + 2];
        }
    }
    return to_gray(GrayImage::from_data(height, width, std::move(red)),
                   GrayImage::from_data(height, width, std::move(green)),
                   GrayImage::from_data(height, width, std::move(blue)));
}

struct PngWriteGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngWriteGuard() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
    return path.parent_path() /
           (path.filename().string() + ".tmp" + std::to_string(::getpid()));
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
    const std::vector<unsigned char> bytes = read_file_bytes(path);
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 8) == 0)
        return load_png_bytes(bytes, path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
        return load_pnm(bytes, path);
    throw FormatError("unrecognized image format in " + path_str(path) +
                      " (expected PNG or binary PGM/PPM)");
}

void save_png(const GrayImage& img, const std::filesystem::path& path) {
    std::vector<unsigned char> raster(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.data()[i], 0.0, 255.0);
        raster[i] = static_cast<unsigned char>(std::nearbyint(v));  // round half to even
    }

    const std::filesystem::path tmp = temp_sibling(path);
    {
        PngWriteGuard guard;
        std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(img.rows()));
        for (int r = 0; r < img.rows(); ++r)
            row_ptrs[r] = raster.data() + static_cast<std::size_t>(r) * img.cols();

        guard.fp = std::fopen(tmp.c_str(), "wb");
        if (!guard.fp) throw IoError("cannot create " + path_str(tmp));
        guard.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (!guard.png) throw IoError("libpng allocation failed");
        guard.info = png_create_info_struct(guard.png);
        if (!guard.info) throw IoError("libpng allocation failed");
        if (setjmp(png_jmpbuf(guard.png))) throw IoError("PNG write failed for " + path_str(path));
        png_init_io(guard.png, guard.fp);
        png_set_IHDR(guard.png, guard.info, static_cast<png_uint_32>(img.cols()),
                     static_cast<png_uint_32>(img.rows()), 8, PNG_COLOR_TYPE_GRAY,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(guard.png, guard.info);
        png_write_image(guard.png, row_ptrs.data());
        png_write_end(guard.png, nullptr);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot move " + path_str(tmp) + " to " + path_str(path) + ": " + ec.message());
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = temp_sibling(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + path_str(tmp));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw IoError("write failed for " + path_str(tmp));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot move " + path_str(tmp) + " to " + path_str(path) + ": " + ec.message());
    }
}

}  // namespace sketchiq
