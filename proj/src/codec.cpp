#include "imgchain/codec.hpp"

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "imgchain/error.hpp"

namespace imgchain {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

// ---------------------------------------------------------------------------
// PNG (libpng classic API; errors longjmp back into the calling frame)

struct PngReadSource {
    std::span<const std::uint8_t> bytes;
    std::size_t offset = 0;
};

struct PngErrorState {
    std::jmp_buf jump;
    char message[256] = {};
};

void png_on_error(png_structp png, png_const_charp msg)
{
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    std::snprintf(state->message, sizeof state->message, "%s", msg);
    std::longjmp(state->jump, 1);
}

void png_on_warning(png_structp, png_const_charp) {}

void png_read_memory(png_structp png, png_bytep out, png_size_t length)
{
    auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
    if (src->bytes.size() - src->offset < length) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "truncated PNG: needed %zu bytes at offset %zu",
                      static_cast<std::size_t>(length), src->offset);
        png_error(png, msg);
    }
    std::memcpy(out, src->bytes.data() + src->offset, length);
    src->offset += length;
}

void png_write_memory(png_structp png, png_bytep data, png_size_t length)
{
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

Image decode_png(std::span<const std::uint8_t> bytes)
{
    PngErrorState err;
    PngReadSource src{bytes, 0};
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_on_error, png_on_warning);
    if (!png) throw DataError("PNG: cannot allocate decoder");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DataError("PNG: cannot allocate decoder");
    }

    // Everything touched after setjmp lives outside this frame or is trivially destructible.
    std::vector<std::uint8_t> data;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int channels = 0;

    if (setjmp(err.jump)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError(std::string("PNG: ") + err.message);
    }

    png_set_read_fn(png, &src, png_read_memory);
    png_read_info(png, info);
    int bit_depth = 0;
    int color_type = 0;
    png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3)
        png_error(png, "unsupported channel layout");
    if (width > 1u << 15 || height > 1u << 15)
        png_error(png, "image too large");

    data.resize(static_cast<std::size_t>(width) * height * channels);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = data.data() + static_cast<std::size_t>(y) * width * channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    return Image(static_cast<int>(width), static_cast<int>(height), channels, std::move(data));
}

std::vector<std::uint8_t> encode_png(const Image& img)
{
    PngErrorState err;
    std::vector<std::uint8_t> out;
    std::vector<png_bytep> rows(img.height());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_on_error, png_on_warning);
    if (!png) throw DataError("PNG: cannot allocate encoder");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DataError("PNG: cannot allocate encoder");
    }
    if (setjmp(err.jump)) {
        png_destroy_write_struct(&png, &info);
        throw DataError(std::string("PNG: ") + err.message);
    }

    png_set_write_fn(png, &out, png_write_memory, png_flush_noop);
    png_set_IHDR(png, info, img.width(), img.height(), 8,
                 img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    auto* base = const_cast<std::uint8_t*>(img.pixels().data());
    for (int y = 0; y < img.height(); ++y)
        rows[y] = base + static_cast<std::size_t>(y) * img.width() * img.channels();
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

// ---------------------------------------------------------------------------
// NetPBM binary P5 / P6

class PnmHeaderReader {
public:
    explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    long next_int()
    {
        skip_space_and_comments();
        std::size_t start = pos_;
        long value = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000) throw DataError("PNM: header value too large at offset " + std::to_string(start));
            ++pos_;
        }
        if (pos_ == start) throw DataError("PNM: expected integer at offset " + std::to_string(start));
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset()
    {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw DataError("PNM: missing whitespace before raster at offset " + std::to_string(pos_));
        return pos_ + 1;
    }

private:
    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

Image decode_pnm(std::span<const std::uint8_t> bytes)
{
    const int channels = bytes[1] == '5' ? 1 : 3;
    PnmHeaderReader header(bytes);
    const long width = header.next_int();
    const long height = header.next_int();
    const long maxval = header.next_int();
    if (width < 1 || height < 1) throw DataError("PNM: zero image dimension");
    if (maxval < 1 || maxval > 65535) throw DataError("PNM: maxval out of range: " + std::to_string(maxval));
    const std::size_t offset = header.raster_offset();

    const std::size_t samples = static_cast<std::size_t>(width) * height * channels;
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    if (bytes.size() < offset + samples * sample_bytes)
        throw DataError("PNM: truncated raster, expected " + std::to_string(samples * sample_bytes) +
                        " bytes at offset " + std::to_string(offset));

    std::vector<std::uint8_t> data(samples);
    const std::uint8_t* raster = bytes.data() + offset;
    for (std::size_t i = 0; i < samples; ++i) {
        long v = sample_bytes == 2 ? (raster[2 * i] << 8) | raster[2 * i + 1] : raster[i];
        if (v > maxval) throw DataError("PNM: sample exceeds maxval at offset " + std::to_string(offset + i * sample_bytes));
        data[i] = maxval == 255 ? static_cast<std::uint8_t>(v)
                                : static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
    }
    return Image(static_cast<int>(width), static_cast<int>(height), channels, std::move(data));
}

std::vector<std::uint8_t> encode_pnm(const Image& img)
{
    const std::string header = std::string(img.channels() == 1 ? "P5" : "P6") + "\n" +
                               std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

}  // namespace

Image decode_image(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0)
        return decode_png(bytes);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
        return decode_pnm(bytes);
    throw DataError("unsupported image container (expected PNG or binary PGM/PPM)");
}

std::vector<std::uint8_t> encode_image(const Image& img, ImageFormat format)
{
    if (img.empty()) throw DataError("cannot encode an empty image");
    return format == ImageFormat::Png ? encode_png(img) : encode_pnm(img);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("cannot write " + path.string());
}

Image load_image(const std::filesystem::path& path)
{
    try {
        return decode_image(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void save_image(const std::filesystem::path& path, const Image& img)
{
    const auto ext = path.extension().string();
    const bool pnm = ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
    write_file(path, encode_image(img, pnm ? ImageFormat::Pnm : ImageFormat::Png));
}

}  // namespace imgchain
