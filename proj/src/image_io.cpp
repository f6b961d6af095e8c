#include "pmsci/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <vector>

#include "pmsci/imgops.hpp"

namespace pmsci {

double bt601_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return (299 * static_cast<int>(r) + 587 * static_cast<int>(g) + 114 * static_cast<int>(b)) /
           1000.0;
}

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    for (std::size_t i = 0; i < suffix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[s.size() - suffix.size() + i])) !=
            suffix[i]) {
            return false;
        }
    }
    return true;
}

Image load_png(const std::string& path) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str())) {
        throw std::runtime_error("load_image: cannot read PNG '" + path +
                                 "': " + png.message);
    }
    if (png.width == 0 || png.height == 0) {
        png_image_free(&png);
        throw std::runtime_error("load_image: zero-size PNG '" + path + "'");
    }

    const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
    png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const std::size_t stride = PNG_IMAGE_ROW_STRIDE(png);
    std::vector<std::uint8_t> buf(PNG_IMAGE_BUFFER_SIZE(png, stride));

    // Alpha, if present, is composited onto white.
    png_color bg{255, 255, 255};
    if (!png_image_finish_read(&png, &bg, buf.data(), static_cast<png_int_32>(stride),
                               nullptr)) {
        std::string msg = png.message;
        png_image_free(&png);
        throw std::runtime_error("load_image: PNG decode failed for '" + path + "': " + msg);
    }

    Image img(static_cast<int>(png.height), static_cast<int>(png.width));
    for (int r = 0; r < img.rows(); ++r) {
        const std::uint8_t* row = buf.data() + static_cast<std::size_t>(r) * stride;
        for (int c = 0; c < img.cols(); ++c) {
            img(r, c) = color ? bt601_luma(row[3 * c], row[3 * c + 1], row[3 * c + 2])
                              : static_cast<double>(row[c]);
        }
    }
    return img;
}

void save_png(const Image& img, const std::string& path) {
    std::vector<std::uint8_t> buf(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) buf[i] = quantize_u8(img.values()[i]);

    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.cols());
    png.height = static_cast<png_uint_32>(img.rows());
    png.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.c_str(), 0, buf.data(),
                                 static_cast<png_int_32>(img.cols()), nullptr)) {
        throw std::runtime_error("save_image: cannot write PNG '" + path +
                                 "': " + png.message);
    }
}

int next_pgm_token(std::istream& in) {
    // Skips whitespace and '#' comments, then parses a decimal integer.
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (std::isspace(ch)) {
            ch = in.get();
        } else {
            break;
        }
    }
    if (ch == EOF || !std::isdigit(ch)) return -1;
    int value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        if (value > 1 << 20) return -1;
        ch = in.get();
    }
    return value;
}

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_image: cannot open '" + path + "'");
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') {
        throw std::runtime_error("load_image: '" + path + "' is not a binary PGM (P5)");
    }
    int width = next_pgm_token(in);
    int height = next_pgm_token(in);
    int maxval = next_pgm_token(in);
    if (width <= 0 || height <= 0 || maxval <= 0) {
        throw std::runtime_error("load_image: malformed PGM header in '" + path + "'");
    }
    if (maxval > 255) {
        throw std::runtime_error("load_image: only 8-bit PGM supported, '" + path +
                                 "' has maxval " + std::to_string(maxval));
    }
    // next_pgm_token consumed the single whitespace after maxval
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
        throw std::runtime_error("load_image: truncated PGM data in '" + path + "'");
    }
    Image img(height, width);
    for (std::size_t i = 0; i < buf.size(); ++i) img.values()[i] = buf[i];
    return img;
}

void save_pgm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_image: cannot open '" + path + "'");
    out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
    std::vector<std::uint8_t> buf(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) buf[i] = quantize_u8(img.values()[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("save_image: write failed for '" + path + "'");
}

}  // namespace

Image load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::runtime_error("load_image: cannot open '" + path + "'");
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    probe.close();

    if (magic[0] == 0x89 && magic[1] == 'P') return load_png(path);
    if (magic[0] == 'P' && magic[1] == '5') return load_pgm(path);
    throw std::runtime_error("load_image: unsupported format in '" + path +
                             "' (expected PNG or binary PGM)");
}

void save_image(const Image& img, const std::string& path) {
    if (img.empty()) throw std::invalid_argument("save_image: empty image");
    if (has_suffix(path, ".pgm")) {
        save_pgm(img, path);
    } else if (has_suffix(path, ".png")) {
        save_png(img, path);
    } else {
        throw std::invalid_argument("save_image: unsupported extension in '" + path +
                                    "' (use .png or .pgm)");
    }
}

}  // namespace pmsci
