#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "asiftseg/image.hpp"

namespace asiftseg {

namespace detail {

// Reads the next header token, skipping whitespace and '#' comments.
inline std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) continue;
        tok.push_back(static_cast<char>(c));
        while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
            tok.push_back(static_cast<char>(in.get()));
        }
        return tok;
    }
    throw IoError("netpbm: unexpected end of header");
}

inline int pnm_int(std::istream& in, const char* what) {
    const std::string tok = pnm_token(in);
    try {
        size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError(std::string("netpbm: bad ") + what + " '" + tok + "'");
    }
}

}  // namespace detail

inline ColorImage read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    if (detail::pnm_token(in) != "P6") throw IoError("'" + path + "' is not a P6 PPM");
    const int w = detail::pnm_int(in, "width");
    const int h = detail::pnm_int(in, "height");
    const int maxval = detail::pnm_int(in, "maxval");
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255) {
        throw IoError("'" + path + "': unsupported PPM geometry or maxval");
    }
    in.get();  // the single whitespace byte before the raster
    ColorImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size())) {
        throw IoError("'" + path + "': truncated PPM raster");
    }
    if (maxval != 255) {
        for (auto& v : img.data) {
            v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
        }
    }
    return img;
}

inline void write_ppm(const std::string& path, const ColorImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline Mask read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    if (detail::pnm_token(in) != "P5") throw IoError("'" + path + "' is not a P5 PGM");
    const int w = detail::pnm_int(in, "width");
    const int h = detail::pnm_int(in, "height");
    const int maxval = detail::pnm_int(in, "maxval");
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255) {
        throw IoError("'" + path + "': unsupported PGM geometry or maxval");
    }
    in.get();
    Mask m(w, h);
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(m.data.size())) {
        throw IoError("'" + path + "': truncated PGM raster");
    }
    return m;
}

inline void write_pgm(const std::string& path, const Mask& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "P5\n" << m.width << " " << m.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace asiftseg
