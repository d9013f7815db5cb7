#pragma once

#include <fstream>
#include <string>

#include "asiftseg/netpbm.hpp"
#include "asiftseg/png_io.hpp"

namespace asiftseg {

// Loads a color image, sniffing the format from the file's leading bytes
// (PNG signature or PPM magic).
inline ColorImage load_color(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open '" + path + "'");
    char magic[2] = {0, 0};
    probe.read(magic, 2);
    probe.close();
    if (magic[0] == 'P' && magic[1] == '6') return read_ppm(path);
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') return read_png(path);
    throw IoError("'" + path + "': unrecognized image format (expected PNG or P6 PPM)");
}

// Saves by extension: .png, .ppm.
inline void save_color(const std::string& path, const ColorImage& img) {
    const auto dot = path.rfind('.');
    const std::string ext = (dot == std::string::npos) ? "" : path.substr(dot);
    if (ext == ".png") {
        write_png(path, img);
    } else if (ext == ".ppm") {
        write_ppm(path, img);
    } else {
        throw IoError("'" + path + "': unsupported output extension (use .png or .ppm)");
    }
}

}  // namespace asiftseg
