#include "pvtrack/pnm.hpp"

#include <fstream>

#include "pvtrack/errors.hpp"

namespace pvtrack {

namespace {

int next_token(std::istream& in) {
    // Skips whitespace and '#' comments, per the PNM grammar.
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = -1;
    in >> value;
    return value;
}

void read_header(std::istream& in, const char* magic, const std::string& path,
                 int& width, int& height) {
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != magic[0] || m1 != magic[1]) {
        throw IoError(path + ": not a " + magic + " file");
    }
    width = next_token(in);
    height = next_token(in);
    const int maxval = next_token(in);
    if (width <= 0 || height <= 0 || maxval != 255) {
        throw IoError(path + ": unsupported raster header");
    }
    in.get();  // single whitespace before pixel data
}

} // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    int w = 0, h = 0;
    read_header(in, "P5", path, w, h);
    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.size()));
    if (!in) throw IoError(path + ": truncated pixel data");
    return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.size()));
    if (!out) throw IoError(path + ": write failed");
}

RgbImage read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    int w = 0, h = 0;
    read_header(in, "P6", path, w, h);
    RgbImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (!in) throw IoError(path + ": truncated pixel data");
    return img;
}

void write_ppm(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) throw IoError(path + ": write failed");
}

} // namespace pvtrack
