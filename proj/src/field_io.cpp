#include "sfpe/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sfpe {

namespace {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; byte swapping is not implemented");

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
double get_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

void write_record(std::ostream& os, const SpectralField& f, double time_tag) {
    os.write("SFPE1", 5);
    std::uint8_t dim = static_cast<std::uint8_t>(f.grid().dim);
    os.write(reinterpret_cast<const char*>(&dim), 1);
    put_u32(os, static_cast<std::uint32_t>(f.grid().modes));
    put_f64(os, f.grid().length);
    put_u32(os, static_cast<std::uint32_t>(f.components()));
    put_f64(os, time_tag);
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t m = 0; m < f.modes_total(); ++m) {
            put_f64(os, f.coef(c, m).real());
            put_f64(os, f.coef(c, m).imag());
        }
}

bool read_record(std::istream& is, SpectralField& f, double& time_tag) {
    char magic[5];
    is.read(magic, 5);
    if (is.gcount() == 0) return false;  // clean EOF
    if (is.gcount() != 5 || std::memcmp(magic, "SFPE1", 5) != 0)
        throw std::runtime_error("field file: bad magic");
    std::uint8_t dim;
    is.read(reinterpret_cast<char*>(&dim), 1);
    std::uint32_t n = get_u32(is);
    double L = get_f64(is);
    std::uint32_t comps = get_u32(is);
    time_tag = get_f64(is);
    if (!is) throw std::runtime_error("field file: truncated header");
    Grid g = make_grid(dim, static_cast<int>(n), L);
    f = SpectralField(g, static_cast<int>(comps));
    for (std::uint32_t c = 0; c < comps; ++c)
        for (std::size_t m = 0; m < g.total(); ++m) {
            double re = get_f64(is), im = get_f64(is);
            f.coef(static_cast<int>(c), m) = {re, im};
        }
    if (!is) throw std::runtime_error("field file: truncated payload");
    return true;
}

}  // namespace

void write_field(const std::string& path, const SpectralField& f, double time_tag) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    write_record(os, f, time_tag);
}

SpectralField read_field(const std::string& path, double* time_tag) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for read: " + path);
    SpectralField f;
    double t = 0.0;
    if (!read_record(is, f, t)) throw std::runtime_error("field file: empty: " + path);
    if (time_tag) *time_tag = t;
    return f;
}

void write_time_field(const std::string& path, const TimeField& tf) {
    tf.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    for (std::size_t i = 0; i < tf.snaps.size(); ++i) write_record(os, tf.snaps[i], tf.times[i]);
}

TimeField read_time_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for read: " + path);
    TimeField tf;
    SpectralField f;
    double t;
    while (read_record(is, f, t)) {
        tf.times.push_back(t);
        tf.snaps.push_back(f);
    }
    tf.validate();
    return tf;
}

}  // namespace sfpe
