#include "fkfpe/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fkfpe {

namespace {

constexpr char kMagic[4] = {'F', 'K', 'F', 'P'};
constexpr uint32_t kVersion = 1;

void put_f64(std::ostream& out, double x) {
    out.write(reinterpret_cast<const char*>(&x), sizeof x);
}

double get_f64(std::istream& in) {
    double x;
    in.read(reinterpret_cast<char*>(&x), sizeof x);
    return x;
}

}  // namespace

void save_density(const DensityGrid& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
    const GridGeom& g = f.geom();
    put_f64(out, double(g.nx));
    put_f64(out, double(g.nv));
    put_f64(out, g.Lx);
    put_f64(out, g.Lv);
    out.write(reinterpret_cast<const char*>(f.values().data()),
              std::streamsize(f.values().size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write to " + path);
}

DensityGrid load_density(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error(path + ": not a FKFP density file");
    uint32_t version;
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    if (version != kVersion) throw std::runtime_error(path + ": unsupported version");
    int nx = int(get_f64(in));
    int nv = int(get_f64(in));
    double Lx = get_f64(in);
    double Lv = get_f64(in);
    DensityGrid f{GridGeom(nx, nv, Lx, Lv)};
    in.read(reinterpret_cast<char*>(f.values().data()),
            std::streamsize(f.values().size() * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated density file");
    return f;
}

void save_density_csv(const DensityGrid& f, const std::string& path,
                      const std::string& header_comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# " << header_comment << "\n";
    out << "x,v,value\n";
    const GridGeom& g = f.geom();
    char buf[96];
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nv; ++j) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", g.x(i), g.v(j), f(i, j));
            out << buf;
        }
}

}  // namespace fkfpe
