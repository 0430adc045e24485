#include "fkfpe/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fkfpe {

const char* const kToolVersion = "fkfpe 0.1.0";

int SchemeConfig::steps() const {
    double n = T / h;
    int N = int(std::lround(n));
    return N;
}

void SchemeConfig::validate() const {
    if (!(s > 0.0) || s > 1.0) throw std::invalid_argument("s must lie in (0, 1]");
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
    double n = T / h;
    if (std::abs(n - std::lround(n)) > 1e-9 * n)
        throw std::invalid_argument("T must be an integer multiple of h");
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    if (trunc == TruncationPolicy::Fixed && !(R_fixed > 0.0))
        throw std::invalid_argument("fixed truncation requires R > 0");
    Potential psi = make_psi();
    if (!(alpha > psi.hessian_sup))
        throw std::invalid_argument("alpha must exceed the Hessian bound of the potential");
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, int line) {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw ConfigError{line, "malformed number: " + v};
    return x;
}

}  // namespace

SchemeConfig parse_config_text(const std::string& text) {
    SchemeConfig c;
    bool seen_s = false;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError{line, "expected key=value"};
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (val.empty()) throw ConfigError{line, "missing value for key '" + key + "'"};
        if (key == "s") { c.s = to_double(val, line); seen_s = true; }
        else if (key == "h") c.h = to_double(val, line);
        else if (key == "T") c.T = to_double(val, line);
        else if (key == "truncation") {
            if (val == "coupled") c.trunc = TruncationPolicy::Coupled;
            else { c.trunc = TruncationPolicy::Fixed; c.R_fixed = to_double(val, line); }
        }
        else if (key == "L_x") c.grid.Lx = to_double(val, line);
        else if (key == "L_v") c.grid.Lv = to_double(val, line);
        else if (key == "N_x") c.grid.nx = int(to_double(val, line));
        else if (key == "N_v") c.grid.nv = int(to_double(val, line));
        else if (key == "p") c.p = to_double(val, line);
        else if (key == "alpha") c.alpha = to_double(val, line);
        else if (key == "seed") c.seed = uint64_t(std::stoull(val));
        else if (key == "mode") {
            if (val == "full") c.mode = SchemeMode::Full;
            else if (val == "transport") c.mode = SchemeMode::TransportOnly;
            else if (val == "homogeneous") c.mode = SchemeMode::Homogeneous;
            else throw ConfigError{line, "unknown mode: " + val};
        }
        else if (key == "potential") c.potential = val;
        else if (key == "potential_scale") c.potential_scale = to_double(val, line);
        else if (key == "f0_x0") c.f0_x0 = to_double(val, line);
        else if (key == "f0_v0") c.f0_v0 = to_double(val, line);
        else if (key == "f0_sx") c.f0_sx = to_double(val, line);
        else if (key == "f0_sv") c.f0_sv = to_double(val, line);
        else throw ConfigError{line, "unknown key: " + key};
    }
    if (!seen_s) throw ConfigError{0, "missing required key 's'"};
    if (c.grid.nx <= 0 || c.grid.nv <= 0 || c.grid.Lx <= 0 || c.grid.Lv <= 0)
        throw ConfigError{0, "incomplete grid: need N_x, N_v, L_x, L_v"};
    // re-run the GridGeom checks through the validating constructor
    c.grid = GridGeom(c.grid.nx, c.grid.nv, c.grid.Lx, c.grid.Lv);
    if (c.mode == SchemeMode::Homogeneous && c.grid.nx != 1)
        throw ConfigError{0, "homogeneous mode requires N_x = 1"};
    return c;
}

SchemeConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError{0, "cannot open config file: " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string render_config(const SchemeConfig& c) {
    char buf[1024];
    const char* mode = c.mode == SchemeMode::Full ? "full"
                     : c.mode == SchemeMode::TransportOnly ? "transport" : "homogeneous";
    std::string trunc = c.trunc == TruncationPolicy::Coupled ? "coupled" : std::to_string(c.R_fixed);
    std::snprintf(buf, sizeof buf,
                  "s=%.17g\nh=%.17g\nT=%.17g\ntruncation=%s\nL_x=%.17g\nL_v=%.17g\n"
                  "N_x=%d\nN_v=%d\np=%.17g\nalpha=%.17g\nseed=%llu\nmode=%s\n"
                  "potential=%s\npotential_scale=%.17g\n"
                  "f0_x0=%.17g\nf0_v0=%.17g\nf0_sx=%.17g\nf0_sv=%.17g\n",
                  c.s, c.h, c.T, trunc.c_str(), c.grid.Lx, c.grid.Lv, c.grid.nx, c.grid.nv,
                  c.p, c.alpha, (unsigned long long)c.seed, mode, c.potential.c_str(),
                  c.potential_scale, c.f0_x0, c.f0_v0, c.f0_sx, c.f0_sv);
    return buf;
}

uint64_t config_hash(const SchemeConfig& c) {
    // FNV-1a over the canonical rendering
    std::string s = render_config(c);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace fkfpe
