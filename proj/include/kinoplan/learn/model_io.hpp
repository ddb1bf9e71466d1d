#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "kinoplan/learn/binary_io.hpp"
#include "kinoplan/learn/network.hpp"

namespace kinoplan::learn {

inline constexpr std::uint32_t kModelVersion = 1;

// Model file layout (little-endian):
//   "KPNN", u32 version,
//   u32 grid, N, x_hidden, x_out, o_hidden, o_out, h_hidden, h_out, head_hidden,
//   u32 parameter count, then f32 parameters.
// Parameter order: F_x, F_o, F_h, F^0 .. F^N; within each block W1 (row-major,
// hidden x in), b1, W2 (row-major, out x hidden), b2.
inline void write_model(std::ostream& os, const ModelParams& m) {
    io::put_magic(os, "KPNN");
    io::put_u32(os, kModelVersion);
    const auto& a = m.arch;
    for (int v : {a.grid, a.exploratory, a.x_hidden, a.x_out, a.o_hidden, a.o_out, a.h_hidden, a.h_out,
                  a.head_hidden})
        io::put_u32(os, static_cast<std::uint32_t>(v));
    io::put_u32(os, static_cast<std::uint32_t>(m.theta.size()));
    for (double v : m.theta) io::put_f32(os, static_cast<float>(v));
}

inline ModelParams read_model(std::istream& is, const std::string& source = "<model>") {
    io::Reader r(is, source);
    r.expect_magic("KPNN");
    if (const auto v = r.u32(); v != kModelVersion) r.fail("unsupported model version " + std::to_string(v));
    Architecture a;
    for (int* f : {&a.grid, &a.exploratory, &a.x_hidden, &a.x_out, &a.o_hidden, &a.o_out, &a.h_hidden, &a.h_out,
                   &a.head_hidden}) {
        const auto v = r.u32();
        if (v > (1u << 20)) r.fail("implausible layer dimension " + std::to_string(v));
        *f = static_cast<int>(v);
    }
    try {
        a.validate();
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
    ModelParams m(a);
    if (r.u32() != m.theta.size()) r.fail("parameter count does not match the layer dimensions");
    for (auto& v : m.theta) v = static_cast<double>(r.f32());
    r.expect_end();
    return m;
}

inline void save_model(const std::string& path, const ModelParams& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
    write_model(out, m);
}

inline ModelParams load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
    return read_model(in, path);
}

}  // namespace kinoplan::learn
