// Writes oracle sample files for the CLI tests: make_samples <kind> <path>
// with kind one of horosphere_grid, horosphere_rings, sphere_cap, peaked.
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>

#include <quadmath.h>

#include "oracles.hpp"

namespace {

using isosing::Quad;

std::string q(Quad v) {
    char buf[64];
    quadmath_snprintf(buf, sizeof buf, "%.36Qe", v);
    return buf;
}

void line(std::ostream& os, std::size_t ring, const isosing::ExtendedJet& j, bool second) {
    os << ring << ' ' << q(j.state.x) << ' ' << q(j.state.y) << ' ' << q(j.state.z) << ' ' << q(j.state.p) << ' '
       << q(j.state.q);
    if (second) os << ' ' << q(j.r) << ' ' << q(j.s) << ' ' << q(j.t);
    os << '\n';
}

isosing::ExtendedJet widen(const isosing::Jet2& j) {
    return {{j.state.x, j.state.y, j.state.z, j.state.p, j.state.q}, j.r, j.s, j.t};
}

const Quad two_pi = 2 * M_PIq;

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: make_samples horosphere_grid|horosphere_rings|sphere_cap|peaked <path>\n";
        return 2;
    }
    const std::string kind = argv[1];
    std::ofstream os(argv[2]);
    if (kind == "horosphere_grid") {
        // 64 radii from 0.5 down to 0.05, 64 angles each
        os << "# horosphere z = log(1 - sqrt(1 - x^2 - y^2)), half-space chart\n";
        for (std::size_t k = 0; k < 64; ++k) {
            const Quad r = Quad(0.5) - Quad(0.45) * Quad(k) / 63;
            for (std::size_t i = 0; i < 64; ++i) {
                const Quad th = two_pi * Quad(i) / 64;
                line(os, k, oracle::horosphere_jet_extended(r * cosq(th), r * sinq(th)), true);
            }
        }
    } else if (kind == "horosphere_rings") {
        os << "# horosphere rings r = 0.4 / 2^k\n";
        Quad r = Quad(0.4);
        for (std::size_t k = 0; k < 6; ++k, r /= 2) {
            for (std::size_t i = 0; i < 64; ++i) {
                const Quad th = two_pi * Quad(i) / 64;
                line(os, k, oracle::horosphere_jet_extended(r * cosq(th), r * sinq(th)), true);
            }
        }
    } else if (kind == "sphere_cap") {
        os << "# sphere cap z = sqrt(1 - x^2 - y^2) - 1 around the apex\n";
        double r = 0.4;
        for (std::size_t k = 0; k < 6; ++k, r /= 2) {
            for (std::size_t i = 0; i < 64; ++i) {
                const double th = 2.0 * M_PI * static_cast<double>(i) / 64.0;
                line(os, k, widen(oracle::sphere_cap_jet(1.0, r * std::cos(th), r * std::sin(th))), true);
            }
        }
    } else if (kind == "peaked") {
        os << "# rotational peaked sphere, limit gradient circle of radius 1\n";
        const isosing::GraphSamples g = oracle::peaked_sphere_samples(1.0, 0.4, 6, 64);
        for (std::size_t k = 0; k < g.annuli().size(); ++k) {
            for (const auto& s : g.annuli()[k].samples) {
                line(os, k, {{s.x, s.y, s.z, s.p, s.q}, 0, 0, 0}, false);
            }
        }
    } else {
        std::cerr << "unknown kind '" << kind << "'\n";
        return 2;
    }
    return os ? 0 : 1;
}
