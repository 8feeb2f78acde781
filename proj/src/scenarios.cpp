#include "mcf/scenarios.hpp"

#include "mcf/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mcf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ImmersionGrid blank(int m, int n, const std::vector<int>& sizes, const std::vector<double>& periods) {
    ImmersionGrid im;
    im.domain.m = m;
    im.domain.sizes = sizes;
    im.domain.periods = periods;
    im.n = n;
    im.domain.validate(n);
    im.F.assign(im.domain.node_count() * n, 0.0);
    return im;
}

template <class Map>
void fill(ImmersionGrid& im, Map&& map) {
    for (std::size_t node = 0; node < im.node_count(); ++node) {
        const auto idx = im.domain.index_of(node);
        double x[3] = {0, 0, 0};
        for (int d = 0; d < im.domain.m; ++d) x[d] = im.domain.coordinate(d, idx[d]);
        map(x, im.point(node));
    }
}

void require_immersion(const ImmersionGrid& im, const std::string& what) {
    GeometryOptions opt;
    opt.first_pass_only = true;
    opt.exec = Exec::serial;
    try {
        build_geometry(im, opt);
    } catch (const ImmersionDegeneracy& e) {
        throw std::invalid_argument(what + ": not an immersion on this grid (" + e.what() + ")");
    }
}

}  // namespace

double cylinder_profile(double x) { return 2.0 + std::cos(x); }

ImmersionGrid circle(double r, int n, int nodes) {
    if (!(r > 0.0)) throw std::invalid_argument("circle: radius must be positive");
    if (n != 3 && n != 4) throw std::invalid_argument("circle: ambient dimension must be 3 or 4");
    auto im = blank(1, n, {nodes}, {kTwoPi});
    fill(im, [&](const double* x, double* F) {
        F[0] = r * std::cos(x[0]);
        F[1] = r * std::sin(x[0]);
    });
    return im;
}

ImmersionGrid product_torus(double a, double b, int n0, int n1, double shear) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("productTorus: radii must be positive");
    if (std::abs(shear) >= 1.0) throw std::invalid_argument("productTorus: |shear| must be below 1");
    auto im = blank(2, 4, {n0, n1}, {kTwoPi, kTwoPi});
    fill(im, [&](const double* x, double* F) {
        const double t1 = x[0] + shear * std::sin(x[1]);
        const double t2 = x[1] + shear * std::sin(x[0]);
        F[0] = a * std::cos(t1);
        F[1] = a * std::sin(t1);
        F[2] = b * std::cos(t2);
        F[3] = b * std::sin(t2);
    });
    return im;
}

ImmersionGrid sphere_torus(double R, double eps, double alpha0, int n0, int n1) {
    if (!(R > 0.0)) throw std::invalid_argument("sphereTorus: radius must be positive");
    auto im = blank(2, 4, {n0, n1}, {kTwoPi, kTwoPi});
    fill(im, [&](const double* x, double* F) {
        const double f = alpha0 + eps * std::sin(x[0] + x[1]);
        F[0] = R * std::cos(f) * std::cos(x[0]);
        F[1] = R * std::cos(f) * std::sin(x[0]);
        F[2] = R * std::sin(f) * std::cos(x[1]);
        F[3] = R * std::sin(f) * std::sin(x[1]);
    });
    return im;
}

ImmersionGrid generic_torus(double a, double b, double eps, int n0, int n1) {
    auto im = blank(2, 4, {n0, n1}, {kTwoPi, kTwoPi});
    fill(im, [&](const double* x, double* F) {
        F[0] = a * std::cos(x[0]) + eps * std::cos(x[1]);
        F[1] = a * std::sin(x[0]);
        F[2] = b * std::cos(x[1]);
        F[3] = b * std::sin(x[1]) + eps * std::sin(x[0]);
    });
    return im;
}

ImmersionGrid equivariant_cylinder(int n0, int n1) {
    auto im = blank(2, 3, {n0, n1}, {kTwoPi, kTwoPi});
    im.domain.shifts = {{kTwoPi, 0.0, 0.0}, {}};
    fill(im, [&](const double* x, double* F) {
        const double r = cylinder_profile(x[0]);
        F[0] = x[0];
        F[1] = r * std::cos(x[1]);
        F[2] = r * std::sin(x[1]);
    });
    return im;
}

ImmersionGrid eps_graph(double eps, int n0, int n1) {
    auto im = blank(2, 4, {n0, n1}, {kTwoPi, kTwoPi});
    im.domain.shifts = {{kTwoPi, 0.0, 0.0, 0.0}, {0.0, kTwoPi, 0.0, 0.0}};
    fill(im, [&](const double* x, double* F) {
        F[0] = x[0];
        F[1] = x[1];
        F[2] = eps * std::sin(x[0]);
        F[3] = eps * std::sin(x[1]);
    });
    return im;
}

ImmersionGrid plane(int m, int n, int nodes) {
    if (m < 1 || m > 3 || n <= m) throw std::invalid_argument("plane: need 1 <= m <= 3 and n > m");
    auto im = blank(m, n, std::vector<int>(m, nodes), std::vector<double>(m, kTwoPi));
    im.domain.shifts.assign(m, std::vector<double>(n, 0.0));
    for (int d = 0; d < m; ++d) im.domain.shifts[d][d] = kTwoPi;
    fill(im, [&](const double* x, double* F) {
        for (int d = 0; d < m; ++d) F[d] = x[d];
    });
    return im;
}

Perturbed perturb(const ImmersionGrid& im, double amplitude, std::uint64_t seed) {
    if (!std::isfinite(amplitude)) {
        std::ostringstream os;
        os << "perturb: amplitude " << amplitude << " is not finite";
        throw std::invalid_argument(os.str());
    }
    Perturbed out{im, 0.0};
    GeometryOptions opt;
    opt.first_pass_only = true;
    opt.exec = Exec::serial;
    if (amplitude != 0.0) {
        const GeometryState base = build_geometry(im, opt);
        const int m = im.domain.m, n = im.n;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> coef(-1.0, 1.0), phase(0.0, kTwoPi);
        std::uniform_int_distribution<int> wave(-2, 2);
        struct Mode {
            int kx[3];
            double ph;
            std::vector<double> c;
        };
        std::vector<Mode> modes(4);
        for (auto& md : modes) {
            for (int d = 0; d < 3; ++d) md.kx[d] = (d < m) ? wave(rng) : 0;
            md.ph = phase(rng);
            md.c.resize(n);
            for (double& v : md.c) v = coef(rng);
        }
        std::vector<double> V(n), PV(n);
        for (std::size_t node = 0; node < im.node_count(); ++node) {
            const auto idx = im.domain.index_of(node);
            std::fill(V.begin(), V.end(), 0.0);
            for (const auto& md : modes) {
                double arg = md.ph;
                for (int d = 0; d < m; ++d)
                    arg += md.kx[d] * kTwoPi / im.domain.periods[d] * im.domain.coordinate(d, idx[d]);
                const double w = std::cos(arg);
                for (int al = 0; al < n; ++al) V[al] += w * md.c[al];
            }
            project_normal(base, node, V.data(), PV.data());
            for (int al = 0; al < n; ++al) out.grid.point(node)[al] += amplitude * PV[al];
        }
    }
    try {
        const GeometryState gs = build_geometry(out.grid, opt);
        out.initial_rperp2_sup = sup_norm(gs.Rperp2);
    } catch (const ImmersionDegeneracy& e) {
        std::ostringstream os;
        os << "perturb: amplitude " << amplitude << " breaks the immersion (" << e.what() << ")";
        throw std::invalid_argument(os.str());
    }
    return out;
}

const std::vector<ScenarioInfo>& scenario_catalog() {
    static const std::vector<ScenarioInfo> cat = {
        {"circle", "round circle of radius r in R^n (n = 3 or 4)", {{"r", 1.0}, {"n", 3.0}}, {128}},
        {"productTorus", "S^1(a) x S^1(b) in R^4, optional shear reparametrisation",
         {{"a", 1.0}, {"b", 2.0}, {"shear", 0.0}}, {64, 64}},
        {"sphereTorus", "torus inside S^3(R) with latitude alpha0 + eps sin(u+v)",
         {{"R", 2.0}, {"eps", 0.2}, {"alpha0", std::numbers::pi / 4}}, {64, 64}},
        {"genericTorus", "torus in R^4 with non-flat normal bundle",
         {{"a", 1.0}, {"b", 2.0}, {"eps", 0.3}}, {64, 64}},
        {"equivariantCylinder", "surface of revolution with radius 2 + cos x, equivariant along the axis", {}, {64, 64}},
        {"epsGraph", "graph x -> eps (sin x1, sin x2) over R^2 in R^4, equivariant", {{"eps", 0.3}}, {32, 32}},
        {"plane", "flat m-plane in R^n, equivariant", {{"m", 2.0}, {"n", 4.0}}, {16, 16}},
    };
    return cat;
}

ImmersionGrid make_scenario(const ScenarioSpec& spec) {
    const ScenarioInfo* info = nullptr;
    for (const auto& s : scenario_catalog())
        if (s.id == spec.id) info = &s;
    if (!info) throw std::invalid_argument("unknown scenario '" + spec.id + "'");
    std::map<std::string, double> p = info->defaults;
    for (const auto& [key, value] : spec.params) {
        if (!p.count(key)) throw std::invalid_argument("scenario " + spec.id + ": unknown parameter '" + key + "'");
        p[key] = value;
    }
    std::vector<int> sizes = spec.sizes.empty() ? info->default_sizes : spec.sizes;
    const std::string& id = spec.id;
    if (id == "plane") sizes.resize(static_cast<std::size_t>(p["m"]), sizes.empty() ? 16 : sizes[0]);
    auto at = [&](std::size_t i) {
        if (i >= sizes.size()) throw std::invalid_argument("scenario " + id + ": too few grid sizes");
        return sizes[i];
    };
    ImmersionGrid im;
    if (id == "circle") im = circle(p["r"], static_cast<int>(p["n"]), at(0));
    else if (id == "productTorus") im = product_torus(p["a"], p["b"], at(0), at(1), p["shear"]);
    else if (id == "sphereTorus") im = sphere_torus(p["R"], p["eps"], p["alpha0"], at(0), at(1));
    else if (id == "genericTorus") im = generic_torus(p["a"], p["b"], p["eps"], at(0), at(1));
    else if (id == "equivariantCylinder") im = equivariant_cylinder(at(0), at(1));
    else if (id == "epsGraph") im = eps_graph(p["eps"], at(0), at(1));
    else im = plane(static_cast<int>(p["m"]), static_cast<int>(p["n"]), at(0));
    require_immersion(im, id);
    return im;
}

}  // namespace mcf
