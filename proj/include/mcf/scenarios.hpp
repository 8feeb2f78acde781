#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mcf/grid.hpp"

namespace mcf {

struct ScenarioSpec {
    std::string id;
    std::map<std::string, double> params;  // missing keys take defaults
    std::vector<int> sizes;                // empty: scenario default
};

struct ScenarioInfo {
    std::string id;
    std::string summary;
    std::map<std::string, double> defaults;
    std::vector<int> default_sizes;
};

const std::vector<ScenarioInfo>& scenario_catalog();

/// Builds the grid and checks that it is an immersion. Unknown ids or
/// parameter names and immersion failure throw std::invalid_argument.
ImmersionGrid make_scenario(const ScenarioSpec& spec);

ImmersionGrid circle(double r, int n, int nodes);
ImmersionGrid product_torus(double a, double b, int n0, int n1, double shear = 0.0);
ImmersionGrid sphere_torus(double R, double eps, double alpha0, int n0, int n1);
ImmersionGrid generic_torus(double a, double b, double eps, int n0, int n1);
ImmersionGrid equivariant_cylinder(int n0, int n1);
ImmersionGrid eps_graph(double eps, int n0, int n1);
ImmersionGrid plane(int m, int n, int nodes);

struct Perturbed {
    ImmersionGrid grid;
    double initial_rperp2_sup = 0.0;
};

/// Adds amplitude * P_N(V) where V is a seeded sum of low-frequency
/// harmonics. Throws std::invalid_argument naming the amplitude when the
/// result is no longer an immersion.
Perturbed perturb(const ImmersionGrid& im, double amplitude, std::uint64_t seed);

/// Radial profile of the equivariant cylinder.
double cylinder_profile(double x);

}  // namespace mcf
