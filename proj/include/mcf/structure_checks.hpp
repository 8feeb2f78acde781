#pragma once

#include "mcf/geometry.hpp"

namespace mcf {

/// Sup-norm residuals of the static structure equations on a built state.
struct StructureResiduals {
    double normality = 0.0;
    double gauss = 0.0;
    double codazzi = 0.0;
    double contracted_codazzi = 0.0;
    double interchange = 0.0;
    double simons = 0.0;
    double scalar_trace = 0.0;  // R - (|H|^2 - |A|^2)
};

StructureResiduals check_structure_equations(const GeometryState& gs, Exec exec = Exec::parallel);

struct AlgebraicChecks {
    double trace_a = 0.0;          // sup |g^{ij} a_ij - |H|^2| / (1 + |H|^2)
    double trace_b = 0.0;          // sup |g^{ij} b_ij - |A|^2| / (1 + |A|^2)
    double frame_independence = 0.0;  // sup relative gap between the two |Rperp|^2 routes
};

/// |Rperp|^2 from the normal frame against 2|b|^2 - 2 c:c built from the
/// normal projection of the ambient A, plus the trace identities.
AlgebraicChecks check_algebraic(const GeometryState& gs);

}  // namespace mcf
