#pragma once

#include <optional>
#include <vector>

#include "mcf/coordinates.hpp"
#include "mcf/flow.hpp"

namespace mcf {

struct EvolutionOptions {
    std::optional<MForm> omega;       // enables the w residual
    double flat_threshold = 1e-3;     // sup |Rperp|^2 below which the normal bundle counts as flat
    Exec exec = Exec::parallel;
};

/// Sup-norm residuals, central time difference minus right-hand side at
/// the middle snapshot.
struct EvolutionResidual {
    double t = 0.0;   // middle time
    double dt = 0.0;
    double metric = 0.0;
    double volume = 0.0;
    double H2 = 0.0;
    double A2 = 0.0;
    double Rperp2_stated = 0.0;
    // with the gradient cross term -8 Rperp^{ab}_{ij} grad^k A_a^{ip} grad_k A_b^j_p restored
    double Rperp2_corrected = 0.0;
    std::optional<double> w;  // present only for flat normal bundles with omega given
};

/// Throws std::invalid_argument for non-uniform spacing or snapshots built
/// without derivative data.
EvolutionResidual evolution_residuals(const Snapshot& before, const Snapshot& mid, const Snapshot& after,
                                      const EvolutionOptions& opt = {});

/// Pointwise right-hand-side pieces, exposed for tests.
struct RperpReaction {
    std::vector<double> grad_Rperp2;  // |grad Rperp|^2, product rule on ambient components
    std::vector<double> reaction;     // the four cubic curvature contractions
    std::vector<double> cross;        // Rperp^{ab}_{ij} grad^k A_a^{ip} grad_k A_b^j_p
};
RperpReaction rperp_terms(const GeometryState& gs, Exec exec = Exec::parallel);

}  // namespace mcf
