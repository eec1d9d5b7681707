#pragma once

// Ready-made families used by the CLI `fixture` command and the test suites.

#include <functional>

#include "phifam/family.hpp"

namespace phifam::fixtures {

/// (2/θ)[1 − x/θ]_+ on [0, ∞), θ > 0.
PdfFamily triangular(int panels = kDefaultPanels);
/// (1/θ) e^{−x/θ} on [0, ∞), θ > 0.
PdfFamily exponential_mean(int panels = kDefaultPanels);
/// Bernoulli(θ) on the two points {0, 1}, 0 < θ < 1.
PdfFamily bernoulli();

/// Triangular base with the exponential escort (1/θ)e^{−x/θ}, statistic 3x.
EscortPair example1_pair(int panels = kDefaultPanels);

/// Constant deformer, c(x) = 2x on [0, ∞). Natural parameter Θ = 1/θ².
PhiFamily example1c(int panels = kDefaultPanels);

/// φ(u) = u^q, c(x) = x on [0, ∞).
PhiFamily power_family(double q, int panels = kDefaultPanels);
/// φ(u) = u, c(x) = x on [0, ∞): the exponential distributions with rate θ.
PhiFamily identity_family(int panels = kDefaultPanels);

/// Two-parameter family with c = (x, x²) on [0, 1].
PhiFamily two_parameter(const Deformer& deformer);

}  // namespace phifam::fixtures
