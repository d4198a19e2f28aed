#pragma once

#include <span>
#include <string_view>

namespace msm {

enum class Divergence { JensenShannon, TotalVariation };

std::string_view to_string(Divergence d);
Divergence divergence_from_string(std::string_view text);

/// Jensen-Shannon divergence in nats; symmetric bit-for-bit, in [0, ln 2].
/// Throws LengthMismatch or NotNormalized (tolerance 1e-9).
double jsd(std::span<const double> p, std::span<const double> q);

/// Half the L1 distance, in [0, 1].
double total_variation(std::span<const double> p, std::span<const double> q);

double divergence(Divergence kind, std::span<const double> p, std::span<const double> q);

}  // namespace msm
