#pragma once

#include <array>
#include <span>

namespace latentcast::metrics {

enum class ClarkeZone { A = 0, B, C, D, E };

char zone_letter(ClarkeZone zone);

/// Clarke error grid zone of a (reference, predicted) pair in mg/dL. Rules
/// are tested in the order A, E, C, D and anything left is B:
///   A: (ref <= 70 and pred <= 70) or 0.8 ref <= pred <= 1.2 ref
///   E: (ref >= 180 and pred <= 70) or (ref <= 70 and pred >= 180)
///   C: (70 <= ref <= 290 and pred >= ref + 110) or (130 <= ref <= 180 and pred <= 1.4 ref - 182)
///   D: (ref >= 240 and 70 <= pred <= 180) or (ref <= 175/3 and 70 <= pred <= 180)
///      or (175/3 <= ref <= 70 and pred >= 1.2 ref)
/// Throws std::invalid_argument for non-positive or non-finite input.
ClarkeZone clarke_zone(double reference, double predicted);

/// Percentage of points per zone; entries sum to 100.
struct ClarkeSummary {
	std::array<double, 5> percent{};
	std::size_t count = 0;

	double operator[](ClarkeZone z) const { return percent[static_cast<std::size_t>(z)]; }
};

ClarkeSummary clarke_summary(std::span<const double> reference, std::span<const double> predicted);

} // namespace latentcast::metrics
