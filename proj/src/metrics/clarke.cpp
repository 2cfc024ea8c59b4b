#include "latentcast/metrics/clarke.hpp"

#include <cmath>
#include <stdexcept>

namespace latentcast::metrics {

char zone_letter(ClarkeZone zone) {
	return static_cast<char>('A' + static_cast<int>(zone));
}

ClarkeZone clarke_zone(double ref, double pred) {
	if (!std::isfinite(ref) || !std::isfinite(pred) || !(ref > 0.0) || !(pred > 0.0)) {
		throw std::invalid_argument("clarke_zone: reference and prediction must be finite and > 0");
	}
	if ((ref <= 70.0 && pred <= 70.0) || (pred >= 0.8 * ref && pred <= 1.2 * ref)) {
		return ClarkeZone::A;
	}
	if ((ref >= 180.0 && pred <= 70.0) || (ref <= 70.0 && pred >= 180.0)) {
		return ClarkeZone::E;
	}
	if ((ref >= 70.0 && ref <= 290.0 && pred >= ref + 110.0) ||
	    (ref >= 130.0 && ref <= 180.0 && pred <= 7.0 / 5.0 * ref - 182.0)) {
		return ClarkeZone::C;
	}
	constexpr double low_ref = 175.0 / 3.0;
	if ((ref >= 240.0 && pred >= 70.0 && pred <= 180.0) || (ref <= low_ref && pred >= 70.0 && pred <= 180.0) ||
	    (ref >= low_ref && ref <= 70.0 && pred >= 6.0 / 5.0 * ref)) {
		return ClarkeZone::D;
	}
	return ClarkeZone::B;
}

ClarkeSummary clarke_summary(std::span<const double> reference, std::span<const double> predicted) {
	if (reference.size() != predicted.size()) {
		throw std::invalid_argument("clarke_summary: reference and predicted lengths differ");
	}
	if (reference.empty()) {
		throw std::invalid_argument("clarke_summary: no points");
	}
	std::array<std::size_t, 5> counts{};
	for (std::size_t i = 0; i < reference.size(); ++i) {
		++counts[static_cast<std::size_t>(clarke_zone(reference[i], predicted[i]))];
	}
	ClarkeSummary s;
	s.count = reference.size();
	for (std::size_t z = 0; z < 5; ++z) {
		s.percent[z] = 100.0 * static_cast<double>(counts[z]) / static_cast<double>(s.count);
	}
	return s;
}

} // namespace latentcast::metrics
