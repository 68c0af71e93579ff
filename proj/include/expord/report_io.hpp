#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "expord/analysis.hpp"
#include "expord/nicholson.hpp"

namespace expord {

/// Shortest round-trip decimal form of a double (used by every CSV writer so
/// that reruns stay byte-identical).
std::string format_double(double v);

nlohmann::json to_json(const OrderReport& r);
nlohmann::json to_json(const InequalityResult& r);
nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const ConeBuild& c);
nlohmann::json to_json(const MeanTransform& t);
nlohmann::json to_json(const RadiusResult& r);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const AttractorEstimate& a);

void write_csv(const PartMetricTrace& trace, std::ostream& os);
void write_csv(const AttractorEstimate& a, std::ostream& os);

}  // namespace expord
