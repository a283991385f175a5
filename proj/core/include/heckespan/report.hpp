#ifndef HECKESPAN_REPORT_HPP
#define HECKESPAN_REPORT_HPP

#include <string>

#include "json.hpp"

#include "heckespan/decomp.hpp"
#include "heckespan/homtheory.hpp"
#include "heckespan/msspace.hpp"
#include "heckespan/ribet.hpp"

namespace heckespan {

// JSON encodings with exact-rational string entries ("p/q", or "p" when the
// denominator is 1); matrices are row-major string arrays.

nlohmann::json rat_matrix_to_json(const RatMat& m);
RatMat rat_matrix_from_json(const nlohmann::json& j);

nlohmann::json qpoly_to_json(const QPoly& p);

nlohmann::json level_to_json(const LevelGroup& level);

// Cache payload for a modular symbol space (dense views; small levels).
nlohmann::json space_to_json(const MSSpace& space);

nlohmann::json class_to_json(const IsotypicClass& cls,
                             const std::vector<InnerTwistDatum>& twists);

nlohmann::json verify_report_to_json(const VerifyThm1Report& rep);
std::string verify_report_csv_header();
std::string verify_report_csv_row(const VerifyThm1Report& rep);

nlohmann::json cm32_report_to_json(const Cm32Report& rep);

nlohmann::json twist_report_to_json(const TwistSetup& setup, const TwistVerification& rep);

nlohmann::json base_field_to_json(const BaseField& f, const CompactOpen& K);

}  // namespace heckespan

#endif
