#include "heckespan/report.hpp"

#include <sstream>

namespace heckespan {

using nlohmann::json;

json rat_matrix_to_json(const RatMat& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  json entries = json::array();
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t c = 0; c < m.cols(); ++c) entries.push_back(rat_to_string(m.at(i, c)));
  j["entries"] = entries;
  return j;
}

RatMat rat_matrix_from_json(const json& j) {
  size_t rows = j.at("rows").get<size_t>(), cols = j.at("cols").get<size_t>();
  const json& entries = j.at("entries");
  if (entries.size() != rows * cols) throw std::invalid_argument("matrix json: size mismatch");
  RatMat m(rows, cols);
  size_t idx = 0;
  for (size_t i = 0; i < rows; ++i)
    for (size_t c = 0; c < cols; ++c) m.at(i, c) = rat_from_string(entries[idx++].get<std::string>());
  return m;
}

json qpoly_to_json(const QPoly& p) {
  json coeffs = json::array();
  for (const Rat& c : p.coeffs()) coeffs.push_back(rat_to_string(c));
  return coeffs;
}

json level_to_json(const LevelGroup& level) {
  json j;
  j["N"] = level.N;
  j["H"] = level.H;
  return j;
}

json space_to_json(const MSSpace& space) {
  json j;
  j["level"] = level_to_json(space.level());
  j["ambient_dim"] = space.dim();
  j["cusp_count"] = space.cusp_count();
  j["quotient_map"] = rat_matrix_to_json(space.quotient_map_dense());
  j["boundary"] = rat_matrix_to_json(space.boundary());
  j["cuspidal_basis"] = rat_matrix_to_json(space.cuspidal().basis());
  return j;
}

json class_to_json(const IsotypicClass& cls, const std::vector<InnerTwistDatum>& twists) {
  json j;
  j["new_level"] = cls.new_level;
  j["field_degree"] = cls.field_degree;
  j["h1_dim"] = cls.h1_dim;
  json cps;
  for (const auto& [p, q] : cls.charpolys) cps[std::to_string(p)] = qpoly_to_json(q);
  j["charpolys"] = cps;
  json tw = json::array();
  for (const auto& t : twists) {
    json te;
    te["modulus"] = t.char_modulus;
    te["order"] = t.char_order;
    te["is_cm"] = t.is_cm;
    tw.push_back(te);
  }
  j["inner_twists"] = tw;
  return j;
}

json verify_report_to_json(const VerifyThm1Report& rep) {
  json j;
  j["source"] = rep.source;
  j["target"] = rep.target;
  j["predicted"] = rep.predicted;
  j["achieved"] = rep.achieved;
  j["saturated"] = rep.saturated;
  j["det_bound_used"] = rep.det_bound_used;
  json grading;
  for (const auto& [cls, dim] : rep.grading) grading[std::to_string(cls)] = dim;
  j["grading"] = grading;
  j["generator_count"] = rep.generator_count;
  j["elapsed_ms"] = rep.elapsed_ms;
  return j;
}

std::string verify_report_csv_header() {
  return "source,target,predicted,achieved,saturated,det_bound_used,generator_count,elapsed_ms";
}

std::string verify_report_csv_row(const VerifyThm1Report& rep) {
  std::ostringstream os;
  os << rep.source << "," << rep.target << "," << rep.predicted << "," << rep.achieved << ","
     << (rep.saturated ? 1 : 0) << "," << rep.det_bound_used << "," << rep.generator_count << ","
     << rep.elapsed_ms;
  return os.str();
}

json cm32_report_to_json(const Cm32Report& rep) {
  json j;
  j["squares_to_minus_one"] = rep.squares_to_minus_one;
  j["span_im_dim"] = rep.span_im_dim;
  j["commutes_with_hecke"] = rep.commutes_with_hecke;
  j["rational_piece_dim"] = rep.rational_piece_dim;
  j["identity_bucket_dim"] = rep.identity_bucket_dim;
  j["conjugate_bucket_dim"] = rep.conjugate_bucket_dim;
  j["grading_additive"] = rep.grading_additive;
  j["identity_bucket_is_defined_over_span"] = rep.identity_bucket_is_defined_over_span;
  j["pass"] = rep.pass;
  j["elapsed_ms"] = rep.elapsed_ms;
  return j;
}

json twist_report_to_json(const TwistSetup& setup, const TwistVerification& rep) {
  json j;
  j["class"] = class_to_json(setup.base_class, {setup.twist});
  j["chi"] = {{"modulus", setup.twist.char_modulus}, {"order", setup.twist.char_order}};
  j["m"] = setup.m;
  j["big_level"] = level_to_json(setup.big_space->level());
  j["dims"] = {{"big_space", setup.big_space->dim()},
               {"component", setup.component_dim},
               {"optimal_quotient", setup.ah_dim},
               {"radical", setup.radical.dim()},
               {"witnesses", setup.witnesses.size()}};
  j["checks"] = {{"factors_through", rep.alpha_stabilizes_component &&
                                         rep.projector_kills_witnesses && rep.radical_stable},
                 {"alpha_closure", rep.alpha_stabilizes_component},
                 {"projector_kills_witnesses", rep.projector_kills_witnesses},
                 {"radical_stable", rep.radical_stable},
                 {"semilinear_up_to", rep.semilinear_up_to},
                 {"semilinear", rep.semilinear},
                 {"semilinear_witness", rep.semilinear_witness},
                 {"square_central", rep.square_central},
                 {"quotient_invertible", rep.quotient_invertible},
                 {"x_nonzero", rep.x_nonzero_on_component}};
  j["pass"] = rep.pass;
  j["elapsed_ms"] = rep.elapsed_ms;
  return j;
}

json base_field_to_json(const BaseField& f, const CompactOpen& K) {
  json j;
  j["conductor"] = f.conductor;
  j["degree"] = f.degree();
  j["is_q"] = f.is_q();
  j["components"] = K.component_count();
  json gens = json::array();
  for (auto& [g, ord] : f.character_group) gens.push_back({{"generator", g}, {"order", ord}});
  j["character_group"] = gens;
  return j;
}

}  // namespace heckespan
