#include "fsdim/report_json.hpp"

#include <bit>

#include "fsdim/error.hpp"

namespace fsdim {

namespace {

using nlohmann::json;

double d(long double x) { return static_cast<double>(x); }

json grid_json(const DimensionEstimateGrid& grid) {
  json cells = json::array();
  for (const auto& e : grid.entries) cells.push_back({{"l", e.l}, {"n", e.n}, {"h", d(e.h)}});
  return cells;
}

json stream_json(const StreamSummary& s) {
  json j{{"name", s.name}, {"description", s.description}, {"digits", s.digits}};
  if (s.grid) {
    j["max_block_len"] = s.grid->max_block_len;
    j["n_schedule"] = s.grid->n_schedule;
    j["truncated"] = s.grid->truncated;
    j["grid"] = grid_json(*s.grid);
  } else {
    j["grid"] = json::array();
  }
  if (s.estimates) {
    j["dim_lower"] = d(s.estimates->lower);
    j["dim_upper"] = d(s.estimates->upper);
  } else {
    j["dim_lower"] = nullptr;
    j["dim_upper"] = nullptr;
  }
  if (s.normality) {
    j["normality"] = {{"deviation", to_string(s.normality->deviation)},
                      {"deviation_approx", s.normality->deviation.get_d()},
                      {"worst_block", digits_to_string(s.normality->worst_block)}};
  }
  if (s.unresolved_at) j["unresolved_at"] = *s.unresolved_at;
  return j;
}

json record_json(const CertificateRecord& r) {
  return {{"leg", r.leg},
          {"m", r.m},
          {"l", r.l},
          {"n", r.n},
          {"h_in", d(r.h_in)},
          {"h_out", d(r.h_out)},
          {"delta_h", d(r.delta_h)},
          {"bound_bits", d(r.bound_bits)},
          {"g", r.g},
          {"column_bound", r.column_bound},
          {"row_bound", r.row_bound},
          {"max_row_support", r.max_row_support},
          {"max_col_support", r.max_col_support},
          {"certificate_valid", r.certificate_valid},
          {"violation", r.violation},
          {"pass", r.pass}};
}

json inputs_json(const ReportInputs& in) {
  json j{{"source", in.source}};
  if (in.k) j["k"] = *in.k;
  if (in.q) j["q"] = to_string(*in.q);
  if (in.m) j["m"] = *in.m;
  if (in.max_block_len) j["max_block_len"] = in.max_block_len;
  if (!in.n_schedule.empty()) j["n_schedule"] = in.n_schedule;
  if (in.digit_count) j["digit_count"] = *in.digit_count;
  if (in.seed) j["seed"] = *in.seed;
  if (in.samples) j["samples"] = *in.samples;
  if (in.n_max) j["n_max"] = *in.n_max;
  return j;
}

Rational rational_field(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return make_rational(v.get<std::int64_t>());
  throw FormatError("expected a rational string such as \"1/2\"");
}

}  // namespace

json to_json(const VerificationReport& report, bool include_timing) {
  json j{{"scenario", report.scenario},
         {"inputs", inputs_json(report.inputs)},
         {"passed", report.passed()},
         {"partial", report.partial},
         {"unresolved", report.unresolved}};
  j["streams"] = json::array();
  for (const auto& s : report.streams) j["streams"].push_back(stream_json(s));
  j["records"] = json::array();
  for (const auto& r : report.records) j["records"].push_back(record_json(r));
  j["gaps"] = json::array();
  for (const auto& g : report.gaps) {
    j["gaps"].push_back({{"a", g.a},
                         {"b", g.b},
                         {"lower_gap", d(g.lower_gap)},
                         {"upper_gap", d(g.upper_gap)}});
  }
  j["checks"] = json::array();
  for (const auto& c : report.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"checked", c.checked},
                           {"violations", c.violations},
                           {"inconclusive", c.inconclusive},
                           {"pass", c.pass()},
                           {"detail", c.detail}});
  }
  j["notes"] = report.notes;
  if (include_timing) j["timing_ms"] = report.elapsed_ms;
  return j;
}

json grid_report_json(const DimensionEstimateGrid& grid, const DimensionEstimates& estimates,
                      double tail_fraction) {
  json j{{"k", grid.base},
         {"max_block_len", grid.max_block_len},
         {"n_schedule", grid.n_schedule},
         {"truncated", grid.truncated},
         {"tail_fraction", tail_fraction},
         {"grid", grid_json(grid)},
         {"dim_lower", d(estimates.lower)},
         {"dim_upper", d(estimates.upper)}};
  if (grid.truncated) {
    j["requested_max_block_len"] = grid.requested_max_block_len;
    j["requested_n_schedule"] = grid.requested_n_schedule;
  }
  return j;
}

json distribution_to_json(const ProbabilityVector& p) {
  json masses = json::array();
  for (const auto& x : p.to_dense()) masses.push_back(to_string(x));
  return {{"n", p.size()}, {"p", masses}};
}

ProbabilityVector distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("p") || !j["p"].is_array()) {
    throw FormatError("distribution must be an object with a \"p\" array");
  }
  std::vector<Rational> p;
  for (const auto& v : j["p"]) p.push_back(rational_field(v));
  if (j.contains("n")) {
    if (!j["n"].is_number_unsigned() || j["n"].get<std::size_t>() != p.size()) {
      throw FormatError("\"n\" does not match the length of \"p\"");
    }
  }
  return ProbabilityVector::dense(p);
}

json certificate_to_json(const SparseStochasticCertificate& a) {
  json entries = json::array();
  for (const auto& e : a.entries) {
    entries.push_back({{"row", e.row}, {"col", e.col}, {"value", to_string(e.value)}});
  }
  return {{"n", a.n},
          {"m", a.declared_m},
          {"identity_on_empty_columns", a.identity_on_empty_columns},
          {"entries", entries}};
}

SparseStochasticCertificate certificate_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("entries") || !j["entries"].is_array()) {
    throw FormatError("certificate must be an object with \"n\" and \"entries\"");
  }
  SparseStochasticCertificate a;
  a.n = j.at("n").get<std::size_t>();
  a.declared_m = j.value("m", std::uint64_t{a.n});
  a.identity_on_empty_columns = j.value("identity_on_empty_columns", false);
  for (const auto& e : j["entries"]) {
    a.entries.push_back({e.at("row").get<std::size_t>(), e.at("col").get<std::size_t>(),
                         rational_field(e.at("value"))});
  }
  return a;
}

json dispersion_to_json(const DispersionResult& r, bool include_witness) {
  json j{{"m", r.m_star}, {"method", to_string(r.method)}};
  // Powers of two give integral bit counts; keep those as integers.
  if ((r.m_star & (r.m_star - 1)) == 0) {
    j["delta_bits"] = std::bit_width(r.m_star) - 1;
  } else {
    j["delta_bits"] = d(r.delta_bits);
  }
  if (include_witness) j["witness"] = certificate_to_json(r.witness);
  return j;
}

json main_lemma_to_json(const MainLemmaCertificate& c, const CertificateCheck& check,
                        bool include_matrix) {
  json j{{"k", c.multiplier.k},
         {"m", c.multiplier.m},
         {"l", c.l},
         {"n", c.n},
         {"g", c.g},
         {"s", c.multiplier.s},
         {"r", c.multiplier.r},
         {"column_bound", c.column_bound},
         {"row_bound", c.row_bound},
         {"bound_bits", d(c.bound_bits)},
         {"max_row_support", c.max_row_support},
         {"max_col_support", c.max_col_support},
         {"h_alpha", d(shannon_entropy(c.pi_alpha))},
         {"h_m_alpha", d(shannon_entropy(c.pi_m_alpha))},
         {"valid", check.ok},
         {"violation", to_string(check.violation)},
         {"detail", check.detail}};
  if (include_matrix) j["certificate"] = certificate_to_json(c.matrix);
  return j;
}

}  // namespace fsdim
