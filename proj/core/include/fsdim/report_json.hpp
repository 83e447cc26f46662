#pragma once

#include <nlohmann/json.hpp>

#include "fsdim/blockstats.hpp"
#include "fsdim/dispersion.hpp"
#include "fsdim/main_lemma.hpp"
#include "fsdim/verify.hpp"

namespace fsdim {

// Timing is left out unless asked for, so identical runs give identical JSON.
nlohmann::json to_json(const VerificationReport& report, bool include_timing = false);

nlohmann::json grid_report_json(const DimensionEstimateGrid& grid,
                                const DimensionEstimates& estimates, double tail_fraction);

// {"n": N, "p": ["1/2", "1/4", "1/4"]}
nlohmann::json distribution_to_json(const ProbabilityVector& p);
ProbabilityVector distribution_from_json(const nlohmann::json& j);

// {"n": N, "m": M, "identity_on_empty_columns": bool,
//  "entries": [{"row": i, "col": j, "value": "a/b"}, ...]}
nlohmann::json certificate_to_json(const SparseStochasticCertificate& a);
SparseStochasticCertificate certificate_from_json(const nlohmann::json& j);

nlohmann::json dispersion_to_json(const DispersionResult& r, bool include_witness);
nlohmann::json main_lemma_to_json(const MainLemmaCertificate& c, const CertificateCheck& check,
                                  bool include_matrix);

}  // namespace fsdim
