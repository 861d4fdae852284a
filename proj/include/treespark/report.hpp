#pragma once

// JSON serialization of every report type. Field names are part of the
// report schema (kReportSchemaVersion); add fields, never rename them.

#include <iosfwd>

#include <json.hpp>

#include "treespark/experiments.hpp"
#include "treespark/srdiag.hpp"

namespace treespark {

nlohmann::json to_json(const SparsifierReport& r);
nlohmann::json to_json(const TrendReport& r);
nlohmann::json to_json(const SingleTreeUpperReport& r);
nlohmann::json to_json(const ThinTreeReport& r);
nlohmann::json to_json(const MultiTreeLowerReport& r);
nlohmann::json to_json(const SingleTreeLowerReport& r);
nlohmann::json to_json(const DegreeHistogram& r);
nlohmann::json to_json(const ShrinkingMarginalsReport& r);
nlohmann::json to_json(const ReverseChernoffGridReport& r);
nlohmann::json to_json(const TailEnvelopeReport& r);
nlohmann::json to_json(const MatrixFactReport& r);

// Summary record for a trace: constants, residuals, per-step norms and the
// outcome of each check. The matrices themselves are left out.
nlohmann::json trace_summary(const MartingaleTrace& t);

// "trial,seed,lambda_min_pos,lambda_max,within" rows.
void write_extremes_csv(std::ostream& out, const SparsifierReport& r);

}  // namespace treespark
