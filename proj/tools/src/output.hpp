#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "rsl/asymptotics.hpp"
#include "rsl/error.hpp"
#include "rsl/randomwalk.hpp"
#include "rsl/tailstats.hpp"

namespace rsl::cli {

using Json = nlohmann::ordered_json;

class IoError : public Error {
 public:
  using Error::Error;
};

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

Json to_json(const Estimate& e);
Json to_json(const Regime& r);
Json to_json(const AsymptoticPrediction& p);
Json to_json(const IdentityReport& r);
Json to_json(const TwoSampleResult& r);
Json to_json(const BoundsReport& r);
Json to_json(const CramerConstant& c);
Json to_json(const ContinuityCheck& c);
Json to_json(const SlopeFit& s);

// Columns x, p_hat, se, predicted, ratio, ci_lo, ci_hi. Points the
// diagnostic dropped keep empty prediction columns.
std::string tail_csv(const TailCurve& curve, const RatioDiagnostic& diagnostic);

// "# {meta json}" line, then a single column w.
std::string sample_csv(const StationarySample& sample);

// Writes `content` to dir/name, creating dir. Returns the path.
std::string write_file(const std::string& dir, const std::string& name, const std::string& content);

}  // namespace rsl::cli
