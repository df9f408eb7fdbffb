#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rplace/devices.hpp"
#include "rplace/optimize.hpp"
#include "rplace/semigroup.hpp"
#include "rplace/sweep.hpp"

namespace rplace::cli {

using ojson = nlohmann::ordered_json;

/// Non-finite values become strings ("inf", "-inf", "nan") so reports stay
/// valid JSON without losing information.
ojson num(double v);
ojson to_json(const Vector& v);
ojson to_json(const Matrix& M);
ojson to_json(const StabilityCertificate& c);
ojson to_json(const ConstantLedger& L);
ojson to_json(const ContractionReport& r);
ojson to_json(const OptimalityTriple& t, bool include_history);
ojson to_json(const LipschitzReport& r);

/// 17 significant digits.
std::string format_double(double v);

std::string sweep_csv(const SweepReport& rep);

void write_text(const std::string& dir, const std::string& name, const std::string& text);
void write_json(const std::string& dir, const std::string& name, const ojson& j);

}  // namespace rplace::cli
