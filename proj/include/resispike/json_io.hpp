#pragma once

#include "resispike/asymptotics.hpp"
#include "resispike/criterion.hpp"
#include "resispike/nulllaw.hpp"
#include "resispike/simlab.hpp"
#include "resispike/testkit.hpp"

#include <json.hpp>

#include <string>

namespace resispike {

inline constexpr const char* kSchemaVersion = "1";

// Doubles are written at full round-trip precision. Non-finite values are
// written as the strings "inf", "-inf" and "nan".
nlohmann::json number_to_json(double v);
double number_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const NullLaw& v);
void from_json(const nlohmann::json& j, NullLaw& v);
void to_json(nlohmann::json& j, const TestDiagnostics& v);
void from_json(const nlohmann::json& j, TestDiagnostics& v);
void to_json(nlohmann::json& j, const TestReport& v);
void from_json(const nlohmann::json& j, TestReport& v);
void to_json(nlohmann::json& j, const ClassicalStats& v);
void from_json(const nlohmann::json& j, ClassicalStats& v);
void to_json(nlohmann::json& j, const StatQuantiles& v);
void from_json(const nlohmann::json& j, StatQuantiles& v);
void to_json(nlohmann::json& j, const NullQuantiles& v);
void from_json(const nlohmann::json& j, NullQuantiles& v);
void to_json(nlohmann::json& j, const BaselineReport& v);
void from_json(const nlohmann::json& j, BaselineReport& v);
void to_json(nlohmann::json& j, const CriterionCurve& v);
void from_json(const nlohmann::json& j, CriterionCurve& v);
void to_json(nlohmann::json& j, const MonteCarloSummary& v);
void from_json(const nlohmann::json& j, MonteCarloSummary& v);
void to_json(nlohmann::json& j, const NullStudyResult& v);
void from_json(const nlohmann::json& j, NullStudyResult& v);
void to_json(nlohmann::json& j, const PowerCell& v);
void from_json(const nlohmann::json& j, PowerCell& v);
void to_json(nlohmann::json& j, const PowerRow& v);
void from_json(const nlohmann::json& j, PowerRow& v);
void to_json(nlohmann::json& j, const ScenarioConfig& v);
void from_json(const nlohmann::json& j, ScenarioConfig& v);
void to_json(nlohmann::json& j, const GaussianApprox& v);
void from_json(const nlohmann::json& j, GaussianApprox& v);

// {"schema": "1", "kind": kind, "result": payload}
nlohmann::json envelope(const std::string& kind, nlohmann::json payload);

}  // namespace resispike
