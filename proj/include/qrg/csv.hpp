#pragma once

// CSV tables emitted by the CLI. Floating-point fields use 9 significant
// digits; a missing cheating value is written as NA.

#include <string>
#include <vector>

#include "qrg/coherent.hpp"
#include "qrg/montecarlo.hpp"

namespace qrg {

inline constexpr const char* kCurveHeader = "alpha,winning_paper,winning_conditional,cheating,threshold";
inline constexpr const char* kEstimateHeader = "trials,wins,estimate,stderr,seed,eta,nu,alpha,n,k";

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// printf("%.9g")
std::string format_g9(double v);

std::string format_curve_csv(const std::vector<CurveRow>& rows);
std::vector<CurveRow> parse_curve_csv(const std::string& text);

std::string format_estimate_csv(const EstimateReport& r);
EstimateReport parse_estimate_csv(const std::string& text);

}  // namespace qrg
