#pragma once

#include <string>

#include "mollify/convergence.hpp"
#include "mollify/optimizer.hpp"

namespace mollify {

/// CSV column layout: "n,beta,gamma,value,grad_norm,ess,lambda" followed by
/// theta_0..theta_{d-1}. Floats use 17 significant digits so a rewritten
/// file is byte-identical and parsing recovers the exact doubles.
std::string trace_to_csv(const RunTrace& trace);
void write_trace_csv(const RunTrace& trace, const std::string& path);
RunTrace read_trace_csv(const std::string& path);

/// Summary of one run as a JSON document.
struct RunSummary {
  Point final_theta;
  double running_min_grad_norm = 0.0;
  std::string verdict;
  double wall_time_seconds = 0.0;
  long n_records = 0;
  double final_risk = -1.0;  // AUC runs only; negative means absent
};

std::string summary_to_json(const RunSummary& summary);
void write_summary_json(const RunSummary& summary, const std::string& path);

}  // namespace mollify
