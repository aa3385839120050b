#include "mollify/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mollify {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Full-consumption parse; subnormal underflow yields the nearest
/// representable value instead of failing, so written traces always read
/// back. Returns false on malformed or partially numeric cells.
bool parse_field(const std::string& cell, double& out) {
  const char* s = cell.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  return end != s && *end == '\0';
}

bool parse_field(const std::string& cell, long& out) {
  const char* s = cell.c_str();
  char* end = nullptr;
  out = std::strtol(s, &end, 10);
  return end != s && *end == '\0';
}

}  // namespace

std::string trace_to_csv(const RunTrace& trace) {
  std::string out = "n,beta,gamma,value,grad_norm,ess,lambda";
  const std::size_t d =
      trace.records.empty() ? trace.final_theta.size() : trace.records[0].theta.size();
  for (std::size_t i = 0; i < d; ++i) {
    out += ",theta_" + std::to_string(i);
  }
  out += "\n";
  for (const TraceRecord& r : trace.records) {
    out += std::to_string(r.n);
    out += "," + fmt17(r.beta_n);
    out += "," + fmt17(r.gamma_n);
    out += "," + fmt17(r.value);
    out += "," + fmt17(r.grad_norm);
    out += "," + fmt17(r.ess);
    out += "," + fmt17(r.rescale_lambda);
    for (double t : r.theta) out += "," + fmt17(t);
    out += "\n";
  }
  return out;
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << trace_to_csv(trace);
  if (!out) throw Error("failed writing trace to '" + path + "'");
}

RunTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  RunTrace trace;
  std::string line;
  int line_no = 0;
  std::size_t n_cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line_no == 1) {
      if (cells.size() < 8 || cells[0] != "n") {
        throw ParseError("unexpected trace header", line_no);
      }
      n_cols = cells.size();
      continue;
    }
    if (cells.size() != n_cols) {
      throw ParseError("row has wrong column count", line_no);
    }
    TraceRecord r;
    bool ok = parse_field(cells[0], r.n);
    ok = ok && parse_field(cells[1], r.beta_n);
    ok = ok && parse_field(cells[2], r.gamma_n);
    ok = ok && parse_field(cells[3], r.value);
    ok = ok && parse_field(cells[4], r.grad_norm);
    ok = ok && parse_field(cells[5], r.ess);
    ok = ok && parse_field(cells[6], r.rescale_lambda);
    for (std::size_t i = 7; ok && i < cells.size(); ++i) {
      double t = 0.0;
      ok = parse_field(cells[i], t);
      r.theta.push_back(t);
    }
    if (!ok) throw ParseError("bad numeric field", line_no);
    trace.records.push_back(std::move(r));
  }
  for (const TraceRecord& r : trace.records) {
    trace.running_min_grad_norm =
        std::min(trace.running_min_grad_norm, r.grad_norm);
  }
  if (!trace.records.empty()) {
    trace.final_theta = trace.records.back().theta;
  }
  return trace;
}

std::string summary_to_json(const RunSummary& summary) {
  nlohmann::json j;
  j["final_theta"] = summary.final_theta;
  j["running_min_grad_norm"] = summary.running_min_grad_norm;
  j["verdict"] = summary.verdict;
  j["wall_time_seconds"] = summary.wall_time_seconds;
  j["n_records"] = summary.n_records;
  if (summary.final_risk >= 0.0) j["final_risk"] = summary.final_risk;
  return j.dump(2) + "\n";
}

void write_summary_json(const RunSummary& summary, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << summary_to_json(summary);
  if (!out) throw Error("failed writing summary to '" + path + "'");
}

}  // namespace mollify
