#include "mollify/auc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace mollify {

Dataset make_dataset(std::vector<std::vector<double>> features,
                     std::vector<int> labels) {
  if (features.size() != labels.size()) {
    throw Error("features and labels must have the same length");
  }
  if (features.size() < 2) throw Error("dataset needs at least two rows");
  const std::size_t p = features[0].size();
  if (p < 2) throw Error("feature dimension must be >= 2");
  for (std::size_t r = 0; r < features.size(); ++r) {
    if (features[r].size() != p) {
      throw Error("row " + std::to_string(r + 1) + " has inconsistent width");
    }
    check_finite(features[r], "features");
    if (labels[r] != 1 && labels[r] != -1) {
      throw Error("labels must be +1 or -1");
    }
  }

  Dataset data;
  data.features.reserve(features.size());
  data.labels.reserve(labels.size());
  for (int wanted : {1, -1}) {
    for (std::size_t r = 0; r < features.size(); ++r) {
      if (labels[r] == wanted) {
        data.features.push_back(std::move(features[r]));
        data.labels.push_back(wanted);
      }
    }
  }
  data.n_plus = static_cast<int>(
      std::count(data.labels.begin(), data.labels.end(), 1));
  if (data.n_plus == 0 || data.n_plus == data.n_data()) {
    throw Error("dataset contains a single class; both labels are required");
  }
  return data;
}

namespace {

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file '" + path + "'");

  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (line.back() == ',') cells.push_back("");

    double label_val = 0.0;
    if (first_content_line && !parse_double(cells[0], label_val)) {
      first_content_line = false;  // header row
      continue;
    }
    first_content_line = false;

    if (cells.size() < 2) {
      throw ParseError("expected 'label,feat_1,...'", line_no);
    }
    if (!parse_double(cells[0], label_val) ||
        (label_val != 1.0 && label_val != -1.0)) {
      throw ParseError("label must be +1 or -1, got '" + cells[0] + "'", line_no);
    }
    std::vector<double> row(cells.size() - 1);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (!parse_double(cells[i], row[i - 1])) {
        throw ParseError("bad numeric field '" + cells[i] + "'", line_no);
      }
    }
    if (!features.empty() && row.size() != features[0].size()) {
      throw ParseError("row width differs from the first data row", line_no);
    }
    features.push_back(std::move(row));
    labels.push_back(label_val == 1.0 ? 1 : -1);
  }
  return make_dataset(std::move(features), std::move(labels));
}

Dataset make_blobs(int p, int n_data, std::uint64_t data_seed,
                   double center_scale, double noise_sd) {
  if (p < 2) throw Error("p must be >= 2");
  if (n_data < 2) throw Error("n_data must be >= 2");
  RngStream rng = substream(data_seed, StreamTag::kData, 0);
  const double c = center_scale / std::sqrt(static_cast<double>(p));
  std::vector<std::vector<double>> features(n_data, std::vector<double>(p));
  std::vector<int> labels(n_data);
  const int n_pos = n_data / 2;
  for (int r = 0; r < n_data; ++r) {
    const int label = r < n_pos ? 1 : -1;
    labels[r] = label;
    for (int i = 0; i < p; ++i) {
      features[r][i] = label * c + noise_sd * rng.normal();
    }
  }
  return make_dataset(std::move(features), std::move(labels));
}

Point stereographic(std::span<const double> v) {
  const std::size_t p = v.size();
  if (p < 2) throw DimensionError("stereographic needs dim >= 2");
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (std::abs(std::sqrt(norm) - 1.0) > 1e-9) {
    throw Error("stereographic input must be a unit vector");
  }
  const double denom = 1.0 - v[p - 1];
  if (std::abs(denom) < 1e-12) {
    throw Error("stereographic projection is undefined at the pole");
  }
  Point theta(p - 1);
  for (std::size_t i = 0; i + 1 < p; ++i) theta[i] = v[i] / denom;
  return theta;
}

Point stereographic_inverse(std::span<const double> theta) {
  check_finite(theta, "theta");
  const std::size_t p = theta.size() + 1;
  double sq = 0.0;
  for (double t : theta) sq += t * t;
  const double denom = sq + 1.0;
  Point v(p);
  for (std::size_t i = 0; i + 1 < p; ++i) v[i] = 2.0 * theta[i] / denom;
  v[p - 1] = (sq - 1.0) / denom;
  return v;
}

double empirical_auc_risk(std::span<const double> v, const Dataset& data) {
  if (static_cast<int>(v.size()) != data.dim()) {
    throw DimensionError("direction dimension does not match the dataset");
  }
  const int n = data.n_data();
  // A positive-negative pair (i, j) is misordered when v.(z_i - z_j) < 0,
  // i.e. score_i < score_j strictly; ties contribute nothing.
  std::vector<double> pos_scores, neg_scores;
  pos_scores.reserve(data.n_plus);
  neg_scores.reserve(data.n_minus());
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int i = 0; i < data.dim(); ++i) s += v[i] * data.features[r][i];
    (r < data.n_plus ? pos_scores : neg_scores).push_back(s);
  }
  std::sort(neg_scores.begin(), neg_scores.end());
  long violated = 0;
  for (double s : pos_scores) {
    violated += neg_scores.end() -
                std::upper_bound(neg_scores.begin(), neg_scores.end(), s);
  }
  return static_cast<double>(violated) /
         (static_cast<double>(n) * (n - 1.0));
}

double minibatch_auc_loss(std::span<const double> theta, const PairBatch& batch,
                          const Dataset& data) {
  if (static_cast<int>(theta.size()) + 1 != data.dim()) {
    throw DimensionError("theta must live in R^(p-1) for p-dimensional data");
  }
  if (batch.pairs.empty()) throw Error("batch must be non-empty");
  const Point v = stereographic_inverse(theta);
  long violated = 0;
  for (const auto& [i, j] : batch.pairs) {
    double gap = 0.0;
    for (int c = 0; c < data.dim(); ++c) {
      gap += v[c] * (data.features[i][c] - data.features[j][c]);
    }
    if (gap < 0.0) ++violated;
  }
  const double n = data.n_data();
  const double factor = 2.0 * data.n_plus * data.n_minus() /
                        (n * (n - 1.0) * batch.pairs.size());
  return factor * static_cast<double>(violated);
}

PairBatch sample_batch(const Dataset& data, int n_batch, RngStream& rng) {
  if (n_batch < 1) throw Error("n_batch must be >= 1");
  PairBatch batch;
  batch.pairs.reserve(n_batch);
  const std::uint64_t n_pos = data.n_plus;
  const std::uint64_t n_neg = data.n_minus();
  for (int k = 0; k < n_batch; ++k) {
    const int i = static_cast<int>(rng.uniform_below(n_pos));
    const int j = data.n_plus + static_cast<int>(rng.uniform_below(n_neg));
    batch.pairs.emplace_back(i, j);
  }
  return batch;
}

NoisyObjective auc_objective(const Dataset& data, int n_batch) {
  if (n_batch < 1) throw Error("n_batch must be >= 1");
  NoisyObjective obj;
  obj.descriptor = "auc";
  obj.dim = data.dim() - 1;
  obj.profile = {.alpha = 0.0, .beta_upper = 1.0, .deterministic = false};
  obj.lower_bound = 0.0;
  obj.j_bound = 1.0;
  auto shared = std::make_shared<Dataset>(data);
  obj.evaluate = [shared](std::span<const double> theta, const Noise& u) {
    return minibatch_auc_loss(theta, u.as<PairBatch>(), *shared);
  };
  obj.sample_noise = [shared, n_batch](RngStream& rng) {
    return Noise(sample_batch(*shared, n_batch, rng));
  };
  return obj;
}

}  // namespace mollify
