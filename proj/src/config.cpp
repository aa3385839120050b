#include "mollify/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mollify/objectives.hpp"

namespace mollify {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct KeyValue {
  std::string value;
  int line = 0;
  bool used = false;
};

using Sections = std::map<std::string, std::map<std::string, KeyValue>>;

class Reader {
 public:
  explicit Reader(Sections sections) : sections_(std::move(sections)) {}

  bool has(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  std::string get(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end() || s->second.count(key) == 0) {
      throw Error("config is missing required key '" + key + "' in section [" +
                  section + "]");
    }
    KeyValue& kv = s->second.at(key);
    kv.used = true;
    return kv.value;
  }

  double get_double(const std::string& section, const std::string& key) {
    const std::string raw = get(section, key);
    const int line = sections_.at(section).at(key).line;
    try {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw ParseError("key '" + key + "' wants a number, got '" + raw + "'",
                       line);
    }
  }

  long get_long(const std::string& section, const std::string& key) {
    const std::string raw = get(section, key);
    const int line = sections_.at(section).at(key).line;
    try {
      std::size_t pos = 0;
      const long v = std::stol(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw ParseError("key '" + key + "' wants an integer, got '" + raw + "'",
                       line);
    }
  }

  std::uint64_t get_u64(const std::string& section, const std::string& key) {
    const std::string raw = get(section, key);
    const int line = sections_.at(section).at(key).line;
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw ParseError("key '" + key + "' wants an unsigned integer, got '" +
                           raw + "'",
                       line);
    }
  }

  std::vector<double> get_vector(const std::string& section,
                                 const std::string& key) {
    const std::string raw = get(section, key);
    const int line = sections_.at(section).at(key).line;
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell = trim(cell);
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("key '" + key + "' wants comma-separated numbers", line);
      }
    }
    if (out.empty()) {
      throw ParseError("key '" + key + "' wants at least one number", line);
    }
    return out;
  }

  void reject_unused() const {
    for (const auto& [section, keys] : sections_) {
      for (const auto& [key, kv] : keys) {
        if (!kv.used) {
          throw ParseError("unknown key '" + key + "' in section [" + section + "]",
                           kv.line);
        }
      }
    }
  }

 private:
  Sections sections_;
};

Sections tokenize(const std::string& text) {
  Sections sections;
  std::stringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        throw ParseError("malformed section header '" + t + "'", line_no);
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value', got '" + t + "'", line_no);
    }
    if (section.empty()) {
      throw ParseError("key outside of any [section]", line_no);
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (sections[section].count(key) > 0) {
      throw ParseError("duplicate key '" + key + "'", line_no);
    }
    sections[section][key] = KeyValue{value, line_no, false};
  }
  return sections;
}

}  // namespace

SmootherKind parse_smoother(const std::string& kind) {
  if (kind == "mean") return SmootherKind::MeanSmooth;
  if (kind == "exp") return SmootherKind::ExpSmooth;
  throw Error("smoother kind must be 'mean' or 'exp', got '" + kind + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  Reader reader(tokenize(text));
  ExperimentConfig cfg;

  const bool has_descriptor = reader.has("objective", "descriptor");
  const bool has_dataset = reader.has("objective", "dataset");
  if (has_descriptor == has_dataset) {
    throw Error("config needs exactly one of 'descriptor' or 'dataset' in [objective]");
  }
  if (has_descriptor) {
    cfg.descriptor = reader.get("objective", "descriptor");
  } else {
    cfg.dataset = reader.get("objective", "dataset");
    cfg.n_batch = static_cast<int>(reader.get_long("objective", "n_batch"));
  }

  cfg.smoother_kind = reader.get("smoother", "kind");
  parse_smoother(cfg.smoother_kind);
  if (reader.has("smoother", "target_ess")) {
    cfg.target_ess = reader.get_double("smoother", "target_ess");
  }

  cfg.c_beta = reader.get_double("schedules", "c_beta");
  cfg.iota = reader.get_double("schedules", "iota");
  cfg.c_gamma = reader.get_double("schedules", "c_gamma");
  cfg.kappa = reader.get_double("schedules", "kappa");

  cfg.theta0 = reader.get_vector("run", "theta0");
  cfg.n_iterations = reader.get_long("run", "n_iterations");
  cfg.n_samples = static_cast<int>(reader.get_long("run", "n_samples"));
  cfg.master_seed = reader.get_u64("run", "master_seed");
  if (reader.has("run", "record_every")) {
    cfg.record_every = reader.get_long("run", "record_every");
  }
  if (reader.has("run", "threads")) {
    cfg.threads = static_cast<int>(reader.get_long("run", "threads"));
  }
  cfg.output = reader.get("run", "output");
  if (reader.has("run", "summary")) {
    cfg.summary = reader.get("run", "summary");
  }

  reader.reject_unused();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  out += "[objective]\n";
  if (cfg.descriptor) out += "descriptor = " + *cfg.descriptor + "\n";
  if (cfg.dataset) out += "dataset = " + *cfg.dataset + "\n";
  if (cfg.n_batch) out += "n_batch = " + std::to_string(*cfg.n_batch) + "\n";
  out += "\n[smoother]\n";
  out += "kind = " + cfg.smoother_kind + "\n";
  if (cfg.target_ess) out += "target_ess = " + fmt17(*cfg.target_ess) + "\n";
  out += "\n[schedules]\n";
  out += "c_beta = " + fmt17(cfg.c_beta) + "\n";
  out += "iota = " + fmt17(cfg.iota) + "\n";
  out += "c_gamma = " + fmt17(cfg.c_gamma) + "\n";
  out += "kappa = " + fmt17(cfg.kappa) + "\n";
  out += "\n[run]\n";
  out += "theta0 = ";
  for (std::size_t i = 0; i < cfg.theta0.size(); ++i) {
    out += (i ? ", " : "") + fmt17(cfg.theta0[i]);
  }
  out += "\n";
  out += "n_iterations = " + std::to_string(cfg.n_iterations) + "\n";
  out += "n_samples = " + std::to_string(cfg.n_samples) + "\n";
  out += "master_seed = " + std::to_string(cfg.master_seed) + "\n";
  out += "record_every = " + std::to_string(cfg.record_every) + "\n";
  out += "threads = " + std::to_string(cfg.threads) + "\n";
  out += "output = " + cfg.output + "\n";
  if (cfg.summary) out += "summary = " + *cfg.summary + "\n";
  return out;
}

Experiment build_experiment(const ExperimentConfig& cfg) {
  RunConfig run(Schedule(cfg.c_beta, cfg.iota), Schedule(cfg.c_gamma, cfg.kappa));
  run.smoother = parse_smoother(cfg.smoother_kind);
  run.n_iterations = cfg.n_iterations;
  run.n_samples = cfg.n_samples;
  run.target_ess = cfg.target_ess;
  run.master_seed = cfg.master_seed;
  run.record_every = cfg.record_every;
  run.n_threads = cfg.threads;
  Experiment exp{.objective = {},
                 .theta0 = cfg.theta0,
                 .run = std::move(run),
                 .data = std::nullopt};
  if (cfg.descriptor) {
    exp.objective =
        make_objective(*cfg.descriptor, static_cast<int>(cfg.theta0.size()));
  } else {
    Dataset data = load_csv(*cfg.dataset);
    if (static_cast<int>(cfg.theta0.size()) + 1 != data.dim()) {
      throw Error("theta0 must have dimension p-1 = " +
                  std::to_string(data.dim() - 1) + " for this dataset");
    }
    exp.objective = auc_objective(data, *cfg.n_batch);
    exp.data = std::move(data);
  }
  exp.run.validate();
  check_finite(exp.theta0, "theta0");
  return exp;
}

}  // namespace mollify
