// Copyright 2026 The mobo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mobo/serialization.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace mobo::io {

namespace {

using nlohmann::json;

json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw InvalidArgument("bad number '" + s + "'");
  }
  return j.get<double>();
}

void check_version(const json& j, const char* what) {
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw InvalidArgument(std::string("unsupported ") + what + " schema version");
  }
}

std::string format(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\r')) --e;
  if (b == e) return false;
  const auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(number(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) throw ShapeError("ragged matrix in JSON");
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), k) = number_from(j[i][static_cast<std::size_t>(k)]);
    }
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_from(j[i]);
  return v;
}

json to_json(const pareto::ParetoFront& front) {
  return {{"schema_version", kSchemaVersion},
          {"ref", vector_to_json(front.ref())},
          {"points", matrix_to_json(front.points())}};
}

pareto::ParetoFront front_from_json(const json& j) {
  check_version(j, "front");
  Vector ref = vector_from_json(j.at("ref"));
  const Matrix pts = matrix_from_json(j.at("points"), ref.size());
  return pts.rows() > 0 ? pareto::ParetoFront(pts, std::move(ref)) : pareto::ParetoFront(std::move(ref));
}

json to_json(const pareto::BoxDecomposition& decomp) {
  return {{"schema_version", kSchemaVersion},
          {"zeta", decomp.zeta()},
          {"front", to_json(decomp.front())},
          {"lowers", matrix_to_json(decomp.lowers())},
          {"uppers", matrix_to_json(decomp.uppers())}};
}

pareto::BoxDecomposition decomposition_from_json(const json& j) {
  check_version(j, "decomposition");
  pareto::ParetoFront front = front_from_json(j.at("front"));
  const auto m = static_cast<Eigen::Index>(front.dim());
  return pareto::BoxDecomposition(matrix_from_json(j.at("lowers"), m),
                                  matrix_from_json(j.at("uppers"), m), std::move(front),
                                  j.at("zeta").get<double>());
}

json to_json(const harness::ExperimentConfig& c) {
  json opt = {{"restarts", c.opt.restarts},
              {"raw_samples", c.opt.raw_samples},
              {"max_iterations", c.opt.max_iterations},
              {"gradient", c.opt.gradient == optim::GradientMode::kExact ? "exact" : "central-difference"},
              {"fd_step", c.opt.fd_step}};
  return {{"schema_version", kSchemaVersion},
          {"problem", c.problem},
          {"method", harness::to_string(c.method)},
          {"q", c.q},
          {"budget", c.budget},
          {"mc_samples", c.mc_samples},
          {"seed", c.seed},
          {"zeta", c.zeta},
          {"mode", harness::to_string(c.mode)},
          {"infer_ref", c.infer_ref},
          {"noise", c.noise},
          {"optimizer", opt}};
}

harness::ExperimentConfig config_from_json(const json& j) {
  check_version(j, "config");
  harness::ExperimentConfig c;
  c.problem = j.at("problem").get<std::string>();
  c.method = harness::parse_method(j.at("method").get<std::string>());
  c.q = j.at("q").get<std::size_t>();
  c.budget = j.at("budget").get<std::size_t>();
  c.mc_samples = j.at("mc_samples").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.zeta = j.at("zeta").get<double>();
  c.mode = harness::parse_mode(j.at("mode").get<std::string>());
  c.infer_ref = j.at("infer_ref").get<bool>();
  c.noise = j.at("noise").get<double>();
  const json& o = j.at("optimizer");
  c.opt.restarts = o.at("restarts").get<std::size_t>();
  c.opt.raw_samples = o.at("raw_samples").get<std::size_t>();
  c.opt.max_iterations = o.at("max_iterations").get<int>();
  c.opt.gradient = o.at("gradient").get<std::string>() == "exact"
                       ? optim::GradientMode::kExact
                       : optim::GradientMode::kCentralDifference;
  c.opt.fd_step = o.at("fd_step").get<double>();
  return c;
}

json to_json(const harness::BoTrace& trace) {
  json records = json::array();
  for (const auto& r : trace.records) {
    records.push_back({{"iteration", r.iteration},
                       {"evaluations", r.evaluations},
                       {"candidates", matrix_to_json(r.candidates)},
                       {"objectives", matrix_to_json(r.objectives)},
                       {"constraints", matrix_to_json(r.constraints)},
                       {"front", matrix_to_json(r.front)},
                       {"hv", number(r.hv)},
                       {"log_hv_diff", number(r.log_hv_diff)},
                       {"warnings", r.warnings}});
  }
  return {{"schema_version", kSchemaVersion},
          {"config", to_json(trace.config)},
          {"records", std::move(records)}};
}

harness::BoTrace trace_from_json(const json& j) {
  check_version(j, "trace");
  harness::BoTrace t;
  t.config = config_from_json(j.at("config"));
  for (const json& r : j.at("records")) {
    harness::IterationRecord rec;
    rec.iteration = r.at("iteration").get<std::size_t>();
    rec.evaluations = r.at("evaluations").get<std::size_t>();
    const json& cand = r.at("candidates");
    const Eigen::Index d = cand.empty() ? 0 : static_cast<Eigen::Index>(cand[0].size());
    rec.candidates = matrix_from_json(cand, d);
    const json& obj = r.at("objectives");
    const Eigen::Index m = obj.empty() ? 0 : static_cast<Eigen::Index>(obj[0].size());
    rec.objectives = matrix_from_json(obj, m);
    const json& con = r.at("constraints");
    rec.constraints = matrix_from_json(con, con.empty() || con[0].empty() ? 0 : static_cast<Eigen::Index>(con[0].size()));
    rec.front = matrix_from_json(r.at("front"), m);
    rec.hv = number_from(r.at("hv"));
    rec.log_hv_diff = number_from(r.at("log_hv_diff"));
    rec.warnings = r.at("warnings").get<std::vector<std::string>>();
    t.records.push_back(std::move(rec));
  }
  return t;
}

std::string results_csv(const std::vector<harness::BoTrace>& traces) {
  std::ostringstream out;
  out << "schema_version,problem,method,q,seed,iteration,evaluations,hv,log_hv_diff,acq_seconds\n";
  for (const auto& t : traces) {
    for (const auto& r : t.records) {
      out << kSchemaVersion << ',' << t.config.problem << ',' << harness::to_string(t.config.method)
          << ',' << t.config.q << ',' << t.config.seed << ',' << r.iteration << ','
          << r.evaluations << ',' << format(r.hv) << ',' << format(r.log_hv_diff) << ','
          << format(r.acq_seconds) << '\n';
    }
  }
  return out.str();
}

std::vector<ResultRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ResultRow> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (header) {
      if (cells.size() != 10 || cells[0] != "schema_version") throw InvalidArgument("not a results CSV");
      header = false;
      continue;
    }
    if (cells.size() != 10) throw InvalidArgument("results CSV row has " + std::to_string(cells.size()) + " cells");
    if (std::stoi(cells[0]) != kSchemaVersion) throw InvalidArgument("unsupported results schema version");
    ResultRow r;
    r.problem = cells[1];
    r.method = cells[2];
    r.q = std::stoul(cells[3]);
    r.seed = std::stoull(cells[4]);
    r.iteration = std::stoul(cells[5]);
    r.evaluations = std::stoul(cells[6]);
    if (!parse_double(cells[7], r.hv)) r.hv = std::numeric_limits<double>::quiet_NaN();
    if (!parse_double(cells[8], r.log_hv_diff)) r.log_hv_diff = std::numeric_limits<double>::quiet_NaN();
    if (!parse_double(cells[9], r.acq_seconds)) r.acq_seconds = std::numeric_limits<double>::quiet_NaN();
    rows.push_back(std::move(r));
  }
  return rows;
}

Matrix parse_points_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto cells = split(line, ',');
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t k = 0; k < cells.size(); ++k) numeric = numeric && parse_double(cells[k], row[k]);
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw InvalidArgument("non-numeric CSV row: " + line);
    }
    first = false;
    if (!rows.empty() && row.size() != rows[0].size()) throw ShapeError("ragged CSV");
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
}

}  // namespace mobo::io
