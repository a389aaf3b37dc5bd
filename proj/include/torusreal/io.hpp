// Copyright 2026 The torusreal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Job files are YAML documents with optional top-level sections; reports are
// JSON documents, or a two-column table rendered from the same document.

#pragma once

#include <complex>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "torusreal/connectivity.hpp"
#include "torusreal/reconstruction.hpp"
#include "torusreal/solver.hpp"

namespace torusreal {

using Json = nlohmann::ordered_json;

/// Structure section: either the two real structures J1, J2 directly, or the
/// blocks B1, B2 in the eigenbases of a real structure.
struct StructureInput {
  std::optional<Eigen::MatrixXd> J1, J2;
  std::optional<CompatibleStructure> blocks;
};

struct JobInput {
  std::optional<BundleDatum> bundle;
  std::optional<RealStructureData> real;
  std::optional<StructureInput> structure;
  std::optional<ConstraintSystem> system;
  std::optional<ConjugationData> conjugation;
};

namespace detail {

inline std::string locate(const YAML::Node& node, const std::string& path) {
  const YAML::Mark mark = node.Mark();
  if (mark.line < 0) return path;
  return "line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) + " (" + path + ")";
}

inline std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline Rational read_rational(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) throw InputError("expected a number", locate(node, path));
  auto q = parse_rational(node.Scalar());
  if (!q) throw InputError("cannot read '" + node.Scalar() + "' as a number", locate(node, path));
  return *q;
}

inline int read_int(const YAML::Node& node, const std::string& path) {
  const Rational q = read_rational(node, path);
  if (!is_integer(q) || abs(q) > 1000) throw InputError("expected a small integer", locate(node, path));
  return static_cast<int>(q.convert_to<long long>());
}

inline YAML::Node require_sequence(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) throw InputError("expected a list", locate(node, path));
  return node;
}

inline QVector read_vector(const YAML::Node& node, const std::string& path, std::optional<std::size_t> size = {}) {
  require_sequence(node, path);
  if (size && node.size() != *size)
    throw InputError("expected " + std::to_string(*size) + " entries, got " + std::to_string(node.size()),
                     locate(node, path));
  QVector v;
  for (std::size_t i = 0; i < node.size(); ++i) v.push_back(read_rational(node[i], index_path(path, i)));
  return v;
}

inline QMatrix read_matrix(const YAML::Node& node, const std::string& path, std::optional<std::size_t> rows = {},
                           std::optional<std::size_t> cols = {}) {
  require_sequence(node, path);
  if (rows && node.size() != *rows)
    throw InputError("expected " + std::to_string(*rows) + " rows, got " + std::to_string(node.size()),
                     locate(node, path));
  if (node.size() == 0) return QMatrix(0, cols.value_or(0));
  const std::size_t width = require_sequence(node[0], index_path(path, 0)).size();
  if (cols && width != *cols)
    throw InputError("expected " + std::to_string(*cols) + " columns, got " + std::to_string(width),
                     locate(node[0], index_path(path, 0)));
  QMatrix out(node.size(), width);
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string row_path = index_path(path, i);
    const YAML::Node row = require_sequence(node[i], row_path);
    if (row.size() != width)
      throw InputError("row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(width),
                       locate(row, row_path));
    for (std::size_t j = 0; j < width; ++j) out(i, j) = read_rational(row[j], index_path(row_path, j));
  }
  return out;
}

inline void require_integral(const QMatrix& a, const YAML::Node& node, const std::string& path) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (!is_integer(a(i, j)))
        throw InputError("entry (" + std::to_string(i) + "," + std::to_string(j) + ") must be an integer",
                         locate(node[i][j], index_path(index_path(path, i), j)));
}

inline Eigen::MatrixXd read_real_matrix(const YAML::Node& node, const std::string& path) {
  return read_matrix(node, path).to_eigen();
}

inline void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> keys) {
  if (!node.IsMap()) throw InputError("expected a mapping", locate(node, path));
  for (const auto& item : node) {
    const std::string key = item.first.as<std::string>();
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw InputError("unknown key '" + key + "'", locate(item.first, path.empty() ? key : path + "." + key));
  }
}

inline std::string child(const std::string& path, const char* key) { return path + "." + key; }

inline BundleDatum read_bundle(const YAML::Node& node) {
  check_keys(node, "bundle", {"m", "d", "A"});
  for (const char* key : {"m", "d", "A"})
    if (!node[key]) throw InputError(std::string("missing key '") + key + "'", locate(node, "bundle"));
  BundleDatum datum;
  datum.m = read_int(node["m"], "bundle.m");
  datum.d = read_int(node["d"], "bundle.d");
  if (datum.m <= 0 || datum.d <= 0) throw InputError("m and d must be positive", locate(node, "bundle"));
  const YAML::Node comps = require_sequence(node["A"], "bundle.A");
  if (comps.size() != datum.fibre_rank())
    throw InputError("expected 2d = " + std::to_string(datum.fibre_rank()) + " matrices, got " +
                         std::to_string(comps.size()),
                     locate(comps, "bundle.A"));
  const std::size_t n = datum.base_rank();
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const std::string path = index_path("bundle.A", k);
    QMatrix a = read_matrix(comps[k], path, n, n);
    require_integral(a, comps[k], path);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        if (a(i, j) != -a(j, i))
          throw InputError("not antisymmetric: entry (" + std::to_string(i) + "," + std::to_string(j) + ") is " +
                               to_string(a(i, j)) + ", entry (" + std::to_string(j) + "," + std::to_string(i) +
                               ") is " + to_string(a(j, i)),
                           locate(comps[k][i][j], index_path(index_path(path, i), j)));
    datum.components.push_back(std::move(a));
  }
  validate(datum);
  return datum;
}

inline RealStructureData read_real(const YAML::Node& node, const BundleDatum& datum) {
  check_keys(node, "real", {"A1", "A2", "L", "d1", "d2"});
  const std::size_t f = datum.fibre_rank(), n = datum.base_rank();
  RealStructureData data;
  for (const char* key : {"A1", "A2", "L"})
    if (!node[key]) throw InputError(std::string("missing key '") + key + "'", locate(node, "real"));
  data.A1 = read_matrix(node["A1"], "real.A1", f, f);
  require_integral(data.A1, node["A1"], "real.A1");
  data.A2 = read_matrix(node["A2"], "real.A2", n, n);
  require_integral(data.A2, node["A2"], "real.A2");
  data.L = read_matrix(node["L"], "real.L", f, n);
  data.d1 = node["d1"] ? read_vector(node["d1"], "real.d1", f) : QVector(f);
  data.d2 = node["d2"] ? read_vector(node["d2"], "real.d2", n) : QVector(n);
  return data;
}

inline StructureInput read_structure(const YAML::Node& node, const BundleDatum* datum) {
  check_keys(node, "structure", {"J1", "J2", "B1", "B2"});
  StructureInput out;
  const bool explicit_j = node["J1"] || node["J2"], blocks = node["B1"] || node["B2"];
  if (explicit_j == blocks) throw InputError("give either J1 and J2 or B1 and B2", locate(node, "structure"));
  auto both = [&](const char* a, const char* b) {
    if (!node[a] || !node[b])
      throw InputError(std::string("needs both ") + a + " and " + b, locate(node, "structure"));
  };
  if (explicit_j) {
    both("J1", "J2");
    out.J1 = read_real_matrix(node["J1"], "structure.J1");
    out.J2 = read_real_matrix(node["J2"], "structure.J2");
    if (datum) {
      const auto f = static_cast<Eigen::Index>(datum->fibre_rank()), n = static_cast<Eigen::Index>(datum->base_rank());
      if (out.J1->rows() != f || out.J1->cols() != f)
        throw InputError("J1 must be 2d x 2d", locate(node["J1"], "structure.J1"));
      if (out.J2->rows() != n || out.J2->cols() != n)
        throw InputError("J2 must be 2m x 2m", locate(node["J2"], "structure.J2"));
    }
  } else {
    both("B1", "B2");
    out.blocks = CompatibleStructure{read_real_matrix(node["B1"], "structure.B1"),
                                     read_real_matrix(node["B2"], "structure.B2")};
  }
  return out;
}

inline ConstraintSystem read_system(const YAML::Node& node) {
  check_keys(node, "system", {"m", "a_plus", "a_minus", "D", "L_pp", "L_pm", "L_mp", "L_mm"});
  if (!node["m"]) throw InputError("missing key 'm'", locate(node, "system"));
  ConstraintSystem sys;
  sys.m = read_int(node["m"], "system.m");
  if (sys.m != 1 && sys.m != 2) throw InputError("m must be 1 or 2", locate(node["m"], "system.m"));
  const auto m = static_cast<std::size_t>(sys.m);
  sys.a_plus = node["a_plus"] ? read_rational(node["a_plus"], "system.a_plus") : Rational(0);
  sys.a_minus = node["a_minus"] ? read_rational(node["a_minus"], "system.a_minus") : Rational(0);
  if (sys.m == 1 && (sys.a_plus != 0 || sys.a_minus != 0))
    throw InputError("a_plus and a_minus must vanish for m = 1", locate(node, "system"));
  sys.D = node["D"] ? read_matrix(node["D"], "system.D", m, m) : QMatrix(m, m);
  auto row = [&](const char* key) { return node[key] ? read_vector(node[key], child("system", key), m) : QVector(m); };
  sys.l_pp = row("L_pp");
  sys.l_pm = row("L_pm");
  sys.l_mp = row("L_mp");
  sys.l_mm = row("L_mm");
  return sys;
}

inline ConjugationData read_conjugation(const YAML::Node& node, const BundleDatum& datum) {
  check_keys(node, "conjugation", {"central_images", "base_linear", "base_translation", "generator_lifts",
                                   "generator_shears", "generator_translations", "square_translation"});
  const std::size_t f = datum.fibre_rank(), n = datum.base_rank();
  for (const char* key : {"central_images", "base_linear", "generator_shears", "generator_translations",
                          "square_translation"})
    if (!node[key]) throw InputError(std::string("missing key '") + key + "'", locate(node, "conjugation"));
  ConjugationData conj;
  conj.central_images = read_matrix(node["central_images"], "conjugation.central_images", f, f);
  conj.base_linear = read_matrix(node["base_linear"], "conjugation.base_linear", n, n);
  conj.base_translation = node["base_translation"]
                              ? read_vector(node["base_translation"], "conjugation.base_translation", n)
                              : QVector(n);
  auto list = [&](const char* key) -> YAML::Node {
    const YAML::Node l = require_sequence(node[key], child("conjugation", key));
    if (l.size() != n)
      throw InputError("expected one entry per base generator (" + std::to_string(n) + ")",
                       locate(l, child("conjugation", key)));
    return l;
  };
  if (node["generator_lifts"]) {
    const YAML::Node l = list("generator_lifts");
    for (std::size_t j = 0; j < n; ++j)
      conj.generator_lifts.push_back(read_vector(l[j], index_path("conjugation.generator_lifts", j), f));
  } else {
    conj.generator_lifts.assign(n, QVector(f));
  }
  const YAML::Node shears = list("generator_shears");
  const YAML::Node translations = list("generator_translations");
  for (std::size_t j = 0; j < n; ++j) {
    conj.generator_shears.push_back(read_matrix(shears[j], index_path("conjugation.generator_shears", j), f, n));
    conj.generator_translations.push_back(
        read_vector(translations[j], index_path("conjugation.generator_translations", j), f));
  }
  conj.square_translation = read_vector(node["square_translation"], "conjugation.square_translation", f + n);
  return conj;
}

}  // namespace detail

/// Parses a job document; every InputError carries line, column and field.
inline JobInput parse_job(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw InputError(e.msg, "line " + std::to_string(e.mark.line + 1) + ", column " + std::to_string(e.mark.column + 1));
  }
  if (!root.IsMap()) throw InputError("the document must be a mapping of sections", "top level");
  detail::check_keys(root, "", {"bundle", "real", "structure", "system", "conjugation"});
  JobInput job;
  if (root["bundle"]) job.bundle = detail::read_bundle(root["bundle"]);
  auto needs_bundle = [&](const char* section) {
    if (!job.bundle)
      throw InputError(std::string("section '") + section + "' needs a bundle section", detail::locate(root[section], section));
  };
  if (root["real"]) {
    needs_bundle("real");
    job.real = detail::read_real(root["real"], *job.bundle);
  }
  if (root["structure"]) job.structure = detail::read_structure(root["structure"], job.bundle ? &*job.bundle : nullptr);
  if (root["system"]) job.system = detail::read_system(root["system"]);
  if (root["conjugation"]) {
    needs_bundle("conjugation");
    job.conjugation = detail::read_conjugation(root["conjugation"], *job.bundle);
  }
  return job;
}

inline JobInput load_job(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file", path);
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_job(text.str());
  } catch (const InputError& e) {
    throw InputError(e.what(), path);
  }
}

// Conversions to report values. Exact numbers become strings such as "-3/2".

inline Json rational_json(const Rational& q) { return to_string(q); }

inline Json to_json(const QVector& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(rational_json(q));
  return out;
}

inline Json to_json(const QMatrix& a) {
  Json out = Json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) out.push_back(to_json(a.row_vector(i)));
  return out;
}

inline Json to_json(const Eigen::MatrixXd& a) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline Json to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

/// Complex entries as [re, im].
inline Json to_json(const CMatrix& a) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(Json::array({a(i, j).real(), a(i, j).imag()}));
    out.push_back(std::move(row));
  }
  return out;
}

inline Json to_json(const std::vector<ConditionResult>& conditions) {
  Json out = Json::array();
  for (const auto& c : conditions) {
    Json item = {{"condition", c.label}, {"holds", c.holds}};
    if (!c.detail.empty()) item["detail"] = c.detail;
    out.push_back(std::move(item));
  }
  return out;
}

inline Json to_json(const ConstraintSystem& sys) {
  return {{"m", sys.m},          {"a_plus", rational_json(sys.a_plus)}, {"a_minus", rational_json(sys.a_minus)},
          {"D", to_json(sys.D)}, {"L_pp", to_json(sys.l_pp)},     {"L_pm", to_json(sys.l_pm)},
          {"L_mp", to_json(sys.l_mp)}, {"L_mm", to_json(sys.l_mm)}, {"exact", sys.exact}};
}

inline Json to_json(const SolutionWitness& w) {
  return {{"b", w.cs.B1(0, 0)},
          {"B", to_json(w.cs.B2)},
          {"antiholomorphy_residual", w.antiholomorphy},
          {"compatibility_residual", w.rbr2}};
}

inline Json to_json(const SolutionSet& set) {
  Json out = {{"case", set.info.leaf}, {"empty", set.empty}};
  Json constants = Json::object();
  for (const auto& [name, value] : set.info.constants) constants[name] = rational_json(value);
  out["constants"] = std::move(constants);
  if (set.empty) {
    out["reason"] = set.info.reason;
    return out;
  }
  out["dimension"] = set.dimension;
  out["fibre_dimension"] = set.fibre_dimension;
  out["shape"] = set.shape;
  Json ws = Json::array();
  for (const auto& w : set.witnesses) ws.push_back(to_json(w));
  out["witnesses"] = std::move(ws);
  return out;
}

/// Everything a third party needs to re-verify the certificate: the system,
/// the seed, every node with its residuals, and every path vertex with the
/// residual of the defining equations there.
inline Json to_json(const ConnectivityCertificate& cert, const ConstraintSystem& sys) {
  const SystemEquations eq(sys);
  auto point = [](const SystemPoint& z) { return to_json(Eigen::VectorXd(z)); };
  Json out = {{"seed", cert.seed},
              {"requested_samples", cert.requested},
              {"case", cert.case_label},
              {"system", to_json(sys)},
              {"coordinates", "b, then B row by row"},
              {"path_tolerance", kPathTolerance},
              {"component_count", cert.component_count}};
  auto nodes = [&](const std::vector<SolutionWitness>& list) {
    Json arr = Json::array();
    for (const auto& w : list) {
      Json node = to_json(w);
      node["point"] = point(w.point());
      arr.push_back(std::move(node));
    }
    return arr;
  };
  out["witnesses"] = nodes(cert.witnesses);
  out["bridges"] = nodes(cert.bridges);
  Json paths = Json::array();
  for (const auto& p : cert.paths) {
    Json vertices = Json::array(), residuals = Json::array();
    double worst = 0;
    for (const auto& z : p.vertices) {
      const double r = eq.value(z).cwiseAbs().maxCoeff();
      worst = std::max(worst, r);
      vertices.push_back(point(z));
      residuals.push_back(r);
    }
    paths.push_back({{"from", p.from},
                     {"to", p.to},
                     {"max_residual", worst},
                     {"vertices", std::move(vertices)},
                     {"residuals", std::move(residuals)}});
  }
  out["paths"] = std::move(paths);
  Json failures = Json::array();
  for (const auto& f : cert.failures)
    failures.push_back({{"from", f.from}, {"to", f.to}, {"reason", f.reason}, {"last", point(f.last)}});
  out["failed_attempts"] = std::move(failures);
  return out;
}

inline Json to_json(const RealStructureData& data) {
  return {{"A1", to_json(data.A1)}, {"A2", to_json(data.A2)}, {"L", to_json(data.L)},
          {"d1", to_json(data.d1)}, {"d2", to_json(data.d2)}};
}

inline Json to_json(const ConjugationData& conj) {
  Json lifts = Json::array(), shears = Json::array(), translations = Json::array();
  for (const auto& l : conj.generator_lifts) lifts.push_back(to_json(l));
  for (const auto& s : conj.generator_shears) shears.push_back(to_json(s));
  for (const auto& t : conj.generator_translations) translations.push_back(to_json(t));
  return {{"central_images", to_json(conj.central_images)},
          {"base_linear", to_json(conj.base_linear)},
          {"base_translation", to_json(conj.base_translation)},
          {"generator_lifts", std::move(lifts)},
          {"generator_shears", std::move(shears)},
          {"generator_translations", std::move(translations)},
          {"square_translation", to_json(conj.square_translation)}};
}

namespace detail {

inline bool is_flat(const Json& j) {
  if (!j.is_array()) return !j.is_object();
  for (const auto& e : j)
    if (!is_flat(e)) return false;
  return true;
}

inline std::string cell(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

inline void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    if (j.empty()) rows.emplace_back(prefix, "{}");
    for (const auto& [key, value] : j.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, rows);
  } else if (j.is_array() && !is_flat(j)) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], index_path(prefix, i), rows);
  } else {
    rows.emplace_back(prefix, cell(j));
  }
}

}  // namespace detail

/// Two-column table: dotted field path, value.
inline void render_table(const Json& report, std::ostream& os) {
  std::vector<std::pair<std::string, std::string>> rows;
  detail::flatten(report, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  width = std::min<std::size_t>(width, 44);
  for (const auto& [key, value] : rows) {
    os << key;
    for (std::size_t i = key.size(); i < width; ++i) os << ' ';
    os << "  " << value << '\n';
  }
}

}  // namespace torusreal
