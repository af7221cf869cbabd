// Copyright 2026 The qdist Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdist/commuting.hpp"
#include "qdist/estimators.hpp"
#include "qdist/reductions.hpp"
#include "qdist/state.hpp"

namespace qdist {

using Json = nlohmann::ordered_json;

/// %.17g, independent of the global locale's grouping (the C locale is never
/// changed by this library).
inline std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Doubles are written with 17 significant digits. nlohmann's own output is
/// shortest-round-trip, so numbers go through this serializer instead.
inline void write_json_value(std::ostream &os, const Json &j, int indent, int depth) {
  const std::string pad = indent < 0 ? "" : std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad = indent < 0 ? "" : std::string(static_cast<std::size_t>(indent * depth), ' ');
  const char *nl = indent < 0 ? "" : "\n";
  switch (j.type()) {
    case Json::value_t::number_float:
      os << fmt_double(j.get<double>());
      return;
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{" << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << "," << nl;
        first = false;
        os << pad << Json(it.key()).dump() << (indent < 0 ? ":" : ": ");
        write_json_value(os, it.value(), indent, depth + 1);
      }
      os << nl << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      // Numeric leaves stay on one line.
      const bool flat = indent < 0 || std::all_of(j.begin(), j.end(), [](const Json &e) { return e.is_primitive(); });
      os << "[";
      bool first = true;
      for (const auto &e : j) {
        if (!first) os << (flat ? ", " : ",");
        if (!flat) os << nl << pad;
        first = false;
        write_json_value(os, e, flat ? -1 : indent, depth + 1);
      }
      if (!flat && !j.empty()) os << nl << close_pad;
      os << "]";
      return;
    }
    default:
      os << j.dump();
  }
}

inline std::string dump_json(const Json &j, int indent = 2) {
  std::ostringstream os;
  write_json_value(os, j, indent, 0);
  return os.str();
}

inline std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

inline Json parse_json(const std::string &text, const std::string &what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, what + ": " + e.what());
  }
}

inline Json read_json_file(const std::string &path) { return parse_json(read_text_file(path), path); }

// DensityMatrix: {"n_qubits": n, "matrix": [[[re, im], ...], ...]}, rows outermost.

inline Json to_json(const DensityMatrix &rho) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < rho.dim(); ++c) row.push_back(Json::array({rho.matrix()(r, c).real(), rho.matrix()(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return Json{{"n_qubits", rho.n_qubits()}, {"matrix", std::move(rows)}};
}

inline DensityMatrix density_from_json(const Json &j) {
  try {
    const auto n = j.at("n_qubits").get<std::size_t>();
    const auto &rows = j.at("matrix");
    if (n > 12) throw Error(ErrorCode::kParse, "n_qubits above 12");
    const std::size_t d = std::size_t{1} << n;
    if (!rows.is_array() || rows.size() != d) throw Error(ErrorCode::kParse, "matrix must have 2^n_qubits rows");
    ComplexMatrix m(d);
    for (std::size_t r = 0; r < d; ++r) {
      if (!rows[r].is_array() || rows[r].size() != d) throw Error(ErrorCode::kParse, "row " + std::to_string(r) + " has wrong length");
      for (std::size_t c = 0; c < d; ++c) {
        const auto &z = rows[r][c];
        if (!z.is_array() || z.size() != 2) throw Error(ErrorCode::kParse, "entries must be [re, im]");
        m(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
      }
    }
    return DensityMatrix(m);
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("density matrix: ") + e.what());
  }
}

// CommutingPair: {"outcomes": [[p, q, log_mult], ...], "note": "..."}

inline Json to_json(const CommutingPair &cp) {
  Json out = Json::array();
  for (const auto &o : cp.outcomes) out.push_back(Json::array({o.p, o.q, o.log_mult}));
  return Json{{"outcomes", std::move(out)}, {"note", cp.note}};
}

inline CommutingPair commuting_pair_from_json(const Json &j) {
  try {
    CommutingPair cp;
    for (const auto &o : j.at("outcomes")) {
      if (!o.is_array() || o.size() != 3) throw Error(ErrorCode::kParse, "outcomes must be [p, q, log_mult]");
      cp.outcomes.push_back({o[0].get<double>(), o[1].get<double>(), o[2].get<double>()});
    }
    if (j.contains("note")) cp.note = j.at("note").get<std::string>();
    cp.validate();
    return cp;
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("commuting pair: ") + e.what());
  }
}

inline Json to_json(const PolarizationPlan &p) {
  return Json{{"a", p.a},          {"b", p.b},         {"k", p.k},
              {"lambda", p.lambda}, {"l", p.l},         {"m", p.m},
              {"m_saturated", p.m_saturated}, {"no_side_product", p.no_side_product}};
}

inline Json to_json(const PolarizationCertificate &c) {
  return Json{{"plan", to_json(c.plan)},
              {"alpha", c.alpha.to_string()},
              {"side", side_name(c.side)},
              {"t_alpha_in", c.t_alpha_in},
              {"t_alpha_out", c.t_alpha_out},
              {"bound", c.bound},
              {"satisfied", c.satisfied},
              {"output_qubits", c.output_qubits},
              {"path", c.path}};
}

inline Json to_json(const CostLedger &l) {
  return Json{{"queries_q0", l.queries_q0},     {"queries_q1", l.queries_q1}, {"samples_rho0", l.samples_rho0},
              {"samples_rho1", l.samples_rho1}, {"shots", l.shots},           {"gates", l.gates}};
}

inline Json to_json(const EstimationReport &r) {
  Json j{{"quantity", quantity_name(r.quantity)},
         {"model", model_name(r.model)},
         {"alpha", r.alpha},
         {"estimate", r.estimate},
         {"raw_estimate", r.raw_estimate},
         {"eps_total", r.eps_total},
         {"error_bound", r.error_bound},
         {"confidence", r.confidence},
         {"seed", r.seed},
         {"backend", backend_name(r.backend)},
         {"split", Json{{"eps_p", r.split.eps_p}, {"delta_p", r.split.delta_p}, {"eps_H", r.split.eps_H}, {"delta", r.split.delta}}},
         {"degree", r.degree},
         {"dtilde", r.dtilde},
         {"shots_per_term", r.shots_per_term},
         {"ledger_bound", r.ledger_bound},
         {"ledger", to_json(r.ledger)}};
  j["oracle"] = r.oracle_value ? Json(*r.oracle_value) : Json(nullptr);
  j["abs_err"] = r.abs_error() ? Json(*r.abs_error()) : Json(nullptr);
  return j;
}

/// Minimal CSV table; cells are preformatted strings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw Error(ErrorCode::kPrecondition, "csv row has wrong width");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::vector<std::string>> &rows() const { return rows_; }

  /// Optional comment line first (e.g. a timestamp), then header and rows.
  std::string str(const std::string &comment = "") const {
    std::string out;
    if (!comment.empty()) out += "# " + comment + "\n";
    out += join(header_);
    for (const auto &r : rows_) out += join(r);
    return out;
  }

 private:
  static std::string join(const std::vector<std::string> &cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    return s + "\n";
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline const std::vector<std::string> &estimation_csv_header() {
  static const std::vector<std::string> h{"alpha",        "eps",          "backend", "estimate", "oracle", "abs_err",
                                          "queries_q0",   "queries_q1",   "samples_rho0", "samples_rho1", "shots", "seed"};
  return h;
}

inline std::vector<std::string> estimation_csv_row(const EstimationReport &r) {
  return {fmt_double(r.alpha),
          fmt_double(r.eps_total),
          backend_name(r.backend),
          fmt_double(r.estimate),
          r.oracle_value ? fmt_double(*r.oracle_value) : "",
          r.abs_error() ? fmt_double(*r.abs_error()) : "",
          fmt_double(r.ledger.queries_q0),
          fmt_double(r.ledger.queries_q1),
          fmt_double(r.ledger.samples_rho0),
          fmt_double(r.ledger.samples_rho1),
          fmt_double(r.ledger.shots),
          std::to_string(r.seed)};
}

}  // namespace qdist
