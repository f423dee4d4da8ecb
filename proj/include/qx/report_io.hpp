#pragma once

// JSON and CSV serialization for ensembles, transcripts, reports, and
// circuit input, plus atomic file writes.  JSON doubles use the
// round-trip-exact formatting of the library, so identical inputs give
// byte-identical files.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qx/arealaw.hpp"
#include "qx/circuit_to_ham.hpp"
#include "qx/epr_protocol.hpp"
#include "qx/expander.hpp"

namespace qx {

using Json = nlohmann::ordered_json;

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::int64_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::int64_t c = 0; c < m.cols(); ++c)
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw ParameterError("matrix JSON must be a non-empty array of rows");
  const std::int64_t nrows = j.size();
  const std::int64_t ncols = j.at(0).size();
  Matrix m(nrows, ncols);
  for (std::int64_t r = 0; r < nrows; ++r) {
    if (std::int64_t(j.at(r).size()) != ncols)
      throw ParameterError("ragged matrix JSON");
    for (std::int64_t c = 0; c < ncols; ++c) {
      const Json& e = j.at(r).at(c);
      if (!e.is_array() || e.size() != 2)
        throw ParameterError("matrix entries must be [re, im] pairs");
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

inline Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (std::int64_t i = 0; i < v.size(); ++i)
    out.push_back(Json::array({v(i).real(), v(i).imag()}));
  return out;
}

inline Json real_vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (std::int64_t i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Json ensemble_to_json(const UnitaryEnsemble& e) {
  Json j;
  j["kind"] = to_string(e.kind);
  j["D"] = e.D;
  j["d"] = e.d;
  if (e.seed) j["seed"] = *e.seed;
  Json us = Json::array();
  for (const auto& u : e.unitaries) us.push_back(matrix_to_json(u));
  j["unitaries"] = std::move(us);
  return j;
}

inline UnitaryEnsemble ensemble_from_json(const Json& j) {
  std::vector<Matrix> us;
  for (const auto& ju : j.at("unitaries")) us.push_back(matrix_from_json(ju));
  UnitaryEnsemble e = explicit_ensemble(std::move(us));
  e.kind = ensemble_kind_from(j.at("kind").get<std::string>());
  if (e.D != j.at("D").get<int>() || e.d != j.at("d").get<int>())
    throw ParameterError("ensemble JSON dims do not match its matrices");
  if (j.contains("seed")) e.seed = j.at("seed").get<std::uint64_t>();
  return e;
}

inline Json resources_to_json(const ResourceTuple& r) {
  return Json{{"qubits_sent", r.qubits_sent},
              {"cbits_sent", r.cbits_sent},
              {"epr_consumed", r.epr_consumed},
              {"rbits_used", r.rbits_used}};
}

inline Json transcript_to_json(const ProtocolTranscript& t,
                               bool include_state = false) {
  Json j;
  j["variant"] = to_string(t.variant);
  j["D"] = t.D;
  j["d"] = t.d;
  j["iterations"] = t.iterations;
  j["accept_prob"] = t.accept_prob;
  j["resources"] = resources_to_json(t.resources);
  if (include_state && t.post_state_accept)
    j["post_state_accept"] = vector_to_json(*t.post_state_accept);
  return j;
}

inline Json expander_report_to_json(const ExpanderReport& r) {
  return Json{{"lambda", r.lambda},
              {"c", r.c},
              {"fixed_point_residual", r.fixed_point_residual}};
}

inline Json spectral_report_to_json(const SpectralReport& r) {
  Json j;
  j["eigenvalues"] = real_vector_to_json(r.eigenvalues);
  j["ground_degeneracy"] = r.ground_degeneracy;
  j["gap"] = r.gap;
  j["frustration_free"] = r.frustration_free;
  j["unique_ground"] = r.unique_ground;
  j["gap_at_least_c4"] = r.gap_at_least_c4;
  j["lambda"] = r.lambda;
  j["c"] = r.c;
  j["entropy_bits_mid_cut"] = r.entropy_bits_mid_cut;
  return j;
}

inline Json entropy_bound_to_json(const EntropyBound& b) {
  return Json{{"fidelity_deficit", b.fidelity_deficit},
              {"D", b.D},
              {"kappa", b.kappa},
              {"bound_bits", b.bound_bits}};
}

/// Circuit input document: register dims, padded length, gates as sparse
// complex triplets with support lists.
inline CircuitSpec circuit_from_json(const Json& j) {
  CircuitSpec c;
  c.D = j.at("D").get<int>();
  c.scratch_qubits = j.value("scratch_qubits", 0);
  c.padded_length = j.at("padded_length").get<int>();
  if (j.contains("gates"))
    for (const auto& jg : j.at("gates")) {
      CircuitGate g;
      g.support = jg.at("support").get<std::vector<int>>();
      const std::int64_t dim = jg.at("dim").get<std::int64_t>();
      g.op = Matrix::Zero(dim, dim);
      for (const auto& t : jg.at("triplets")) {
        if (!t.is_array() || t.size() != 4)
          throw ParameterError("gate triplets must be [row, col, re, im]");
        const std::int64_t r = t.at(0).get<std::int64_t>();
        const std::int64_t cc = t.at(1).get<std::int64_t>();
        if (r < 0 || r >= dim || cc < 0 || cc >= dim)
          throw ParameterError("gate triplet index out of range");
        g.op(r, cc) = Complex(t.at(2).get<double>(), t.at(3).get<double>());
      }
      c.gates.push_back(std::move(g));
    }
  detail::validate_circuit(c);
  return c;
}

inline Json circuit_to_json(const CircuitSpec& c) {
  Json j;
  j["D"] = c.D;
  j["scratch_qubits"] = c.scratch_qubits;
  j["padded_length"] = c.padded_length;
  Json gates = Json::array();
  for (const auto& g : c.gates) {
    Json jg;
    jg["support"] = g.support;
    jg["dim"] = g.op.rows();
    Json triplets = Json::array();
    for (std::int64_t r = 0; r < g.op.rows(); ++r)
      for (std::int64_t cc = 0; cc < g.op.cols(); ++cc)
        if (g.op(r, cc) != Complex(0.0, 0.0))
          triplets.push_back(Json::array(
              {r, cc, g.op(r, cc).real(), g.op(r, cc).imag()}));
    jg["triplets"] = std::move(triplets);
    gates.push_back(std::move(jg));
  }
  j["gates"] = std::move(gates);
  return j;
}

// CSV of the nonzero entries of every term's scaled local matrix:
// term, support, row, col, re, im.
inline std::string terms_to_csv(const HamiltonianSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "term,support,row,col,re,im\n";
  for (const auto& t : spec.terms()) {
    std::string support;
    for (std::size_t i = 0; i < t.support.size(); ++i) {
      if (i) support += ' ';
      support += std::to_string(t.support[i]);
    }
    for (std::int64_t r = 0; r < t.op.rows(); ++r)
      for (std::int64_t c = 0; c < t.op.cols(); ++c) {
        const Complex v = t.norm_scale * t.op(r, c);
        if (v != Complex(0.0, 0.0))
          out << t.name << ',' << support << ',' << r << ',' << c << ','
              << v.real() << ',' << v.imag() << '\n';
      }
  }
  return out.str();
}

// Write via a temp file in the destination directory, then rename.
inline void write_atomic(const std::filesystem::path& path,
                         const std::string& content) {
  const std::filesystem::path dir =
      path.has_parent_path() ? path.parent_path() : ".";
  std::filesystem::create_directories(dir);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParameterError("cannot open " + tmp.string());
    out << content;
    if (!out) throw ParameterError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string json_dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw ParameterError("malformed JSON in " + path.string() + ": " +
                         ex.what());
  }
  return j;
}

}  // namespace qx
