#ifndef NULLITYLAB_IO_HPP
#define NULLITYLAB_IO_HPP

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nullitylab/factory.hpp"
#include "nullitylab/flow.hpp"

namespace nullitylab {

inline constexpr const char* tool_version = "1.0.0";

using nlohmann::json;

/** On-disk model document: the model plus naming and provenance. */
struct ModelFile {
  std::string name;
  HomogeneousModel model;
  std::string generator = "manual";  // "construct" | "manual"
  json parameters = json::object();
};

namespace detail {

inline const json& require(const json& j, const std::string& key,
                           const std::string& where) {
  if (!j.contains(key))
    throw invalid_input("model file: missing field '" + where + key + "'");
  return j.at(key);
}

inline Mat matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw invalid_input("model file: '" + where + "' must be a matrix (array of rows)");
  const int r = static_cast<int>(j.size());
  const int c = static_cast<int>(j.front().size());
  Mat M(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(j[i].size()) != c)
      throw invalid_input("model file: ragged rows in '" + where + "'");
    for (int k = 0; k < c; ++k) {
      if (!j[i][k].is_number())
        throw invalid_input("model file: non-numeric entry in '" + where + "'");
      M(i, k) = j[i][k].get<double>();
    }
  }
  return M;
}

inline json matrix_to_json(const Mat& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

inline json model_to_json(const ModelFile& mf) {
  const int m = mf.model.algebra.dim;
  json c = json::array();
  for (int i = 0; i < m; ++i) {
    json plane = json::array();
    for (int jx = 0; jx < m; ++jx) {
      json row = json::array();
      for (int k = 0; k < m; ++k) row.push_back(mf.model.algebra.c(i, jx, k));
      plane.push_back(row);
    }
    c.push_back(plane);
  }
  json doc;
  doc["name"] = mf.name;
  doc["algebra"] = {{"dim", m},
                    {"structure_constants", c},
                    {"labels", mf.model.algebra.labels}};
  doc["metric"] = detail::matrix_to_json(mf.model.metric);
  doc["provenance"] = {{"generator", mf.generator}, {"parameters", mf.parameters}};
  return doc;
}

inline ModelFile model_from_json(const json& doc) {
  ModelFile mf;
  mf.name = detail::require(doc, "name", "").get<std::string>();
  const json& alg = detail::require(doc, "algebra", "");
  const int m = detail::require(alg, "dim", "algebra.").get<int>();
  if (m <= 0) throw invalid_input("model file: 'algebra.dim' must be positive");
  const json& c = detail::require(alg, "structure_constants", "algebra.");
  if (static_cast<int>(c.size()) != m)
    throw invalid_input("model file: 'algebra.structure_constants' outer size != dim");
  mf.model.algebra.dim = m;
  mf.model.algebra.c = Tensor3(m);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(c[i].size()) != m)
      throw invalid_input("model file: 'algebra.structure_constants' not cubic");
    for (int jx = 0; jx < m; ++jx) {
      if (static_cast<int>(c[i][jx].size()) != m)
        throw invalid_input("model file: 'algebra.structure_constants' not cubic");
      for (int k = 0; k < m; ++k) {
        if (!c[i][jx][k].is_number())
          throw invalid_input("model file: non-numeric structure constant");
        mf.model.algebra.c(i, jx, k) = c[i][jx][k].get<double>();
      }
    }
  }
  if (alg.contains("labels"))
    mf.model.algebra.labels = alg.at("labels").get<std::vector<std::string>>();
  mf.model.metric = detail::matrix_from_json(detail::require(doc, "metric", ""),
                                             "metric");
  if (doc.contains("provenance")) {
    const json& prov = doc.at("provenance");
    if (prov.contains("generator"))
      mf.generator = prov.at("generator").get<std::string>();
    if (prov.contains("parameters")) mf.parameters = prov.at("parameters");
  }
  validate_model(mf.model);  // invariant gate, field errors already raised
  // Constructed models carry their split in the provenance parameters.
  if (mf.generator == "construct" && mf.parameters.contains("n")) {
    int n = mf.parameters.at("n").get<int>();
    mf.model.translation_dim = n;
    mf.model.rep_generators = so3_irrep(n).generators;
  }
  return mf;
}

inline ModelFile read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open model file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw invalid_input("model file: JSON parse error in " + path + ": " + e.what());
  }
  return model_from_json(doc);
}

inline void write_model(const std::string& path, const ModelFile& mf) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write model file: " + path);
  out << model_to_json(mf).dump(2) << "\n";
  if (!out) throw io_error("write failed: " + path);
}

inline json report_to_json(const std::string& model_name,
                           const NullityReport& rep) {
  json flags = json::object(), residuals = json::object(), dims = json::object();
  for (const auto& [k, v] : rep.dims) dims[k] = v;
  for (const auto& [k, f] : rep.flags) {
    flags[k] = to_string(f);
    // Invariant: every flag has a matching residual entry (null when the
    // check was not applicable).
    residuals[k] = rep.residuals.count(k) ? json(rep.residuals.at(k)) : json();
  }
  for (const auto& [k, v] : rep.residuals)
    if (!residuals.contains(k)) residuals[k] = v;
  return json{{"model_name", model_name},
              {"branch", rep.branch},
              {"dims", dims},
              {"flags", flags},
              {"residuals", residuals},
              {"tolerances",
               {{"rank_tol", default_tol()}, {"report_tol", report_tol}}},
              {"tool_version", tool_version}};
}

inline void write_report(const std::string& path, const std::string& model_name,
                         const NullityReport& rep) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write report file: " + path);
  out << report_to_json(model_name, rep).dump(2) << "\n";
  if (!out) throw io_error("write failed: " + path);
}

namespace detail {

inline std::string csv_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "n,v0_dim,a,b,d,dim_nu,dim_nu1,dim_nu2,dim_U,genericity,structure_pass\n";
  for (const SweepRow& r : rows) {
    out << r.n << ',' << r.v0_dim << ',' << detail::csv_num(r.a) << ','
        << detail::csv_num(r.b) << ',';
    if (r.admissible)
      out << r.d << ',' << r.dim_nu << ',' << r.dim_nu1 << ',' << r.dim_nu2 << ','
          << r.dim_U << ',' << (r.genericity ? 1 : 0) << ','
          << (r.structure_pass ? 1 : 0) << '\n';
    else
      out << "na,na,na,na,na,na,na\n";
  }
}

inline void write_sweep_csv(const std::string& path,
                            const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write sweep file: " + path);
  write_sweep_csv(out, rows);
  if (!out) throw io_error("write failed: " + path);
}

inline void write_trajectory_csv(const std::string& path,
                                 const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write trajectory file: " + path);
  const int m = traj.body_velocity.empty()
                    ? 0
                    : static_cast<int>(traj.body_velocity.front().size());
  out << "t";
  for (int i = 0; i < m; ++i) out << ",v" << i + 1;
  out << "\n";
  for (size_t s = 0; s < traj.times.size(); ++s) {
    out << detail::csv_num(traj.times[s]);
    for (int i = 0; i < m; ++i)
      out << ',' << detail::csv_num(traj.body_velocity[s](i));
    out << "\n";
  }
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace nullitylab

#endif
