#include "adcons/gain_io.hpp"

#include <fstream>
#include <string>

#include "adcons/errors.hpp"

namespace adcons {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a nested array");
  // A flat array is read as a column vector.
  if (!j.front().is_array()) {
    Vector v = vector_from_json(j, what);
    return Matrix(v);
  }
  const std::size_t cols = j.front().size();
  if (cols == 0) throw ConfigError(std::string(what) + ": empty row");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError(std::string(what) + ": ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  return v;
}

json gain_to_json(const ConsensusGain& g, const ConsensusMargins& margins) {
  return {
      {"kind", "consensus"},
      {"n", g.P.rows()},
      {"p", g.F.rows()},
      {"P", matrix_to_json(g.P)},
      {"F", matrix_to_json(g.F)},
      {"Gamma", matrix_to_json(g.Gamma)},
      {"margins",
       {{"lmi_max_eig", margins.lmi_max_eig},
        {"p_min_eig", margins.p_min_eig},
        {"gamma_residual", margins.gamma_residual}}},
  };
}

json gain_to_json(const LipschitzGain& g, const LipschitzMargins& margins) {
  json t = json::array();
  for (Eigen::Index k = 0; k < g.T.size(); ++k) t.push_back(g.T(k));
  return {
      {"kind", "lipschitz"},
      {"n", g.Q.rows()},
      {"p", g.F.rows()},
      {"Q", matrix_to_json(g.Q)},
      {"tau", g.tau},
      {"T", t},
      {"F", matrix_to_json(g.F)},
      {"Gamma", matrix_to_json(g.Gamma)},
      {"iterations", g.iterations},
      {"margins",
       {{"block_max_eig", margins.block_max_eig},
        {"q_min_eig", margins.q_min_eig},
        {"tau", margins.tau},
        {"t_min", margins.t_min},
        {"gamma_residual", margins.gamma_residual}}},
  };
}

GainDocument gain_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("gain document: missing \"kind\"");
  auto field = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw ConfigError(std::string("gain document: missing \"") + key + "\"");
    return j.at(key);
  };
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "consensus") {
    ConsensusGain g{matrix_from_json(field("P"), "P"), matrix_from_json(field("F"), "F"),
                    matrix_from_json(field("Gamma"), "Gamma")};
    if (g.P.rows() != g.P.cols() || g.F.cols() != g.P.rows() || g.Gamma.rows() != g.P.rows() ||
        g.Gamma.cols() != g.P.rows()) {
      throw ConfigError("gain document: inconsistent matrix shapes");
    }
    return g;
  }
  if (kind == "lipschitz") {
    LipschitzGain g;
    g.Q = matrix_from_json(field("Q"), "Q");
    if (!field("tau").is_number()) throw ConfigError("gain document: tau must be a number");
    g.tau = j.at("tau").get<double>();
    g.T = vector_from_json(field("T"), "T");
    g.F = matrix_from_json(field("F"), "F");
    g.Gamma = matrix_from_json(field("Gamma"), "Gamma");
    g.iterations = j.value("iterations", 0);
    if (g.Q.rows() != g.Q.cols() || g.F.cols() != g.Q.rows() || g.T.size() != g.Q.rows() ||
        g.Gamma.rows() != g.Q.rows() || g.Gamma.cols() != g.Q.rows()) {
      throw ConfigError("gain document: inconsistent matrix shapes");
    }
    return g;
  }
  throw ConfigError("gain document: unknown kind \"" + kind + "\"");
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace adcons
