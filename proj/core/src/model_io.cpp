#include "gliomics/model_io.hpp"

#include <vector>

#include <json.hpp>

#include "gliomics/error.hpp"

namespace gliomics {
namespace {

using Json = nlohmann::ordered_json;

Json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Json mat(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

Eigen::VectorXd read_vec(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd read_mat(const Json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : cols_if_empty;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != c) {
      fail(ErrorCode::ParseError, "ragged matrix in model JSON");
    }
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  return m;
}

Json kernel_json(const Kernel& k) {
  Json j;
  j["name"] = k.type == Kernel::Type::Linear ? "linear" : "rbf";
  if (k.type == Kernel::Type::Rbf) j["gamma"] = k.gamma;
  return j;
}

Kernel read_kernel(const Json& j) {
  const auto name = j.at("name").get<std::string>();
  if (name == "linear") return Kernel::linear();
  if (name == "rbf") return Kernel::rbf(j.at("gamma").get<double>());
  fail(ErrorCode::ParseError, "unknown kernel " + name);
}

Json svm_json(const SvmModel& m) {
  Json j;
  j["kernel"] = kernel_json(m.kernel);
  j["hyperparameters"] = {{"C", m.C}};
  j["support_vectors"] = mat(m.support_vectors);
  j["dual_coef"] = vec(m.dual_coef);
  j["bias"] = m.bias;
  return j;
}

SvmModel read_svm(const Json& j) {
  SvmModel m;
  m.kernel = read_kernel(j.at("kernel"));
  m.C = j.at("hyperparameters").at("C").get<double>();
  m.support_vectors = read_mat(j.at("support_vectors"));
  m.dual_coef = read_vec(j.at("dual_coef"));
  m.bias = j.at("bias").get<double>();
  if (m.dual_coef.size() != m.support_vectors.rows()) {
    fail(ErrorCode::ParseError, "dual_coef and support_vectors disagree in count");
  }
  return m;
}

}  // namespace

std::string to_json(const StoredModel& stored) {
  Json j;
  if (const auto* svm = std::get_if<SvmModel>(&stored.model)) {
    j["type"] = "svm";
    j.update(svm_json(*svm));
  } else if (const auto* ova = std::get_if<OvaSvm>(&stored.model)) {
    j["type"] = "svm_ova";
    j["kernel"] = kernel_json(ova->members[0].kernel);
    j["hyperparameters"] = {{"C", ova->members[0].C}};
    Json members = Json::array();
    for (int k = 0; k < 3; ++k) {
      Json m = svm_json(ova->members[k]);
      m["grade"] = OvaSvm::kGrades[k];
      m["prevalence"] = ova->prevalence[k];
      members.push_back(m);
    }
    j["members"] = members;
  } else {
    const auto& mlp = std::get<MlpModel>(stored.model);
    j["type"] = "mlp";
    j["activation"] = {{"hidden", "tanh"}, {"output", "softmax"}};
    j["hyperparameters"] = {
        {"inputs", mlp.inputs()}, {"hidden", mlp.hidden()}, {"outputs", mlp.outputs()}};
    j["weights"] = {{"w1", mat(mlp.w1)}, {"b1", vec(mlp.b1)}, {"w2", mat(mlp.w2)}, {"b2", vec(mlp.b2)}};
  }
  j["standardizer"] = {{"mean", vec(stored.standardizer.mean())},
                       {"sd", vec(stored.standardizer.sd())}};
  j["seed"] = stored.seed;
  return j.dump(2);
}

StoredModel model_from_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    StoredModel out;
    const auto type = j.at("type").get<std::string>();
    if (type == "svm") {
      out.model = read_svm(j);
    } else if (type == "svm_ova") {
      OvaSvm ova;
      const auto& members = j.at("members");
      if (members.size() != 3) fail(ErrorCode::ParseError, "svm_ova needs exactly three members");
      for (std::size_t k = 0; k < 3; ++k) {
        ova.members[k] = read_svm(members[k]);
        ova.prevalence[k] = members[k].at("prevalence").get<int>();
      }
      out.model = ova;
    } else if (type == "mlp") {
      const auto& w = j.at("weights");
      const auto& hp = j.at("hyperparameters");
      MlpModel m;
      m.w1 = read_mat(w.at("w1"), hp.at("inputs").get<Eigen::Index>());
      m.b1 = read_vec(w.at("b1"));
      m.w2 = read_mat(w.at("w2"), hp.at("hidden").get<Eigen::Index>());
      m.b2 = read_vec(w.at("b2"));
      if (m.w1.rows() != m.b1.size() || m.w2.cols() != m.w1.rows() || m.w2.rows() != m.b2.size()) {
        fail(ErrorCode::ParseError, "inconsistent network layer shapes");
      }
      out.model = m;
    } else {
      fail(ErrorCode::ParseError, "unknown model type " + type);
    }
    const auto& st = j.at("standardizer");
    out.standardizer = Standardizer(read_vec(st.at("mean")), read_vec(st.at("sd")));
    out.seed = j.at("seed").get<std::uint64_t>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("model JSON: ") + e.what());
  }
}

}  // namespace gliomics
