#include "baryfold/model_io.hpp"

#include <sstream>

namespace baryfold {

ModelSpace model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument("model descriptor: expected an object with a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "hyperbolic") return ModelSpace::hyperbolic(j.at("n").get<int>());
  if (kind == "product")
    return ModelSpace::product(j.at("n1").get<int>(), j.at("n2").get<int>());
  if (kind == "horospherical")
    return ModelSpace::horospherical(j.at("alphas").get<std::vector<double>>());
  throw std::invalid_argument("model descriptor: unknown kind \"" + kind + "\"");
}

nlohmann::json model_to_json(const ModelSpace& m) {
  nlohmann::json j;
  switch (m.kind()) {
    case ModelKind::Hyperbolic:
      j["kind"] = "hyperbolic";
      j["n"] = m.dim();
      break;
    case ModelKind::Product:
      j["kind"] = "product";
      j["n1"] = m.factor_dim(0);
      j["n2"] = m.factor_dim(1);
      break;
    case ModelKind::Horospherical:
      j["kind"] = "horospherical";
      j["alphas"] = m.alphas();
      break;
  }
  return j;
}

std::string model_label(const ModelSpace& m) {
  std::ostringstream os;
  switch (m.kind()) {
    case ModelKind::Hyperbolic:
      os << "hyperbolic(" << m.dim() << ")";
      break;
    case ModelKind::Product:
      os << "product(" << m.factor_dim(0) << "," << m.factor_dim(1) << ")";
      break;
    case ModelKind::Horospherical: {
      os << "horospherical(";
      for (std::size_t i = 0; i < m.alphas().size(); ++i)
        os << (i ? "," : "") << m.alphas()[i];
      os << ")";
      break;
    }
  }
  return os.str();
}

}  // namespace baryfold
