#include "opuc/serialize.hpp"

#include "opuc/error.hpp"

namespace opuc {

nlohmann::json to_json(const VerblunskySeq& a) {
  nlohmann::json c = nlohmann::json::array();
  for (Eigen::Index k = 0; k < a.size(); ++k)
    c.push_back({a.coeffs(k).real(), a.coeffs(k).imag()});
  return {{"coeffs", c}, {"terminated", a.terminated}};
}

VerblunskySeq coeffs_from_json(const nlohmann::json& j) {
  const auto& c = j.at("coeffs");
  VerblunskySeq a = VerblunskySeq::zeros(static_cast<Eigen::Index>(c.size()));
  for (std::size_t k = 0; k < c.size(); ++k)
    a.coeffs(static_cast<Eigen::Index>(k)) = {c[k].at(0).get<double>(),
                                              c[k].at(1).get<double>()};
  a.terminated = j.value("terminated", false);
  a.validate();
  return a;
}

nlohmann::json to_json(const CircleMeasure& mu) {
  if (mu.kind() == CircleMeasure::Kind::Discrete) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& at : mu.atoms())
      atoms.push_back({{"theta", at.theta}, {"w", at.w}});
    return {{"type", "discrete"}, {"atoms", atoms}};
  }
  const char* type =
      mu.kind() == CircleMeasure::Kind::Mixed ? "mixed" : "ac";
  return {{"type", type}, {"family", mu.ac().family}, {"params", mu.ac().params}};
}

CircleMeasure discrete_from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "discrete")
    throw Error(ErrorKind::Config, "not a discrete measure");
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms"))
    atoms.push_back({a.at("theta").get<double>(), a.at("w").get<double>()});
  return CircleMeasure::discrete(std::move(atoms));
}

}  // namespace opuc
