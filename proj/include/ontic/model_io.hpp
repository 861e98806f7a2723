#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ontic/independence.hpp"
#include "ontic/measures.hpp"
#include "ontic/models.hpp"

namespace ontic::io {

// Key order in model files is meaningful (it fixes the preparation-label
// order), so all parsing and emission goes through ordered JSON.
using Json = nlohmann::ordered_json;

inline std::pair<std::string, std::string> split_prep_key(const std::string& key) {
  auto comma = key.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == key.size())
    throw error("model file: preparation key '" + key + "' is not of the form \"x,y\"");
  return {key.substr(0, comma), key.substr(comma + 1)};
}

inline Ket parse_ket(const Json& j) {
  std::vector<Complex> amps;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      throw error("model file: amplitudes must be [re, im] pairs");
    amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return Ket(std::move(amps));
}

inline OntologicalModel model_from_json(const Json& j) {
  if (!j.contains("atoms")) throw error("model file: missing 'atoms'");
  std::vector<std::string> atoms = j.at("atoms").get<std::vector<std::string>>();
  std::vector<double> weights;
  if (j.contains("base_weights")) weights = j.at("base_weights").get<std::vector<double>>();
  auto space = make_space(std::move(atoms), std::move(weights));

  if (!j.contains("preparations")) throw error("model file: missing 'preparations'");
  const auto& preps = j.at("preparations");
  if (!preps.is_object() || preps.empty())
    throw error("model file: 'preparations' must be a non-empty object");

  std::vector<std::string> x_labels, y_labels;
  auto note_label = [](std::vector<std::string>& labels, const std::string& l) {
    for (const auto& existing : labels)
      if (existing == l) return;
    labels.push_back(l);
  };
  for (const auto& [key, value] : preps.items()) {
    auto [x, y] = split_prep_key(key);
    note_label(x_labels, x);
    note_label(y_labels, y);
  }

  std::vector<Distribution> dists;
  for (const auto& x : x_labels)
    for (const auto& y : y_labels) {
      const std::string key = x + "," + y;
      if (!preps.contains(key))
        throw error("model file: missing preparation '" + key + "'");
      dists.emplace_back(space, preps.at(key).get<std::vector<double>>());
    }
  PreparationGrid grid(x_labels, y_labels, std::move(dists));

  std::vector<Experiment> experiments;
  if (j.contains("experiments"))
    for (const auto& je : j.at("experiments")) {
      experiments.emplace_back(je.at("name").get<std::string>(),
                               je.at("outcomes").get<std::vector<std::string>>(),
                               je.at("response").get<std::vector<std::vector<double>>>());
    }

  std::optional<QuantumTarget> target;
  if (j.contains("quantum_target")) {
    const auto& jt = j.at("quantum_target");
    std::vector<Ket> kets;
    for (const auto& x : x_labels)
      for (const auto& y : y_labels) {
        const std::string key = x + "," + y;
        if (!jt.at("preps").contains(key))
          throw error("model file: quantum_target missing preparation '" + key + "'");
        kets.push_back(parse_ket(jt.at("preps").at(key)));
      }
    std::vector<Ket> basis_kets;
    for (const auto& jk : jt.at("basis")) basis_kets.push_back(parse_ket(jk));
    target = QuantumTarget{std::move(kets), MeasurementBasis(std::move(basis_kets))};
  }

  return OntologicalModel(std::move(grid), std::move(experiments), std::move(target));
}

inline OntologicalModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open model file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw error("model file '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

inline Json ket_to_json(const Ket& k) {
  Json out = Json::array();
  for (const auto& a : k.amplitudes) out.push_back(Json::array({a.real(), a.imag()}));
  return out;
}

inline Json model_to_json(const OntologicalModel& model) {
  Json j;
  const auto& space = *model.space();
  j["atoms"] = space.labels();
  bool unit_weights = true;
  for (double w : space.weights()) unit_weights = unit_weights && w == 1.0;
  if (!unit_weights) j["base_weights"] = space.weights();

  Json preps = Json::object();
  for (std::size_t ix = 0; ix < model.grid.nx(); ++ix)
    for (std::size_t iy = 0; iy < model.grid.ny(); ++iy)
      preps[model.grid.x_label(ix) + "," + model.grid.y_label(iy)] =
          model.grid.at(ix, iy).densities();
  j["preparations"] = std::move(preps);

  Json experiments = Json::array();
  for (const auto& e : model.experiments) {
    Json je;
    je["name"] = e.name();
    je["outcomes"] = e.outcomes();
    je["response"] = e.response_table();
    experiments.push_back(std::move(je));
  }
  j["experiments"] = std::move(experiments);

  if (model.quantum_target) {
    Json jt;
    Json jp = Json::object();
    std::size_t idx = 0;
    for (std::size_t ix = 0; ix < model.grid.nx(); ++ix)
      for (std::size_t iy = 0; iy < model.grid.ny(); ++iy, ++idx)
        jp[model.grid.x_label(ix) + "," + model.grid.y_label(iy)] =
            ket_to_json(model.quantum_target->preps[idx]);
    jt["preps"] = std::move(jp);
    Json jb = Json::array();
    for (const auto& k : model.quantum_target->basis.kets) jb.push_back(ket_to_json(k));
    jt["basis"] = std::move(jb);
    j["quantum_target"] = std::move(jt);
  }
  return j;
}

inline void save_model(const OntologicalModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error("cannot write model file '" + path + "'");
  out << model_to_json(model).dump(2) << '\n';
}

inline Json to_json(const PucReport& r) {
  return Json{{"holds", r.holds},
              {"worst_residual", r.worst_residual},
              {"worst_atom", r.worst_atom_label},
              {"tol", r.tol}};
}

inline Json to_json(const NcaReport& r) {
  Json per = Json::array();
  for (const auto& e : r.per_preparation)
    per.push_back(Json{{"x", e.x},
                       {"y", e.y},
                       {"worst_residual", e.worst_residual},
                       {"worst_atom", e.worst_atom_label}});
  return Json{{"holds", r.holds},
              {"worst_residual", r.worst_residual},
              {"tol", r.tol},
              {"per_preparation", std::move(per)}};
}

inline Json to_json(const BoundLine& l) {
  return Json{{"name", l.name}, {"lhs", l.lhs}, {"rhs", l.rhs}, {"slack", l.slack}};
}

inline Json to_json(const BoundReport& r) {
  Json lines = Json::array();
  for (const auto& l : r.lines) lines.push_back(to_json(l));
  Json j{{"name", r.name},
         {"applicable", r.applicable},
         {"holds", r.holds},
         {"slack", r.slack},
         {"slack_tol", r.slack_tol},
         {"m", r.m},
         {"epsilon", r.epsilon},
         {"lines", std::move(lines)}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline Json to_json(const ConsistencyReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back(Json{{"x", e.x},
                           {"y", e.y},
                           {"outcome", e.outcome},
                           {"model", e.model_probability},
                           {"born", e.born_probability},
                           {"deviation", e.deviation}});
  return Json{{"pass", r.pass},
              {"max_deviation", r.max_deviation},
              {"tol", r.tol},
              {"entries", std::move(entries)}};
}

inline Json to_json(const PreclusionTable& t) {
  Json preps = Json::array();
  for (const auto& [x, y] : t.preparations) preps.push_back(x + "," + y);
  return Json{{"outcomes", t.outcome_labels},
              {"preparations", std::move(preps)},
              {"probability", t.probability},
              {"outcome_epsilon", t.outcome_epsilon},
              {"epsilon", t.epsilon}};
}

inline Json to_json(const DistanceChainReport& r) {
  return Json{{"omega", r.omega},
              {"fidelity", r.fidelity},
              {"l2_bound", r.l2_bound},
              {"delta", r.delta},
              {"hellinger_sq", r.hellinger_sq},
              {"holds", r.holds}};
}

}  // namespace ontic::io
