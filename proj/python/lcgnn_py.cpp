/**
 * Copyright 2026 The lcgnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// Python bindings for graph generation, training, inference and metrics.

#include "lcgnn/checkpoint.hpp"
#include "lcgnn/config.hpp"
#include "lcgnn/graph.hpp"
#include "lcgnn/metrics.hpp"
#include "lcgnn/synth.hpp"
#include "lcgnn/train.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <string>

namespace py = pybind11;
using namespace lcgnn;

namespace {

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["recall"] = r.recall;
  d["precision"] = r.precision;
  d["macro_f1"] = r.macro_f1;
  d["auc"] = r.auc;
  d["tp"] = r.confusion.tp;
  d["fp"] = r.confusion.fp;
  d["tn"] = r.confusion.tn;
  d["fn"] = r.confusion.fn;
  return d;
}

py::dict epoch_dict(const EpochRecord& rec) {
  py::dict d;
  d["epoch"] = rec.epoch;
  d["layer_loss"] = rec.layer_loss;
  d["layer_similarity"] = rec.layer_similarity;
  d["total_loss"] = rec.total_loss;
  d["thresholds"] = rec.thresholds;
  d["label_agreement"] = rec.label_agreement;
  d["test"] = rec.test ? py::object(report_dict(*rec.test)) : py::object(py::none());
  return d;
}

/// Builds a RunConfig from "key = value" settings given as a Python mapping.
RunConfig run_config_from(const std::map<std::string, py::object>& settings) {
  RunConfig cfg;
  for (const auto& [k, v] : settings) apply_run_setting(cfg, k, py::str(v).cast<std::string>());
  return cfg;
}

struct PyTrainResult {
  TrainResult result;
  RunConfig config;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Label-aware multi-relation GNN for fraud detection";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<MultiRelationGraph>(m, "Graph")
      .def(py::init([](const Matrix& features, const std::vector<std::uint8_t>& labels,
                       const std::vector<std::vector<Edge>>& relations) {
             return MultiRelationGraph(features, labels, relations);
           }),
           py::arg("features"), py::arg("labels"), py::arg("relations"))
      .def_property_readonly("num_nodes", &MultiRelationGraph::num_nodes)
      .def_property_readonly("num_relations", &MultiRelationGraph::num_relations)
      .def_property_readonly("feature_dim", &MultiRelationGraph::feature_dim)
      .def_property_readonly("features", &MultiRelationGraph::features)
      .def_property_readonly("labels", &MultiRelationGraph::labels)
      .def(
          "neighbors",
          [](const MultiRelationGraph& g, NodeId u, std::size_t r) {
            const auto s = g.neighbors(u, r);
            return std::vector<NodeId>(s.begin(), s.end());
          },
          py::arg("node"), py::arg("relation"))
      .def("two_hop_candidates", &MultiRelationGraph::two_hop_candidates, py::arg("node"),
           py::arg("relation"))
      .def("degree_stats", [](const MultiRelationGraph& g) {
        const DegreeStats st = degree_stats(g);
        py::list rel;
        for (const auto& r : st.relations) {
          py::dict d;
          d["edges"] = r.edges;
          d["mean_degree"] = r.mean_degree;
          d["max_degree"] = r.max_degree;
          rel.append(d);
        }
        py::dict out;
        out["relations"] = rel;
        out["density"] = st.density;
        return out;
      });

  m.def("load_graph", &load_graph, py::arg("directory"));
  m.def("save_graph", &save_graph, py::arg("graph"), py::arg("directory"));

  py::class_<SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("num_nodes", &SynthConfig::num_nodes)
      .def_readwrite("fraud_ratio", &SynthConfig::fraud_ratio)
      .def_readwrite("num_relations", &SynthConfig::num_relations)
      .def_readwrite("mean_degree", &SynthConfig::mean_degree)
      .def_readwrite("same_label_weight", &SynthConfig::same_label_weight)
      .def_readwrite("feature_dim", &SynthConfig::feature_dim)
      .def_readwrite("separation", &SynthConfig::separation)
      .def_readwrite("camouflage", &SynthConfig::camouflage)
      .def_readwrite("seed", &SynthConfig::seed);
  m.def("synth_preset", &synth_preset, py::arg("name"));
  m.def("generate", &generate, py::arg("config"));

  py::class_<PyTrainResult>(m, "TrainResult")
      .def_property_readonly("history",
                             [](const PyTrainResult& r) {
                               py::list out;
                               for (const auto& rec : r.result.history) out.append(epoch_dict(rec));
                               return out;
                             })
      .def_property_readonly("train_nodes", [](const PyTrainResult& r) { return r.result.split.train; })
      .def_property_readonly("test_nodes", [](const PyTrainResult& r) { return r.result.split.test; })
      .def(
          "predict",
          [](PyTrainResult& r, const MultiRelationGraph& g, const std::vector<NodeId>& nodes) {
            return predict(r.result.model, g, nodes);
          },
          py::arg("graph"), py::arg("nodes"))
      .def(
          "evaluate",
          [](PyTrainResult& r, const MultiRelationGraph& g, const std::vector<NodeId>& nodes) {
            return report_dict(evaluate(r.result.model, g, nodes));
          },
          py::arg("graph"), py::arg("nodes"))
      .def(
          "save_checkpoint",
          [](const PyTrainResult& r, const std::filesystem::path& path) {
            const TrainConfig t = r.config.resolved();
            save_checkpoint(Checkpoint{r.result.model, t.train_fraction, t.seed}, path);
          },
          py::arg("path"));

  m.def("config_keys", &run_config_keys, "Setting names accepted by train().");
  m.def(
      "train",
      [](const MultiRelationGraph& g, const std::map<std::string, py::object>& settings,
         const std::function<void(py::dict)>& on_epoch) {
        PyTrainResult out;
        out.config = run_config_from(settings);
        EpochCallback cb;
        if (on_epoch) cb = [&](const EpochRecord& rec) { on_epoch(epoch_dict(rec)); };
        out.result = train_model(g, out.config.resolved(), cb);
        return out;
      },
      py::arg("graph"), py::arg("settings") = std::map<std::string, py::object>{},
      py::arg("on_epoch") = std::function<void(py::dict)>{},
      "Trains on the graph. Settings use the same keys as the CLI config file.");

  m.def(
      "evaluate_checkpoint",
      [](const std::filesystem::path& path, const MultiRelationGraph& g, const std::vector<NodeId>& nodes) {
        Checkpoint ck = load_checkpoint(path);
        return report_dict(evaluate(ck.model, g, nodes));
      },
      py::arg("path"), py::arg("graph"), py::arg("nodes"));

  using Labels = std::vector<std::uint8_t>;
  m.def(
      "auc", [](const Labels& y, const std::vector<double>& s) { return auc(y, s); },
      py::arg("labels"), py::arg("scores"));
  m.def(
      "recall", [](const Labels& y, const Labels& p) { return recall(y, p); }, py::arg("labels"),
      py::arg("predictions"));
  m.def(
      "macro_f1", [](const Labels& y, const Labels& p) { return macro_f1(y, p); },
      py::arg("labels"), py::arg("predictions"));
  m.def(
      "evaluate_scores",
      [](const std::vector<std::uint8_t>& labels, const std::vector<double>& probs) {
        return report_dict(evaluate_scores(labels, probs));
      },
      py::arg("labels"), py::arg("probabilities"));
}
