// Copyright 2026 The xlet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Python module exposing the pipeline stages, normalization, the tokenizer
// and the metrics.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>
#include <vector>

#include "xlet/common.h"
#include "xlet/evaluation.h"
#include "xlet/model.h"
#include "xlet/ontology.h"
#include "xlet/pipeline.h"
#include "xlet/tokenizer.h"

namespace py = pybind11;

namespace xlet {
namespace {

using AdjudicationTuple = std::tuple<std::string, int64_t, TypeId, std::string>;

std::vector<Adjudication> ToAdjudications(
    const std::vector<AdjudicationTuple> &tuples) {
  std::vector<Adjudication> out;
  for (const auto &[language, index, type, label] : tuples) {
    out.push_back({language, index, type, ParseAdjudicationLabel(label)});
  }
  return out;
}

}  // namespace
}  // namespace xlet

PYBIND11_MODULE(_xlet, m) {
  using namespace xlet;
  m.doc() = "Multilingual fine-grained entity typing";
  m.attr("__version__") = ToolVersion();

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<ParseError> parse_error(m, "ParseError", error.ptr());
  static py::exception<ConfigError> config_error(m, "ConfigError", error.ptr());
  static py::exception<ValidationError> validation_error(m, "ValidationError",
                                                         error.ptr());
  static py::exception<LookupError> lookup_error(m, "LookupError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const StageError &e) {
      // Stage errors keep the category implied by their exit code.
      PyObject *type = e.exit_code() == 1   ? config_error.ptr()
                       : e.exit_code() == 3 ? validation_error.ptr()
                                            : parse_error.ptr();
      PyErr_SetString(type, e.what());
    } catch (const ConfigError &e) {
      PyErr_SetString(config_error.ptr(), e.what());
    } catch (const ValidationError &e) {
      PyErr_SetString(validation_error.ptr(), e.what());
    } catch (const ParseError &e) {
      PyErr_SetString(parse_error.ptr(), e.what());
    } catch (const LookupError &e) {
      PyErr_SetString(lookup_error.ptr(), e.what());
    } catch (const Error &e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  m.def(
      "normalize_category",
      [](const std::string &category) {
        return NormalizeCategory(category, NormalizationConfig::Default());
      },
      py::arg("category"), "Type strings of one raw category name.");

  py::class_<TypeOntology>(m, "TypeOntology")
      .def_static("load", &TypeOntology::Load, py::arg("path"))
      .def_static("parse", &TypeOntology::Parse, py::arg("text"))
      .def("serialize", &TypeOntology::Serialize)
      .def("__len__", &TypeOntology::size)
      .def("find", &TypeOntology::Find, py::arg("type"))
      .def("type_string", &TypeOntology::TypeString, py::arg("id"))
      .def("rank_of", &TypeOntology::RankOf, py::arg("id"))
      .def_property_readonly("capacity", &TypeOntology::capacity)
      .def_property_readonly("types", [](const TypeOntology &o) {
        std::vector<std::string> out;
        for (const auto &e : o.entries()) out.push_back(e.type);
        return out;
      });

  m.def(
      "build_ontology",
      [](const std::vector<std::string> &occurrences, int32_t capacity) {
        return BuildOntology(occurrences, capacity);
      },
      py::arg("occurrences"), py::arg("capacity") = TypeOntology::kPaperCapacity,
      "Ranks type occurrences by frequency and keeps the top capacity.");

  py::class_<SubwordVocab>(m, "SubwordVocab")
      .def(py::init<>())
      .def_static("train", &SubwordVocab::Train, py::arg("lines"),
                  py::arg("vocab_size"))
      .def_static("load", &SubwordVocab::Load, py::arg("path"))
      .def("encode", &SubwordVocab::Encode, py::arg("text"))
      .def("decode", &SubwordVocab::Decode, py::arg("ids"))
      .def("piece", &SubwordVocab::Piece, py::arg("id"))
      .def("__len__", &SubwordVocab::size)
      .def("hash", &SubwordVocab::Hash);

  m.def(
      "predict_types",
      [](const std::vector<double> &scores, double threshold) {
        Eigen::Map<const Vector> s(scores.data(),
                                   static_cast<Eigen::Index>(scores.size()));
        return PredictTypes(ToProbabilities(s), threshold);
      },
      py::arg("scores"), py::arg("threshold") = 0.5,
      "Types whose sigmoid probability exceeds the threshold.");

  py::class_<PredictionRecord>(m, "PredictionRecord")
      .def(py::init([](std::string language, std::string qid, int64_t index,
                       TypeSet predicted, TypeSet gold) {
             return PredictionRecord{std::move(language), std::move(qid), index,
                                     std::move(predicted), std::move(gold)};
           }),
           py::arg("language"), py::arg("qid"), py::arg("index"),
           py::arg("predicted"), py::arg("gold"))
      .def_readwrite("language", &PredictionRecord::language)
      .def_readwrite("qid", &PredictionRecord::qid)
      .def_readwrite("index", &PredictionRecord::index)
      .def_readwrite("predicted", &PredictionRecord::predicted)
      .def_readwrite("gold", &PredictionRecord::gold)
      .def("__eq__", &PredictionRecord::operator==);

  py::class_<Prf>(m, "Prf")
      .def_readonly("precision", &Prf::precision)
      .def_readonly("recall", &Prf::recall)
      .def_readonly("f1", &Prf::f1)
      .def_readonly("examples", &Prf::examples)
      .def_readonly("undefined", &Prf::undefined)
      .def("__repr__", [](const Prf &p) {
        return "Prf(precision=" + std::to_string(p.precision) +
               ", recall=" + std::to_string(p.recall) +
               ", f1=" + std::to_string(p.f1) + ")";
      });

  m.def("macro_prf", &MacroPrf, py::arg("records"),
        "Macro precision, recall and F1 in percent.");
  m.def(
      "adjusted_precision",
      [](const std::vector<PredictionRecord> &records,
         const std::vector<AdjudicationTuple> &adjudications,
         bool include_maybe) {
        return AdjustedPrecision(records, ToAdjudications(adjudications),
                                 include_maybe);
      },
      py::arg("records"), py::arg("adjudications"),
      py::arg("include_maybe") = false,
      "Adjudications are (language, index, type id, label) tuples.");
  m.def("load_predictions", &LoadPredictions, py::arg("path"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static("load", &RunConfig::Load, py::arg("path"))
      .def_static("parse", &RunConfig::Parse, py::arg("text"),
                  py::arg("base_dir") = ".")
      .def("serialize", &RunConfig::Serialize)
      .def("validate", &RunConfig::Validate)
      .def("override_seed", &RunConfig::OverrideSeed, py::arg("seed"))
      .def_readwrite("out", &RunConfig::out)
      .def_readwrite("threshold", &RunConfig::threshold)
      .def_readwrite("capacity", &RunConfig::capacity)
      .def_readwrite("window", &RunConfig::window)
      .def_readwrite("vocab_size", &RunConfig::vocab_size);

  py::class_<Pipeline>(m, "Pipeline")
      .def(py::init<RunConfig>(), py::arg("config"))
      .def("out_path", &Pipeline::OutPath, py::arg("relative"))
      .def("build_ontology", &Pipeline::BuildOntology,
           py::call_guard<py::gil_scoped_release>())
      .def("build_dataset", &Pipeline::BuildDataset,
           py::call_guard<py::gil_scoped_release>())
      .def("holdout", &Pipeline::Holdout,
           py::call_guard<py::gil_scoped_release>())
      .def(
          "train",
          [](Pipeline &p, const std::string &split) {
            Split s = ParseSplit(split);
            py::gil_scoped_release release;
            p.TrainModel(s);
          },
          py::arg("split") = "full")
      .def(
          "predict",
          [](Pipeline &p, const std::string &split) {
            Split s = ParseSplit(split);
            py::gil_scoped_release release;
            p.PredictSplit(s);
          },
          py::arg("split") = "full")
      .def(
          "baseline",
          [](Pipeline &p, const std::string &kind, const std::string &split) {
            BaselineKind k = ParseBaselineKind(kind);
            Split s = ParseSplit(split);
            py::gil_scoped_release release;
            p.Baseline(k, s);
          },
          py::arg("kind"), py::arg("split") = "full")
      .def(
          "evaluate",
          [](Pipeline &p, const std::string &seen, const std::string &unseen,
             const std::string &adjudications, const std::string &name) {
            EvaluateOptions options{seen, unseen, adjudications, name};
            py::gil_scoped_release release;
            return p.Evaluate(options);
          },
          py::arg("seen"), py::arg("unseen") = "",
          py::arg("adjudications") = "", py::arg("name") = "report",
          "Writes reports/<name>.{txt,json} and returns the text report.")
      .def("gradcheck", [](Pipeline &p) {
        GradCheckOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = p.GradCheckStage();
        }
        py::dict d;
        d["passed"] = outcome.passed;
        d["max_relative_error"] = outcome.result.max_relative_error;
        d["coordinates"] = outcome.result.coordinates;
        d["worst_block"] = outcome.result.worst_block;
        return d;
      });
}
