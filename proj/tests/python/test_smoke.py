# Copyright 2026 The xlet Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import pathlib

import pytest

import xlet

FIXTURES = pathlib.Path(
    os.environ.get(
        "XLET_FIXTURE_DIR",
        pathlib.Path(__file__).resolve().parents[2] / "data" / "fixtures",
    )
)


def test_normalize_category():
    assert "atheists" in xlet.normalize_category("20th-century atheists")
    assert xlet.normalize_category("Cities in Europe") == {"cities", "in europe"}


def test_build_ontology_ranks_by_frequency():
    onto = xlet.build_ontology(["b", "a", "b", "c", "a", "b"], capacity=2)
    assert onto.types == ["b", "a"]
    assert onto.find("a") == 1
    assert onto.find("c") is None
    assert xlet.TypeOntology.parse(onto.serialize()).types == onto.types


def test_vocab_round_trip():
    vocab = xlet.SubwordVocab.train(["Helsinki on Suomen pääkaupunki"] * 4, 300)
    ids = vocab.encode("Suomen pääkaupunki")
    assert vocab.decode(ids) == "Suomen pääkaupunki"


def test_threshold_is_strict():
    assert xlet.predict_types([0.0, 1.0, -1.0]) == {1}


def test_metrics():
    records = [
        xlet.PredictionRecord("en", "Q1", 0, {1, 2}, {1}),
        xlet.PredictionRecord("en", "Q2", 1, set(), {3}),
    ]
    prf = xlet.macro_prf(records)
    assert prf.precision == pytest.approx(50.0)
    assert prf.recall == pytest.approx(50.0)
    adjusted = xlet.adjusted_precision(records, [("en", 0, 2, "correct")])
    assert adjusted == pytest.approx(100.0)
    with pytest.raises(xlet.ValidationError):
        xlet.adjusted_precision(records, [("en", 0, 1, "correct")])
    with pytest.raises(xlet.ValidationError):
        xlet.macro_prf([])


def test_config_errors_map_to_exceptions():
    with pytest.raises(xlet.ConfigError):
        xlet.RunConfig.parse("[model]\nnope = 1\n")


def test_pipeline_stages(tmp_path):
    config = xlet.RunConfig.load(str(FIXTURES / "run.cfg"))
    config.out = str(tmp_path / "run")
    pipeline = xlet.Pipeline(config)
    with pytest.raises(xlet.ParseError, match="first"):
        pipeline.predict("full")
    pipeline.build_ontology()
    pipeline.build_dataset()
    pipeline.train("full")
    pipeline.predict("full")
    pipeline.baseline("string-match", "full")
    seen = pipeline.out_path("predictions/model.full.tsv")
    text = pipeline.evaluate(seen, name="smoke")
    assert "seen entities" in text
    records = xlet.load_predictions(seen)
    assert records and xlet.macro_prf(records).f1 > 0
    onto = xlet.TypeOntology.load(pipeline.out_path("ontology.tsv"))
    assert 0 < len(onto) <= 12
    result = pipeline.gradcheck()
    assert result["passed"]
    assert result["max_relative_error"] <= 1e-4
