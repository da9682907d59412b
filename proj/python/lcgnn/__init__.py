# Copyright 2026 The lcgnn Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Label-aware multi-relation GNN for fraud detection."""

from ._core import (
    DataError,
    Graph,
    NumericError,
    ShapeError,
    SynthConfig,
    TrainResult,
    UsageError,
    auc,
    config_keys,
    evaluate_checkpoint,
    evaluate_scores,
    generate,
    load_graph,
    macro_f1,
    recall,
    save_graph,
    synth_preset,
    train,
)

__all__ = [
    "DataError",
    "Graph",
    "NumericError",
    "ShapeError",
    "SynthConfig",
    "TrainResult",
    "UsageError",
    "auc",
    "config_keys",
    "evaluate_checkpoint",
    "evaluate_scores",
    "generate",
    "load_graph",
    "macro_f1",
    "recall",
    "save_graph",
    "synth_preset",
    "train",
]
