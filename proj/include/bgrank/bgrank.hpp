/* Copyright 2026 The bgrank Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License. */

#pragma once

// Umbrella header: ranking of bipartite rating graphs, windowed z-score
// time rebalancing, and the evaluation harness around them.

#include "bgrank/version.hpp"

#include "bgrank/common.hpp"
#include "bgrank/csv.hpp"
#include "bgrank/interactions.hpp"
#include "bgrank/graph.hpp"
#include "bgrank/catalog.hpp"
#include "bgrank/rank.hpp"
#include "bgrank/rebalance.hpp"
#include "bgrank/metrics.hpp"
#include "bgrank/score_io.hpp"
#include "bgrank/truth.hpp"
#include "bgrank/synth.hpp"
#include "bgrank/evaluate.hpp"
