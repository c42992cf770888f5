// Copyright 2026 The dpplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "dpplan/accuracy.hpp"
#include "dpplan/bounds.hpp"
#include "dpplan/budget.hpp"
#include "dpplan/core.hpp"
#include "dpplan/csv.hpp"
#include "dpplan/datum.hpp"
#include "dpplan/eval.hpp"
#include "dpplan/monte_carlo.hpp"
#include "dpplan/optimizer.hpp"
#include "dpplan/plan.hpp"
#include "dpplan/rng.hpp"
#include "dpplan/workloads.hpp"
