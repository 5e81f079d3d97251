/**
 * Copyright (c) dsaplan contributors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "dsaplan/arena.hpp"
#include "dsaplan/bestfit.hpp"
#include "dsaplan/brute_force.hpp"
#include "dsaplan/core.hpp"
#include "dsaplan/error.hpp"
#include "dsaplan/exact.hpp"
#include "dsaplan/generators.hpp"
#include "dsaplan/plan_io.hpp"
#include "dsaplan/pool.hpp"
#include "dsaplan/profiler.hpp"
#include "dsaplan/svg.hpp"
#include "dsaplan/verifier.hpp"
