// Copyright 2026 The qdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qdist/block_encoding.hpp"
#include "qdist/campaigns.hpp"
#include "qdist/chebyshev.hpp"
#include "qdist/commuting.hpp"
#include "qdist/distance.hpp"
#include "qdist/eig.hpp"
#include "qdist/error.hpp"
#include "qdist/estimators.hpp"
#include "qdist/matrix.hpp"
#include "qdist/parallel.hpp"
#include "qdist/reductions.hpp"
#include "qdist/rng.hpp"
#include "qdist/state.hpp"
