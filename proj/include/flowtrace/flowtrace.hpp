// Copyright 2026 The flowtrace Authors
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

// Umbrella header. The HTTP provider is not included here; it pulls in
// cpp-httplib and is included explicitly where needed.

#ifndef FLOWTRACE_FLOWTRACE_HPP
#define FLOWTRACE_FLOWTRACE_HPP

#include "flowtrace/baselines.hpp"
#include "flowtrace/community.hpp"
#include "flowtrace/eval.hpp"
#include "flowtrace/expansion.hpp"
#include "flowtrace/export.hpp"
#include "flowtrace/ingest.hpp"
#include "flowtrace/pipeline.hpp"
#include "flowtrace/planted.hpp"
#include "flowtrace/ttr.hpp"
#include "flowtrace/txgraph.hpp"
#include "flowtrace/types.hpp"

#endif  // FLOWTRACE_FLOWTRACE_HPP
