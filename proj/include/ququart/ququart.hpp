// Copyright 2026 The ququart-emu Authors
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

// Umbrella header for the ququart emulator.

#pragma once

#include "ququart/bench.hpp"
#include "ququart/chain.hpp"
#include "ququart/common.hpp"
#include "ququart/gates.hpp"
#include "ququart/io.hpp"
#include "ququart/iqae.hpp"
#include "ququart/noise.hpp"
#include "ququart/pauli.hpp"
#include "ququart/state.hpp"
#include "ququart/transpiler.hpp"
