// Copyright 2026 The unipark Authors
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

// Umbrella header. io.hpp and cli.hpp also need json.hpp and CLI11.hpp on
// the include path and are not pulled in here.

#pragma once

#include "unipark/control.hpp"
#include "unipark/dynamics.hpp"
#include "unipark/errors.hpp"
#include "unipark/grids.hpp"
#include "unipark/kernels.hpp"
#include "unipark/linearization.hpp"
#include "unipark/lyapunov.hpp"
#include "unipark/simulate.hpp"
#include "unipark/state_space.hpp"
#include "unipark/verify.hpp"
