// SPDX-License-Identifier: Apache-2.0
//
// hybeam — hybrid analog/digital beamforming for mmWave MIMO, simulation library
// Copyright (C) 2026 the hybeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Umbrella header: pulls in the whole library.

#pragma once

#include "common.hpp"     // RNG streams, dB/angle helpers, linear algebra utilities
#include "arrays.hpp"     // antenna geometries, steering vectors, sector gains
#include "channel.hpp"    // clustered multipath channel sampling
#include "precoding.hpp"  // optimal/hybrid/steering precoders, rates, waterfilling
#include "combining.hpp"  // MMSE combining, hybrid combiner, link designer
#include "feedback.hpp"   // quantized codebooks, bitstream round trip
#include "metrics.hpp"    // Monte Carlo sweeps, aggregation, CSV rendering
#include "experiment.hpp" // JSON configs, named experiments, manifests
