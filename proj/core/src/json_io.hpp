// SPDX-License-Identifier: Apache-2.0
//
// isac-shape: target shape sensing from mmWave MIMO-OFDM channels
// Copyright (C) 2026 The isac-shape Authors
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

// Internal JSON helpers shared by scene.cpp and config.cpp.

#ifndef ISAC_SRC_JSON_IO_HPP
#define ISAC_SRC_JSON_IO_HPP

#include "isac/scene.hpp"

#include <json.hpp>

namespace isac::detail
{
    Scene scene_from_json(const nlohmann::json &j);
    nlohmann::json scene_to_json_value(const Scene &scene);
} // namespace isac::detail

#endif
