/*
 * Copyright 2026 The cxrcl Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <chrono>
#include <string>

namespace cxrcl {

using WallClock = std::chrono::system_clock;

/// ISO-8601 UTC with millisecond precision, e.g. 2026-10-14T08:30:00.125Z.
std::string format_iso8601(WallClock::time_point tp);
std::string utc_now_iso8601();

}  // namespace cxrcl
