// Copyright 2026 The SFM Authors
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

// Machine-readable run reports. Elements are printed 1-based.

#ifndef SFM_REPORT_H_
#define SFM_REPORT_H_

#include <string>

#include <json.hpp>

#include "sfm/algorithms.h"
#include "sfm/lowerbound.h"

namespace sfm {

nlohmann::ordered_json ReportToJson(const RunReport& report);

std::string ReportCsvHeader();
std::string ReportCsvRow(const RunReport& report);

// n,mean_queries,std,strategy,trials,flagged
std::string LowerBoundCsvHeader();
std::string LowerBoundCsvRow(const SimulationStats& stats,
                             std::string_view strategy);

}  // namespace sfm

#endif  // SFM_REPORT_H_
