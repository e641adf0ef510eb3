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

// Instance files and generator specs.
//
//   cut <n_vertices> <s> <t>     then one "u v w" line per edge; vertex
//                                ids are 0-based, w >= 0.
//   table <n>                    then 2^n "bitmask value" lines, n <= 20.
//   lb <n>                       then the 1-based elements of R.
//
// Blank lines and lines starting with '#' are ignored. Generator specs read
// "cut:n=..,density=..,wmax=..[,budget=..]" or "lb:n=..".

#ifndef SFM_INSTANCE_IO_H_
#define SFM_INSTANCE_IO_H_

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "sfm/oracle.h"

namespace sfm {

struct LoadedInstance {
  std::shared_ptr<const SubmodularInstance> instance;
  // Set when the instance is a cut function.
  std::shared_ptr<const CutInstance> cut;
  // Set when the instance is f_R.
  std::shared_ptr<const LowerBoundInstance> lower_bound;
};

// ParseError messages read "<name>:<line>: <reason>".
LoadedInstance ParseInstance(std::istream& in, const std::string& name);
LoadedInstance LoadInstanceFile(const std::string& path);

struct GeneratorSpec {
  std::string family;
  std::map<std::string, std::string, std::less<>> params;
};

GeneratorSpec ParseGeneratorSpec(std::string_view spec);
// For "lb", R holds each element independently with probability 1/2.
LoadedInstance GenerateInstance(std::string_view spec, std::uint64_t seed);

}  // namespace sfm

#endif  // SFM_INSTANCE_IO_H_
