// Copyright 2026 The aw2v Authors.
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

#ifndef AW2V_CSV_HPP_
#define AW2V_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace aw2v::csv {

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

// Strict parse of a whole field; throws FormatError on trailing junk.
double parse_double(std::string_view field);

// Splits on commas. No quoting support: ids and labels must not contain ','.
std::vector<std::string_view> split(std::string_view line);

std::string_view trim(std::string_view s);

}  // namespace aw2v::csv

#endif  // AW2V_CSV_HPP_
