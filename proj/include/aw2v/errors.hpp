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

#ifndef AW2V_ERRORS_HPP_
#define AW2V_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace aw2v {

// Base of everything the library throws on bad input or bad data.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Manifest or feature file could not be read.
class IngestionError : public Error {
 public:
  using Error::Error;
};

// A file parsed but its content is malformed or inconsistent.
class FormatError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, std::string record_id, double loss)
      : Error("training diverged at epoch " + std::to_string(epoch) +
              " on record '" + record_id + "' (loss " + std::to_string(loss) +
              ")"),
        epoch_(epoch),
        record_id_(std::move(record_id)) {}

  int epoch() const { return epoch_; }
  const std::string& record_id() const { return record_id_; }

 private:
  int epoch_;
  std::string record_id_;
};

}  // namespace aw2v

#endif  // AW2V_ERRORS_HPP_
