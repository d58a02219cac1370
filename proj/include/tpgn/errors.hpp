// Copyright 2026 The TPGN Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace tpgn {

// Every library failure derives from Error. The C API maps each subclass to a
// status code (see tpgn.h), which the CLI turns into its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes that cannot be combined by an operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (e.g. backward on a non-scalar).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Dataset ingestion problems: missing files, columns, malformed rows.
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite losses or gradients.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tpgn
