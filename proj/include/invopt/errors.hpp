/*
 Copyright 2026 The invopt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace invopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class SymmetryError : public Error {
public:
    using Error::Error;
};

class PositivityError : public Error {
public:
    using Error::Error;
};

class StabilizabilityError : public Error {
public:
    using Error::Error;
};

/// An iterative method did not reach its tolerance within its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Operation requires the robust (disturbance) mode, or vice versa.
class ModeError : public Error {
public:
    using Error::Error;
};

class ConnectivityError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// Oscillator steady state violates the power-balance assumption.
class AssumptionError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class NumericalBlowupError : public Error {
public:
    using Error::Error;
};

/// Invalid scenario content (schema or semantic validation).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace invopt
