// SPDX-License-Identifier: Apache-2.0
//
// radiv - link-level simulation of repeater-assisted DFT-s-OFDM uplinks
// Copyright (C) 2026 radiv contributors
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

#ifndef RADIV_ERRORS_HPP
#define RADIV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace radiv
{

// Invalid or inconsistent configuration (CP support, unknown constellation, malformed file).
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Equalizer has no usable signal (mean equalized gain below threshold).
class DegenerateFrameError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Constellation lacks a rectangular decision-region description.
class UnsupportedConstellationError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

} // namespace radiv

#endif // RADIV_ERRORS_HPP
