// SPDX-License-Identifier: Apache-2.0
//
// hr6dma: max-min beam coverage with hierarchically rotatable arrays
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

#ifndef HR6DMA_ERRORS_HPP
#define HR6DMA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hr6dma
{
    // Invalid configuration: bad field values, sample budgets, oracle guards.
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Scenario text that is not valid JSON.
    class ParseError : public ConfigError
    {
    public:
        using ConfigError::ConfigError;
    };

    // Well-formed JSON with wrong field types, unknown fields or malformed entries.
    class SchemaError : public ConfigError
    {
    public:
        using ConfigError::ConfigError;
    };

    // A rotation angle outside its mechanical limit.
    class ConstraintError : public std::out_of_range
    {
    public:
        using std::out_of_range::out_of_range;
    };

    // Argument outside the mathematical domain of an operation (empty grid, r <= 0).
    class DomainError : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // Malformed solver input: mismatched dimensions, non-Hermitian matrices.
    class StructuralError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Solver failed in a way that should be impossible for well-formed input.
    class InternalError : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };
}

#endif
