// SPDX-License-Identifier: Apache-2.0
//
// hmnoma: downlink NOMA and massive MIMO comparison toolkit
// Copyright (C) 2026 The hmnoma authors
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

#ifndef HMNOMA_COMMON_HPP
#define HMNOMA_COMMON_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hmnoma
{
    using cd = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;

    // Input outside the mathematical domain of an operation (negative distance, M <= K, ...)
    class DomainError : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // A precondition on structured input was violated (non-orthonormal pilots, bad pairing, ...)
    class ContractViolation : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    // ZF basis is rank deficient or has more columns than antennas
    class SingularBasisError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Pilot overhead does not fit into the coherence interval (K > T)
    class InfeasibleFrameError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    enum class Scenario
    {
        NLOS,
        LOS
    };

    enum class Scheme
    {
        MMimo,
        Noma,
        HmNoma
    };

    enum class UserClass
    {
        Center,
        Edge
    };

    std::string_view to_string(Scenario s);
    std::string_view to_string(Scheme s);
    Scenario scenario_from_string(std::string_view s);
    Scheme scheme_from_string(std::string_view s);

} // namespace hmnoma

#endif
