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

#include "hmnoma/training.hpp"

#include <cmath>
#include <numbers>

namespace hmnoma
{
    PilotBook::PilotBook(CMatrix sequences, double tol) : seq_(std::move(sequences))
    {
        if (seq_.rows() != seq_.cols() || seq_.rows() == 0)
            throw ContractViolation("PilotBook: expected a non-empty square matrix of sequences");
        const CMatrix gram = seq_.adjoint() * seq_;
        const CMatrix eye = CMatrix::Identity(seq_.cols(), seq_.cols());
        if ((gram - eye).cwiseAbs().maxCoeff() > tol)
            throw ContractViolation("PilotBook: pilot sequences are not orthonormal");
    }

    PilotBook PilotBook::dft(int length)
    {
        if (length < 1)
            throw DomainError("PilotBook::dft: length must be >= 1");
        CMatrix f(length, length);
        const double scale = 1.0 / std::sqrt(static_cast<double>(length));
        for (int r = 0; r < length; ++r)
            for (int c = 0; c < length; ++c)
                f(r, c) = std::polar(scale, -2.0 * std::numbers::pi * r * c / length);
        return PilotBook(std::move(f));
    }

    PilotPlan PilotPlan::for_scheme(Scheme scheme, int users, double q)
    {
        PilotPlan plan;
        plan.scheme = scheme;
        const int count = scheme == Scheme::Noma ? users / 2 : users;
        plan.length = count;
        for (int k = 0; k < count; ++k)
        {
            plan.transmitters.push_back(k);
            plan.power.push_back(q);
        }
        return plan;
    }

    double estimate_quality(int pilot_length, double beta, double q)
    {
        if (!(beta * q > 0.0))
            throw DomainError("estimate_quality: beta * q must be positive");
        const double snr = pilot_length * beta * q;
        return snr / (snr + 1.0);
    }

    double gamma_mmimo(int users, double beta, double q)
    {
        return estimate_quality(users, beta, q);
    }

    double gamma_noma(int users, double beta, double q)
    {
        if (!(beta * q > 0.0))
            throw DomainError("gamma_noma: beta * q must be positive");
        const double x = users * beta * q;
        return x / (x + 2.0);
    }

    CMatrix receive_pilots(const CMatrix &h, const std::vector<double> &beta, const PilotPlan &plan,
                           const PilotBook &pilots, std::mt19937_64 &rng, bool noise)
    {
        const int L = plan.length;
        if (pilots.length() != L || static_cast<int>(plan.transmitters.size()) != L)
            throw ContractViolation("receive_pilots: pilot book does not match the plan");
        const Eigen::Index M = h.rows();
        CMatrix y = CMatrix::Zero(M, L);
        for (int i = 0; i < L; ++i)
        {
            const int k = plan.transmitters[static_cast<std::size_t>(i)];
            const double amp = std::sqrt(L * plan.power[static_cast<std::size_t>(i)] * beta[static_cast<std::size_t>(k)]);
            y.noalias() += amp * h.col(k) * pilots.pilot(i).adjoint();
        }
        if (noise)
        {
            std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
            for (Eigen::Index c = 0; c < L; ++c)
                for (Eigen::Index m = 0; m < M; ++m)
                {
                    const double re = n01(rng);
                    const double im = n01(rng);
                    y(m, c) += cd(re, im);
                }
        }
        return y;
    }

    CVector despread(const CMatrix &received, const PilotBook &pilots, int pilot_index)
    {
        if (received.cols() != pilots.length())
            throw ContractViolation("despread: received block length does not match the pilots");
        if (pilot_index < 0 || pilot_index >= pilots.length())
            throw ContractViolation("despread: pilot index out of range");
        return received * pilots.pilot(pilot_index);
    }

    MmseEstimate mmse_estimate(const CVector &despread, double beta, double q, int pilot_length)
    {
        if (!(beta * q > 0.0))
            throw DomainError("mmse_estimate: beta * q must be positive");
        const double snr = pilot_length * beta * q;
        const double scale = std::sqrt(snr) / (snr + 1.0);
        return {scale * despread, snr / (snr + 1.0)};
    }

    EstimateSet estimate_channels(const ChannelMatrix &truth, const std::vector<double> &beta,
                                  const PilotPlan &plan, std::mt19937_64 &rng)
    {
        const PilotBook pilots = PilotBook::dft(plan.length);
        const CMatrix y = receive_pilots(truth.h, beta, plan, pilots, rng);
        EstimateSet out;
        out.estimate.kind = ChannelKind::Estimate;
        out.estimate.h.resize(truth.h.rows(), plan.length);
        for (int i = 0; i < plan.length; ++i)
        {
            const int k = plan.transmitters[static_cast<std::size_t>(i)];
            const auto est = mmse_estimate(despread(y, pilots, i), beta[static_cast<std::size_t>(k)],
                                           plan.power[static_cast<std::size_t>(i)], plan.length);
            out.estimate.h.col(i) = est.h;
            out.users.push_back(k);
            out.gamma.push_back(est.gamma);
        }
        out.estimate.quality = out.gamma;
        return out;
    }

    double overhead_factor(int users, int coherence_length, Scenario scenario)
    {
        if (scenario == Scenario::LOS)
            return 1.0;
        if (coherence_length <= 0)
            throw DomainError("overhead_factor: coherence length must be positive");
        if (users > coherence_length)
            throw InfeasibleFrameError("overhead_factor: K = " + std::to_string(users) +
                                       " pilots do not fit into T = " + std::to_string(coherence_length));
        return 1.0 - static_cast<double>(users) / coherence_length;
    }

} // namespace hmnoma
