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

#ifndef HMNOMA_TRAINING_HPP
#define HMNOMA_TRAINING_HPP

#include "hmnoma/channel.hpp"
#include "hmnoma/sysmodel.hpp"

#include <random>
#include <vector>

namespace hmnoma
{
    // Set of L orthonormal length-L pilot sequences stored as the columns of an L x L matrix.
    // Construction checks phi_k^H phi_j = delta_kj.
    class PilotBook
    {
    public:
        explicit PilotBook(CMatrix sequences, double tol = 1e-10);

        // Unitary DFT pilots
        static PilotBook dft(int length);

        int length() const { return static_cast<int>(seq_.rows()); }
        const CMatrix &sequences() const { return seq_; }
        CVector pilot(int index) const { return seq_.col(index); }

    private:
        CMatrix seq_;
    };

    // Who transmits uplink pilots and with what length.
    //   mMIMO: L = K, all users.    NOMA: L = K/2, centers only; edges stay silent.
    struct PilotPlan
    {
        Scheme scheme = Scheme::MMimo;
        int length = 0;
        std::vector<int> transmitters; // user index per pilot
        std::vector<double> power;     // q_k per transmitter

        static PilotPlan for_scheme(Scheme scheme, int users, double q);
    };

    struct EstimateSet
    {
        ChannelMatrix estimate;  // M x (number of transmitters), kind = Estimate
        std::vector<int> users;  // user index of each column
        std::vector<double> gamma;
    };

    /// gamma = L beta q / (L beta q + 1). L = K gives the mMIMO value, L = K/2 the NOMA value.
    double estimate_quality(int pilot_length, double beta, double q);
    double gamma_mmimo(int users, double beta, double q);
    double gamma_noma(int users, double beta, double q);

    /// Received M x L pilot block Y = sqrt(L) sum_k sqrt(q_k beta_k) h_k phi_k^H + Z.
    /// `noise` = false drops Z (used for the noiseless identities).
    CMatrix receive_pilots(const CMatrix &h, const std::vector<double> &beta, const PilotPlan &plan,
                           const PilotBook &pilots, std::mt19937_64 &rng, bool noise = true);

    /// y_k = Y phi_k.
    CVector despread(const CMatrix &received, const PilotBook &pilots, int pilot_index);

    struct MmseEstimate
    {
        CVector h;
        double gamma;
    };

    /// h_hat = sqrt(L beta q) / (L beta q + 1) y, entries of variance gamma.
    MmseEstimate mmse_estimate(const CVector &despread, double beta, double q, int pilot_length);

    /// Runs the whole uplink training for a drop: pilots, despreading and MMSE per transmitter.
    EstimateSet estimate_channels(const ChannelMatrix &truth, const std::vector<double> &beta,
                                  const PilotPlan &plan, std::mt19937_64 &rng);

    /// Data fraction of the coherence interval: 1 - K/T for NLOS (both schemes spend K pilots),
    /// 1 for LOS. Throws InfeasibleFrameError when K > T in NLOS.
    double overhead_factor(int users, int coherence_length, Scenario scenario);

} // namespace hmnoma

#endif
