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

#include "hmnoma/channel.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>

namespace hmnoma
{
    ChannelMatrix gen_nlos(int antennas, int users, std::mt19937_64 &rng)
    {
        if (antennas < 1 || users < 1)
            throw DomainError("gen_nlos: antennas and users must be >= 1");
        std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
        ChannelMatrix ch;
        ch.h.resize(antennas, users);
        // Column-major fill keeps the draw order independent of M for the leading users.
        for (int k = 0; k < users; ++k)
            for (int m = 0; m < antennas; ++m)
            {
                const double re = n01(rng);
                const double im = n01(rng);
                ch.h(m, k) = cd(re, im);
            }
        ch.quality.assign(static_cast<std::size_t>(users), 1.0);
        return ch;
    }

    CVector los_steering(double phi, int antennas, double spacing)
    {
        if (antennas < 1 || !(spacing > 0.0))
            throw DomainError("los_steering: antennas >= 1 and spacing > 0 required");
        CVector v(antennas);
        const double step = 2.0 * std::numbers::pi * spacing * std::sin(phi);
        for (int m = 0; m < antennas; ++m)
            v(m) = std::polar(1.0, step * m);
        return v;
    }

    ChannelMatrix gen_los(const std::vector<double> &angles, int antennas, double spacing)
    {
        ChannelMatrix ch;
        ch.h.resize(antennas, static_cast<Eigen::Index>(angles.size()));
        for (std::size_t k = 0; k < angles.size(); ++k)
            ch.h.col(static_cast<Eigen::Index>(k)) = los_steering(angles[k], antennas, spacing);
        ch.quality.assign(angles.size(), 1.0);
        return ch;
    }

    double correlation(const CVector &hi, const CVector &hj)
    {
        const double ni = hi.norm();
        const double nj = hj.norm();
        if (ni == 0.0 || nj == 0.0)
            throw DomainError("correlation: zero-norm channel");
        return std::min(1.0, std::abs(hi.dot(hj)) / (ni * nj));
    }

    double los_correlation(double phi_i, double phi_j, int antennas, double spacing)
    {
        const double x = 2.0 * std::numbers::pi * spacing * (std::sin(phi_i) - std::sin(phi_j));
        // |1 - e^{jxM}| / |1 - e^{jx}| = |sin(xM/2)| / |sin(x/2)|
        const double den = std::sin(0.5 * x);
        if (std::abs(den) < 1e-300)
            return 1.0;
        const double ratio = std::abs(std::sin(0.5 * x * antennas) / den) / antennas;
        return std::min(1.0, ratio);
    }

    double los_distance(double phi_i, double phi_j)
    {
        return std::abs(std::sin(phi_i) - std::sin(phi_j));
    }

    double nlos_distance(const CVector &hi, const CVector &hj)
    {
        return correlation(hi, hj);
    }

    void write_matrix_csv(std::ostream &out, const CMatrix &m)
    {
        out << std::setprecision(17);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
        {
            for (Eigen::Index c = 0; c < m.cols(); ++c)
            {
                if (c > 0)
                    out << ',';
                out << m(r, c).real() << ',' << m(r, c).imag();
            }
            out << '\n';
        }
    }

    void write_matrix_csv(const std::filesystem::path &file, const CMatrix &m)
    {
        std::ofstream out(file);
        if (!out)
            throw std::runtime_error("cannot write " + file.string());
        write_matrix_csv(out, m);
    }

    CMatrix read_matrix_csv(std::istream &in)
    {
        std::vector<std::vector<double>> rows;
        std::string line;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            std::vector<double> values;
            std::stringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ','))
                values.push_back(std::stod(cell));
            if (values.size() % 2 != 0)
                throw DomainError("matrix csv: odd number of columns");
            if (!rows.empty() && values.size() != rows.front().size())
                throw DomainError("matrix csv: ragged rows");
            rows.push_back(std::move(values));
        }
        const Eigen::Index R = static_cast<Eigen::Index>(rows.size());
        const Eigen::Index C = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size() / 2);
        CMatrix m(R, C);
        for (Eigen::Index r = 0; r < R; ++r)
            for (Eigen::Index c = 0; c < C; ++c)
                m(r, c) = cd(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 * c)],
                             rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 * c + 1)]);
        return m;
    }

    CMatrix read_matrix_csv(const std::filesystem::path &file)
    {
        std::ifstream in(file);
        if (!in)
            throw std::runtime_error("cannot read " + file.string());
        return read_matrix_csv(in);
    }

} // namespace hmnoma
