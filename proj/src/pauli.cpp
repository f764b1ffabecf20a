// Copyright 2026 The noisebench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "noisebench/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "noisebench/error.hpp"

namespace noisebench {

namespace {

constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};

// Letter code: I=0, X=1, Y=2, Z=3.
int code_of(bool x, bool z) {
    return x ? (z ? 2 : 1) : (z ? 3 : 0);
}

// phase exponent k with a*b = i^k * c for single-qubit letters a, b.
constexpr int kProductPhase[4][4] = {
    {0, 0, 0, 0},
    {0, 0, 1, 3},
    {0, 3, 0, 1},
    {0, 1, 3, 0},
};

void require_same_size(const PauliString &p, const PauliString &q) {
    if (p.num_qubits() != q.num_qubits()) {
        throw ValidationError(
            "Pauli size mismatch: " + std::to_string(p.num_qubits()) + " vs " + std::to_string(q.num_qubits()));
    }
}

}  // namespace

PauliString::PauliString(std::size_t num_qubits) : n_(static_cast<std::uint32_t>(num_qubits)) {
    if (num_qubits > kMaxQubits) {
        throw ValidationError("PauliString supports at most 64 qubits");
    }
}

PauliString PauliString::from_str(std::string_view text) {
    PauliString p(text.size());
    for (std::size_t q = 0; q < text.size(); ++q) {
        p.set(q, text[q]);
    }
    return p;
}

PauliString PauliString::from_index(std::size_t num_qubits, std::uint64_t index) {
    if (num_qubits > 31) {
        throw ValidationError("Pauli index only defined for at most 31 qubits");
    }
    PauliString p(num_qubits);
    for (std::size_t k = 0; k < num_qubits; ++k) {
        std::size_t q = num_qubits - 1 - k;
        p.set(q, kLetters[index & 3u]);
        index >>= 2;
    }
    return p;
}

PauliString PauliString::single(std::size_t num_qubits, std::size_t qubit, char letter) {
    PauliString p(num_qubits);
    p.set(qubit, letter);
    return p;
}

char PauliString::letter(std::size_t q) const {
    return kLetters[code_of(x(q), z(q))];
}

void PauliString::set(std::size_t q, char letter) {
    if (q >= n_) {
        throw ValidationError("qubit " + std::to_string(q) + " out of range for Pauli of size " + std::to_string(n_));
    }
    bool xb = false;
    bool zb = false;
    switch (letter) {
        case 'I':
        case '_':
            break;
        case 'X':
            xb = true;
            break;
        case 'Y':
            xb = zb = true;
            break;
        case 'Z':
            zb = true;
            break;
        default:
            throw ValidationError(std::string("not a Pauli letter: '") + letter + "'");
    }
    std::uint64_t bit = std::uint64_t{1} << q;
    x_ = xb ? (x_ | bit) : (x_ & ~bit);
    z_ = zb ? (z_ | bit) : (z_ & ~bit);
}

std::size_t PauliString::weight() const {
    return static_cast<std::size_t>(std::popcount(x_ | z_));
}

std::uint64_t PauliString::index() const {
    if (n_ > 31) {
        throw ValidationError("Pauli index only defined for at most 31 qubits");
    }
    std::uint64_t idx = 0;
    for (std::size_t q = 0; q < n_; ++q) {
        idx = (idx << 2) | static_cast<std::uint64_t>(code_of(x(q), z(q)));
    }
    return idx;
}

std::string PauliString::str() const {
    std::string s(n_, 'I');
    for (std::size_t q = 0; q < n_; ++q) {
        s[q] = letter(q);
    }
    return s;
}

PauliString PauliString::tensor(const PauliString &other) const {
    if (other.n_ == 0) {
        return *this;
    }
    PauliString r(n_ + other.n_);
    r.x_ = x_ | (other.x_ << n_);
    r.z_ = z_ | (other.z_ << n_);
    return r;
}

PauliString PauliString::restrict_to(std::span<const int> qubits) const {
    PauliString r(qubits.size());
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        r.set(k, letter(static_cast<std::size_t>(qubits[k])));
    }
    return r;
}

PauliString PauliString::embed(std::size_t num_qubits, std::span<const int> qubits) const {
    if (qubits.size() != n_) {
        throw ValidationError("embed: qubit list size does not match Pauli size");
    }
    PauliString r(num_qubits);
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        r.set(static_cast<std::size_t>(qubits[k]), letter(k));
    }
    return r;
}

std::strong_ordering operator<=>(const PauliString &a, const PauliString &b) {
    if (a.n_ != b.n_) {
        return a.n_ <=> b.n_;
    }
    for (std::size_t q = 0; q < a.n_; ++q) {
        int ca = code_of(a.x(q), a.z(q));
        int cb = code_of(b.x(q), b.z(q));
        if (ca != cb) {
            return ca <=> cb;
        }
    }
    return std::strong_ordering::equal;
}

PauliProduct pauli_mul(const PauliString &p, const PauliString &q) {
    require_same_size(p, q);
    PauliProduct out{PauliString(p.num_qubits()), 0};
    for (std::size_t k = 0; k < p.num_qubits(); ++k) {
        int a = code_of(p.x(k), p.z(k));
        int b = code_of(q.x(k), q.z(k));
        out.phase += kProductPhase[a][b];
        bool xb = p.x(k) != q.x(k);
        bool zb = p.z(k) != q.z(k);
        out.pauli.set(k, kLetters[code_of(xb, zb)]);
    }
    out.phase &= 3;
    return out;
}

bool commutes(const PauliString &p, const PauliString &q) {
    require_same_size(p, q);
    std::uint64_t s = (p.x_bits() & q.z_bits()) ^ (p.z_bits() & q.x_bits());
    return std::popcount(s) % 2 == 0;
}

std::vector<PauliString> all_paulis(std::size_t num_qubits) {
    if (num_qubits > 12) {
        throw ValidationError("refusing to enumerate 4^n Paulis for n > 12");
    }
    std::uint64_t count = std::uint64_t{1} << (2 * num_qubits);
    std::vector<PauliString> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        out.push_back(PauliString::from_index(num_qubits, i));
    }
    return out;
}

Eigen::MatrixXcd pauli_matrix(const PauliString &p) {
    using C = std::complex<double>;
    const C i(0, 1);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t q = 0; q < p.num_qubits(); ++q) {
        Eigen::Matrix2cd m;
        switch (p.letter(q)) {
            case 'X':
                m << 0, 1, 1, 0;
                break;
            case 'Y':
                m << 0, -i, i, 0;
                break;
            case 'Z':
                m << 1, 0, 0, -1;
                break;
            default:
                m << 1, 0, 0, 1;
        }
        Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            for (Eigen::Index c = 0; c < out.cols(); ++c) {
                next.block(r * 2, c * 2, 2, 2) = out(r, c) * m;
            }
        }
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------

PauliChannel::PauliChannel(std::size_t num_qubits) : n_(num_qubits) {
    rates_[PauliString(num_qubits)] = 1.0;
}

PauliChannel::PauliChannel(std::size_t num_qubits, std::map<PauliString, double> rates)
    : n_(num_qubits), rates_(std::move(rates)) {
    double total = 0;
    for (const auto &[p, r] : rates_) {
        if (p.num_qubits() != n_) {
            throw ValidationError("channel key " + p.str() + " does not act on " + std::to_string(n_) + " qubits");
        }
        if (!(r >= -1e-12 && r <= 1 + 1e-12)) {
            throw ValidationError("channel rate for " + p.str() + " outside [0, 1]: " + std::to_string(r));
        }
        total += r;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("channel rates sum to " + std::to_string(total) + ", expected 1");
    }
}

double PauliChannel::rate(const PauliString &p) const {
    auto it = rates_.find(p);
    return it == rates_.end() ? 0.0 : it->second;
}

PauliChannel PauliChannel::tensor(const PauliChannel &other) const {
    std::map<PauliString, double> out;
    for (const auto &[a, ra] : rates_) {
        for (const auto &[b, rb] : other.rates_) {
            out[a.tensor(b)] += ra * rb;
        }
    }
    return PauliChannel(n_ + other.n_, std::move(out));
}

PauliChannel PauliChannel::then(const PauliChannel &next) const {
    if (next.n_ != n_) {
        throw ValidationError("cannot compose channels of different sizes");
    }
    std::map<PauliString, double> out;
    for (const auto &[a, ra] : rates_) {
        for (const auto &[b, rb] : next.rates_) {
            out[pauli_mul(b, a).pauli] += ra * rb;
        }
    }
    return PauliChannel(n_, std::move(out));
}

FidelityVector::FidelityVector(std::size_t num_qubits, std::map<PauliString, double> values)
    : n_(num_qubits), values_(std::move(values)) {
    for (const auto &[p, f] : values_) {
        if (p.num_qubits() != n_) {
            throw ValidationError("fidelity key " + p.str() + " does not act on " + std::to_string(n_) + " qubits");
        }
        if (!(std::abs(f) <= 1 + 1e-9)) {
            throw ValidationError("fidelity for " + p.str() + " has magnitude above 1: " + std::to_string(f));
        }
        if (p.is_identity() && std::abs(f - 1.0) > 1e-12) {
            throw ValidationError("identity fidelity must be 1");
        }
    }
}

double FidelityVector::at(const PauliString &p) const {
    auto it = values_.find(p);
    if (it == values_.end()) {
        throw ValidationError("no fidelity recorded for " + p.str());
    }
    return it->second;
}

PTM PTM::identity(std::size_t num_qubits) {
    std::size_t d2 = std::size_t{1} << (2 * num_qubits);
    return PTM{num_qubits, Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d2), static_cast<Eigen::Index>(d2))};
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd walsh_hadamard_matrix(std::size_t num_qubits) {
    auto paulis = all_paulis(num_qubits);
    auto m = static_cast<Eigen::Index>(paulis.size());
    Eigen::MatrixXd w(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            w(r, c) = character(paulis[r], paulis[c]);
        }
    }
    return w;
}

PauliChannel depolarizing_to_pauli(const DepolarizingParams &d) {
    if (!(d.p >= 0 && d.p <= 1)) {
        throw ValidationError("depolarizing p outside [0, 1]: " + std::to_string(d.p));
    }
    if (d.qubits.empty()) {
        throw ValidationError("depolarizing channel needs at least one qubit");
    }
    std::map<PauliString, double> one;
    one[PauliString::from_str("I")] = 1 - d.p;
    if (d.p > 0) {
        one[PauliString::from_str("X")] = d.p / 3;
        one[PauliString::from_str("Y")] = d.p / 3;
        one[PauliString::from_str("Z")] = d.p / 3;
    }
    PauliChannel single(1, one);
    PauliChannel out = single;
    for (std::size_t k = 1; k < d.qubits.size(); ++k) {
        out = out.tensor(single);
    }
    return out;
}

FidelityVector channel_to_fidelities(const PauliChannel &c, std::span<const PauliString> paulis) {
    std::map<PauliString, double> f;
    for (const auto &p : paulis) {
        double acc = 0;
        for (const auto &[q, r] : c.rates()) {
            acc += r * character(p, q);
        }
        f[p] = p.is_identity() ? 1.0 : std::clamp(acc, -1.0, 1.0);
    }
    return FidelityVector(c.num_qubits(), std::move(f));
}

FidelityVector channel_to_fidelities(const PauliChannel &c) {
    if (c.num_qubits() > 8) {
        throw ValidationError("full fidelity vector limited to 8 qubits; pass an explicit Pauli list");
    }
    auto paulis = all_paulis(c.num_qubits());
    return channel_to_fidelities(c, paulis);
}

PauliChannel fidelities_to_channel(const FidelityVector &f, std::span<const PauliString> support) {
    const std::size_t n = f.num_qubits();
    PauliString identity(n);
    if (std::find(support.begin(), support.end(), identity) == support.end()) {
        throw ValidationError("support must contain the identity");
    }
    if (support.size() > f.values().size()) {
        throw ValidationError("underdetermined support: " + std::to_string(support.size()) + " unknown rates from " +
                              std::to_string(f.values().size()) + " fidelities");
    }
    std::vector<PauliString> rows;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(f.values().size()));
    for (const auto &[p, v] : f.values()) {
        rhs(static_cast<Eigen::Index>(rows.size())) = v;
        rows.push_back(p);
    }
    Eigen::MatrixXd w(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(support.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < support.size(); ++c) {
            if (support[c].num_qubits() != n) {
                throw ValidationError("support element " + support[c].str() + " has the wrong size");
            }
            w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = character(rows[r], support[c]);
        }
    }
    Eigen::VectorXd rates;
    const std::uint64_t full = n <= 12 ? (std::uint64_t{1} << (2 * n)) : 0;
    if (full != 0 && rows.size() == full && support.size() == full) {
        // Complete transform: W^-1 = W / 4^n.
        rates = w.transpose() * rhs / static_cast<double>(full);
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(w);
        qr.setThreshold(1e-10);
        if (qr.rank() < static_cast<Eigen::Index>(support.size())) {
            throw ValidationError("underdetermined support: fidelities determine only " + std::to_string(qr.rank()) +
                                  " of " + std::to_string(support.size()) + " rates");
        }
        rates = qr.solve(rhs);
    }
    double total = 0;
    for (Eigen::Index k = 0; k < rates.size(); ++k) {
        rates(k) = std::max(0.0, rates(k));
        total += rates(k);
    }
    if (total <= 0) {
        throw ValidationError("reconstructed rates are all non-positive");
    }
    std::map<PauliString, double> out;
    for (std::size_t c = 0; c < support.size(); ++c) {
        out[support[c]] = rates(static_cast<Eigen::Index>(c)) / total;
    }
    return PauliChannel(n, std::move(out));
}

PTM ptm_of_pauli_channel(const PauliChannel &c) {
    auto f = channel_to_fidelities(c);
    PTM out = PTM::identity(c.num_qubits());
    Eigen::Index k = 0;
    for (const auto &[p, v] : f.values()) {
        out.matrix(k, k) = v;
        ++k;
    }
    return out;
}

PTM ptm_of_kraus(std::span<const Eigen::MatrixXcd> kraus) {
    if (kraus.empty()) {
        throw ValidationError("no Kraus operators");
    }
    auto dim = kraus.front().rows();
    std::size_t n = static_cast<std::size_t>(std::countr_zero(static_cast<std::uint64_t>(dim)));
    auto paulis = all_paulis(n);
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(paulis.size());
    for (const auto &p : paulis) {
        mats.push_back(pauli_matrix(p));
    }
    PTM out{n, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(paulis.size()), static_cast<Eigen::Index>(paulis.size()))};
    for (std::size_t j = 0; j < paulis.size(); ++j) {
        Eigen::MatrixXcd image = Eigen::MatrixXcd::Zero(dim, dim);
        for (const auto &k : kraus) {
            image += k * mats[j] * k.adjoint();
        }
        for (std::size_t i = 0; i < paulis.size(); ++i) {
            out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (mats[i] * image).trace().real() / static_cast<double>(dim);
        }
    }
    return out;
}

PTM ptm_of_unitary(const Eigen::MatrixXcd &u) {
    std::vector<Eigen::MatrixXcd> k{u};
    return ptm_of_kraus(k);
}

}  // namespace noisebench
