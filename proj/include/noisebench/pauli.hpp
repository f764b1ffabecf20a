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
#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace noisebench {

/// An n-qubit Pauli operator in symplectic form, without phase.
///
/// Qubit q carries X iff x(q), Z iff z(q), Y iff both. The text form puts
/// qubit 0 leftmost, e.g. "IXZ". Ordering is lexicographic with I < X < Y < Z
/// per qubit and qubit 0 most significant.
class PauliString {
   public:
    static constexpr std::size_t kMaxQubits = 64;

    PauliString() = default;
    explicit PauliString(std::size_t num_qubits);

    static PauliString from_str(std::string_view text);
    /// Inverse of index(); requires num_qubits <= 31.
    static PauliString from_index(std::size_t num_qubits, std::uint64_t index);
    static PauliString single(std::size_t num_qubits, std::size_t qubit, char letter);

    std::size_t num_qubits() const {
        return n_;
    }
    bool x(std::size_t q) const {
        return (x_ >> q) & 1u;
    }
    bool z(std::size_t q) const {
        return (z_ >> q) & 1u;
    }
    std::uint64_t x_bits() const {
        return x_;
    }
    std::uint64_t z_bits() const {
        return z_;
    }

    char letter(std::size_t q) const;
    void set(std::size_t q, char letter);

    std::size_t weight() const;
    bool is_identity() const {
        return (x_ | z_) == 0;
    }
    /// Rank in lexicographic order over all 4^n strings; requires n <= 31.
    std::uint64_t index() const;
    std::string str() const;

    /// Tensor product; `other` occupies the higher qubit indices.
    PauliString tensor(const PauliString &other) const;
    /// The factors at `qubits`, in that order.
    PauliString restrict_to(std::span<const int> qubits) const;
    /// Places this string's factors on `qubits` of an n-qubit identity.
    PauliString embed(std::size_t num_qubits, std::span<const int> qubits) const;

    friend bool operator==(const PauliString &, const PauliString &) = default;
    friend std::strong_ordering operator<=>(const PauliString &a, const PauliString &b);

   private:
    std::uint32_t n_ = 0;
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
};

/// Product P*Q = i^phase * pauli.
struct PauliProduct {
    PauliString pauli;
    int phase = 0;
};

PauliProduct pauli_mul(const PauliString &p, const PauliString &q);
bool commutes(const PauliString &p, const PauliString &q);
/// +1 if p and q commute, -1 otherwise.
inline int character(const PauliString &p, const PauliString &q) {
    return commutes(p, q) ? 1 : -1;
}

/// All 4^n strings in lexicographic order.
std::vector<PauliString> all_paulis(std::size_t num_qubits);

/// Dense 2^n x 2^n matrix; qubit 0 is the most significant Kronecker factor.
Eigen::MatrixXcd pauli_matrix(const PauliString &p);

/// A stochastic Pauli channel rho -> sum_P rate(P) P rho P.
class PauliChannel {
   public:
    PauliChannel() = default;
    /// The identity channel on n qubits.
    explicit PauliChannel(std::size_t num_qubits);
    /// Validates rates in [0, 1] summing to 1 within 1e-9.
    PauliChannel(std::size_t num_qubits, std::map<PauliString, double> rates);

    std::size_t num_qubits() const {
        return n_;
    }
    double rate(const PauliString &p) const;
    const std::map<PauliString, double> &rates() const {
        return rates_;
    }
    double total_error() const {
        return 1.0 - rate(PauliString(n_));
    }
    /// Independent composition; `other` acts on the higher qubit indices.
    PauliChannel tensor(const PauliChannel &other) const;
    /// Sequential composition (this applied first, then `next`).
    PauliChannel then(const PauliChannel &next) const;

   private:
    std::size_t n_ = 0;
    std::map<PauliString, double> rates_;
};

/// Pauli fidelities f(P) = 2^-n Tr(P eps(P)) on some set of strings.
class FidelityVector {
   public:
    FidelityVector() = default;
    /// Requires f(identity) == 1 if present and |f| <= 1 (within 1e-9).
    FidelityVector(std::size_t num_qubits, std::map<PauliString, double> values);

    std::size_t num_qubits() const {
        return n_;
    }
    const std::map<PauliString, double> &values() const {
        return values_;
    }
    double at(const PauliString &p) const;
    bool contains(const PauliString &p) const {
        return values_.count(p) != 0;
    }

   private:
    std::size_t n_ = 0;
    std::map<PauliString, double> values_;
};

/// Isotropic single-qubit depolarizing strength p applied independently to each listed qubit.
struct DepolarizingParams {
    double p = 0.0;
    std::vector<int> qubits;
};

/// Per-qubit asymmetric readout flips: p0 = P(read 1 | 0), p1 = P(read 0 | 1).
struct ReadoutError {
    double p0 = 0.0;
    double p1 = 0.0;
    friend bool operator==(const ReadoutError &, const ReadoutError &) = default;
};

/// Pauli transfer matrix, entries (1/d) Tr(P_i L(P_j)) in lexicographic Pauli order.
struct PTM {
    std::size_t num_qubits = 0;
    Eigen::MatrixXd matrix;

    static PTM identity(std::size_t num_qubits);
};

/// Full Walsh-Hadamard matrix W(P, Q) = character(P, Q), lexicographic order.
Eigen::MatrixXd walsh_hadamard_matrix(std::size_t num_qubits);

PauliChannel depolarizing_to_pauli(const DepolarizingParams &d);

/// Fidelities for every string (n <= 8).
FidelityVector channel_to_fidelities(const PauliChannel &c);
/// Fidelities on the given strings only.
FidelityVector channel_to_fidelities(const PauliChannel &c, std::span<const PauliString> paulis);

/// Inverse transform restricted to `support`, then clip-and-renormalize onto the simplex.
/// Throws ValidationError when the support is not determined by the given fidelities.
PauliChannel fidelities_to_channel(const FidelityVector &f, std::span<const PauliString> support);

PTM ptm_of_pauli_channel(const PauliChannel &c);
PTM ptm_of_unitary(const Eigen::MatrixXcd &u);
PTM ptm_of_kraus(std::span<const Eigen::MatrixXcd> kraus);

}  // namespace noisebench
