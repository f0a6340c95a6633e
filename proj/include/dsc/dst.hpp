#pragma once

// Dempster-Shafer primitives over small frames of discernment.
//
// Subsets of the frame are bitmasks: bit p set <=> singleton p+1 is a member.
// Mass, belief and plausibility vectors are dense and indexed by that mask.

#include <bit>
#include <compare>
#include <initializer_list>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsc/errors.hpp"

namespace dsc {

inline constexpr int kMaxFrameSize = 16;

/// Tolerance for algebraic identities (mass sums, class membership).
inline constexpr double kAlgebraicTol = 1e-12;
/// Tolerance for quantities produced by long iterations.
inline constexpr double kIteratedTol = 1e-9;

struct Proposition {
    std::uint32_t bits = 0;

    static constexpr Proposition singleton(int index) { return {std::uint32_t{1} << index}; }

    constexpr bool is_empty() const { return bits == 0; }
    int cardinality() const { return std::popcount(bits); }
    constexpr bool subset_of(Proposition other) const { return (bits & ~other.bits) == 0; }

    friend constexpr Proposition operator&(Proposition a, Proposition b) { return {a.bits & b.bits}; }
    friend constexpr Proposition operator|(Proposition a, Proposition b) { return {a.bits | b.bits}; }
    friend constexpr auto operator<=>(Proposition, Proposition) = default;
};

class Frame {
public:
    explicit Frame(int size, std::vector<std::string> labels = {});

    int size() const { return size_; }
    std::size_t power_set_size() const { return std::size_t{1} << size_; }
    Proposition full() const { return {static_cast<std::uint32_t>(power_set_size() - 1)}; }
    Proposition complement(Proposition a) const { return {full().bits & ~a.bits}; }
    bool contains(Proposition a) const { return a.bits < power_set_size(); }
    const std::vector<std::string>& labels() const { return labels_; }

    /// "1,3" style member list (1-based), "*" for the whole frame, "" for the empty set.
    std::string to_string(Proposition a) const;
    /// Inverse of to_string. Throws ParseError.
    Proposition parse(std::string_view text) const;

    /// Cardinality-then-lexicographic order: {}, {1}, ..., {M}, {1,2}, {1,3}, ..., Theta.
    std::vector<Proposition> canonical_order() const;

    friend bool operator==(const Frame& a, const Frame& b) { return a.size_ == b.size_; }

private:
    int size_;
    std::vector<std::string> labels_;
};

class BodyOfEvidence {
public:
    /// Stores the masses as given; axioms are checked by validate(), not here.
    BodyOfEvidence(Frame frame, std::vector<double> masses);

    static BodyOfEvidence vacuous(const Frame& frame);
    static BodyOfEvidence from_focal(const Frame& frame,
                                     std::span<const std::pair<Proposition, double>> focal);
    static BodyOfEvidence from_focal(const Frame& frame,
                                     std::initializer_list<std::pair<Proposition, double>> focal) {
        return from_focal(frame, std::span<const std::pair<Proposition, double>>(focal.begin(), focal.size()));
    }

    const Frame& frame() const { return frame_; }
    std::span<const double> masses() const { return masses_; }
    double mass(Proposition a) const { return masses_[a.bits]; }
    std::size_t size() const { return masses_.size(); }

    /// Propositions whose mass exceeds `threshold`.
    std::vector<Proposition> focal_elements(double threshold = 0.0) const;

    /// Masses laid out in canonical_order().
    std::vector<double> canonical_masses() const;

private:
    Frame frame_;
    std::vector<double> masses_;
};

enum class BoeClass { Vacuous, Bayesian, Dirichlet, General };

std::string to_string(BoeClass c);

struct ValidityReport {
    bool empty_mass_zero = false;
    bool sums_to_one = false;
    bool non_negative = false;
    double mass_sum = 0.0;

    bool bayesian = false;   // every focal element is a singleton
    bool dirichlet = false;  // focal elements within singletons + Theta
    bool vacuous = false;    // m(Theta) = 1
    BoeClass kind = BoeClass::General;

    bool valid() const { return empty_mass_zero && sums_to_one && non_negative; }
};

ValidityReport validate(const BodyOfEvidence& boe);

/// Belief values of every subset, computed once. Cheap to query repeatedly.
class BeliefFunction {
public:
    explicit BeliefFunction(const BodyOfEvidence& boe);

    const Frame& frame() const { return frame_; }
    std::span<const double> values() const { return beliefs_; }
    double belief(Proposition a) const { return beliefs_[a.bits]; }
    double plausibility(Proposition a) const { return 1.0 - beliefs_[frame_.complement(a).bits]; }

private:
    Frame frame_;
    std::vector<double> beliefs_;
};

double belief(const BodyOfEvidence& boe, Proposition a);
double plausibility(const BodyOfEvidence& boe, Proposition a);

/// Belief of every subset, indexed by bitmask.
std::vector<double> beliefs(const BodyOfEvidence& boe);

/// Fagin-Halpern conditional belief Bl(B|A). Throws ConditioningNotSupported when Bl(A) = 0.
double fh_conditional_belief(const BeliefFunction& bl, Proposition b, Proposition a);
double fh_conditional_plausibility(const BeliefFunction& bl, Proposition b, Proposition a);
double fh_conditional_belief(const BodyOfEvidence& boe, Proposition b, Proposition a);
double fh_conditional_plausibility(const BodyOfEvidence& boe, Proposition b, Proposition a);

/// Moebius inversion of a belief vector. Recovered masses in [-1e-9, 0) are clamped to zero and
/// the result renormalized; anything more negative throws NotABeliefFunction.
BodyOfEvidence masses_from_beliefs(const Frame& frame, std::span<const double> beliefs);

/// Pairwise Jaccard similarities |A∩B| / |A∪B| of all subsets (0 for the empty/empty pair).
class JaccardMatrix {
public:
    explicit JaccardMatrix(const Frame& frame);

    std::size_t dimension() const { return dim_; }
    double operator()(std::size_t m, std::size_t n) const { return entries_[m * dim_ + n]; }

    /// Process-lifetime instance for a frame size, built once. Null above kMaxCachedFrame.
    static const JaccardMatrix* cached(const Frame& frame);
    static constexpr int kMaxCachedFrame = 10;

private:
    std::size_t dim_;
    std::vector<double> entries_;
};

double jaccard(Proposition a, Proposition b);

/// Jousselme distance in [0, 1]. Throws FrameMismatch.
double jousselme_distance(const BodyOfEvidence& e1, const BodyOfEvidence& e2);
/// Same, on raw mass vectors indexed by bitmask over `frame`.
double jousselme_distance(const Frame& frame, std::span<const double> m1, std::span<const double> m2);

}  // namespace dsc
