#include "dsc/dst.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numeric>

namespace dsc {

Frame::Frame(int size, std::vector<std::string> labels) : size_(size), labels_(std::move(labels)) {
    if (size < 1 || size > kMaxFrameSize) {
        throw std::invalid_argument("frame size must lie in [1, " + std::to_string(kMaxFrameSize) +
                                    "], got " + std::to_string(size));
    }
    if (!labels_.empty() && static_cast<int>(labels_.size()) != size) {
        throw std::invalid_argument("frame label count does not match frame size");
    }
}

std::string Frame::to_string(Proposition a) const {
    if (a == full()) return "*";
    std::string out;
    for (int p = 0; p < size_; ++p) {
        if (a.bits >> p & 1u) {
            if (!out.empty()) out += ',';
            out += std::to_string(p + 1);
        }
    }
    return out;
}

Proposition Frame::parse(std::string_view text) const {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text == "*") return full();
    if (text.empty()) throw ParseError("empty proposition string");
    Proposition result;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto token = trim(text.substr(0, comma));
        int index = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), index);
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            throw ParseError("bad proposition member '" + std::string(token) + "'");
        }
        if (index < 1 || index > size_) {
            throw ParseError("proposition member " + std::to_string(index) + " outside frame of size " +
                             std::to_string(size_));
        }
        result.bits |= std::uint32_t{1} << (index - 1);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return result;
}

std::vector<Proposition> Frame::canonical_order() const {
    std::vector<Proposition> order(power_set_size());
    for (std::uint32_t m = 0; m < order.size(); ++m) order[m] = {m};
    // Within a cardinality, members compared as ascending index lists.
    auto members = [](Proposition a) {
        std::vector<int> v;
        for (int p = 0; a.bits >> p; ++p)
            if (a.bits >> p & 1u) v.push_back(p);
        return v;
    };
    std::stable_sort(order.begin(), order.end(), [&](Proposition x, Proposition y) {
        if (x.cardinality() != y.cardinality()) return x.cardinality() < y.cardinality();
        return members(x) < members(y);
    });
    return order;
}

BodyOfEvidence::BodyOfEvidence(Frame frame, std::vector<double> masses)
    : frame_(std::move(frame)), masses_(std::move(masses)) {
    if (masses_.size() != frame_.power_set_size()) {
        throw std::invalid_argument("mass vector has " + std::to_string(masses_.size()) + " entries, frame needs " +
                                    std::to_string(frame_.power_set_size()));
    }
}

BodyOfEvidence BodyOfEvidence::vacuous(const Frame& frame) {
    std::vector<double> m(frame.power_set_size(), 0.0);
    m.back() = 1.0;
    return {frame, std::move(m)};
}

BodyOfEvidence BodyOfEvidence::from_focal(const Frame& frame,
                                          std::span<const std::pair<Proposition, double>> focal) {
    std::vector<double> m(frame.power_set_size(), 0.0);
    for (const auto& [a, v] : focal) {
        if (!frame.contains(a)) throw std::invalid_argument("proposition outside frame");
        m[a.bits] += v;
    }
    return {frame, std::move(m)};
}

std::vector<Proposition> BodyOfEvidence::focal_elements(double threshold) const {
    std::vector<Proposition> out;
    for (std::uint32_t a = 0; a < masses_.size(); ++a)
        if (masses_[a] > threshold) out.push_back({a});
    return out;
}

std::vector<double> BodyOfEvidence::canonical_masses() const {
    std::vector<double> out;
    out.reserve(masses_.size());
    for (auto a : frame_.canonical_order()) out.push_back(masses_[a.bits]);
    return out;
}

std::string to_string(BoeClass c) {
    switch (c) {
        case BoeClass::Vacuous: return "vacuous";
        case BoeClass::Bayesian: return "bayesian";
        case BoeClass::Dirichlet: return "dirichlet";
        case BoeClass::General: return "general";
    }
    return "general";
}

ValidityReport validate(const BodyOfEvidence& boe) {
    ValidityReport r;
    const auto m = boe.masses();
    const Proposition theta = boe.frame().full();
    r.empty_mass_zero = m[0] == 0.0;
    r.mass_sum = std::accumulate(m.begin(), m.end(), 0.0);
    r.sums_to_one = std::abs(r.mass_sum - 1.0) <= kAlgebraicTol;
    r.non_negative = std::all_of(m.begin(), m.end(), [](double v) { return v >= -kAlgebraicTol; });

    bool only_singletons = true;
    bool only_singletons_or_theta = true;
    for (std::uint32_t a = 1; a < m.size(); ++a) {
        if (std::abs(m[a]) <= kAlgebraicTol) continue;
        const int card = std::popcount(a);
        if (card != 1) only_singletons = false;
        if (card != 1 && a != theta.bits) only_singletons_or_theta = false;
    }
    r.bayesian = only_singletons;
    r.dirichlet = only_singletons_or_theta;
    r.vacuous = std::abs(m[theta.bits] - 1.0) <= kAlgebraicTol;
    if (r.vacuous)
        r.kind = BoeClass::Vacuous;
    else if (r.bayesian)
        r.kind = BoeClass::Bayesian;
    else if (r.dirichlet)
        r.kind = BoeClass::Dirichlet;
    return r;
}

namespace {

// In-place subset-sum (zeta) transform: out[A] = sum_{B ⊆ A} in[B].
void zeta_transform(std::vector<double>& v, int bits) {
    for (int p = 0; p < bits; ++p) {
        const std::size_t step = std::size_t{1} << p;
        for (std::size_t a = 0; a < v.size(); ++a)
            if (a & step) v[a] += v[a ^ step];
    }
}

// Inverse of zeta_transform.
void moebius_transform(std::vector<double>& v, int bits) {
    for (int p = 0; p < bits; ++p) {
        const std::size_t step = std::size_t{1} << p;
        for (std::size_t a = 0; a < v.size(); ++a)
            if (a & step) v[a] -= v[a ^ step];
    }
}

}  // namespace

BeliefFunction::BeliefFunction(const BodyOfEvidence& boe)
    : frame_(boe.frame()), beliefs_(boe.masses().begin(), boe.masses().end()) {
    zeta_transform(beliefs_, frame_.size());
}

double belief(const BodyOfEvidence& boe, Proposition a) {
    if (!boe.frame().contains(a)) throw std::invalid_argument("proposition outside frame");
    // Enumerate submasks of A.
    double sum = 0.0;
    for (std::uint32_t b = a.bits;; b = (b - 1) & a.bits) {
        sum += boe.masses()[b];
        if (b == 0) break;
    }
    return sum;
}

double plausibility(const BodyOfEvidence& boe, Proposition a) {
    return 1.0 - belief(boe, boe.frame().complement(a));
}

std::vector<double> beliefs(const BodyOfEvidence& boe) {
    std::vector<double> v(boe.masses().begin(), boe.masses().end());
    zeta_transform(v, boe.frame().size());
    return v;
}

double fh_conditional_belief(const BeliefFunction& bl, Proposition b, Proposition a) {
    if (!(bl.belief(a) > 0.0)) {
        throw ConditioningNotSupported("FH conditioning requires Bl(A) > 0, A = " + bl.frame().to_string(a));
    }
    const Proposition ab = a & b;
    const Proposition a_not_b = a & bl.frame().complement(b);
    const double num = bl.belief(ab);
    const double den = num + bl.plausibility(a_not_b);
    // Unreachable when Bl(A) > 0: a focal set inside A lies inside A∩B or meets A∩B̄.
    assert(den > 0.0);
    return den > 0.0 ? num / den : 0.0;
}

double fh_conditional_plausibility(const BeliefFunction& bl, Proposition b, Proposition a) {
    if (!(bl.belief(a) > 0.0)) {
        throw ConditioningNotSupported("FH conditioning requires Bl(A) > 0, A = " + bl.frame().to_string(a));
    }
    const Proposition ab = a & b;
    const Proposition a_not_b = a & bl.frame().complement(b);
    const double num = bl.plausibility(ab);
    const double den = num + bl.belief(a_not_b);
    assert(den > 0.0);
    return den > 0.0 ? num / den : 0.0;
}

double fh_conditional_belief(const BodyOfEvidence& boe, Proposition b, Proposition a) {
    return fh_conditional_belief(BeliefFunction(boe), b, a);
}

double fh_conditional_plausibility(const BodyOfEvidence& boe, Proposition b, Proposition a) {
    return fh_conditional_plausibility(BeliefFunction(boe), b, a);
}

BodyOfEvidence masses_from_beliefs(const Frame& frame, std::span<const double> beliefs) {
    if (beliefs.size() != frame.power_set_size()) {
        throw std::invalid_argument("belief vector length does not match frame");
    }
    std::vector<double> m(beliefs.begin(), beliefs.end());
    moebius_transform(m, frame.size());
    m[0] = 0.0;
    double sum = 0.0;
    for (std::size_t a = 1; a < m.size(); ++a) {
        if (m[a] < -kIteratedTol) {
            throw NotABeliefFunction("recovered mass " + std::to_string(m[a]) + " for {" +
                                     frame.to_string({static_cast<std::uint32_t>(a)}) + "}");
        }
        if (m[a] < 0.0) m[a] = 0.0;
        sum += m[a];
    }
    if (!(sum > 0.0)) throw NotABeliefFunction("recovered masses sum to zero");
    for (auto& v : m) v /= sum;
    return {frame, std::move(m)};
}

double jaccard(Proposition a, Proposition b) {
    const int uni = (a | b).cardinality();
    return uni == 0 ? 0.0 : static_cast<double>((a & b).cardinality()) / uni;
}

JaccardMatrix::JaccardMatrix(const Frame& frame) : dim_(frame.power_set_size()), entries_(dim_ * dim_) {
    for (std::uint32_t m = 0; m < dim_; ++m)
        for (std::uint32_t n = 0; n < dim_; ++n) entries_[m * dim_ + n] = jaccard({m}, {n});
}

const JaccardMatrix* JaccardMatrix::cached(const Frame& frame) {
    if (frame.size() > kMaxCachedFrame) return nullptr;
    static std::array<std::unique_ptr<const JaccardMatrix>, kMaxCachedFrame + 1> cache;
    static std::array<std::atomic<const JaccardMatrix*>, kMaxCachedFrame + 1> ready{};
    static std::array<std::once_flag, kMaxCachedFrame + 1> once;
    const auto m = static_cast<std::size_t>(frame.size());
    if (const auto* p = ready[m].load(std::memory_order_acquire)) return p;
    std::call_once(once[m], [&] {
        cache[m] = std::make_unique<const JaccardMatrix>(frame);
        ready[m].store(cache[m].get(), std::memory_order_release);
    });
    return cache[m].get();
}

double jousselme_distance(const BodyOfEvidence& e1, const BodyOfEvidence& e2) {
    if (!(e1.frame() == e2.frame())) {
        throw FrameMismatch("Jousselme distance between frames of size " + std::to_string(e1.frame().size()) +
                            " and " + std::to_string(e2.frame().size()));
    }
    return jousselme_distance(e1.frame(), e1.masses(), e2.masses());
}

double jousselme_distance(const Frame& frame, std::span<const double> m1, std::span<const double> m2) {
    if (m1.size() != frame.power_set_size() || m2.size() != frame.power_set_size()) {
        throw FrameMismatch("mass vector length does not match frame");
    }
    // Only entries where the mass vectors differ contribute to the quadratic form.
    constexpr std::size_t kInline = 64;
    std::array<std::uint32_t, kInline> idx_small;
    std::array<double, kInline> diff_small;
    std::vector<std::uint32_t> idx_big;
    std::vector<double> diff_big;
    std::uint32_t* idx = idx_small.data();
    double* diff = diff_small.data();
    if (m1.size() > kInline) {
        idx_big.resize(m1.size());
        diff_big.resize(m1.size());
        idx = idx_big.data();
        diff = diff_big.data();
    }
    std::size_t count = 0;
    for (std::uint32_t a = 0; a < m1.size(); ++a) {
        const double d = m1[a] - m2[a];
        if (d != 0.0) {
            idx[count] = a;
            diff[count++] = d;
        }
    }
    const JaccardMatrix* table = JaccardMatrix::cached(frame);
    double q = 0.0;
    for (std::size_t x = 0; x < count; ++x) {
        double row = 0.0;
        for (std::size_t y = 0; y < count; ++y) {
            const double d = table ? (*table)(idx[x], idx[y]) : jaccard({idx[x]}, {idx[y]});
            row += d * diff[y];
        }
        q += diff[x] * row;
    }
    return std::clamp(std::sqrt(std::max(0.5 * q, 0.0)), 0.0, 1.0);
}

}  // namespace dsc
