#include "pbqc/sk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

#include "pbqc/error.hpp"
#include "pbqc/gates.hpp"
#include "pbqc/linalg.hpp"

namespace pbqc {

namespace {

using Mat2 = Eigen::Matrix2cd;

const Mat2& letter_mat2(Letter l) {
    static const Mat2 id = Mat2::Identity();
    static const Mat2 h = gates::H();
    static const Mat2 t = gates::T();
    static const Mat2 tdg = gates::Tdg();
    switch (l) {
        case Letter::H: return h;
        case Letter::T: return t;
        case Letter::Tdg: return tdg;
        default: return id;
    }
}

// Chord length |p -+ q| = 2 sin(theta/4), the phase-invariant distance.
double quat_distance(const Quaternion& p, const Quaternion& q) {
    double minus = 0.0, plus = 0.0;
    for (int i = 0; i < 4; ++i) {
        minus += (p[i] - q[i]) * (p[i] - q[i]);
        plus += (p[i] + q[i]) * (p[i] + q[i]);
    }
    return std::sqrt(std::min(minus, plus));
}

ComplexMatrix to_su2(const ComplexMatrix& u) {
    const Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    return u / std::sqrt(det);
}

struct QuatKey {
    std::array<std::int64_t, 4> v;
    bool operator==(const QuatKey&) const = default;
};

struct QuatKeyHash {
    std::size_t operator()(const QuatKey& k) const noexcept {
        std::size_t h = 0;
        for (auto x : k.v) h = h * 1000003u ^ std::hash<std::int64_t>{}(x);
        return h;
    }
};

QuatKey quantize(const Quaternion& q) {
    QuatKey k;
    for (int i = 0; i < 4; ++i) k.v[i] = std::llround(q[i] * 1e7);
    return k;
}

}  // namespace

ComplexMatrix letter_matrix(Letter l) { return letter_mat2(l); }

const char* letter_name(Letter l) {
    switch (l) {
        case Letter::H: return "H";
        case Letter::T: return "T";
        case Letter::Tdg: return "Tdg";
        default: return "I";
    }
}

GateWord::GateWord(std::vector<Letter> letters) : letters_(std::move(letters)) {
    Mat2 p = Mat2::Identity();
    for (Letter l : letters_)
        if (l != Letter::I) p = p * letter_mat2(l);
    product_ = p;
}

GateWord GateWord::inverse() const {
    std::vector<Letter> out(letters_.rbegin(), letters_.rend());
    for (auto& l : out) {
        if (l == Letter::T) l = Letter::Tdg;
        else if (l == Letter::Tdg) l = Letter::T;
    }
    return GateWord(std::move(out));
}

GateWord GateWord::simplified() const {
    // Tokens: -1 for H, otherwise a T exponent in 1..7.
    std::vector<int> stack;
    for (Letter l : letters_) {
        if (l == Letter::I) continue;
        if (l == Letter::H) {
            if (!stack.empty() && stack.back() == -1) stack.pop_back();
            else stack.push_back(-1);
            continue;
        }
        const int k = l == Letter::T ? 1 : 7;
        if (!stack.empty() && stack.back() != -1) {
            const int merged = (stack.back() + k) % 8;
            stack.pop_back();
            if (merged != 0) stack.push_back(merged);
        } else {
            stack.push_back(k);
        }
    }
    std::vector<Letter> out;
    out.reserve(letters_.size());
    for (int tok : stack) {
        if (tok == -1) out.push_back(Letter::H);
        else if (tok <= 4) out.insert(out.end(), static_cast<std::size_t>(tok), Letter::T);
        else out.insert(out.end(), static_cast<std::size_t>(8 - tok), Letter::Tdg);
    }
    return GateWord(std::move(out));
}

std::string GateWord::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < letters_.size(); ++i) os << (i ? " " : "") << letter_name(letters_[i]);
    return os.str();
}

GateWord operator+(const GateWord& a, const GateWord& b) {
    std::vector<Letter> out = a.letters_;
    out.insert(out.end(), b.letters_.begin(), b.letters_.end());
    return GateWord(std::move(out));
}

Quaternion to_quaternion(const ComplexMatrix& u) {
    if (u.rows() != 2 || u.cols() != 2) throw DimensionError("to_quaternion: expected a 2x2 matrix");
    const ComplexMatrix v = to_su2(u);
    Quaternion q{(v(0, 0).real() + v(1, 1).real()) / 2, -(v(1, 0).imag() + v(0, 1).imag()) / 2,
                 (v(1, 0).real() - v(0, 1).real()) / 2, (v(1, 1).imag() - v(0, 0).imag()) / 2};
    double norm = 0.0;
    for (double x : q) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : q) x /= norm;
    for (double x : q) {
        if (std::abs(x) > 1e-9) {
            if (x < 0)
                for (double& y : q) y = -y;
            break;
        }
    }
    return q;
}

NearestHit EpsilonNet::nearest(const ComplexMatrix& u) const {
    if (keys.empty()) throw ValidationError("EpsilonNet::nearest: empty net");
    const Quaternion q = to_quaternion(u);
    NearestHit best{0, 0.0};
    double best_dot = -1.0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto& k = keys[i];
        const double dot = std::abs(q[0] * k[0] + q[1] * k[1] + q[2] * k[2] + q[3] * k[3]);
        if (dot > best_dot) best_dot = dot, best.index = i;
    }
    best.distance = quat_distance(q, keys[best.index]);
    return best;
}

double EpsilonNet::error_bound(int depth) const {
    constexpr double kFloor = 1e-10;
    double eps = covering_radius;
    for (int d = 0; d < depth; ++d) eps = commutator_constant * std::pow(eps, 1.5);
    return std::max(eps, kFloor);
}

CommutatorPair commutator_factor(const ComplexMatrix& delta) {
    if (delta.rows() != 2 || delta.cols() != 2) throw DimensionError("commutator_factor: expected a 2x2 matrix");
    require_unitary(delta, "commutator_factor");
    if (phase_invariant_distance(delta, gates::identity(1)) >= 0.5)
        throw ValidationError("commutator_factor: residual too far from identity");
    const Quaternion q = to_quaternion(delta);
    const Eigen::Vector3d axis_n(q[1], q[2], q[3]);
    if (axis_n.norm() < 1e-15) return {gates::identity(1), gates::identity(1)};

    const double cos_half = std::clamp(q[0], -1.0, 1.0);
    const double sin_sq_quarter = std::sqrt(std::max(0.0, (1.0 - cos_half) / 2.0));
    const double phi = 2.0 * std::asin(std::sqrt(sin_sq_quarter));
    const ComplexMatrix v0 = gates::rotation(phi, 1, 0, 0);
    const ComplexMatrix w0 = gates::rotation(phi, 0, 1, 0);
    const ComplexMatrix c0 = v0 * w0 * v0.adjoint() * w0.adjoint();
    const Quaternion qc = to_quaternion(c0);
    const Eigen::Vector3d m = Eigen::Vector3d(qc[1], qc[2], qc[3]).normalized();
    const Eigen::Vector3d n = axis_n.normalized();

    // Rotation taking the commutator's axis onto delta's axis.
    ComplexMatrix s = gates::identity(1);
    const Eigen::Vector3d k = m.cross(n);
    const double alpha = std::atan2(k.norm(), m.dot(n));
    if (k.norm() > 1e-12) {
        const Eigen::Vector3d kh = k.normalized();
        s = gates::rotation(alpha, kh.x(), kh.y(), kh.z());
    } else if (m.dot(n) < 0) {
        const Eigen::Vector3d perp = std::abs(m.x()) < 0.9 ? m.cross(Eigen::Vector3d::UnitX()).normalized()
                                                           : m.cross(Eigen::Vector3d::UnitY()).normalized();
        s = gates::rotation(std::numbers::pi, perp.x(), perp.y(), perp.z());
    }
    CommutatorPair out{s * v0 * s.adjoint(), s * w0 * s.adjoint()};
    const ComplexMatrix rebuilt = out.v * out.w * out.v.adjoint() * out.w.adjoint();
    if (phase_invariant_distance(rebuilt, delta) > 1e-9)
        throw NumericalError("commutator_factor: reconstruction failed");
    return out;
}

GateWord sk_decompose_unchecked(const ComplexMatrix& u, int depth, const EpsilonNet& net) {
    if (depth == 0) return net.entries[net.nearest(u).index];
    const GateWord prev = sk_decompose_unchecked(u, depth - 1, net);
    const ComplexMatrix delta = u * prev.product().adjoint();
    const auto [v, w] = commutator_factor(delta);
    const GateWord vw = sk_decompose_unchecked(v, depth - 1, net);
    const GateWord ww = sk_decompose_unchecked(w, depth - 1, net);
    return (vw + ww + vw.inverse() + ww.inverse() + prev).simplified();
}

GateWord sk_decompose(const ComplexMatrix& u, int depth, const EpsilonNet& net) {
    if (depth < 0 || depth > kMaxSkDepth) throw ValidationError("sk_decompose: depth must be in [0, 6]");
    if (u.rows() != 2 || u.cols() != 2) throw DimensionError("sk_decompose: expected a 2x2 unitary");
    require_unitary(u, "sk_decompose");
    if (depth > 0 && !(net.commutator_constant * std::sqrt(net.covering_radius) < 1.0)) {
        std::ostringstream os;
        os << "sk_decompose: net too coarse for convergence (C=" << net.commutator_constant
           << ", eps0=" << net.covering_radius << ")";
        throw ResourceError(os.str());
    }
    return sk_decompose_unchecked(to_su2(u), depth, net);
}

namespace {

// Smallest C such that every calibration error at depth d stays below
// eps(d) = C eps(d-1)^{3/2} with eps(0) the covering radius.
double calibrate_constant(const EpsilonNet& net, const std::vector<ComplexMatrix>& samples, int max_depth) {
    std::vector<std::vector<double>> errors(static_cast<std::size_t>(max_depth) + 1);
    try {
        for (const auto& u : samples)
            for (int d = 1; d <= max_depth; ++d)
                errors[static_cast<std::size_t>(d)].push_back(
                    phase_invariant_distance(u, sk_decompose_unchecked(u, d, net).product()));
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
    constexpr double kFloor = 1e-10;
    double c = 0.0;
    for (int iter = 0; iter < 50; ++iter) {
        double next = c;
        double eps = net.covering_radius;
        for (int d = 1; d <= max_depth; ++d) {
            for (double e : errors[static_cast<std::size_t>(d)])
                if (e > kFloor) next = std::max(next, e / std::pow(eps, 1.5));
            eps = next * std::pow(eps, 1.5);
        }
        if (next == c) break;
        c = next;
    }
    return c;
}

}  // namespace

EpsilonNet build_net(int l0, RngStream& rng, std::size_t samples) {
    if (l0 < 1) throw ValidationError("build_net: l0 must be at least 1");
    if (l0 > kMaxNetLength) throw ResourceError("build_net: l0 above 16 is not supported");
    EpsilonNet net;
    net.l0 = l0;
    std::unordered_map<QuatKey, std::size_t, QuatKeyHash> seen;
    auto add = [&](GateWord w) {
        const Quaternion q = to_quaternion(w.product());
        if (!seen.emplace(quantize(q), net.entries.size()).second) return false;
        net.entries.push_back(std::move(w));
        net.keys.push_back(q);
        return true;
    };
    add(GateWord{});
    std::size_t frontier_begin = 0;
    constexpr std::array<Letter, 3> alphabet{Letter::H, Letter::T, Letter::Tdg};
    for (int len = 1; len <= l0; ++len) {
        const std::size_t frontier_end = net.entries.size();
        for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
            for (Letter l : alphabet) {
                std::vector<Letter> letters = net.entries[i].letters();
                letters.push_back(l);
                add(GateWord(std::move(letters)));
            }
        }
        frontier_begin = frontier_end;
    }

    std::vector<ComplexMatrix> haar;
    haar.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        haar.push_back(haar_random_unitary(2, rng));
        net.covering_radius = std::max(net.covering_radius, net.nearest(haar.back()).distance);
    }
    // A small margin on top of the calibrated value covers unseen inputs.
    const std::size_t calib = std::min<std::size_t>(samples, 100);
    const std::vector<ComplexMatrix> calib_set(haar.begin(), haar.begin() + static_cast<std::ptrdiff_t>(calib));
    net.commutator_constant = 1.25 * calibrate_constant(net, calib_set, 3);
    return net;
}

EpsilonNet build_net(int l0) {
    RngStream rng(0x5eed0000 + static_cast<std::uint64_t>(l0));
    return build_net(l0, rng);
}

GateWord pad_to_length(const GateWord& word, std::size_t length) {
    if (length < word.size()) throw ValidationError("pad_to_length: target shorter than the word");
    std::vector<Letter> letters = word.letters();
    letters.resize(length, Letter::I);
    return GateWord(std::move(letters));
}

std::size_t padded_length(int depth, int l0) {
    std::size_t l = static_cast<std::size_t>(l0);
    for (int d = 0; d < depth; ++d) l *= 5;
    return l;
}

std::vector<ProfileRow> length_accuracy_profile(const std::vector<ComplexMatrix>& samples,
                                                const std::vector<int>& depths, const EpsilonNet& net) {
    if (samples.empty()) throw ValidationError("length_accuracy_profile: no samples");
    std::vector<ProfileRow> rows;
    for (int d : depths) {
        ProfileRow row{d, 0.0, 0.0, 0.0};
        for (const auto& u : samples) {
            const auto w = sk_decompose(u, d, net);
            const double dist = phase_invariant_distance(u, w.product());
            row.mean_length += static_cast<double>(w.size());
            row.mean_distance += dist;
            row.max_distance = std::max(row.max_distance, dist);
        }
        row.mean_length /= static_cast<double>(samples.size());
        row.mean_distance /= static_cast<double>(samples.size());
        rows.push_back(row);
    }
    return rows;
}

double fit_length_exponent(const std::vector<ProfileRow>& rows) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        if (r.mean_distance <= 0.0 || r.mean_distance >= 1.0 || r.mean_length <= 0.0) continue;
        xs.push_back(std::log(std::log(1.0 / r.mean_distance)));
        ys.push_back(std::log(r.mean_length));
    }
    if (xs.size() < 2) throw ValidationError("fit_length_exponent: need two usable rows");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i], sy += ys[i], sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) throw ValidationError("fit_length_exponent: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace pbqc
