#include "pbqc/teleport.hpp"

#include <cmath>
#include <numeric>

#include "pbqc/clifford.hpp"
#include "pbqc/error.hpp"
#include "pbqc/linalg.hpp"

namespace pbqc {

TeleportResult teleport(const StateVector& state, std::size_t qubit, RngStream& rng) {
    const std::size_t n = state.num_qubits();
    if (qubit >= n) throw DimensionError("teleport: qubit index out of range");
    // Fresh pair on (n, n+1); after the Bell measurement on (qubit, n) the
    // receiver half ends up last and is moved into the sender's slot.
    auto measured = bell_measurement(state.tensor(bell_pair()), qubit, n, rng);
    auto received = move_qubit(measured.post, n - 1, qubit);
    return {PauliOperator::from_bell(measured.outcome, n, qubit), std::move(received), 1};
}

TeleportResult teleport_all(const StateVector& state, RngStream& rng) {
    const std::size_t n = state.num_qubits();
    TeleportResult out{PauliOperator(n), state, 0};
    for (std::size_t q = 0; q < n; ++q) {
        auto step = teleport(out.receiver_state, q, rng);
        out.correction = step.correction * out.correction;
        out.receiver_state = std::move(step.receiver_state);
        out.epr_consumed += step.epr_consumed;
    }
    return out;
}

TeleportGateResult teleport_gate(const StateVector& state, const ComplexMatrix& u, RngStream& rng) {
    const std::size_t n = state.num_qubits();
    if (u.rows() != static_cast<Eigen::Index>(std::size_t{1} << n))
        throw DimensionError("teleport_gate: gate dimension does not match the state");
    if (!hierarchy_level(u, 3).within(3)) throw ValidationError("teleport_gate: gate is not in the third level");

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    auto tel = teleport_all(state, rng);
    const auto after_gate = apply_unitary(tel.receiver_state, u, all);
    ComplexMatrix r1 = u * tel.correction.matrix() * u.adjoint();
    if (!is_clifford(r1)) throw NumericalError("teleport_gate: correction R1 is not Clifford");
    return {apply_unitary(after_gate, r1.adjoint(), all), tel.correction, std::move(r1), tel.epr_consumed};
}

namespace {

// Keeps one qubit of an operator on `num_qubits` qubits (qubit 0 = MSB).
ComplexMatrix keep_one(const ComplexMatrix& m, std::size_t num_qubits, std::size_t keep) {
    const std::size_t shift = num_qubits - 1 - keep;
    const std::uint64_t bit = std::uint64_t{1} << shift;
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    for (std::uint64_t rest = 0; rest < dim; ++rest) {
        if (rest & bit) continue;
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t)
                out(s, t) += m(static_cast<Eigen::Index>(rest | (s ? bit : 0)),
                               static_cast<Eigen::Index>(rest | (t ? bit : 0)));
    }
    return out;
}

std::uint64_t swap_bits(std::uint64_t x, unsigned a, unsigned b) {
    const std::uint64_t ba = (x >> a) & 1, bb = (x >> b) & 1;
    if (ba == bb) return x;
    return x ^ ((std::uint64_t{1} << a) | (std::uint64_t{1} << b));
}

}  // namespace

PbtChannel build_pbt_channel(std::size_t num_ports) {
    if (num_ports < PbtChannel::kMinPorts || num_ports > PbtChannel::kMaxPorts)
        throw ValidationError("build_pbt_channel: port count must be in [2, 8]");
    const std::size_t n = num_ports + 1;
    const Eigen::Index dim = Eigen::Index{1} << n;
    const auto input_shift = static_cast<unsigned>(n - 1);

    // Phi+ projector on (input, port i) tensored with identity elsewhere.
    auto sigma = [&](std::size_t port) {
        const auto port_shift = static_cast<unsigned>(n - 1 - (port + 1));
        const std::uint64_t mask = (std::uint64_t{1} << input_shift) | (std::uint64_t{1} << port_shift);
        ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
        for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
            if (((x >> input_shift) & 1) != ((x >> port_shift) & 1)) continue;
            const std::uint64_t rest = x & ~mask;
            s(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(rest)) = 0.5;
            s(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(rest | mask)) = 0.5;
        }
        return s;
    };

    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < num_ports; ++i) sum += sigma(i);
    const ComplexMatrix r = psd_inverse_sqrt(sum, 1e-10);
    ComplexMatrix first = r * sigma(0) * r;
    first = 0.5 * (first + first.adjoint()).eval();

    PbtChannel ch;
    ch.num_ports_ = num_ports;
    ch.povm_.reserve(num_ports + 1);
    ch.povm_.push_back(first);
    // The other elements are port permutations of the first.
    const auto shift0 = static_cast<unsigned>(n - 2);
    for (std::size_t i = 1; i < num_ports; ++i) {
        const auto shift_i = static_cast<unsigned>(n - 2 - i);
        ComplexMatrix e(dim, dim);
        for (Eigen::Index x = 0; x < dim; ++x)
            for (Eigen::Index y = 0; y < dim; ++y)
                e(x, y) = first(static_cast<Eigen::Index>(swap_bits(static_cast<std::uint64_t>(x), shift0, shift_i)),
                                static_cast<Eigen::Index>(swap_bits(static_cast<std::uint64_t>(y), shift0, shift_i)));
        ch.povm_.push_back(std::move(e));
    }
    ComplexMatrix completion = ComplexMatrix::Identity(dim, dim);
    for (const auto& e : ch.povm_) completion -= e;
    ch.povm_.push_back(std::move(completion));

    // Bob's port state for input |a><b| is (<b|Pi|a>)^T / 2^N traced down to the port.
    const Eigen::Index half = dim / 2;
    const double norm = 1.0 / static_cast<double>(half);
    ch.maps_.resize(num_ports + 1);
    for (std::size_t i = 0; i <= num_ports; ++i) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const ComplexMatrix block = ch.povm_[i].block(b * half, a * half, half, half).transpose() * norm;
                if (i < num_ports) {
                    ch.maps_[i][2 * a + b] = keep_one(block, num_ports, i);
                } else {
                    ch.maps_[i][2 * a + b] = ComplexMatrix::Identity(2, 2) * (block.trace() / 2.0);
                }
            }
    }
    return ch;
}

ComplexMatrix PbtChannel::branch(std::size_t outcome, const ComplexMatrix& rho) const {
    if (outcome > num_ports_) throw ValidationError("PbtChannel::branch: outcome out of range");
    if (rho.rows() != 2 || rho.cols() != 2) throw DimensionError("PbtChannel::branch: input must be one qubit");
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out += rho(a, b) * maps_[outcome][2 * a + b];
    return out;
}

PbtResult pbt_teleport(const DensityMatrix& input, const PbtChannel& channel, RngStream& rng) {
    if (input.num_qubits() != 1) throw DimensionError("pbt_teleport: input must be one qubit");
    const std::size_t outcomes = channel.num_ports() + 1;
    std::vector<ComplexMatrix> branches(outcomes);
    std::vector<double> probs(outcomes);
    double total = 0.0;
    for (std::size_t i = 0; i < outcomes; ++i) {
        branches[i] = channel.branch(i, input.matrix());
        probs[i] = std::max(0.0, branches[i].trace().real());
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-8) throw NumericalError("pbt_teleport: outcome probabilities do not sum to 1");

    double u = rng.uniform() * total;
    std::size_t pick = outcomes - 1;
    for (std::size_t i = 0; i < outcomes; ++i) {
        if (u < probs[i]) {
            pick = i;
            break;
        }
        u -= probs[i];
    }
    const int epr = static_cast<int>(channel.num_ports());
    if (pick == channel.num_ports() || probs[pick] <= 0.0) return {std::nullopt, DensityMatrix::maximally_mixed(1), epr};
    ComplexMatrix out = branches[pick] / probs[pick];
    out = 0.5 * (out + out.adjoint()).eval();
    return {pick, DensityMatrix::unchecked(std::move(out)), epr};
}

PbtResult pbt_teleport(const StateVector& input, const PbtChannel& channel, RngStream& rng) {
    return pbt_teleport(DensityMatrix::pure(input), channel, rng);
}

std::vector<FidelityPoint> pbt_fidelity_curve(const std::vector<std::size_t>& ports, std::size_t trials,
                                              RngStream& rng) {
    if (trials == 0) throw ValidationError("pbt_fidelity_curve: trials must be positive");
    std::vector<FidelityPoint> curve;
    for (std::size_t n : ports) {
        const auto channel = build_pbt_channel(n);
        double sum = 0.0, sum_sq = 0.0;
        std::size_t failures = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            const ComplexVector col = haar_random_unitary(2, rng).col(0);
            const auto psi = StateVector::from_amplitudes(col, 1e-9);
            const auto res = pbt_teleport(psi, channel, rng);
            if (!res.port) ++failures;
            const double f = fidelity(psi, res.receiver);
            sum += f;
            sum_sq += f * f;
        }
        const double mean = sum / static_cast<double>(trials);
        const double var = std::max(0.0, sum_sq / static_cast<double>(trials) - mean * mean);
        curve.push_back({n, mean, std::sqrt(var / static_cast<double>(trials)),
                         static_cast<double>(failures) / static_cast<double>(trials)});
    }
    return curve;
}

}  // namespace pbqc
