#include "cqm/fock/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "cqm/errors.hpp"

namespace cqm::fock {

namespace {

using cd = std::complex<double>;

JointState initial_state(Frame frame, const BosonInitialState& phi, int n_cut) {
    return frame == Frame::effective ? JointState::boson(phi, n_cut)
                                     : JointState::spin_down(phi, n_cut);
}

void check_leak(const JointState& psi, const EvolveOptions& options) {
    const double tail = psi.tail_mass();
    if (tail > options.leak_threshold) {
        throw TruncationLeak(tail, psi.n_cut());
    }
}

}  // namespace

HermitianOperator build_hamiltonian(Frame frame, const ModelParams& params, int n_cut) {
    switch (frame) {
        case Frame::effective:
            return build_effective_hamiltonian(params, n_cut);
        case Frame::squeezed:
            return build_squeezed_frame_hamiltonian(params, n_cut);
        case Frame::lab:
            return build_full_hamiltonian(params, n_cut);
    }
    throw InvalidParams("frame", "unknown frame");
}

HermitianOperator position_operator(const FockLayout& layout) {
    auto x = x_quadrature(layout.n_cut);
    return layout.spins == 1 ? x : on_joint_space(x);
}

HermitianOperator position_squared_operator(const FockLayout& layout) {
    auto x2 = x_squared(layout.n_cut);
    return layout.spins == 1 ? x2 : on_joint_space(x2);
}

JointState evolve(const Spectrum& spectrum, const JointState& psi0, double t,
                  const EvolveOptions& options) {
    if (!(spectrum.layout() == psi0.layout())) {
        throw InvalidParams("psi0", "layout does not match the Hamiltonian");
    }
    Eigen::VectorXcd out = spectrum.evolve(psi0.amplitudes(), t);
    // renormalize away accumulated rounding; unitarity is exact in exact arithmetic
    out /= out.norm();
    JointState psi(psi0.layout(), std::move(out));
    check_leak(psi, options);
    return psi;
}

JointState evolve(const HermitianOperator& h, const JointState& psi0, double t,
                  const EvolveOptions& options) {
    return evolve(Spectrum(h), psi0, t, options);
}

double sup_relative_change(std::span<const double> a, std::span<const double> b,
                           double scale_floor) {
    if (a.size() != b.size()) {
        throw InvalidParams("series", "length mismatch");
    }
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    scale = std::max(scale, scale_floor);
    if (scale == 0.0) {
        return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return diff / scale;
}

ConvergedObservables converge_cutoff(const std::function<Observables(int)>& evaluate,
                                     const CutoffPolicy& policy,
                                     std::span<const double> scale_floors) {
    std::optional<Observables> previous;
    std::optional<TruncationLeak> last_leak;
    for (int n_cut = policy.start; n_cut <= policy.max; n_cut *= 2) {
        Observables current;
        try {
            current = evaluate(n_cut);
        } catch (const TruncationLeak& leak) {
            last_leak = leak;
            previous.reset();
            continue;
        }
        if (previous) {
            double change = 0.0;
            for (std::size_t k = 0; k < current.size(); ++k) {
                const double floor = k < scale_floors.size() ? scale_floors[k] : 0.0;
                change = std::max(change,
                                  sup_relative_change(current[k], (*previous)[k], floor));
            }
            if (change < policy.tolerance) {
                return {n_cut, std::move(current), change};
            }
        }
        previous = std::move(current);
    }
    if (last_leak && !previous) {
        throw *last_leak;
    }
    throw CutoffTooSmall("no convergence up to n_cut=" + std::to_string(policy.max));
}

SeriesDerivative centered_derivative(const std::function<std::vector<double>(double)>& f, double x,
                                     double h, double max_gap) {
    auto diff = [&](double step) {
        auto up = f(x + step);
        const auto down = f(x - step);
        for (std::size_t i = 0; i < up.size(); ++i) {
            up[i] = (up[i] - down[i]) / (2.0 * step);
        }
        return up;
    };
    const auto coarse = diff(h);
    const auto fine = diff(h / 2.0);
    SeriesDerivative out;
    out.halving_gap = sup_relative_change(coarse, fine);
    if (out.halving_gap > max_gap) {
        throw StepTooLarge("finite-difference step halving disagrees by " +
                           std::to_string(out.halving_gap));
    }
    out.value.resize(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) {
        out.value[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    }
    return out;
}

QuadratureSeries quadrature_series(Frame frame, const ModelParams& params,
                                   const BosonInitialState& phi, std::span<const double> times,
                                   const CutoffPolicy& policy) {
    if (frame == Frame::lab) {
        throw InvalidParams("frame", "quadrature dynamics are defined in the squeezed frame");
    }
    validate(params);
    const double h = derivative_step(params.g);

    auto evaluate = [&](int n_cut) -> Observables {
        const auto psi0 = initial_state(frame, phi, n_cut);
        const auto x_op = position_operator(psi0.layout());
        const auto x2_op = position_squared_operator(psi0.layout());

        auto x_track = [&](double g) {
            const Spectrum spectrum(build_hamiltonian(frame, params.with_g(g), n_cut));
            std::vector<double> xs;
            xs.reserve(times.size());
            for (double t : times) {
                xs.push_back(evolve(spectrum, psi0, t).expectation(x_op));
            }
            return xs;
        };

        const Spectrum spectrum(build_hamiltonian(frame, params, n_cut));
        std::vector<double> xs;
        std::vector<double> x2s;
        for (double t : times) {
            const auto psi = evolve(spectrum, psi0, t);
            xs.push_back(psi.expectation(x_op));
            x2s.push_back(psi.expectation(x2_op));
        }
        auto deriv = centered_derivative(x_track, params.g, h).value;
        return {std::move(xs), std::move(x2s), std::move(deriv)};
    };

    // <X>_t vanishes at every tau_n; its natural scale is the initial spread <X^2>_0 = 1
    const double floors[] = {1.0, 0.0, 0.0};
    auto conv = converge_cutoff(evaluate, policy, floors);
    QuadratureSeries s;
    s.t.assign(times.begin(), times.end());
    s.x_mean = std::move(conv.values[0]);
    s.x2_mean = std::move(conv.values[1]);
    s.x_deriv_g = std::move(conv.values[2]);
    s.n_cut = conv.n_cut;
    s.x_var.resize(s.t.size());
    s.inv_var.resize(s.t.size());
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        s.x_var[i] = s.x2_mean[i] - s.x_mean[i] * s.x_mean[i];
        s.inv_var[i] = s.x_deriv_g[i] * s.x_deriv_g[i] / s.x_var[i];
    }
    return s;
}

double qfi_overlap(const ModelParams& params, double t, const JointState& psi0, double dg) {
    return qfi_overlap(params, t, psi0, dg,
                       psi0.layout().spins == 1 ? Frame::effective : Frame::squeezed);
}

double qfi_overlap(const ModelParams& params, double t, const JointState& psi0, double dg,
                   Frame frame) {
    if (!(dg > 0.0)) {
        throw InvalidParams("dg", "must be > 0");
    }
    const int n_cut = psi0.n_cut();
    const auto up = evolve(build_hamiltonian(frame, params.with_g(params.g + dg / 2.0), n_cut),
                           psi0, t);
    const auto down = evolve(build_hamiltonian(frame, params.with_g(params.g - dg / 2.0), n_cut),
                             psi0, t);
    const double fidelity = std::abs(down.overlap(up));
    const double deficit = 1.0 - fidelity;
    if (deficit > 1e-2) {
        throw StepTooLarge("overlap deficit " + std::to_string(deficit) + " exceeds 1e-2");
    }
    return std::max(0.0, 8.0 * deficit / (dg * dg));
}

std::vector<double> generator_qfi_series(const ModelParams& params, std::span<const double> times,
                                         const JointState& psi0) {
    if (psi0.layout().spins != 1) {
        throw InvalidParams("psi0", "generator QFI is defined on the boson-only effective model");
    }
    const auto osc = effective_oscillator(params);
    const double zeta = effective_stiffness(params);
    const double dzeta = effective_stiffness_dg(params);
    const int n_cut = psi0.n_cut();

    const Spectrum spectrum(oscillator_hamiltonian(osc.omega_bar, zeta, n_cut));
    const auto h1 = spectrum.project(0.5 * osc.omega_bar * x_squared(n_cut));
    const auto coeffs = spectrum.coefficients(psi0.amplitudes());

    std::vector<double> out;
    out.reserve(times.size());
    std::vector<Eigen::VectorXcd> h_psi(spectrum.blocks().size());
    for (double t : times) {
        cd mean = 0.0;
        for (std::size_t b = 0; b < spectrum.blocks().size(); ++b) {
            const auto& energies = spectrum.blocks()[b].energies;
            const auto& c = coeffs[b];
            const auto& m = h1[b];
            const Eigen::Index n = energies.size();
            Eigen::VectorXcd phase(n);
            for (Eigen::Index j = 0; j < n; ++j) {
                phase(j) = std::polar(1.0, energies(j) * t);
            }
            Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
            for (Eigen::Index k = 0; k < n; ++k) {
                if (c(k) == cd(0.0)) {
                    continue;
                }
                const cd ck_phase = c(k) * std::conj(phase(k));
                for (Eigen::Index j = 0; j < n; ++j) {
                    const double d = energies(j) - energies(k);
                    cd kernel;
                    if (std::abs(d) < 1e-12) {
                        kernel = t * c(k);
                    } else {
                        // (e^{i d t} - 1) / (i d) c_k
                        kernel = (phase(j) * ck_phase - c(k)) / cd(0.0, d);
                    }
                    acc(j) += m(j, k) * kernel;
                }
            }
            mean += c.dot(acc);
            h_psi[b] = std::move(acc);
        }
        double var = 0.0;
        for (std::size_t b = 0; b < spectrum.blocks().size(); ++b) {
            var += (h_psi[b] - mean * coeffs[b]).squaredNorm();
        }
        out.push_back(dzeta * dzeta * 4.0 * var);
    }
    return out;
}

double generator_qfi(const ModelParams& params, double t, const JointState& psi0) {
    const double ts[] = {t};
    return generator_qfi_series(params, ts, psi0).front();
}

ConvergedSeries generator_qfi_converged(const ModelParams& params, std::span<const double> times,
                                        const BosonInitialState& phi, const CutoffPolicy& policy) {
    auto conv = converge_cutoff(
        [&](int n_cut) -> Observables {
            return {generator_qfi_series(params, times, JointState::boson(phi, n_cut))};
        },
        policy);
    return {std::move(conv.values.front()), conv.n_cut};
}

ReciprocalResidual verify_reciprocal_relation(const ModelParams& params, int n_cut) {
    const auto osc = effective_oscillator(params);
    if (osc.regime != Regime::Normal) {
        throw RegimeError("reciprocal relation is checked in the normal regime");
    }
    if (n_cut < 4) {
        throw InvalidParams("n_cut", "must be >= 4");
    }
    // Every operator here is real (M = -i[H_0, H_1] and Lambda = sqrt(eps) [H_0, H_1] - N),
    // and entries reach omega_bar^4 n_cut^3, so the identity is evaluated in long
    // double from exactly built matrix elements to keep rounding well below 1e-9.
    using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const long double wb = osc.omega_bar;
    const long double zeta = osc.epsilon_g;
    const long double root_eps = std::sqrt(static_cast<long double>(osc.epsilon));
    Mat x2 = Mat::Zero(n_cut, n_cut);
    Mat p2 = Mat::Zero(n_cut, n_cut);
    for (int n = 0; n < n_cut; ++n) {
        x2(n, n) = p2(n, n) = n + 0.5L;
        if (n + 2 < n_cut) {
            const long double off = std::sqrt(static_cast<long double>(n + 1) * (n + 2)) / 2.0L;
            x2(n, n + 2) = x2(n + 2, n) = off;
            p2(n, n + 2) = p2(n + 2, n) = -off;
        }
    }
    const Mat h0 = 0.5L * wb * p2;
    const Mat h1 = 0.5L * wb * x2;
    const Mat h = h0 + zeta * h1;
    const Mat c = h0 * h1 - h1 * h0;
    const Mat n = -(h * c - c * h);
    const Mat lambda = root_eps * c - n;
    const Mat residual = h * lambda - lambda * h - root_eps * lambda;

    const auto interior = static_cast<Eigen::Index>(0.8 * n_cut);
    return {static_cast<double>(residual.topLeftCorner(interior, interior).cwiseAbs().maxCoeff()),
            static_cast<double>(residual.cwiseAbs().maxCoeff())};
}

FiniteFrequencyResult finite_frequency_discrepancy(const ModelParams& params, double eta, int n,
                                                   const CutoffPolicy& policy) {
    if (!(eta >= 10.0)) {
        throw InvalidParams("eta", "finite-frequency comparison needs eta >= 10");
    }
    if (n < 1) {
        throw InvalidParams("n", "peak index must be >= 1");
    }
    const auto full = params.with_Omega(eta * params.omega);
    FiniteFrequencyResult r;
    r.eta = eta;
    r.n = n;
    r.tau = optimal_times(params, n).back();
    r.inv_var_closed = inverted_variance_peak(params, n);
    const double ts[] = {r.tau};
    const auto series = quadrature_series(Frame::squeezed, full,
                                          BosonInitialState::superposition_01(), ts, policy);
    r.x_mean = series.x_mean.front();
    r.x_var = series.x_var.front();
    r.x_deriv_g = series.x_deriv_g.front();
    r.inv_var_full = series.inv_var.front();
    r.delta = (r.inv_var_full - r.inv_var_closed) / r.inv_var_closed;
    r.n_cut = series.n_cut;
    return r;
}

}  // namespace cqm::fock
