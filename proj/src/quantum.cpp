#include "qlv/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qlv/errors.hpp"

namespace qlv::quantum {

namespace {

constexpr double kNormTol = 1e-12;

double wrap_two_pi(double angle) {
    double a = std::fmod(angle, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a;
}

} // namespace

Observable Observable::plane(double angle) {
    Observable o;
    double a = wrap_two_pi(angle);
    double sign = 1.0;
    if (a > M_PI) {
        a -= M_PI;
        sign = -1.0;
    }
    o.angle_ = a;
    o.sign_ = sign;
    o.bloch_ = Eigen::Vector3d(std::sin(a), 0.0, std::cos(a));
    o.is_plane_ = true;
    return o;
}

Observable Observable::bloch(double nx, double ny, double nz, double sign) {
    const double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (norm == 0.0) throw std::invalid_argument("Observable: zero Bloch vector");
    if (sign != 1.0 && sign != -1.0)
        throw std::invalid_argument("Observable: sign must be +1 or -1");
    Observable o;
    o.bloch_ = Eigen::Vector3d(nx / norm, ny / norm, nz / norm);
    o.sign_ = sign;
    o.is_plane_ = false;
    o.angle_ = std::atan2(o.bloch_.x(), o.bloch_.z());
    return o;
}

Observable Observable::random_bloch(Rng& rng) {
    double nx, ny, nz, norm;
    do {
        auto [a, b] = rng.normal_pair();
        nx = a;
        ny = b;
        nz = rng.normal();
        norm = std::sqrt(nx * nx + ny * ny + nz * nz);
    } while (norm < 1e-12);
    return bloch(nx, ny, nz);
}

Eigen::Matrix2cd Observable::matrix() const {
    Eigen::Matrix2cd m;
    const double nx = bloch_.x(), ny = bloch_.y(), nz = bloch_.z();
    m(0, 0) = Complex(nz, 0.0);
    m(0, 1) = Complex(nx, -ny);
    m(1, 0) = Complex(nx, ny);
    m(1, 1) = Complex(-nz, 0.0);
    return sign_ * m;
}

PureState::PureState(int num_sites, Eigen::VectorXcd amplitudes)
    : num_sites_(num_sites), amps_(std::move(amplitudes)) {
    if (num_sites_ < 1) throw std::invalid_argument("PureState: num_sites must be >= 1");
    const Eigen::Index dim = Eigen::Index(1) << num_sites_;
    if (amps_.size() != dim)
        throw std::invalid_argument("PureState: amplitude length must be 2^num_sites");
    const double norm2 = amps_.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTol)
        throw std::invalid_argument("PureState: squared norm must be 1 within 1e-12");
}

PureState PureState::bell(BellKind kind) {
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
    const double r = 1.0 / std::sqrt(2.0);
    if (kind == BellKind::phi_plus) {
        amps(0) = r;
        amps(3) = r;
    } else {
        amps(1) = r;
        amps(2) = r;
    }
    return PureState(2, std::move(amps));
}

PureState PureState::random(int num_sites, Rng& rng) {
    const Eigen::Index dim = Eigen::Index(1) << num_sites;
    Eigen::VectorXcd amps(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        auto [re, im] = rng.normal_pair();
        amps(i) = Complex(re, im);
    }
    amps /= amps.norm();
    return PureState(num_sites, std::move(amps));
}

PureState bell_state(BellKind kind) { return PureState::bell(kind); }

Eigen::VectorXcd PureState::apply_site_op(int site, const Eigen::Matrix2cd& op) const {
    if (site < 0 || site >= num_sites_)
        throw std::out_of_range("PureState: site index out of range");
    const Eigen::Index dim = amps_.size();
    // Site 0 is the most significant bit of the basis index.
    const Eigen::Index bit = Eigen::Index(1) << (num_sites_ - 1 - site);
    Eigen::VectorXcd out(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const Eigen::Index j = i | bit;
        out(i) = op(0, 0) * amps_(i) + op(0, 1) * amps_(j);
        out(j) = op(1, 0) * amps_(i) + op(1, 1) * amps_(j);
    }
    return out;
}

namespace {

void apply_op_in_place(Eigen::VectorXcd& v, int num_sites, int site,
                       const Eigen::Matrix2cd& op) {
    if (site < 0 || site >= num_sites)
        throw std::out_of_range("apply_op_in_place: site index out of range");
    const Eigen::Index bit = Eigen::Index(1) << (num_sites - 1 - site);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i & bit) continue;
        const Eigen::Index j = i | bit;
        const Complex lo = v(i), hi = v(j);
        v(i) = op(0, 0) * lo + op(0, 1) * hi;
        v(j) = op(1, 0) * lo + op(1, 1) * hi;
    }
}

} // namespace

double correlator(const PureState& state, int site_i, const Observable& obs_i,
                  int site_j, const Observable& obs_j) {
    if (site_i == site_j) throw std::invalid_argument("correlator: sites must differ");
    // canonical application order makes the result exactly symmetric in the
    // two (site, observable) arguments
    const auto& first = site_i < site_j ? obs_i : obs_j;
    const auto& second = site_i < site_j ? obs_j : obs_i;
    Eigen::VectorXcd phi = state.apply_site_op(std::min(site_i, site_j), first.matrix());
    apply_op_in_place(phi, state.num_sites(), std::max(site_i, site_j), second.matrix());
    return state.amplitudes().dot(phi).real();
}

double local_uncertainty(const PureState& state, int site, const StrategyProfile& prof) {
    const Eigen::Matrix2cd product = prof.obs0.matrix() * prof.obs1.matrix();
    const Eigen::VectorXcd phi = state.apply_site_op(site, product);
    return state.amplitudes().dot(phi).real();
}

double chsh_parameter(const CorrelatorTable& table) {
    return table.rho[0][0] + table.rho[0][1] + table.rho[1][0] - table.rho[1][1];
}

CorrelatorTable correlator_table(const PureState& state, int prey_site,
                                 const StrategyProfile& prey, int predator_site,
                                 const StrategyProfile& predator) {
    CorrelatorTable t;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            t.rho[a][b] = correlator(state, prey_site, prey[a], predator_site, predator[b]);
    return t;
}

CorrelatorTable table_from_bell(double bell) {
    if (std::abs(bell) > 4.0)
        throw std::invalid_argument("table_from_bell: |bell| must be <= 4");
    const double r = bell / 4.0;
    CorrelatorTable t;
    t.rho = {{{r, r}, {r, -r}}};
    return t;
}

double OutcomeDistribution::correlator() const {
    return p[0][0] - p[0][1] - p[1][0] + p[1][1];
}

double OutcomeDistribution::marginal_first() const { return p[0][0] + p[0][1]; }

double OutcomeDistribution::marginal_second() const { return p[0][0] + p[1][0]; }

OutcomeDistribution joint_outcome_distribution(const PureState& state, int site_i,
                                               const Observable& obs_i, int site_j,
                                               const Observable& obs_j) {
    if (site_i == site_j)
        throw std::invalid_argument("joint_outcome_distribution: sites must differ");
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd oi = obs_i.matrix();
    const Eigen::Matrix2cd oj = obs_j.matrix();
    OutcomeDistribution dist;
    for (int ci = 0; ci < 2; ++ci) {
        const double c = ci == 0 ? 1.0 : -1.0;
        const Eigen::Matrix2cd proj_i = 0.5 * (id + c * oi);
        const Eigen::VectorXcd phi = state.apply_site_op(site_i, proj_i);
        for (int vi = 0; vi < 2; ++vi) {
            const double v = vi == 0 ? 1.0 : -1.0;
            const Eigen::Matrix2cd proj_j = 0.5 * (id + v * oj);
            Eigen::VectorXcd chi = phi;
            apply_op_in_place(chi, state.num_sites(), site_j, proj_j);
            double prob = state.amplitudes().dot(chi).real();
            if (prob < 0.0 && prob > -1e-12) prob = 0.0;
            dist.p[ci][vi] = prob;
        }
    }
    return dist;
}

OutcomeDistribution distribution_from_correlator(double rho) {
    if (std::abs(rho) > 1.0)
        throw std::invalid_argument("distribution_from_correlator: |rho| must be <= 1");
    OutcomeDistribution dist;
    dist.p[0][0] = dist.p[1][1] = (1.0 + rho) / 4.0;
    dist.p[0][1] = dist.p[1][0] = (1.0 - rho) / 4.0;
    return dist;
}

MiniGameSample sample_minigame(const OutcomeDistribution& dist, int a, int b, Rng& rng) {
    const double u = rng.uniform();
    int c = -1, v = -1;
    double acc = 0.0;
    bool chosen = false;
    for (int ci = 0; ci < 2 && !chosen; ++ci) {
        for (int vi = 0; vi < 2 && !chosen; ++vi) {
            acc += dist.p[ci][vi];
            if (u < acc) {
                c = ci == 0 ? 1 : -1;
                v = vi == 0 ? 1 : -1;
                chosen = true;
            }
        }
    }
    // u >= total mass (roundoff): the (-1,-1) default above applies.
    const int sign = (a & b) ? -1 : 1;
    return MiniGameSample{c, v, sign * c * v};
}

TsirelsonProfiles tsirelson_profile() {
    TsirelsonProfiles t;
    t.prey = StrategyProfile{Observable::plane(0.0), Observable::plane(M_PI / 2.0)};
    t.predator = StrategyProfile{Observable::plane(M_PI / 4.0), Observable::plane(-M_PI / 4.0)};
    return t;
}

MonogamyVerdict check_monogamy(std::span<const double> bell_params, double tol) {
    if (bell_params.empty())
        throw std::invalid_argument("check_monogamy: empty parameter list");
    MonogamyVerdict v;
    for (double b : bell_params) {
        v.sum_of_squares += b * b;
        v.sum_of_abs += std::abs(b);
    }
    const double n = static_cast<double>(bell_params.size());
    v.feasible = v.sum_of_squares <= 8.0 + tol &&
                 v.sum_of_abs <= 2.0 * std::sqrt(2.0 * n) + tol;
    return v;
}

} // namespace qlv::quantum
