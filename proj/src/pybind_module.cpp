#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qlv/agents.hpp"
#include "qlv/dynamics.hpp"
#include "qlv/network.hpp"
#include "qlv/quantum.hpp"
#include "qlv/rng.hpp"
#include "qlv/version.hpp"

namespace py = pybind11;
using namespace qlv;

namespace {

quantum::BellKind bell_kind(const std::string& kind) {
    if (kind == "phi_plus") return quantum::BellKind::phi_plus;
    if (kind == "psi_plus") return quantum::BellKind::psi_plus;
    throw py::value_error("kind must be 'phi_plus' or 'psi_plus'");
}

network::SignConvention convention(const std::string& name) {
    if (name == "uniform") return network::SignConvention::uniform;
    if (name == "chsh_signed") return network::SignConvention::chsh_signed;
    throw py::value_error("convention must be 'uniform' or 'chsh_signed'");
}

quantum::CorrelatorTable make_table(const std::array<std::array<double, 2>, 2>& rho) {
    quantum::CorrelatorTable t;
    t.rho = rho;
    return t;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "quantum-game Lotka-Volterra toolkit";
    m.attr("__version__") = kToolVersion;

    // ---- quantum ----
    py::class_<quantum::Observable>(m, "Observable")
        .def_static("plane", &quantum::Observable::plane, py::arg("angle"))
        .def_static("bloch", &quantum::Observable::bloch, py::arg("nx"), py::arg("ny"),
                    py::arg("nz"), py::arg("sign") = 1.0)
        .def_property_readonly("angle", &quantum::Observable::angle)
        .def_property_readonly("sign", &quantum::Observable::sign)
        .def("matrix", &quantum::Observable::matrix);

    py::class_<quantum::StrategyProfile>(m, "StrategyProfile")
        .def(py::init([](const quantum::Observable& o0, const quantum::Observable& o1) {
                 return quantum::StrategyProfile{o0, o1};
             }),
             py::arg("obs0"), py::arg("obs1"))
        .def_readonly("obs0", &quantum::StrategyProfile::obs0)
        .def_readonly("obs1", &quantum::StrategyProfile::obs1);

    py::class_<quantum::PureState>(m, "PureState")
        .def(py::init<int, Eigen::VectorXcd>(), py::arg("num_sites"), py::arg("amplitudes"))
        .def_property_readonly("num_sites", &quantum::PureState::num_sites)
        .def_property_readonly("amplitudes", &quantum::PureState::amplitudes);

    m.def(
        "bell_state", [](const std::string& kind) { return quantum::bell_state(bell_kind(kind)); },
        py::arg("kind") = "phi_plus");
    m.def(
        "random_state",
        [](int num_sites, std::uint64_t seed) {
            Rng rng(seed);
            return quantum::PureState::random(num_sites, rng);
        },
        py::arg("num_sites"), py::arg("seed"));
    m.def("correlator", &quantum::correlator, py::arg("state"), py::arg("site_i"),
          py::arg("obs_i"), py::arg("site_j"), py::arg("obs_j"));
    m.def("local_uncertainty", &quantum::local_uncertainty, py::arg("state"),
          py::arg("site"), py::arg("profile"));
    m.def(
        "chsh_parameter",
        [](const std::array<std::array<double, 2>, 2>& rho) {
            return quantum::chsh_parameter(make_table(rho));
        },
        py::arg("rho"));
    m.def(
        "correlator_table",
        [](const quantum::PureState& state, int prey_site,
           const quantum::StrategyProfile& prey, int predator_site,
           const quantum::StrategyProfile& predator) {
            return quantum::correlator_table(state, prey_site, prey, predator_site, predator)
                .rho;
        },
        py::arg("state"), py::arg("prey_site"), py::arg("prey"), py::arg("predator_site"),
        py::arg("predator"));
    m.def(
        "joint_outcome_distribution",
        [](const quantum::PureState& state, int site_i, const quantum::Observable& obs_i,
           int site_j, const quantum::Observable& obs_j) {
            return quantum::joint_outcome_distribution(state, site_i, obs_i, site_j, obs_j)
                .p;
        },
        py::arg("state"), py::arg("site_i"), py::arg("obs_i"), py::arg("site_j"),
        py::arg("obs_j"));
    m.def("tsirelson_profile", [] {
        const auto t = quantum::tsirelson_profile();
        return std::make_pair(t.prey, t.predator);
    });
    m.def(
        "check_monogamy",
        [](const std::vector<double>& bell, double tol) {
            const auto v = quantum::check_monogamy(bell, tol);
            return py::dict(py::arg("sum_of_squares") = v.sum_of_squares,
                            py::arg("sum_of_abs") = v.sum_of_abs,
                            py::arg("feasible") = v.feasible);
        },
        py::arg("bell_params"), py::arg("tol") = 1e-9);

    // ---- dynamics ----
    py::class_<dynamics::ThetaFamily>(m, "ThetaFamily")
        .def_readonly("n", &dynamics::ThetaFamily::n)
        .def_readonly("beta", &dynamics::ThetaFamily::beta)
        .def_readonly("theta", &dynamics::ThetaFamily::theta)
        .def_readonly("b1", &dynamics::ThetaFamily::b1)
        .def_readonly("b", &dynamics::ThetaFamily::b)
        .def_readonly("delta", &dynamics::ThetaFamily::delta)
        .def_property_readonly("theta_max", &dynamics::ThetaFamily::theta_max);

    m.def("theta_family", &dynamics::theta_family, py::arg("n"), py::arg("beta"),
          py::arg("theta"), py::arg("delta"));
    m.def(
        "lv_vector_field",
        [](double gamma, const Eigen::VectorXd& zeta, double beta, const Eigen::VectorXd& B,
           double c, const Eigen::VectorXd& v) {
            dynamics::LVParams p;
            p.gamma = gamma;
            p.zeta = zeta;
            p.beta = beta;
            p.B = B;
            p.validate();
            dynamics::PopulationState pop;
            pop.c = c;
            pop.v = v;
            const auto d = dynamics::lv_vector_field(p, pop);
            return std::make_pair(d.dc, d.dv);
        },
        py::arg("gamma"), py::arg("zeta"), py::arg("beta"), py::arg("B"), py::arg("c"),
        py::arg("v"));
    m.def(
        "integrate",
        [](double gamma, const Eigen::VectorXd& zeta, double beta, const Eigen::VectorXd& B,
           double c0, const Eigen::VectorXd& v0, double dt, int steps) {
            dynamics::LVParams p;
            p.gamma = gamma;
            p.zeta = zeta;
            p.beta = beta;
            p.B = B;
            p.validate();
            dynamics::PopulationState init;
            init.c = c0;
            init.v = v0;
            const auto traj = dynamics::integrate(p, init, dt, steps);
            Eigen::MatrixXd states(traj.states.size(), v0.size() + 1);
            for (std::size_t i = 0; i < traj.states.size(); ++i) {
                states(i, 0) = traj.states[i].c;
                states.row(i).tail(v0.size()) = traj.states[i].v;
            }
            return std::make_pair(traj.times, states);
        },
        py::arg("gamma"), py::arg("zeta"), py::arg("beta"), py::arg("B"), py::arg("c0"),
        py::arg("v0"), py::arg("dt"), py::arg("steps"));
    m.def(
        "jacobian",
        [](double gamma, const Eigen::VectorXd& zeta, double beta, const Eigen::VectorXd& B,
           double c, const Eigen::VectorXd& v) {
            dynamics::LVParams p;
            p.gamma = gamma;
            p.zeta = zeta;
            p.beta = beta;
            p.B = B;
            p.validate();
            dynamics::PopulationState pop;
            pop.c = c;
            pop.v = v;
            return dynamics::jacobian(p, pop);
        },
        py::arg("gamma"), py::arg("zeta"), py::arg("beta"), py::arg("B"), py::arg("c"),
        py::arg("v"));
    m.def(
        "lyapunov_spectrum",
        [](double gamma, const Eigen::VectorXd& zeta, double beta, const Eigen::VectorXd& B,
           double c, const Eigen::VectorXd& v) {
            dynamics::LVParams p;
            p.gamma = gamma;
            p.zeta = zeta;
            p.beta = beta;
            p.B = B;
            p.validate();
            dynamics::PopulationState pop;
            pop.c = c;
            pop.v = v;
            return dynamics::lyapunov_spectrum(p, pop);
        },
        py::arg("gamma"), py::arg("zeta"), py::arg("beta"), py::arg("B"), py::arg("c"),
        py::arg("v"));
    m.def(
        "cubic_lyapunov",
        [](const dynamics::ThetaFamily& f, double zeta, double gamma, double c, double v) {
            const auto roots = dynamics::cubic_lyapunov(f, zeta, gamma, c, v);
            return std::vector<std::complex<double>>(roots.begin(), roots.end());
        },
        py::arg("family"), py::arg("zeta"), py::arg("gamma"), py::arg("c") = 1.0,
        py::arg("v") = 1.0);
    m.def("lambda_h", &dynamics::lambda_h, py::arg("beta"), py::arg("c"), py::arg("bell"),
          py::arg("zeta"));
    m.def(
        "reduced_equal_correlated",
        [](int n, double beta, double gamma, double zeta) {
            const auto lam = dynamics::reduced_equal_correlated(n, beta, gamma, zeta);
            return std::make_pair(lam[0], lam[1]);
        },
        py::arg("n"), py::arg("beta"), py::arg("gamma"), py::arg("zeta"));
    m.def("critical_delta", &dynamics::critical_delta, py::arg("beta"));
    m.def("complex_pair_window", &dynamics::complex_pair_window, py::arg("n"),
          py::arg("beta"));
    m.def(
        "critical_theta",
        [](int n, double beta, double gamma, double zeta, double resolution) {
            const auto r = dynamics::critical_theta(n, beta, gamma, zeta, resolution);
            const char* status = r.status == dynamics::CriticalThetaStatus::bracketed
                                     ? "bracketed"
                                     : (r.status == dynamics::CriticalThetaStatus::all_negative
                                            ? "all_negative"
                                            : "all_positive");
            return std::make_pair(r.theta_s, std::string(status));
        },
        py::arg("n"), py::arg("beta"), py::arg("gamma"), py::arg("zeta"),
        py::arg("resolution") = 1e-4);
    m.def(
        "critical_n",
        [](double beta, double gamma, double zeta, const std::string& theta_rule,
           double angle, long cap) {
            const auto rule = theta_rule == "max" ? dynamics::ThetaRule::max()
                                                  : dynamics::ThetaRule::fixed(angle);
            return dynamics::critical_n(beta, gamma, zeta, rule, cap);
        },
        py::arg("beta"), py::arg("gamma"), py::arg("zeta"), py::arg("theta_rule") = "max",
        py::arg("angle") = 0.0, py::arg("cap") = 1000000L);

    // ---- agents ----
    m.def(
        "run_simulation",
        [](int n, int pieces_per_player, double gamma, double zeta, double dt,
           double step_sigma, double interaction_radius, std::size_t max_pieces, int steps,
           const std::vector<double>& bell, std::uint64_t seed) {
            agents::WorldConfig c;
            c.n = n;
            c.initial_pieces_per_player = pieces_per_player;
            c.gamma = gamma;
            c.zeta = Eigen::VectorXd::Constant(n, zeta);
            c.dt = dt;
            c.step_sigma = step_sigma;
            c.interaction_radius = interaction_radius;
            c.max_pieces = max_pieces;
            c.steps = steps;
            std::vector<quantum::CorrelatorTable> tables;
            for (double b : bell) tables.push_back(quantum::table_from_bell(b));
            c.source = std::move(tables);
            const auto r = agents::run_simulation(c, seed);
            const char* status = r.status == agents::RunStatus::completed
                                     ? "completed"
                                     : (r.status == agents::RunStatus::predators_extinct
                                            ? "predators_extinct"
                                            : "capacity_halt");
            return py::dict(py::arg("status") = std::string(status),
                            py::arg("steps_run") = r.steps_run,
                            py::arg("counts") = r.counts);
        },
        py::arg("n"), py::arg("pieces_per_player"), py::arg("gamma"), py::arg("zeta"),
        py::arg("dt"), py::arg("step_sigma"), py::arg("interaction_radius"),
        py::arg("max_pieces"), py::arg("steps"), py::arg("bell"), py::arg("seed"));
    m.def(
        "default_world_run",
        [](int n, const std::vector<double>& bell, std::uint64_t seed) {
            agents::WorldConfig c = agents::WorldConfig::defaults(n);
            std::vector<quantum::CorrelatorTable> tables;
            for (double b : bell) tables.push_back(quantum::table_from_bell(b));
            c.source = std::move(tables);
            const auto r = agents::run_simulation(c, seed);
            const char* status = r.status == agents::RunStatus::completed
                                     ? "completed"
                                     : (r.status == agents::RunStatus::predators_extinct
                                            ? "predators_extinct"
                                            : "capacity_halt");
            return py::dict(py::arg("status") = std::string(status),
                            py::arg("steps_run") = r.steps_run,
                            py::arg("counts") = r.counts);
        },
        py::arg("n"), py::arg("bell"), py::arg("seed"));

    // ---- network ----
    py::class_<network::RandomGraph>(m, "RandomGraph")
        .def_property_readonly("n", [](const network::RandomGraph& g) { return g.n; })
        .def_property_readonly("p", [](const network::RandomGraph& g) { return g.p; })
        .def_static("triangle3", &network::RandomGraph::triangle3);

    m.def("sample_graph", &network::sample_graph, py::arg("n"), py::arg("p"),
          py::arg("seed"));
    m.def(
        "build_matrix",
        [](const network::RandomGraph& g, double rho, double eta, const std::string& conv) {
            return network::build_matrix(g, rho, eta, convention(conv));
        },
        py::arg("graph"), py::arg("rho"), py::arg("eta"),
        py::arg("convention") = "chsh_signed");
    m.def("is_psd", &network::is_psd, py::arg("matrix"), py::arg("tol") = 1e-10);
    m.def(
        "rho_star",
        [](const network::RandomGraph& g, double eta, const std::string& conv, double tol) {
            return network::rho_star(g, eta, convention(conv), tol);
        },
        py::arg("graph"), py::arg("eta"), py::arg("convention") = "chsh_signed",
        py::arg("tol") = 1e-8);
    m.def(
        "g_bound", [](double eta, double p) { return network::g_bound(eta, p).value; },
        py::arg("eta"), py::arg("p"));
    m.def(
        "wigner_semicircle_cdf",
        [](double a, const std::string& norm) {
            return network::wigner_semicircle_cdf(
                a, norm == "full" ? network::WscNormalization::full
                                  : network::WscNormalization::half);
        },
        py::arg("a"), py::arg("normalization") = "half");
    m.def("giant_component_fraction", &network::giant_component_fraction, py::arg("graph"));
}
