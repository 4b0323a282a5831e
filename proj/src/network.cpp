#include "qlv/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "qlv/errors.hpp"
#include "qlv/parallel.hpp"

namespace qlv::network {

RandomGraph RandomGraph::triangle3() {
    RandomGraph g;
    g.n = 1;
    g.p = 1.0;
    g.adj.assign(1, 0);
    g.terminal[0].assign(1, 1);
    g.terminal[1].assign(1, 1);
    return g;
}

RandomGraph sample_graph(int n, double p, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample_graph: n must be >= 0");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("sample_graph: p must be in [0, 1]");
    RandomGraph g;
    g.n = n;
    g.p = p;
    g.adj.assign(static_cast<std::size_t>(n) * n, 0);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.bernoulli(p)) {
                g.adj[static_cast<std::size_t>(i) * n + j] = 1;
                g.adj[static_cast<std::size_t>(j) * n + i] = 1;
            }
        }
    }
    for (int a = 0; a < 2; ++a) {
        g.terminal[a].assign(n, 0);
        for (int i = 0; i < n; ++i) g.terminal[a][i] = rng.bernoulli(p) ? 1 : 0;
    }
    return g;
}

Eigen::MatrixXd build_matrix(const RandomGraph& graph, double rho, double eta,
                             SignConvention convention) {
    if (std::abs(rho) > 1.0) throw std::invalid_argument("build_matrix: |rho| must be <= 1");
    if (std::abs(eta) > 1.0) throw std::invalid_argument("build_matrix: |eta| must be <= 1");
    const int n = graph.n;
    const int dim = n + 2;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (graph.edge(i, j)) m(i, j) = m(j, i) = rho;
    for (int a = 0; a < 2; ++a) {
        const double value =
            (convention == SignConvention::chsh_signed && a == 1) ? -rho : rho;
        const int row = n + a;
        for (int i = 0; i < n; ++i)
            if (graph.terminal[a][i]) m(i, row) = m(row, i) = value;
    }
    m(n, n + 1) = m(n + 1, n) = eta;
    return m;
}

bool is_psd(const Eigen::MatrixXd& matrix, double tol) {
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("is_psd: matrix must be square");
    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw std::invalid_argument("is_psd: matrix must be symmetric");
    if (!(tol >= 0.0)) throw std::invalid_argument("is_psd: tol must be >= 0");
    Eigen::MatrixXd shifted = matrix;
    shifted.diagonal().array() += tol;
    const Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    return llt.info() == Eigen::Success;
}

double rho_star(const RandomGraph& graph, double eta, SignConvention convention,
                double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("rho_star: tol must be > 0");
    const double psd_tol = 1e-10;
    auto feasible = [&](double rho) {
        return is_psd(build_matrix(graph, rho, eta, convention), psd_tol);
    };

    if (feasible(1.0)) return 1.0;
    double lo = 0.0; // rho = 0 leaves identity plus the eta block: always PSD
    double hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    const double star = 0.5 * (lo + hi);

    // bisection certificate; a non-monotone bracket is rescanned on a grid
    const bool ok_lo = star - tol <= 0.0 || feasible(star - tol);
    const bool ok_hi = !feasible(star + tol);
    if (ok_lo && ok_hi) return star;
    for (double rho = 1.0; rho >= 0.0; rho -= tol)
        if (feasible(rho)) return rho;
    return 0.0;
}

GBound g_bound(double eta, double p) {
    if (std::abs(eta) > 1.0) throw std::invalid_argument("g_bound: |eta| must be <= 1");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("g_bound: p must be in [0, 1]");
    GBound out;
    if (p == 1.0) {
        out.p_is_one = true;
        out.value = std::min(1.0, (1.0 + eta) / 2.0);
        return out;
    }
    out.value = std::min({1.0, (1.0 - eta) / (1.0 - p), (1.0 + eta) / (1.0 + p)});
    return out;
}

double wigner_semicircle_cdf(double a, WscNormalization norm) {
    double value;
    if (a <= 0.0) {
        value = 0.0;
    } else {
        const double x = std::min(a, 2.0);
        value = (x * std::sqrt(4.0 - x * x) / 2.0 + 2.0 * std::asin(x / 2.0)) / M_PI;
    }
    return norm == WscNormalization::half ? value : value / 2.0;
}

double giant_component_fraction(const RandomGraph& graph) {
    const int nodes = graph.num_species();
    std::vector<int> parent(nodes);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int> size(nodes, 1);

    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    };

    const int n = graph.n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (graph.edge(i, j)) unite(i, j);
    for (int i = 0; i < n; ++i)
        if (graph.terminal[0][i] || graph.terminal[1][i]) unite(i, n);

    int largest = 0;
    for (int i = 0; i < nodes; ++i)
        if (find(i) == i) largest = std::max(largest, size[i]);
    return double(largest) / double(nodes);
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

ScalingReport scaling_experiment(const std::vector<int>& n_list, const PRule& p_rule,
                                 const std::vector<double>& eta_list, int samples,
                                 std::uint64_t seed, SignConvention convention,
                                 unsigned threads, double tol) {
    if (samples < 1) throw ConfigError("scaling_experiment: samples must be >= 1");
    if (n_list.empty() || eta_list.empty())
        throw ConfigError("scaling_experiment: empty grid");

    ScalingReport report;
    report.cells.resize(n_list.size() * eta_list.size());

    const std::size_t tasks = n_list.size() * eta_list.size() * samples;
    std::vector<double> rho(tasks, 0.0);
    parallel_for(tasks, threads, [&](std::size_t task) {
        const std::size_t sample = task % samples;
        const std::size_t cell = task / samples;
        const std::size_t eta_idx = cell % eta_list.size();
        const std::size_t n_idx = cell / eta_list.size();
        const int n = n_list[n_idx];
        const double p = p_rule.resolve(n);
        // graph seed is independent of eta: the same graphs back every eta
        const std::uint64_t graph_seed = derive_seed(seed, n_idx * samples + sample);
        const RandomGraph g = sample_graph(n, p, graph_seed);
        rho[task] = rho_star(g, eta_list[eta_idx], convention, tol);
    });

    for (std::size_t n_idx = 0; n_idx < n_list.size(); ++n_idx) {
        for (std::size_t eta_idx = 0; eta_idx < eta_list.size(); ++eta_idx) {
            const std::size_t cell = n_idx * eta_list.size() + eta_idx;
            ScalingCell& out = report.cells[cell];
            out.n = n_list[n_idx];
            out.eta = eta_list[eta_idx];
            out.p = p_rule.resolve(out.n);
            out.rho_samples.assign(rho.begin() + cell * samples,
                                   rho.begin() + (cell + 1) * samples);
            out.median_rho = median(out.rho_samples);
            const double scale = std::sqrt(double(out.n) * out.p);
            std::vector<double> scaled(out.rho_samples);
            for (double& x : scaled) x *= scale;
            out.median_scaled = median(scaled);
            out.g_bound_value = g_bound(out.eta, out.p).value;
        }
    }

    // least-squares K for median_scaled ~ K*sqrt(1-eta), at the largest n
    std::size_t best_n_idx = 0;
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] > n_list[best_n_idx]) best_n_idx = i;
    double num = 0.0, den = 0.0;
    for (std::size_t eta_idx = 0; eta_idx < eta_list.size(); ++eta_idx) {
        const auto& cell = report.cells[best_n_idx * eta_list.size() + eta_idx];
        const double s = std::sqrt(std::max(0.0, 1.0 - cell.eta));
        num += cell.median_scaled * s;
        den += s * s;
    }
    report.fitted_k = den > 0.0 ? num / den : 0.0;
    return report;
}

} // namespace qlv::network
