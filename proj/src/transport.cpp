#include "nestedot/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "nestedot/errors.hpp"

namespace nestedot {

std::vector<double> Coupling::row_sums() const {
    std::vector<double> r(static_cast<std::size_t>(rows), 0.0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) r[static_cast<std::size_t>(i)] += at(i, j);
    return r;
}

std::vector<double> Coupling::col_sums() const {
    std::vector<double> c(static_cast<std::size_t>(cols), 0.0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) c[static_cast<std::size_t>(j)] += at(i, j);
    return c;
}

void validate_coupling(const Coupling& plan, const std::vector<double>& source_weights,
                       const std::vector<double>& target_weights, double tol) {
    if (plan.rows != static_cast<int>(source_weights.size()) ||
        plan.cols != static_cast<int>(target_weights.size()))
        throw InputError("marginal mismatch: coupling shape");
    for (double m : plan.mass)
        if (m < -tol) throw InputError("marginal mismatch: negative mass");
    const auto r = plan.row_sums();
    const auto c = plan.col_sums();
    for (std::size_t i = 0; i < r.size(); ++i)
        if (std::abs(r[i] - source_weights[i]) > tol) throw InputError("marginal mismatch: row sums");
    for (std::size_t j = 0; j < c.size(); ++j)
        if (std::abs(c[j] - target_weights[j]) > tol) throw InputError("marginal mismatch: column sums");
}

namespace {

constexpr double kReducedCostTol = 1e-11;

struct TransportTableau {
    int m = 0, n = 0;
    std::vector<double> cost;  // m*n
    std::vector<double> flow;  // m*n
    std::vector<char> basic;   // m*n
    std::vector<double> u, v;  // dual potentials

    double& f(int i, int j) { return flow[static_cast<std::size_t>(i) * n + j]; }
    double c(int i, int j) const { return cost[static_cast<std::size_t>(i) * n + j]; }
    bool is_basic(int i, int j) const { return basic[static_cast<std::size_t>(i) * n + j] != 0; }
    void set_basic(int i, int j, bool b) { basic[static_cast<std::size_t>(i) * n + j] = b ? 1 : 0; }
};

// Northwest-corner start: exactly m+n-1 basic cells forming a spanning tree.
void northwest_init(TransportTableau& t, const std::vector<double>& a, const std::vector<double>& b) {
    int i = 0, j = 0;
    double ra = a[0], rb = b[0];
    const int steps = t.m + t.n - 1;
    for (int s = 0; s < steps; ++s) {
        t.set_basic(i, j, true);
        const double f = std::min(ra, rb);
        t.f(i, j) = f;
        ra -= f;
        rb -= f;
        if (s == steps - 1) break;
        bool move_down;
        if (i == t.m - 1) move_down = false;
        else if (j == t.n - 1) move_down = true;
        else move_down = (ra == 0.0);
        if (move_down) {
            ++i;
            ra = a[static_cast<std::size_t>(i)];
        } else {
            ++j;
            rb = b[static_cast<std::size_t>(j)];
        }
    }
}

// Potentials from the basis tree: u[0] = 0, u_i + v_j = c_ij on basic cells.
void compute_potentials(TransportTableau& t) {
    const double unset = std::numeric_limits<double>::infinity();
    std::fill(t.u.begin(), t.u.end(), unset);
    std::fill(t.v.begin(), t.v.end(), unset);
    t.u[0] = 0.0;
    int assigned = 1;
    const int total = t.m + t.n;
    while (assigned < total) {
        bool progress = false;
        for (int i = 0; i < t.m; ++i) {
            for (int j = 0; j < t.n; ++j) {
                if (!t.is_basic(i, j)) continue;
                const bool ui = t.u[static_cast<std::size_t>(i)] != unset;
                const bool vj = t.v[static_cast<std::size_t>(j)] != unset;
                if (ui && !vj) {
                    t.v[static_cast<std::size_t>(j)] = t.c(i, j) - t.u[static_cast<std::size_t>(i)];
                    ++assigned;
                    progress = true;
                } else if (!ui && vj) {
                    t.u[static_cast<std::size_t>(i)] = t.c(i, j) - t.v[static_cast<std::size_t>(j)];
                    ++assigned;
                    progress = true;
                }
            }
        }
        if (!progress) throw InputError("transport basis is not a spanning tree");
    }
}

// Unique tree path from row node i0 to column node j0, returned as the
// alternating cell sequence (i0,j_1), (i_1,j_1), (i_1,j_2), ...
std::vector<std::pair<int, int>> basis_path(const TransportTableau& t, int i0, int j0) {
    const int total = t.m + t.n;  // rows 0..m-1, cols m..m+n-1
    std::vector<int> parent(static_cast<std::size_t>(total), -2);
    std::vector<int> stack{i0};
    parent[static_cast<std::size_t>(i0)] = -1;
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        if (node == t.m + j0) break;
        if (node < t.m) {
            for (int j = 0; j < t.n; ++j) {
                if (t.is_basic(node, j) && parent[static_cast<std::size_t>(t.m + j)] == -2) {
                    parent[static_cast<std::size_t>(t.m + j)] = node;
                    stack.push_back(t.m + j);
                }
            }
        } else {
            const int j = node - t.m;
            for (int i = 0; i < t.m; ++i) {
                if (t.is_basic(i, j) && parent[static_cast<std::size_t>(i)] == -2) {
                    parent[static_cast<std::size_t>(i)] = node;
                    stack.push_back(i);
                }
            }
        }
    }
    if (parent[static_cast<std::size_t>(t.m + j0)] == -2)
        throw InputError("transport basis is disconnected");
    std::vector<int> nodes;
    for (int node = t.m + j0; node != -1; node = parent[static_cast<std::size_t>(node)])
        nodes.push_back(node);
    std::reverse(nodes.begin(), nodes.end());
    std::vector<std::pair<int, int>> cells;
    cells.reserve(nodes.size() - 1);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        const int x = nodes[k], y = nodes[k + 1];
        if (x < t.m) cells.emplace_back(x, y - t.m);
        else cells.emplace_back(y, x - t.m);
    }
    return cells;
}

// Exact transportation simplex on the dense problem. Deterministic pivoting:
// most-negative reduced cost with lexicographic tie-break, switching to
// Bland's rule after m+n consecutive degenerate pivots.
void run_simplex(TransportTableau& t, const std::vector<double>& a, const std::vector<double>& b) {
    northwest_init(t, a, b);
    const long max_iters = 1000L * (t.m + t.n) + 1000L;
    int degenerate_streak = 0;
    for (long iter = 0; iter < max_iters; ++iter) {
        compute_potentials(t);
        const bool bland = degenerate_streak > t.m + t.n;
        int ei = -1, ej = -1;
        double best = -kReducedCostTol;
        for (int i = 0; i < t.m && (ei < 0 || !bland); ++i) {
            for (int j = 0; j < t.n; ++j) {
                if (t.is_basic(i, j)) continue;
                const double rc =
                    t.c(i, j) - t.u[static_cast<std::size_t>(i)] - t.v[static_cast<std::size_t>(j)];
                if (rc < best) {
                    best = rc;
                    ei = i;
                    ej = j;
                    if (bland) break;
                }
            }
        }
        if (ei < 0) return;  // optimal

        auto path = basis_path(t, ei, ej);
        // entering cell gets +theta; path cells alternate starting with -theta.
        // ties on theta break lexicographically, which together with the
        // Bland entering rule guarantees termination under degeneracy
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = 0;
        for (std::size_t k = 0; k < path.size(); k += 2) {
            const double f = t.f(path[k].first, path[k].second);
            if (f < theta || (f == theta && path[k] < path[leave])) {
                theta = f;
                leave = k;
            }
        }
        for (std::size_t k = 0; k < path.size(); ++k) {
            double& f = t.f(path[k].first, path[k].second);
            f += (k % 2 == 0) ? -theta : theta;
            if (f < 0.0) f = 0.0;
        }
        t.f(ei, ej) = theta;
        t.set_basic(ei, ej, true);
        t.f(path[leave].first, path[leave].second) = 0.0;
        t.set_basic(path[leave].first, path[leave].second, false);
        degenerate_streak = (theta <= 0.0) ? degenerate_streak + 1 : 0;
    }
    throw InputError("transport simplex exceeded iteration cap");
}

std::vector<int> positive_indices(const std::vector<double>& w) {
    std::vector<int> idx;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] < 0.0) throw InputError("negative weight");
        if (w[k] > 0.0) idx.push_back(static_cast<int>(k));
    }
    return idx;
}

}  // namespace

TransportLPResult solve_transport_lp(const std::vector<double>& a, const std::vector<double>& b,
                                     const std::vector<double>& cost) {
    const int M = static_cast<int>(a.size());
    const int N = static_cast<int>(b.size());
    if (cost.size() != static_cast<std::size_t>(M) * N) throw InputError("cost table shape mismatch");
    // zero margins are dropped before the solve and reinstated after
    const std::vector<int> rows = positive_indices(a);
    const std::vector<int> cols = positive_indices(b);
    const int m = static_cast<int>(rows.size());
    const int n = static_cast<int>(cols.size());
    if (m == 0 || n == 0) throw InputError("empty margins");

    TransportTableau t;
    t.m = m;
    t.n = n;
    t.cost.resize(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            t.cost[static_cast<std::size_t>(i) * n + j] =
                cost[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)]) * N + cols[static_cast<std::size_t>(j)]];
    t.flow.assign(static_cast<std::size_t>(m) * n, 0.0);
    t.basic.assign(static_cast<std::size_t>(m) * n, 0);
    t.u.assign(static_cast<std::size_t>(m), 0.0);
    t.v.assign(static_cast<std::size_t>(n), 0.0);

    std::vector<double> sa, sb;
    sa.reserve(static_cast<std::size_t>(m));
    sb.reserve(static_cast<std::size_t>(n));
    for (int i : rows) sa.push_back(a[static_cast<std::size_t>(i)]);
    for (int j : cols) sb.push_back(b[static_cast<std::size_t>(j)]);
    run_simplex(t, sa, sb);

    TransportLPResult out;
    out.plan = Coupling(M, N);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            const double f = t.f(i, j);
            if (f > 0.0) {
                out.plan.at(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]) = f;
                total += f * t.c(i, j);
            }
        }
    }
    out.cost = total;
    out.u.assign(static_cast<std::size_t>(M), 0.0);
    out.v.assign(static_cast<std::size_t>(N), 0.0);
    for (int i = 0; i < m; ++i)
        out.u[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] = t.u[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j)
        out.v[static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])] = t.v[static_cast<std::size_t>(j)];
    return out;
}

namespace {

std::vector<double> pairwise_costs(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    std::vector<double> c;
    c.reserve(mu.size() * nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j)
            c.push_back(metric_pow(dist2(mu.atom(i), nu.atom(j)), p));
    return c;
}

bool is_uniform(const std::vector<double>& w) {
    for (double x : w)
        if (std::abs(x - w.front()) > 1e-12) return false;
    return true;
}

double permutation_oracle(const std::vector<double>& c, int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s += c[static_cast<std::size_t>(i) * n + perm[static_cast<std::size_t>(i)]];
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / static_cast<double>(n);
}

// Flow solve for one spanning tree by leaf elimination; returns false when
// some flow would be negative (infeasible vertex).
bool tree_flow_cost(const std::vector<std::pair<int, int>>& edges, int m, int n,
                    const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<double>& c, double& cost_out) {
    const int total = m + n;
    std::array<double, 16> residual{};
    for (int i = 0; i < m; ++i) residual[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) residual[static_cast<std::size_t>(m + j)] = b[static_cast<std::size_t>(j)];
    std::array<std::array<int, 8>, 16> adj{};
    std::array<int, 16> adj_len{};
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int r = edges[e].first, col = m + edges[e].second;
        adj[static_cast<std::size_t>(r)][static_cast<std::size_t>(adj_len[static_cast<std::size_t>(r)]++)] = static_cast<int>(e);
        adj[static_cast<std::size_t>(col)][static_cast<std::size_t>(adj_len[static_cast<std::size_t>(col)]++)] = static_cast<int>(e);
    }
    std::array<char, 9> used{};
    std::array<int, 16> deg = adj_len;
    std::array<int, 16> leaves{};
    int n_leaves = 0;
    for (int v = 0; v < total; ++v)
        if (deg[static_cast<std::size_t>(v)] == 1) leaves[static_cast<std::size_t>(n_leaves++)] = v;
    double cost = 0.0;
    int processed = 0;
    while (n_leaves > 0) {
        const int v = leaves[static_cast<std::size_t>(--n_leaves)];
        if (deg[static_cast<std::size_t>(v)] != 1) continue;
        int eidx = -1;
        for (int k = 0; k < adj_len[static_cast<std::size_t>(v)]; ++k) {
            const int e = adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
            if (!used[static_cast<std::size_t>(e)]) {
                eidx = e;
                break;
            }
        }
        if (eidx < 0) break;
        used[static_cast<std::size_t>(eidx)] = 1;
        const double f = residual[static_cast<std::size_t>(v)];
        if (f < -1e-12) return false;
        const int r = edges[static_cast<std::size_t>(eidx)].first;
        const int col = m + edges[static_cast<std::size_t>(eidx)].second;
        const int other = (v == r) ? col : r;
        residual[static_cast<std::size_t>(other)] -= f;
        residual[static_cast<std::size_t>(v)] = 0.0;
        cost += f * c[static_cast<std::size_t>(r) * n + edges[static_cast<std::size_t>(eidx)].second];
        deg[static_cast<std::size_t>(v)] = 0;
        --deg[static_cast<std::size_t>(other)];
        if (deg[static_cast<std::size_t>(other)] == 1) leaves[static_cast<std::size_t>(n_leaves++)] = other;
        ++processed;
    }
    if (processed != static_cast<int>(edges.size())) return false;
    cost_out = cost;
    return true;
}

struct TreeEnumerator {
    int m = 0, n = 0;
    const std::vector<double>* a = nullptr;
    const std::vector<double>* b = nullptr;
    const std::vector<double>* c = nullptr;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> chosen;

    static int find(std::array<int, 16>& parent, int x) {
        while (parent[static_cast<std::size_t>(x)] != x)
            x = parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    }

    // Enumerates acyclic cell subsets in increasing index order; every
    // spanning tree (= basic solution support) appears exactly once.
    void recurse(int next_cell, int edges_left, const std::array<int, 16>& parent) {
        if (edges_left == 0) {
            double cost = 0.0;
            if (tree_flow_cost(chosen, m, n, *a, *b, *c, cost)) best = std::min(best, cost);
            return;
        }
        const int cells = m * n;
        for (int cell = next_cell; cell <= cells - edges_left; ++cell) {
            const int i = cell / n, j = cell % n;
            std::array<int, 16> pcopy = parent;
            const int ri = find(pcopy, i), rj = find(pcopy, m + j);
            if (ri == rj) continue;  // would close a cycle
            pcopy[static_cast<std::size_t>(ri)] = rj;
            chosen.emplace_back(i, j);
            recurse(cell + 1, edges_left - 1, pcopy);
            chosen.pop_back();
        }
    }
};

}  // namespace

double brute_force_transport_lp(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& cost) {
    const int N = static_cast<int>(b.size());
    const std::vector<int> rows = positive_indices(a);
    const std::vector<int> cols = positive_indices(b);
    const int m = static_cast<int>(rows.size());
    const int n = static_cast<int>(cols.size());
    if (m == 0 || n == 0) throw InputError("empty margins");
    if (m > 5 || n > 5) throw InputError("oracle size limit");
    std::vector<double> sa, sb, sc;
    for (int i : rows) sa.push_back(a[static_cast<std::size_t>(i)]);
    for (int j : cols) sb.push_back(b[static_cast<std::size_t>(j)]);
    sc.reserve(static_cast<std::size_t>(m) * n);
    for (int i : rows)
        for (int j : cols) sc.push_back(cost[static_cast<std::size_t>(i) * N + j]);

    TreeEnumerator en;
    en.m = m;
    en.n = n;
    en.a = &sa;
    en.b = &sb;
    en.c = &sc;
    std::array<int, 16> parent{};
    for (int v = 0; v < m + n; ++v) parent[static_cast<std::size_t>(v)] = v;
    en.chosen.reserve(static_cast<std::size_t>(m + n - 1));
    en.recurse(0, m + n - 1, parent);
    return en.best;
}

OTResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
    if (p < 1.0) throw InputError("invalid exponent");
    TransportLPResult lp = solve_transport_lp(mu.weights(), nu.weights(), pairwise_costs(mu, nu, p));
    OTResult out;
    out.cost = lp.cost;
    out.coupling = std::move(lp.plan);
    out.p = p;
    out.has_duals = true;
    out.dual_u = std::move(lp.u);
    out.dual_v = std::move(lp.v);
    return out;
}

double wasserstein_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    return metric_pow(wasserstein(mu, nu, p).cost, 1.0 / p);
}

double brute_force_wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
    if (p < 1.0) throw InputError("invalid exponent");
    std::vector<int> rows, cols;
    for (std::size_t k = 0; k < mu.size(); ++k)
        if (mu.weight(k) > 0.0) rows.push_back(static_cast<int>(k));
    for (std::size_t k = 0; k < nu.size(); ++k)
        if (nu.weight(k) > 0.0) cols.push_back(static_cast<int>(k));
    const int m = static_cast<int>(rows.size());
    const int n = static_cast<int>(cols.size());
    std::vector<double> a, b;
    for (int i : rows) a.push_back(mu.weight(static_cast<std::size_t>(i)));
    for (int j : cols) b.push_back(nu.weight(static_cast<std::size_t>(j)));
    std::vector<double> c;
    c.reserve(static_cast<std::size_t>(m) * n);
    for (int i : rows)
        for (int j : cols)
            c.push_back(metric_pow(dist2(mu.atom(static_cast<std::size_t>(i)),
                                         nu.atom(static_cast<std::size_t>(j))), p));

    if (m == n && n <= 8 && is_uniform(a) && is_uniform(b)) return permutation_oracle(c, n);
    if (m > 5 || n > 5) throw InputError("oracle size limit");
    return brute_force_transport_lp(a, b, c);
}

double kantorovich_gap(const OTResult& result, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (!result.has_duals) throw InputError("no certificate");
    if (result.dual_u.size() != mu.size() || result.dual_v.size() != nu.size())
        throw InputError("no certificate");
    double worst = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu.weight(i) <= 0.0) continue;
        for (std::size_t j = 0; j < nu.size(); ++j) {
            if (nu.weight(j) <= 0.0) continue;
            const double c = metric_pow(dist2(mu.atom(i), nu.atom(j)), result.p);
            const double slack = result.dual_u[i] + result.dual_v[j] - c;
            worst = std::max(worst, slack);  // dual feasibility
            if (result.coupling.at(static_cast<int>(i), static_cast<int>(j)) > 0.0)
                worst = std::max(worst, std::abs(slack));  // complementary slackness
        }
    }
    return worst;
}

}  // namespace nestedot
