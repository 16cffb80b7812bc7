#include "plmod/extremal.hpp"

#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

namespace plmod {

ResistanceBracket effective_resistance(const ResistorNetwork& net, double cg_tol) {
  using SpMat = Eigen::SparseMatrix<double>;
  const int n = net.n_nodes;
  if (n == 0 || net.source_attach.empty() || net.sink_attach.empty())
    throw std::invalid_argument("effective_resistance: empty network or terminals");

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(net.edges.size() * 4 + net.source_attach.size() + net.sink_attach.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (const auto& e : net.edges) {
    trips.emplace_back(e.a, e.a, e.cond);
    trips.emplace_back(e.b, e.b, e.cond);
    trips.emplace_back(e.a, e.b, -e.cond);
    trips.emplace_back(e.b, e.a, -e.cond);
  }
  for (const auto& [v, c] : net.source_attach) {
    trips.emplace_back(v, v, c);
    rhs[v] += c;  // source potential 1
  }
  for (const auto& [v, c] : net.sink_attach) trips.emplace_back(v, v, c);  // sink potential 0

  SpMat L(n, n);
  L.setFromTriplets(trips.begin(), trips.end());

  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>> cg;
  cg.setTolerance(cg_tol);
  cg.setMaxIterations(20000);
  cg.compute(L);
  Eigen::VectorXd u;
  if (!net.initial_guess.empty()) {
    Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(net.initial_guess.data(), n);
    u = cg.solveWithGuess(rhs, g);
  } else {
    u = cg.solve(rhs);
  }
  if (cg.info() != Eigen::Success && cg.error() > 1e-6)
    throw std::runtime_error("effective_resistance: CG failed to converge");

  // Dirichlet bound: E(u) >= C for any potential obeying the boundary data,
  // so 1/E(u) is a certified lower bound for R.
  double energy = 0.0;
  for (const auto& e : net.edges) {
    double d = u[e.a] - u[e.b];
    energy += e.cond * d * d;
  }
  for (const auto& [v, c] : net.source_attach) {
    double d = 1.0 - u[v];
    energy += c * d * d;
  }
  for (const auto& [v, c] : net.sink_attach) energy += c * u[v] * u[v];
  if (energy <= 0.0) throw std::runtime_error("effective_resistance: degenerate energy");
  double r_lower = 1.0 / energy;

  // Thomson bound: any exactly conserved unit flow f gives R <= sum f^2/c.
  // Start from the currents of u and repair the conservation residuals by
  // routing them to the sink along a BFS tree.
  std::vector<double> excess(n, 0.0);
  std::vector<double> edge_flow(net.edges.size());
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    const auto& e = net.edges[k];
    double f = e.cond * (u[e.a] - u[e.b]);
    edge_flow[k] = f;
    excess[e.a] -= f;
    excess[e.b] += f;
  }
  std::vector<double> src_flow(net.source_attach.size());
  for (std::size_t k = 0; k < net.source_attach.size(); ++k) {
    const auto& [v, c] = net.source_attach[k];
    double f = c * (1.0 - u[v]);
    src_flow[k] = f;
    excess[v] += f;
  }
  std::vector<double> snk_flow(net.sink_attach.size());
  for (std::size_t k = 0; k < net.sink_attach.size(); ++k) {
    const auto& [v, c] = net.sink_attach[k];
    double f = c * u[v];
    snk_flow[k] = f;
    excess[v] -= f;
  }

  // BFS tree rooted at sink-attached nodes; parent edge index and direction.
  std::vector<int> parent_edge(n, -1), parent_sign(n, 0), order;
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // node -> (edge idx, sign from node)
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    adj[net.edges[k].a].push_back({static_cast<int>(k), +1});
    adj[net.edges[k].b].push_back({static_cast<int>(k), -1});
  }
  std::deque<int> queue;
  std::vector<int> sink_attach_of(n, -1);
  for (std::size_t k = 0; k < net.sink_attach.size(); ++k) {
    int v = net.sink_attach[k].first;
    if (!seen[v]) {
      seen[v] = 1;
      sink_attach_of[v] = static_cast<int>(k);
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    order.push_back(v);
    for (auto [ek, sg] : adj[v]) {
      const auto& e = net.edges[ek];
      int w = (sg > 0) ? e.b : e.a;
      if (!seen[w]) {
        seen[w] = 1;
        parent_edge[w] = ek;
        parent_sign[w] = -sg;  // flow from w toward v uses sign -sg... resolved below
        queue.push_back(w);
      }
    }
  }
  // push excess from leaves toward the sink (reverse BFS order)
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    double ex = excess[v];
    if (ex == 0.0) continue;
    if (parent_edge[v] >= 0) {
      const auto& e = net.edges[parent_edge[v]];
      // route ex from v to the BFS parent
      if (e.a == v)
        edge_flow[parent_edge[v]] += ex;
      else
        edge_flow[parent_edge[v]] -= ex;
      int par = (e.a == v) ? e.b : e.a;
      excess[par] += ex;
      excess[v] = 0.0;
    } else if (sink_attach_of[v] >= 0) {
      snk_flow[sink_attach_of[v]] += ex;
      excess[v] = 0.0;
    }
  }

  double flux_out = 0.0;
  for (double f : snk_flow) flux_out += f;
  if (flux_out <= 0.0) throw std::runtime_error("effective_resistance: no flux reached the sink");
  double fenergy = 0.0;
  for (std::size_t k = 0; k < net.edges.size(); ++k)
    fenergy += edge_flow[k] * edge_flow[k] / net.edges[k].cond;
  for (std::size_t k = 0; k < net.source_attach.size(); ++k)
    fenergy += src_flow[k] * src_flow[k] / net.source_attach[k].second;
  for (std::size_t k = 0; k < net.sink_attach.size(); ++k)
    fenergy += snk_flow[k] * snk_flow[k] / net.sink_attach[k].second;
  double r_upper = fenergy / (flux_out * flux_out);

  if (r_upper < r_lower) std::swap(r_upper, r_lower);  // guard rounding inversions
  return {r_lower, r_upper};
}

namespace {

struct CellGraph {
  std::vector<int> node_of;  // grid idx -> node id or -1
  int n_nodes = 0;

  explicit CellGraph(const std::vector<std::uint8_t>& carrier) {
    node_of.assign(carrier.size(), -1);
    for (std::size_t c = 0; c < carrier.size(); ++c)
      if (carrier[c]) node_of[c] = n_nodes++;
  }
};

void add_grid_edges(ResistorNetwork& net, const GridSpec& g,
                    const std::vector<std::uint8_t>& carrier, const CellGraph& cg) {
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t c = g.idx(i, j);
      if (!carrier[c]) continue;
      if (i + 1 < g.nx && carrier[c + 1])
        net.edges.push_back({cg.node_of[c], cg.node_of[c + 1], 1.0});
      if (j + 1 < g.ny && carrier[c + g.nx])
        net.edges.push_back({cg.node_of[c], cg.node_of[c + g.nx], 1.0});
    }
}

// complement components: label 0 = unbounded (touches the frame), others
// bounded holes
struct Complement {
  std::vector<int> label;  // over grid cells, -1 for carrier cells
  int n_bounded = 0;
};

Complement complement_components(const GridSpec& g, const std::vector<std::uint8_t>& carrier) {
  std::vector<std::uint8_t> comp(carrier.size());
  for (std::size_t c = 0; c < carrier.size(); ++c) comp[c] = carrier[c] ? 0 : 1;
  int ncomp = 0;
  auto lbl = label_components(g, comp, ncomp);
  // find labels touching the frame
  std::vector<char> unbounded(ncomp + 1, 0);
  for (int i = 0; i < g.nx; ++i) {
    if (lbl[g.idx(i, 0)]) unbounded[lbl[g.idx(i, 0)]] = 1;
    if (lbl[g.idx(i, g.ny - 1)]) unbounded[lbl[g.idx(i, g.ny - 1)]] = 1;
  }
  for (int j = 0; j < g.ny; ++j) {
    if (lbl[g.idx(0, j)]) unbounded[lbl[g.idx(0, j)]] = 1;
    if (lbl[g.idx(g.nx - 1, j)]) unbounded[lbl[g.idx(g.nx - 1, j)]] = 1;
  }
  Complement out;
  out.label.assign(carrier.size(), -1);
  std::vector<int> remap(ncomp + 1, -1);
  int next = 1;
  for (int l = 1; l <= ncomp; ++l) {
    if (unbounded[l])
      remap[l] = 0;
    else
      remap[l] = next++;
  }
  out.n_bounded = next - 1;
  for (std::size_t c = 0; c < carrier.size(); ++c)
    if (lbl[c]) out.label[c] = remap[lbl[c]];
  return out;
}

}  // namespace

ModulusEstimate annulus_modulus(const Region& A) {
  const GridSpec& g = A.grid;
  Complement comp = complement_components(g, A.mask);
  if (comp.n_bounded != 1)
    throw std::runtime_error("annulus_modulus: carrier is not an annulus (bounded complement components = " +
                             std::to_string(comp.n_bounded) + ")");

  CellGraph cg(A.mask);
  auto neighbor_label = [&](int i, int j, int di, int dj) -> int {
    int ni = i + di, nj = j + dj;
    if (!g.in_bounds(ni, nj)) return 0;  // outside frame = unbounded complement
    std::size_t nc = g.idx(ni, nj);
    if (A.mask[nc]) return -1;
    return comp.label[nc];
  };

  // joining problem: inner boundary (hole, label 1) to outer (label 0)
  ResistorNetwork net;
  net.n_nodes = cg.n_nodes;
  add_grid_edges(net, g, A.mask, cg);
  const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t c = g.idx(i, j);
      if (!A.mask[c]) continue;
      for (auto& d : dirs) {
        int nl = neighbor_label(i, j, d[0], d[1]);
        if (nl == 1) net.source_attach.push_back({cg.node_of[c], 2.0});
        if (nl == 0) net.sink_attach.push_back({cg.node_of[c], 2.0});
      }
    }
  ResistanceBracket join = effective_resistance(net);

  // separating problem: cut along a BFS seam from the hole to the outside;
  // winding curves crossing the seam once become seam-side-to-seam-side paths
  std::vector<int> prev(A.mask.size(), -2);
  std::deque<std::size_t> queue;
  for (int j = 0; j < g.ny && queue.empty(); ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t c = g.idx(i, j);
      if (!A.mask[c]) continue;
      bool hole_adjacent = false;
      for (auto& d : dirs)
        if (neighbor_label(i, j, d[0], d[1]) == 1) hole_adjacent = true;
      if (hole_adjacent) {
        prev[c] = -1;
        queue.push_back(c);
        break;
      }
    }
  std::size_t outer_cell = SIZE_MAX;
  while (!queue.empty() && outer_cell == SIZE_MAX) {
    std::size_t c = queue.front();
    queue.pop_front();
    int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    for (auto& d : dirs) {
      if (neighbor_label(i, j, d[0], d[1]) == 0) {
        outer_cell = c;
        break;
      }
      int ni = i + d[0], nj = j + d[1];
      if (!g.in_bounds(ni, nj)) continue;
      std::size_t nc = g.idx(ni, nj);
      if (A.mask[nc] && prev[nc] == -2) {
        prev[nc] = static_cast<int>(c);
        queue.push_back(nc);
      }
    }
  }
  if (outer_cell == SIZE_MAX)
    throw std::runtime_error("annulus_modulus: could not build a seam");
  std::vector<std::size_t> seam;
  for (long long c = static_cast<long long>(outer_cell); c >= 0;
       c = prev[static_cast<std::size_t>(c)])
    seam.push_back(static_cast<std::size_t>(c));
  std::reverse(seam.begin(), seam.end());  // hole side first

  std::vector<char> on_seam(A.mask.size(), 0);
  for (std::size_t c : seam) on_seam[c] = 1;
  std::vector<std::uint8_t> cut_mask = A.mask;
  for (std::size_t c : seam) cut_mask[c] = 0;
  CellGraph cg2(cut_mask);
  ResistorNetwork sep;
  sep.n_nodes = cg2.n_nodes;
  add_grid_edges(sep, g, cut_mask, cg2);
  // classify neighbors of seam cells by the side of the seam polyline
  auto center_of = [&](std::size_t c) {
    return g.center(static_cast<int>(c % g.nx), static_cast<int>(c / g.nx));
  };
  for (std::size_t s = 0; s < seam.size(); ++s) {
    std::size_t c = seam[s];
    int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    cplx t = center_of(seam[std::min(s + 1, seam.size() - 1)]) -
             center_of(seam[s == 0 ? 0 : s - 1]);
    for (auto& d : dirs) {
      int ni = i + d[0], nj = j + d[1];
      if (!g.in_bounds(ni, nj)) continue;
      std::size_t nc = g.idx(ni, nj);
      if (!cut_mask[nc] || on_seam[nc]) continue;
      cplx v = center_of(nc) - center_of(c);
      double cross = t.real() * v.imag() - t.imag() * v.real();
      if (cross > 0)
        sep.source_attach.push_back({cg2.node_of[nc], 1.0});
      else if (cross < 0)
        sep.sink_attach.push_back({cg2.node_of[nc], 1.0});
    }
  }
  ResistanceBracket sepb = effective_resistance(sep);

  double m_lo = std::min(join.lower, 1.0 / sepb.upper);
  double m_up = std::max(join.upper, 1.0 / sepb.lower);
  double infl = 4.0 * g.h * A.perimeter() / std::max(1e-300, A.area());
  ModulusEstimate est;
  est.lower = m_lo * std::max(0.0, 1.0 - infl);
  est.upper = m_up * (1.0 + infl);
  est.h = g.h;
  est.method = "grid_resistance";
  return est;
}

ModulusEstimate round_annulus_modulus(double r1, double r2, int n_angular) {
  if (!(r2 > r1 && r1 > 0.0))
    throw std::invalid_argument("round_annulus_modulus: need 0 < r1 < r2");
  double log_ratio = std::log(r2 / r1);
  int ny = std::max(8, n_angular);
  int nx = std::max(2, static_cast<int>(std::lround(ny * log_ratio / (2.0 * M_PI))));
  if (double(nx) * ny > 4.2e6) nx = static_cast<int>(4.2e6 / ny);
  double hx = log_ratio / nx, hy = 2.0 * M_PI / ny;
  double cx = hy / hx, cy = hx / hy;

  auto node = [&](int i, int j) { return j * nx + i; };

  // joining: radial paths, wraparound in the angular direction
  ResistorNetwork net;
  net.n_nodes = nx * ny;
  net.initial_guess.resize(net.n_nodes);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i + 1 < nx) net.edges.push_back({node(i, j), node(i + 1, j), cx});
      net.edges.push_back({node(i, j), node(i, (j + 1) % ny), cy});
      net.initial_guess[node(i, j)] = 1.0 - (i + 0.5) / nx;
    }
  for (int j = 0; j < ny; ++j) {
    net.source_attach.push_back({node(0, j), 2.0 * cx});
    net.sink_attach.push_back({node(nx - 1, j), 2.0 * cx});
  }
  ResistanceBracket join = effective_resistance(net, 1e-12);

  // separating: unwrap the cylinder; winding curves join the two cut sides
  ResistorNetwork sep;
  sep.n_nodes = nx * ny;
  sep.initial_guess.resize(sep.n_nodes);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i + 1 < nx) sep.edges.push_back({node(i, j), node(i + 1, j), cx});
      if (j + 1 < ny) sep.edges.push_back({node(i, j), node(i, j + 1), cy});
      sep.initial_guess[node(i, j)] = 1.0 - (j + 0.5) / ny;
    }
  for (int i = 0; i < nx; ++i) {
    sep.source_attach.push_back({node(i, 0), 2.0 * cy});
    sep.sink_attach.push_back({node(i, ny - 1), 2.0 * cy});
  }
  ResistanceBracket sepb = effective_resistance(sep, 1e-12);

  ModulusEstimate est;
  est.lower = std::min(join.lower, 1.0 / sepb.upper);
  est.upper = std::max(join.upper, 1.0 / sepb.lower);
  est.h = hx;
  est.method = "cylinder_exact";
  return est;
}

QuadSpec make_rectangle_quad(double width, double height, int cells_x) {
  int nx = std::max(2, cells_x);
  int ny = std::max(2, static_cast<int>(std::lround(nx * height / width)));
  GridSpec g = GridSpec::window(0.0, width, 0.0, height, nx, ny);
  g.h = width / nx;  // exact aspect: ny cells of the same size cover height
  QuadSpec spec;
  spec.carrier.grid = g;
  spec.carrier.mask.assign(g.size(), 1);
  for (int j = 0; j < ny; ++j) {
    spec.arcA.push_back(g.idx(0, j));
    spec.arcB.push_back(g.idx(nx - 1, j));
  }
  return spec;
}

ModulusEstimate quad_extremal_length(const QuadSpec& spec) {
  const Region& carrier = spec.carrier;
  const GridSpec& g = carrier.grid;
  if (spec.arcA.empty() || spec.arcB.empty())
    throw std::invalid_argument("quad_extremal_length: marked arcs must be nonempty");
  for (std::size_t c : spec.arcA)
    for (std::size_t d : spec.arcB)
      if (c == d) throw std::invalid_argument("quad_extremal_length: marked arcs touch");

  CellGraph cg(carrier.mask);
  ResistorNetwork net;
  net.n_nodes = cg.n_nodes;
  add_grid_edges(net, g, carrier.mask, cg);
  for (std::size_t c : spec.arcA) net.source_attach.push_back({cg.node_of[c], 2.0});
  for (std::size_t c : spec.arcB) net.sink_attach.push_back({cg.node_of[c], 2.0});
  ResistanceBracket primal = effective_resistance(net);

  // dual problem: complementary boundary arcs
  std::vector<char> marked(carrier.mask.size(), 0);
  for (std::size_t c : spec.arcA) marked[c] = 1;
  for (std::size_t c : spec.arcB) marked[c] = 1;
  std::vector<std::uint8_t> bdry(carrier.mask.size(), 0);
  const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t c = g.idx(i, j);
      if (!carrier.mask[c] || marked[c]) continue;
      for (auto& d : dirs) {
        int ni = i + d[0], nj = j + d[1];
        bool ext = !g.in_bounds(ni, nj) || !carrier.mask[g.idx(ni, nj)];
        if (ext) bdry[c] = 1;
      }
    }
  int nsides = 0;
  auto sides = label_components(g, bdry, nsides);
  ModulusEstimate est;
  est.h = g.h;
  est.method = "grid_resistance";
  if (nsides == 2) {
    ResistorNetwork dual;
    dual.n_nodes = cg.n_nodes;
    add_grid_edges(dual, g, carrier.mask, cg);
    for (std::size_t c = 0; c < bdry.size(); ++c) {
      if (!bdry[c]) continue;
      if (sides[c] == 1) dual.source_attach.push_back({cg.node_of[c], 2.0});
      if (sides[c] == 2) dual.sink_attach.push_back({cg.node_of[c], 2.0});
    }
    ResistanceBracket d = effective_resistance(dual);
    est.lower = std::min(primal.lower, 1.0 / d.upper);
    est.upper = std::max(primal.upper, 1.0 / d.lower);
  } else {
    est.lower = primal.lower;
    est.upper = primal.upper;
  }
  // no geometric inflation here: axis-aligned quads raster exactly, and the
  // primal/dual spread already reflects corner singularities
  return est;
}

bool harmonic_sum_bound(double ell, const std::vector<double>& ells, double slack) {
  for (double e : ells)
    if (e < 0.0) throw std::invalid_argument("harmonic_sum_bound: lengths must be nonnegative");
  const double m = static_cast<double>(ells.size());
  if (ell != 0.0) {
    // precondition sum 1/ell_i = 1/ell with the 1/0 = inf convention
    double hsum = 0.0;
    bool infinite = false;
    for (double e : ells) {
      if (e == 0.0) infinite = true;
      else hsum += 1.0 / e;
    }
    if (infinite || std::abs(hsum - 1.0 / ell) > 1e-12 * std::max(1.0, std::abs(1.0 / ell)))
      throw std::invalid_argument("harmonic_sum_bound: harmonic precondition violated");
  }
  double sum = 0.0;
  for (double e : ells) sum += e;
  return sum >= m * m * ell - slack;
}

HarnessReport el_law_harness(const HarnessConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  HarnessReport rep;
  auto mid = [](const ModulusEstimate& e) { return 0.5 * (e.lower + e.upper); };

  for (int t = 0; t < cfg.n_configs; ++t) {
    int kind = t % 3;
    HarnessCase hc;
    if (kind == 0) {
      // parallel law: horizontal strips of the unit square, joining left/right
      hc.kind = "parallel";
      int pieces = 2 + static_cast<int>(rng() % 4);
      int res = cfg.resolution;
      std::vector<int> rows(pieces, res / (2 * pieces));
      int left = res - (res / (2 * pieces)) * pieces;
      for (int k = 0; k < pieces; ++k) {
        int extra = static_cast<int>(rng() % (left / 2 + 1));
        rows[k] += extra;
        left -= extra;
      }
      rows[pieces - 1] += left;
      double recip_sum = 0.0;
      for (int k = 0; k < pieces; ++k) {
        QuadSpec q = make_rectangle_quad(1.0, double(rows[k]) / res, res);
        recip_sum += 1.0 / mid(quad_extremal_length(q));
      }
      QuadSpec whole = make_rectangle_quad(1.0, 1.0, res);
      double el_total = mid(quad_extremal_length(whole));
      hc.deviation = std::abs(recip_sum - 1.0 / el_total) * el_total;
      hc.violation = hc.deviation;
    } else if (kind == 1) {
      // series law: vertical splits of a 2 x 1 rectangle, joining short sides
      hc.kind = "series";
      int pieces = 2 + static_cast<int>(rng() % 3);
      int res = cfg.resolution;
      std::vector<int> cols(pieces, (2 * res) / (2 * pieces));
      int left = 2 * res - ((2 * res) / (2 * pieces)) * pieces;
      for (int k = 0; k < pieces; ++k) {
        int extra = static_cast<int>(rng() % (left / 2 + 1));
        cols[k] += extra;
        left -= extra;
      }
      cols[pieces - 1] += left;
      double sum = 0.0;
      for (int k = 0; k < pieces; ++k) {
        QuadSpec q = make_rectangle_quad(2.0 * double(cols[k]) / (2 * res), 1.0, cols[k]);
        sum += mid(quad_extremal_length(q));
      }
      QuadSpec whole = make_rectangle_quad(2.0, 1.0, 2 * res);
      double el_total = mid(quad_extremal_length(whole));
      // series law: EL_total >= sum of the pieces
      hc.violation = std::max(0.0, (sum - el_total) / el_total);
      hc.deviation = std::abs(sum - el_total) / el_total;
    } else {
      // Grotzsch: concentric sub-annuli of 1 < |z| < e^T
      hc.kind = "grotzsch";
      double T = 1.0 + 3.0 * double(rng() % 1000) / 1000.0;
      int pieces = 2 + static_cast<int>(rng() % 3);
      std::vector<double> splits{0.0};
      for (int k = 1; k < pieces; ++k) splits.push_back(T * double(rng() % 1000 + 1) / 1001.0);
      splits.push_back(T);
      std::sort(splits.begin(), splits.end());
      bool shrink = (rng() % 2) == 0;  // strict containment half the time
      double sum = 0.0;
      for (int k = 0; k < pieces; ++k) {
        double a = splits[k], b = splits[k + 1];
        if (shrink) {
          double gap = 0.1 * (b - a);
          a += gap;
          b -= gap;
        }
        if (b <= a) continue;
        sum += mid(round_annulus_modulus(std::exp(a), std::exp(b), 96));
      }
      double total = mid(round_annulus_modulus(1.0, std::exp(T), 96));
      hc.violation = std::max(0.0, (sum - total) / total);
      hc.deviation = std::abs(sum - total) / total;
    }
    rep.max_violation = std::max(rep.max_violation, hc.violation);
    if (hc.violation > cfg.tolerance) ++rep.violations_beyond_tol;
    rep.cases.push_back(hc);
  }
  return rep;
}

}  // namespace plmod
