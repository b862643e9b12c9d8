#include "faultsim/events.hpp"

#include <cstdio>
#include <map>
#include <memory>

#include "faultsim/error.hpp"

namespace faultsim::scenario {

std::vector<SlipEvent> detect_slip_events(std::span<const double> t, std::span<const double> v,
                                          double v_D, double factor, double merge_gap) {
  if (t.size() != v.size()) throw DomainError("time and value series differ in length");
  if (t.empty()) throw DomainError("empty series");
  const double thr = factor * v_D;
  std::vector<SlipEvent> out;
  const int n = static_cast<int>(t.size());
  for (int i = 0; i < n;) {
    if (!(v[i] > thr)) { ++i; continue; }
    int j = i;
    while (j + 1 < n && v[j + 1] > thr) ++j;
    if (!out.empty() && t[i] - t[out.back().end] < merge_gap) {
      out.back().end = j;
    } else {
      SlipEvent e;
      e.onset = i;
      e.end = j;
      out.push_back(e);
    }
    i = j + 1;
  }
  for (auto &e : out) {
    e.peak = e.onset;
    for (int i = e.onset; i <= e.end; ++i)
      if (v[i] > v[e.peak]) e.peak = i;
    e.t_onset = t[e.onset];
    e.t_peak = t[e.peak];
    e.t_end = t[e.end];
    e.peak_value = v[e.peak];
  }
  return out;
}

namespace {

// Grid edges: horizontal (i,j)-(i+1,j) and vertical (i,j)-(i,j+1).
long edge_key(long nx, int i, int j, bool vertical) { return 2 * (j * nx + i) + (vertical ? 1 : 0); }

}  // namespace

std::vector<Polyline> level_lines(const GridField &f, double level) {
  const int nx = static_cast<int>(f.x.size()), nt = static_cast<int>(f.t.size());
  if (f.values.size() != static_cast<std::size_t>(nx) * nt)
    throw DomainError("grid field has wrong size");
  std::vector<Polyline> out;
  if (nx < 2 || nt < 2) return out;

  auto above = [&](int j, int i) { return f.at(j, i) >= level; };
  auto crossing = [&](int i0, int j0, int i1, int j1) {
    const double a = f.at(j0, i0), b = f.at(j1, i1);
    const double s = (level - a) / (b - a);
    return Vec2{f.x[i0] + s * (f.x[i1] - f.x[i0]), f.t[j0] + s * (f.t[j1] - f.t[j0])};
  };

  std::map<long, Vec2> point;
  std::map<long, std::vector<long>> adj;
  auto link = [&](long a, long b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };

  for (int j = 0; j + 1 < nt; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const bool c[4] = {above(j, i), above(j, i + 1), above(j + 1, i + 1), above(j + 1, i)};
      const long e[4] = {edge_key(nx, i, j, false), edge_key(nx, i + 1, j, true),
                         edge_key(nx, i, j + 1, false), edge_key(nx, i, j, true)};
      bool cut[4] = {c[0] != c[1], c[1] != c[2], c[3] != c[2], c[0] != c[3]};
      int ncut = 0;
      for (int k = 0; k < 4; ++k) ncut += cut[k];
      if (ncut == 0) continue;
      if (cut[0]) point[e[0]] = crossing(i, j, i + 1, j);
      if (cut[1]) point[e[1]] = crossing(i + 1, j, i + 1, j + 1);
      if (cut[2]) point[e[2]] = crossing(i, j + 1, i + 1, j + 1);
      if (cut[3]) point[e[3]] = crossing(i, j, i, j + 1);
      if (ncut == 2) {
        int a = -1, b = -1;
        for (int k = 0; k < 4; ++k)
          if (cut[k]) (a < 0 ? a : b) = k;
        link(e[a], e[b]);
      } else {
        const double centre = 0.25 * (f.at(j, i) + f.at(j, i + 1) + f.at(j + 1, i + 1) + f.at(j + 1, i));
        if ((centre >= level) == c[0]) {
          link(e[0], e[1]);
          link(e[2], e[3]);
        } else {
          link(e[3], e[0]);
          link(e[1], e[2]);
        }
      }
    }

  // Chain: open polylines start at degree-1 points, the rest are loops.
  std::map<long, bool> used;
  auto walk = [&](long start) {
    Polyline line{point[start]};
    used[start] = true;
    long prev = -1, cur = start;
    for (;;) {
      long next = -1;
      for (long n : adj[cur])
        if (n != prev && !used[n]) { next = n; break; }
      if (next < 0) {
        // close a loop back to the start
        for (long n : adj[cur])
          if (n == start && n != prev && line.size() > 2) line.push_back(point[start]);
        break;
      }
      used[next] = true;
      line.push_back(point[next]);
      prev = cur;
      cur = next;
    }
    out.push_back(std::move(line));
  };
  for (const auto &[k, nb] : adj)
    if (nb.size() == 1 && !used[k]) walk(k);
  for (const auto &[k, nb] : adj)
    if (!used[k]) walk(k);
  return out;
}

void write_level_lines(const GridField &f, std::span<const double> levels, const std::string &path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE *)> fp(std::fopen(path.c_str(), "w"), std::fclose);
  if (!fp) throw Error("cannot write " + path);
  for (double l : levels) {
    std::fprintf(fp.get(), "# level %.17g\n", l);
    for (const auto &line : level_lines(f, l)) {
      for (const auto &p : line) std::fprintf(fp.get(), "%.17g %.17g\n", p.x, p.y);
      std::fprintf(fp.get(), "\n");
    }
  }
}

}  // namespace faultsim::scenario
