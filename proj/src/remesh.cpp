// Copyright 2026 The meshgnn Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "meshgnn/remesh.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

namespace meshgnn {

namespace {

// Per-face mass (area) and centroid, with centroids shifted to the mesh's
// area-weighted mean to limit cancellation in the energy deltas.
struct FaceMoments {
  std::vector<Real> area;
  std::vector<Vec3> centroid;
};

FaceMoments face_moments(const TriMesh& mesh) {
  FaceMoments m;
  const std::size_t n = mesh.faces.size();
  m.area.resize(n);
  m.centroid.resize(n);
  Vec3 mean = Vec3::Zero();
  Real total = 0;
  for (std::size_t f = 0; f < n; ++f) {
    m.area[f] = face_area(mesh, f);
    m.centroid[f] = face_centroid(mesh, f);
    mean += m.area[f] * m.centroid[f];
    total += m.area[f];
  }
  if (total > 0) mean /= total;
  for (Vec3& c : m.centroid) c -= mean;
  return m;
}

struct ClusterSums {
  std::vector<Real> mass;
  std::vector<Vec3> first;
  std::vector<int> count;

  ClusterSums(const FaceMoments& fm, const std::vector<int>& assignment, int l)
      : mass(l, 0.0), first(l, Vec3::Zero()), count(l, 0) {
    for (std::size_t f = 0; f < assignment.size(); ++f) {
      const int c = assignment[f];
      mass[c] += fm.area[f];
      first[c] += fm.area[f] * fm.centroid[f];
      ++count[c];
    }
  }
};

// |S|^2 / M, the (negated) cluster contribution to the energy.
Real spread(const Vec3& s, Real m) { return m > 0 ? s.squaredNorm() / m : 0.0; }

void check_assignment(const TriMesh& mesh, const Clustering& c) {
  if (c.assignment.size() != mesh.faces.size()) {
    throw ValidationError("clustering does not cover every face");
  }
  if (c.l < 1) throw ValidationError("cluster count must be positive");
  std::vector<int> count(c.l, 0);
  for (int id : c.assignment) {
    if (id < 0 || id >= c.l) throw ValidationError("cluster id out of range");
    ++count[id];
  }
  for (int id = 0; id < c.l; ++id) {
    if (count[id] == 0) throw ValidationError("cluster " + std::to_string(id) + " is empty");
  }
}

// Connected components of the faces in `members` (all of one cluster).
std::vector<std::vector<int>> components_of(const std::vector<int>& members,
                                            const std::vector<int>& assignment,
                                            const std::vector<std::vector<int>>& adj) {
  std::vector<std::vector<int>> comps;
  std::unordered_map<int, bool> seen;
  seen.reserve(members.size());
  for (int f : members) seen[f] = false;
  for (int start : members) {
    if (seen[start]) continue;
    std::vector<int> comp{start};
    seen[start] = true;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      for (int g : adj[comp[i]]) {
        if (assignment[g] != assignment[start]) continue;
        auto it = seen.find(g);
        if (it != seen.end() && !it->second) {
          it->second = true;
          comp.push_back(g);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace

Real cvd_energy(const TriMesh& mesh, const std::vector<int>& assignment, int l) {
  const FaceMoments fm = face_moments(mesh);
  const ClusterSums sums(fm, assignment, l);
  std::vector<Vec3> b(l, Vec3::Zero());
  for (int c = 0; c < l; ++c) {
    if (sums.mass[c] > 0) b[c] = sums.first[c] / sums.mass[c];
  }
  Real e = 0;
  for (std::size_t f = 0; f < assignment.size(); ++f) {
    e += fm.area[f] * (fm.centroid[f] - b[assignment[f]]).squaredNorm();
  }
  return e;
}

std::vector<Vec3> cluster_centroids(const TriMesh& mesh, const Clustering& clustering) {
  std::vector<Real> mass(clustering.l, 0.0);
  std::vector<Vec3> first(clustering.l, Vec3::Zero());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Real a = face_area(mesh, f);
    mass[clustering.assignment[f]] += a;
    first[clustering.assignment[f]] += a * face_centroid(mesh, f);
  }
  for (int c = 0; c < clustering.l; ++c) first[c] /= mass[c];
  return first;
}

bool clusters_connected(const TriMesh& mesh, const Clustering& clustering) {
  check_assignment(mesh, clustering);
  const auto adj = face_adjacency(mesh);
  std::vector<std::vector<int>> members(clustering.l);
  for (std::size_t f = 0; f < clustering.assignment.size(); ++f) {
    members[clustering.assignment[f]].push_back(static_cast<int>(f));
  }
  for (const auto& m : members) {
    if (components_of(m, clustering.assignment, adj).size() != 1) return false;
  }
  return true;
}

Clustering seed_clusters(const TriMesh& mesh, int l, std::uint64_t seed) {
  const auto n = static_cast<int>(mesh.faces.size());
  if (l < 1 || l > n) {
    throw ValidationError("cluster count " + std::to_string(l) + " outside [1, " +
                          std::to_string(n) + "]");
  }
  Rng rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < l; ++i) {
    const auto j = static_cast<int>(uniform_int(rng, i, n - 1));
    std::swap(order[i], order[j]);
  }

  const auto adj = face_adjacency(mesh);
  Clustering out;
  out.l = l;
  out.assignment.assign(n, -1);
  std::vector<int> frontier;
  for (int c = 0; c < l; ++c) {
    out.assignment[order[c]] = c;
    frontier.push_back(order[c]);
  }
  // Level-synchronous growth: a face claimed at the same depth by several
  // clusters goes to the smallest id.
  while (!frontier.empty()) {
    std::vector<int> claimed;
    std::unordered_map<int, int> claim;
    for (int f : frontier) {
      for (int g : adj[f]) {
        if (out.assignment[g] != -1) continue;
        auto [it, inserted] = claim.try_emplace(g, out.assignment[f]);
        if (inserted) {
          claimed.push_back(g);
        } else {
          it->second = std::min(it->second, out.assignment[f]);
        }
      }
    }
    std::sort(claimed.begin(), claimed.end());
    for (int g : claimed) out.assignment[g] = claim[g];
    frontier = std::move(claimed);
  }
  if (std::find(out.assignment.begin(), out.assignment.end(), -1) != out.assignment.end()) {
    throw ValidationError("mesh has a connected component that received no seed");
  }
  out.energy = cvd_energy(mesh, out.assignment, l);
  return out;
}

Clustering optimize_clusters(const TriMesh& mesh, const Clustering& init, OptimizeTrace* trace) {
  check_assignment(mesh, init);
  const FaceMoments fm = face_moments(mesh);
  const auto adj = face_adjacency(mesh);
  const auto n = static_cast<int>(mesh.faces.size());

  std::vector<std::vector<int>> vertex_faces(mesh.vertices.size());
  for (int f = 0; f < n; ++f) {
    for (int v : mesh.faces[f]) vertex_faces[v].push_back(f);
  }

  std::vector<int> assign = init.assignment;
  ClusterSums sums(fm, assign, init.l);

  // Moves must beat this margin; it only rules out round-off "improvements".
  const Real baseline = cvd_energy(mesh, std::vector<int>(n, 0), 1);
  const Real tol = 1e-13 * std::max(baseline, std::numeric_limits<Real>::min());

  if (trace) {
    trace->sweep_energies.clear();
    trace->sweep_energies.push_back(cvd_energy(mesh, assign, init.l));
    trace->swaps = 0;
  }

  std::vector<int> mark(n, -1);
  int stamp = 0;
  // Does removing f from its cluster leave the rest of the cluster connected?
  auto removal_keeps_connected = [&](int f) {
    const int c = assign[f];
    std::vector<int> same;
    for (int g : adj[f]) {
      if (assign[g] == c) same.push_back(g);
    }
    if (same.size() <= 1) return true;
    auto reaches_all = [&](bool local_only) {
      ++stamp;
      std::vector<int> queue{same[0]};
      mark[same[0]] = stamp;
      mark[f] = stamp;
      std::size_t found = 1;
      std::set<int> ring;
      if (local_only) {
        for (int v : mesh.faces[f]) ring.insert(vertex_faces[v].begin(), vertex_faces[v].end());
      }
      for (std::size_t i = 0; i < queue.size() && found < same.size(); ++i) {
        for (int g : adj[queue[i]]) {
          if (assign[g] != c || mark[g] == stamp) continue;
          if (local_only && !ring.count(g)) continue;
          mark[g] = stamp;
          queue.push_back(g);
          if (std::find(same.begin(), same.end(), g) != same.end()) ++found;
        }
      }
      return found == same.size();
    };
    return reaches_all(true) || reaches_all(false);
  };

  constexpr int kMaxSweeps = 100000;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    long swaps = 0;
    for (int f = 0; f < n; ++f) {
      const int a = assign[f];
      if (sums.count[a] <= 1) continue;
      const Real rho = fm.area[f];
      const Vec3 w = rho * fm.centroid[f];
      const Real keep_a = spread(sums.first[a], sums.mass[a]);
      const Real drop_a = spread(sums.first[a] - w, sums.mass[a] - rho);
      Real best_delta = 0;
      int best_target = -1;
      for (int g : adj[f]) {
        const int b = assign[g];
        if (b == a) continue;
        const Real delta = (keep_a + spread(sums.first[b], sums.mass[b])) -
                           (drop_a + spread(sums.first[b] + w, sums.mass[b] + rho));
        if (delta < best_delta || (delta == best_delta && best_target >= 0 && b < best_target)) {
          best_delta = delta;
          best_target = b;
        }
      }
      if (best_target < 0 || best_delta >= -tol) continue;
      if (!removal_keeps_connected(f)) continue;
      sums.mass[a] -= rho;
      sums.first[a] -= w;
      --sums.count[a];
      sums.mass[best_target] += rho;
      sums.first[best_target] += w;
      ++sums.count[best_target];
      assign[f] = best_target;
      ++swaps;
    }
    if (trace) {
      trace->swaps += swaps;
      trace->sweep_energies.push_back(cvd_energy(mesh, assign, init.l));
    }
    if (swaps == 0) break;
  }

  Clustering out{assign, init.l, 0.0};
  if (!clusters_connected(mesh, out)) {
    out = repair_clusters(mesh, out);
    if (trace) trace->repaired = true;
  }
  out.energy = cvd_energy(mesh, out.assignment, out.l);
  return out;
}

Clustering repair_clusters(const TriMesh& mesh, const Clustering& clustering) {
  check_assignment(mesh, clustering);
  const FaceMoments fm = face_moments(mesh);
  const auto adj = face_adjacency(mesh);
  std::vector<int> assign = clustering.assignment;

  std::vector<std::vector<int>> members(clustering.l);
  for (std::size_t f = 0; f < assign.size(); ++f) members[assign[f]].push_back(static_cast<int>(f));

  // Split: the largest component keeps the id (ties: lowest face index),
  // every other fragment gets a fresh id.
  int next_id = clustering.l;
  for (int c = 0; c < clustering.l; ++c) {
    auto comps = components_of(members[c], assign, adj);
    if (comps.size() <= 1) continue;
    std::stable_sort(comps.begin(), comps.end(),
                     [](const auto& x, const auto& y) { return x.size() > y.size(); });
    for (std::size_t i = 1; i < comps.size(); ++i) {
      for (int f : comps[i]) assign[f] = next_id;
      ++next_id;
    }
  }
  if (next_id == clustering.l) return {assign, clustering.l, cvd_energy(mesh, assign, clustering.l)};

  ClusterSums sums(fm, assign, next_id);
  std::vector<bool> alive(next_id, true);
  int remaining = next_id;
  while (remaining > clustering.l) {
    int frag = -1;
    for (int c = clustering.l; c < next_id; ++c) {
      if (alive[c] && (frag < 0 || sums.count[c] < sums.count[frag])) frag = c;
    }
    std::set<int> neighbours;
    for (std::size_t f = 0; f < assign.size(); ++f) {
      if (assign[f] != frag) continue;
      for (int g : adj[f]) {
        if (assign[g] != frag) neighbours.insert(assign[g]);
      }
    }
    if (neighbours.empty()) throw Error("cluster fragment has no adjacent cluster to merge into");
    int target = -1;
    Real best = std::numeric_limits<Real>::infinity();
    for (int b : neighbours) {
      const Real delta = spread(sums.first[frag], sums.mass[frag]) +
                         spread(sums.first[b], sums.mass[b]) -
                         spread(sums.first[frag] + sums.first[b], sums.mass[frag] + sums.mass[b]);
      if (delta < best) {
        best = delta;
        target = b;
      }
    }
    for (int& id : assign) {
      if (id == frag) id = target;
    }
    sums.mass[target] += sums.mass[frag];
    sums.first[target] += sums.first[frag];
    sums.count[target] += sums.count[frag];
    alive[frag] = false;
    --remaining;
  }

  // A fragment may have merged into another fragment; compact ids to [0, l).
  std::vector<int> remap(next_id, -1);
  int id = 0;
  for (int c = 0; c < next_id; ++c) {
    if (alive[c]) remap[c] = id++;
  }
  for (int& a : assign) a = remap[a];
  Clustering out{assign, clustering.l, 0.0};
  if (!clusters_connected(mesh, out)) {
    // Merging can only join connected pieces along shared edges; a second
    // round converges because every pass strictly reduces the fragment count.
    return repair_clusters(mesh, out);
  }
  out.energy = cvd_energy(mesh, out.assignment, out.l);
  return out;
}

TriMesh dual_remesh(const TriMesh& mesh, const Clustering& clustering) {
  check_assignment(mesh, clustering);
  if (clustering.l < 4) {
    throw ValidationError("dual re-mesh needs at least 4 clusters, got " +
                          std::to_string(clustering.l));
  }
  if (!clusters_connected(mesh, clustering)) {
    throw ValidationError("dual re-mesh needs connected clusters; run optimize_clusters first");
  }

  TriMesh out;
  out.vertices = cluster_centroids(mesh, clustering);

  const std::size_t nv = mesh.vertices.size();
  // For the face incident at corner i of vertex v: out-neighbour t[i+1],
  // in-neighbour t[i+2].
  struct Corner {
    int face, out, in;
  };
  std::vector<std::vector<Corner>> corners(nv);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    for (int i = 0; i < 3; ++i) {
      corners[t[i]].push_back({static_cast<int>(f), t[(i + 1) % 3], t[(i + 2) % 3]});
    }
  }

  std::set<std::array<int, 3>> emitted;
  auto emit = [&](int a, int b, int c) {
    if (a == b || b == c || a == c) return;
    std::array<int, 3> key{a, b, c};
    std::sort(key.begin(), key.end());
    if (!emitted.insert(key).second) return;
    const Vec3& pa = out.vertices[a];
    if ((out.vertices[b] - pa).cross(out.vertices[c] - pa).squaredNorm() < 4.0 * kDegenerateAreaSq) {
      return;
    }
    out.faces.push_back({a, b, c});
  };

  for (std::size_t v = 0; v < nv; ++v) {
    const auto& cs = corners[v];
    if (cs.size() < 3) continue;
    std::set<int> distinct;
    for (const Corner& c : cs) distinct.insert(clustering.assignment[c.face]);
    if (distinct.size() < 3) continue;

    // Walk the fan: the face after f shares edge (v, f.in) as its out-edge.
    std::vector<int> ordered;
    {
      std::unordered_map<int, std::size_t> by_out;
      std::unordered_map<int, int> in_count;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        by_out[cs[i].out] = i;
        ++in_count[cs[i].in];
      }
      std::size_t start = 0;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!in_count.count(cs[i].out)) {
          start = i;  // boundary fan: begin at the face nothing rotates into
          break;
        }
      }
      std::vector<bool> used(cs.size(), false);
      std::size_t cur = start;
      while (!used[cur]) {
        used[cur] = true;
        ordered.push_back(cs[cur].face);
        auto it = by_out.find(cs[cur].in);
        if (it == by_out.end()) break;
        cur = it->second;
      }
      if (ordered.size() != cs.size()) {
        ordered.clear();
        for (const Corner& c : cs) ordered.push_back(c.face);
      }
    }

    std::vector<int> seq;
    for (int f : ordered) {
      const int id = clustering.assignment[f];
      if (seq.empty() || seq.back() != id) seq.push_back(id);
    }
    while (seq.size() > 1 && seq.front() == seq.back()) seq.pop_back();
    // A cluster met twice around v keeps its first position in the rotation.
    std::vector<int> unique_seq;
    for (int id : seq) {
      if (std::find(unique_seq.begin(), unique_seq.end(), id) == unique_seq.end()) {
        unique_seq.push_back(id);
      }
    }
    seq = std::move(unique_seq);
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) emit(seq[0], seq[i], seq[i + 1]);
  }
  return out;
}

TriMesh remesh_pipeline(const TriMesh& mesh, const MeshSizeParams& params, std::uint64_t seed,
                        std::size_t max_faces) {
  const TriMesh fine = subdivide(mesh, params.k, max_faces);
  if (params.l < 1 || static_cast<std::size_t>(params.l) > fine.faces.size()) {
    throw ValidationError("cluster count " + std::to_string(params.l) +
                          " exceeds the subdivided face count " +
                          std::to_string(fine.faces.size()));
  }
  const Clustering init = seed_clusters(fine, params.l, seed);
  const Clustering done = optimize_clusters(fine, init);
  return dual_remesh(fine, done);
}

void save_assignment(const Clustering& clustering, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (int id : clustering.assignment) out << id << '\n';
}

}  // namespace meshgnn
