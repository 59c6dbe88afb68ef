#include "sgpart/egypt.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>
#include <tuple>
#include <unordered_set>

#include "sgpart/rng.hpp"

namespace sgp {

std::size_t default_sample_size(std::size_t n, std::size_t k) {
  return static_cast<std::size_t>(
      std::ceil(3.0 * static_cast<double>(k) * std::log(static_cast<double>(n))));
}

std::size_t default_reference_size(std::size_t n) {
  return static_cast<std::size_t>(
      std::ceil(std::pow(std::log(static_cast<double>(n)), 6.0)));
}

EgyptParams resolve_params(const EgyptParams& params, std::size_t n,
                           std::size_t k) {
  EgyptParams out = params;
  if (k < 2) throw ConfigError("k must be at least 2");
  if (out.buffer == 0) throw ConfigError("buffer size B must be positive");
  if (out.buffer > n)
    throw ConfigError("buffer size B=" + std::to_string(out.buffer) +
                      " exceeds n=" + std::to_string(n));
  if (out.sample_size == 0)
    out.sample_size = std::min(out.buffer, default_sample_size(n, k));
  if (out.reference_size == 0)
    out.reference_size = std::min(out.buffer, default_reference_size(n));
  if (out.sample_size > out.buffer)
    throw ConfigError("representative sample larger than the buffer");
  if (out.reference_size > out.buffer)
    throw ConfigError("reference sample larger than the buffer");
  if (out.disjoint_samples && out.sample_size + out.reference_size > out.buffer)
    throw ConfigError("disjoint samples do not fit in the buffer");
  if (out.mode == Mode::Threshold) {
    if (!(out.p_hat > out.q_hat))
      throw ConfigError("THRESHOLD mode requires p_hat > q_hat");
    if (out.q_hat < 0.0 || out.p_hat > 1.0)
      throw ConfigError("p_hat and q_hat must lie in [0, 1]");
    if (!(out.m_scale > 0.0)) throw ConfigError("m_scale must be positive");
  }
  return out;
}

double expected_same_cluster_count(double p_hat, double q_hat, std::size_t k,
                                   std::size_t reference_size, double m_scale) {
  const double per_reference =
      p_hat * p_hat + static_cast<double>(k - 1) * q_hat * q_hat;
  return m_scale * per_reference * static_cast<double>(reference_size);
}

double acceptance_threshold(double expected_count) {
  return expected_count - std::pow(expected_count, 2.0 / 3.0);
}

std::uint32_t common_neighbors_in(std::span<const Vertex> j_neighbors,
                                  std::span<const Vertex> x_neighbors,
                                  std::span<const Vertex> reference) {
  const std::unordered_set<Vertex> of_j(j_neighbors.begin(), j_neighbors.end());
  const std::unordered_set<Vertex> of_x(x_neighbors.begin(), x_neighbors.end());
  const std::unordered_set<Vertex> refs(reference.begin(), reference.end());
  std::uint32_t count = 0;
  for (Vertex u : refs) count += (of_j.contains(u) && of_x.contains(u)) ? 1 : 0;
  return count;
}

Choice choose_representative(std::span<const Vertex> representatives,
                             std::span<const std::uint32_t> counts, Mode mode,
                             double threshold, std::size_t exclude) {
  if (representatives.size() != counts.size())
    throw ConfigError("one count per representative is required");
  constexpr auto kNone = static_cast<std::size_t>(-1);

  std::size_t best = kNone;
  if (mode == Mode::Threshold) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (i == exclude || static_cast<double>(counts[i]) < threshold) continue;
      if (best == kNone || representatives[i] < representatives[best]) best = i;
    }
    if (best != kNone) return {best, false};
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i == exclude) continue;
    if (best == kNone || counts[i] > counts[best] ||
        (counts[i] == counts[best] && representatives[i] < representatives[best]))
      best = i;
  }
  if (best == kNone) throw ConfigError("no representative to choose from");
  return {best, mode == Mode::Threshold};
}

std::vector<std::size_t> group_by_similarity(
    std::span<const Vertex> representatives,
    std::span<const double> similarity, std::size_t groups) {
  const std::size_t s = representatives.size();
  if (similarity.size() != s * s)
    throw ConfigError("similarity must be |S| x |S|");
  if (groups == 0) throw ConfigError("need at least one group");

  // Representatives without any similarity carry no evidence and stay out
  // of the merge.
  std::vector<double> link(s * s, 0.0);
  std::vector<char> linked(s, 0);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b)
      if (a != b) {
        link[a * s + b] = similarity[a * s + b];
        if (link[a * s + b] > 0) linked[a] = 1;
      }
  std::vector<std::size_t> size(s, 1);
  std::vector<Vertex> min_id(representatives.begin(), representatives.end());
  std::vector<std::size_t> parent(s);
  for (std::size_t a = 0; a < s; ++a) parent[a] = a;
  std::vector<std::size_t> active, isolated;
  for (std::size_t a = 0; a < s; ++a)
    (linked[a] ? active : isolated).push_back(a);
  if (active.size() < groups) {
    active.insert(active.end(), isolated.begin(), isolated.end());
    std::sort(active.begin(), active.end());
    isolated.clear();
  }

  while (active.size() > groups) {
    std::size_t best_a = 0, best_b = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const std::size_t a = active[i], b = active[j];
        const double avg = link[a * s + b] / (double(size[a]) * double(size[b]));
        if (avg > best) {
          best = avg;
          best_a = i;
          best_b = j;
        } else if (avg == best) {
          // Equal linkage (typically zero evidence): absorb the smallest
          // groups first rather than fusing two established ones.
          const std::size_t ba = active[best_a], bb = active[best_b];
          const auto key = std::tuple(size[a] + size[b],
                                      std::minmax(min_id[a], min_id[b]));
          const auto best_key = std::tuple(size[ba] + size[bb],
                                           std::minmax(min_id[ba], min_id[bb]));
          if (key < best_key) {
            best_a = i;
            best_b = j;
          }
        }
      }
    }
    const std::size_t keep = active[best_a];
    const std::size_t gone = active[best_b];
    for (std::size_t c : active) {
      if (c == keep || c == gone) continue;
      link[keep * s + c] += link[gone * s + c];
      link[c * s + keep] = link[keep * s + c];
    }
    size[keep] += size[gone];
    min_id[keep] = std::min(min_id[keep], min_id[gone]);
    parent[gone] = keep;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  // Isolated representatives park with the group holding the smallest index.
  for (std::size_t a : isolated) parent[a] = active.front();

  std::vector<std::size_t> label(s);
  std::vector<std::size_t> number(s, static_cast<std::size_t>(-1));
  std::size_t next = 0;
  for (std::size_t a = 0; a < s; ++a) {
    std::size_t root = a;
    while (parent[root] != root) root = parent[root];
    if (number[root] == static_cast<std::size_t>(-1)) number[root] = next++;
    label[a] = number[root];
  }

  // Greedy merges cannot be undone; move representatives to the group with
  // the highest mean similarity until nothing changes.
  std::vector<std::size_t> members(next, 0);
  for (std::size_t a = 0; a < s; ++a)
    if (linked[a]) ++members[label[a]];
  std::vector<double> sum(next);
  for (int pass = 0; pass < 20; ++pass) {
    bool moved = false;
    for (std::size_t a = 0; a < s; ++a) {
      if (!linked[a] || members[label[a]] == 1) continue;
      std::fill(sum.begin(), sum.end(), 0.0);
      for (std::size_t b = 0; b < s; ++b)
        if (b != a && linked[b]) sum[label[b]] += similarity[a * s + b];
      std::size_t best = label[a];
      double best_mean = sum[best] / double(members[best] - 1);
      for (std::size_t g = 0; g < next; ++g) {
        if (g == label[a] || members[g] == 0) continue;
        const double mean = sum[g] / double(members[g]);
        if (mean > best_mean) {
          best_mean = mean;
          best = g;
        }
      }
      if (best != label[a]) {
        --members[label[a]];
        ++members[best];
        label[a] = best;
        moved = true;
      }
    }
    if (!moved) break;
  }
  return label;
}

std::vector<std::size_t> group_representatives(
    std::span<const Vertex> representatives,
    std::span<const std::uint32_t> pair_counts, std::size_t groups) {
  const std::size_t s = representatives.size();
  if (pair_counts.size() != s * s)
    throw ConfigError("pair counts must be |S| x |S|");
  // Cosine of reference rows; the diagonal holds each degree.
  std::vector<double> sim(s * s, 0.0);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) {
      const double da = pair_counts[a * s + a], db = pair_counts[b * s + b];
      if (a != b && da > 0 && db > 0)
        sim[a * s + b] = pair_counts[a * s + b] / std::sqrt(da * db);
    }
  return group_by_similarity(representatives, sim, groups);
}

BufferPhase::BufferPhase(std::span<const IncidenceEvent> buffer_events,
                         std::size_t n, const EgyptParams& params)
    : n_(n), slot_(n, -1), reference_slot_(n, -1) {
  const std::size_t b = buffer_events.size();
  if (b == 0) throw ConfigError("empty buffer");
  if (params.sample_size > b || params.reference_size > b)
    throw ConfigError("samples larger than the buffer");

  vertices_.reserve(b);
  adjacency_ = kernels::BitMatrix(b, b);
  for (std::size_t i = 0; i < b; ++i) {
    const IncidenceEvent& ev = buffer_events[i];
    if (ev.vertex >= n || slot_[ev.vertex] >= 0)
      throw ConfigError("buffer repeats or misnumbers a vertex");
    slot_[ev.vertex] = static_cast<std::int32_t>(i);
    vertices_.push_back(ev.vertex);
    for (Vertex u : ev.back_neighbors) {
      if (u >= n || slot_[u] < 0)
        throw ConfigError("buffer event lists a vertex that has not arrived");
      const auto j = static_cast<std::size_t>(slot_[u]);
      adjacency_.set(i, j);
      adjacency_.set(j, i);
    }
  }

  Rng sample_rng(mix_seed(params.sample_seed, {0}));
  std::sample(vertices_.begin(), vertices_.end(), std::back_inserter(sample_),
              static_cast<std::ptrdiff_t>(params.sample_size), sample_rng);
  Rng reference_rng(mix_seed(params.sample_seed, {1}));
  if (params.disjoint_samples) {
    std::vector<char> in_sample(b, 0);
    for (Vertex x : sample_) in_sample[slot(x)] = 1;
    std::vector<Vertex> rest;
    for (Vertex v : vertices_)
      if (!in_sample[slot(v)]) rest.push_back(v);
    std::sample(rest.begin(), rest.end(), std::back_inserter(reference_),
                static_cast<std::ptrdiff_t>(params.reference_size),
                reference_rng);
  } else {
    std::sample(vertices_.begin(), vertices_.end(),
                std::back_inserter(reference_),
                static_cast<std::ptrdiff_t>(params.reference_size),
                reference_rng);
  }
  for (std::size_t r = 0; r < reference_.size(); ++r)
    reference_slot_[reference_[r]] = static_cast<std::int32_t>(r);

  reference_rows_ = kernels::BitMatrix(b, reference_.size());
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t r = 0; r < reference_.size(); ++r)
      if (adjacency_.test(i, slot(reference_[r]))) reference_rows_.set(i, r);

  sample_rows_ = kernels::BitMatrix(sample_.size(), reference_.size());
  for (std::size_t s = 0; s < sample_.size(); ++s) {
    const std::size_t i = slot(sample_[s]);
    for (std::size_t r = 0; r < reference_.size(); ++r)
      if (reference_rows_.test(i, r)) sample_rows_.set(s, r);
  }
}

std::size_t BufferPhase::slot(Vertex v) const {
  const std::int32_t s = slot_.at(v);
  if (s < 0)
    throw ConfigError("vertex " + std::to_string(v) + " is not buffered");
  return static_cast<std::size_t>(s);
}

bool BufferPhase::adjacent(Vertex a, Vertex b) const {
  return adjacency_.test(slot(a), slot(b));
}

std::vector<Vertex> BufferPhase::buffer_neighbors(Vertex buffered) const {
  const std::size_t i = slot(buffered);
  std::vector<Vertex> out;
  for (std::size_t j = 0; j < vertices_.size(); ++j)
    if (adjacency_.test(i, j)) out.push_back(vertices_[j]);
  return out;
}

std::vector<std::uint64_t> BufferPhase::reference_bits(
    std::span<const Vertex> neighbors) const {
  std::vector<std::uint64_t> bits(reference_rows_.words_per_row(), 0);
  for (Vertex u : neighbors) {
    if (u >= n_) throw ConfigError("neighbor id out of range");
    const std::int32_t r = reference_slot_[u];
    if (r >= 0) bits[r / 64] |= std::uint64_t{1} << (r % 64);
  }
  return bits;
}

std::span<const std::uint64_t> BufferPhase::reference_row(
    Vertex buffered) const {
  return reference_rows_.row(slot(buffered));
}

void BufferPhase::sample_counts(std::span<const std::uint64_t> query,
                                std::span<std::uint32_t> out,
                                kernels::Backend backend) const {
  kernels::and_popcount(backend, query, sample_rows_, out);
}

std::vector<std::uint32_t> BufferPhase::sample_pair_counts() const {
  const std::size_t s = sample_.size();
  std::vector<std::uint32_t> counts(s * s, 0);
  for (std::size_t a = 0; a < s; ++a)
    kernels::and_popcount_serial(sample_rows_.row(a), sample_rows_,
                                 std::span(counts).subspan(a * s, s));
  return counts;
}

std::vector<double> BufferPhase::sample_similarity() const {
  const std::size_t s = sample_.size(), b = vertices_.size();
  std::vector<std::uint32_t> counts(b);
  std::vector<double> profile(s * b), norm(s, 0.0);
  for (std::size_t a = 0; a < s; ++a) {
    kernels::and_popcount_serial(sample_rows_.row(a), reference_rows_, counts);
    for (std::size_t u = 0; u < b; ++u) {
      profile[a * b + u] = counts[u];
      norm[a] += double(counts[u]) * counts[u];
    }
    norm[a] = std::sqrt(norm[a]);
  }
  std::vector<double> sim(s * s, 0.0);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t c = a + 1; c < s; ++c) {
      if (norm[a] == 0 || norm[c] == 0) continue;
      double dot = 0;
      for (std::size_t u = 0; u < b; ++u) dot += profile[a * b + u] * profile[c * b + u];
      sim[a * s + c] = sim[c * s + a] = dot / (norm[a] * norm[c]);
    }
  return sim;
}

ProbabilityEstimate BufferPhase::estimate_probabilities() const {
  ProbabilityEstimate est;
  const std::size_t b = vertices_.size();
  if (b >= 2) {
    std::size_t edges = 0;
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = i + 1; j < b; ++j) edges += adjacency_.test(i, j);
    est.q_hat = static_cast<double>(edges) /
                (static_cast<double>(b) * static_cast<double>(b - 1) / 2.0);
  }
  const std::size_t s = sample_.size();
  if (s >= 2 && !reference_.empty()) {
    const std::vector<std::uint32_t> pairs = sample_pair_counts();
    std::uint32_t best = 0;
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t c = a + 1; c < s; ++c) best = std::max(best, pairs[a * s + c]);
    const double density =
        static_cast<double>(best) / static_cast<double>(reference_.size());
    est.p_hat = std::sqrt(density);
  }
  est.p_hat = std::clamp(est.p_hat, est.q_hat, 1.0);
  return est;
}

namespace {

class Classifier {
 public:
  Classifier(const IncidenceStream& stream, std::size_t k,
             const EgyptParams& params, std::size_t capacity)
      : stream_(stream),
        k_(k),
        params_(params),
        state_(stream.size(), k, capacity),
        buffer_(std::span(stream).first(params.buffer), stream.size(), params),
        sample_(buffer_.sample().begin(), buffer_.sample().end()),
        owned_(k, 0),
        group_(group_by_similarity(sample_, buffer_.sample_similarity(), k)),
        group_machine_(k, kUnassigned),
        counts_(sample_.size(), 0),
        votes_(k, 0) {
    if (params_.mode == Mode::Threshold)
      threshold_ = acceptance_threshold(expected_same_cluster_count(
          params_.p_hat, params_.q_hat, k_, buffer_.reference().size(),
          params_.m_scale));
    // What Step 5 would conclude for each buffered vertex depends only on
    // buffer data, so it is known as soon as the buffer is full.
    buffer_group_.assign(params_.buffer, kNone);
    for (std::size_t i = 0; i < params_.buffer; ++i) {
      const Vertex v = stream_[i].vertex;
      const std::size_t own = sample_index(v);
      if (own != kNone && sample_.size() == 1) continue;
      buffer_.sample_counts(buffer_.reference_row(v), counts_, params_.backend);
      if (own != kNone) counts_[own] = 0;
      const Choice c = choose_representative(sample_, counts_, Mode::Argmax,
                                             0.0, own);
      if (counts_[c.index] > 0) buffer_group_[i] = group_[c.index];
    }
    result_.assignment.assign(stream.size(), kUnassigned);
    result_.representative.assign(stream.size(), kNoVertex);
    result_.sample = sample_;
    result_.reference.assign(buffer_.reference().begin(),
                             buffer_.reference().end());
    result_.representative_group = group_;
  }

  EgyptResult run() {
    // Step 1: hold buffered vertices round-robin.
    for (std::size_t i = 0; i < params_.buffer; ++i)
      state_.hold(stream_[i].vertex, static_cast<Machine>(i % k_));

    // Step 4: classify each later arrival on the spot.
    for (std::size_t i = params_.buffer; i < stream_.size(); ++i) {
      const IncidenceEvent& ev = stream_[i];
      const std::vector<std::uint64_t> query =
          buffer_.reference_bits(ev.back_neighbors);
      const Choice choice = classify(query, kNone);
      if (counts_[choice.index] == 0) {
        if (const std::size_t g = neighbor_vote(ev.back_neighbors); g != kNone) {
          commit(ev.vertex, group_machine(g));
          ++result_.zero_evidence;
          continue;
        }
      }
      const Machine machine = machine_for(choice.index);
      commit(ev.vertex, machine);
      result_.representative[ev.vertex] = sample_[choice.index];
      untag(choice.index, /*in_pass=*/true);
    }

    // Step 5: the buffered vertices nobody picked.
    for (Vertex v : buffer_.vertices()) {
      if (!state_.is_held(v)) continue;
      const std::size_t own = sample_index(v);
      if (own != kNone && sample_.size() == 1) {
        untag(own, false);
        continue;
      }
      const Choice choice = classify(buffer_.reference_row(v), own);
      if (counts_[choice.index] == 0) {
        const std::size_t g = neighbor_vote(buffer_.buffer_neighbors(v));
        if (g != kNone) {
          state_.release(v);
          commit(v, group_machine(g));
          ++result_.finalized;
          ++result_.zero_evidence;
          continue;
        }
      }
      const Machine machine = machine_for(choice.index);
      state_.release(v);
      commit(v, machine);
      result_.representative[v] = sample_[choice.index];
      ++result_.finalized;
      untag(choice.index, /*in_pass=*/false);
    }

    // A representative only ever chosen for itself is still held.
    for (std::size_t s = 0; s < sample_.size(); ++s)
      if (state_.is_held(sample_[s])) untag(s, false);

    for (Vertex v = 0; v < stream_.size(); ++v)
      result_.assignment[v] = state_.machine_of(v);
    result_.machines_bound = owned_count_;
    return std::move(result_);
  }

 private:
  static constexpr auto kNone = static_cast<std::size_t>(-1);

  Choice classify(std::span<const std::uint64_t> query, std::size_t exclude) {
    buffer_.sample_counts(query, counts_, params_.backend);
    const Choice choice = choose_representative(sample_, counts_, params_.mode,
                                                threshold_, exclude);
    if (choice.fallback) ++result_.threshold_fallbacks;
    return choice;
  }

  std::size_t sample_index(Vertex v) const {
    const auto it = std::find(sample_.begin(), sample_.end(), v);
    return it == sample_.end() ? kNone
                               : static_cast<std::size_t>(it - sample_.begin());
  }

  // Machine of representative `s`. Each representative group claims the
  // emptiest machine not yet owned the first time one of its members is
  // chosen; there are at most k groups, so a machine is always free.
  Machine machine_for(std::size_t s) { return group_machine(group_[s]); }

  Machine group_machine(std::size_t g) {
    if (group_machine_[g] != kUnassigned) return group_machine_[g];
    Machine machine = kUnassigned;
    for (Machine m = 0; m < k_; ++m) {
      if (owned_[m]) continue;
      if (machine == kUnassigned || state_.sizes()[m] < state_.sizes()[machine])
        machine = m;
    }
    owned_[machine] = 1;
    ++owned_count_;
    group_machine_[g] = machine;
    return machine;
  }

  // Majority group among buffered back-neighbors whose own classification
  // found evidence; lowest group on ties, kNone without any vote.
  std::size_t neighbor_vote(std::span<const Vertex> neighbors) {
    std::fill(votes_.begin(), votes_.end(), 0);
    bool any = false;
    for (Vertex u : neighbors) {
      if (!buffer_.is_buffered(u)) continue;
      const std::size_t g = buffer_group_[buffer_.slot(u)];
      if (g == kNone) continue;
      ++votes_[g];
      any = true;
    }
    if (!any) return kNone;
    return static_cast<std::size_t>(
        std::max_element(votes_.begin(), votes_.end()) - votes_.begin());
  }

  void commit(Vertex v, Machine machine) {
    if (state_.try_place(v, machine)) return;
    const auto spare = state_.least_loaded_with_room();
    if (!spare) throw CapacityError("every machine is at capacity");
    state_.place(v, *spare);
    ++result_.overflow_events;
  }

  // Removes the non-classified tag from representative `s`.
  void untag(std::size_t s, bool in_pass) {
    const Vertex x = sample_[s];
    if (!state_.is_held(x)) return;
    state_.release(x);
    commit(x, machine_for(s));
    if (result_.representative[x] == kNoVertex) result_.representative[x] = x;
    if (in_pass) ++result_.tagged_in_pass;
  }

  const IncidenceStream& stream_;
  std::size_t k_;
  EgyptParams params_;
  PartitionState state_;
  BufferPhase buffer_;
  std::vector<Vertex> sample_;
  std::vector<char> owned_;
  std::size_t owned_count_ = 0;
  std::vector<std::size_t> group_;
  std::vector<Machine> group_machine_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::size_t> buffer_group_;
  std::vector<std::size_t> votes_;
  double threshold_ = 0.0;
  EgyptResult result_;
};

}  // namespace

EgyptResult run_egypt(const IncidenceStream& stream, std::size_t k,
                      const EgyptParams& params, std::size_t capacity) {
  const EgyptParams resolved = resolve_params(params, stream.size(), k);
  Classifier classifier(stream, k, resolved, capacity);
  return classifier.run();
}

}  // namespace sgp
